#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "cnup/netmodel.hpp"

namespace cnup::test {

// Compact instance builder for hand-written cases: edges as
// (from, to, "i"/"f"/"both").
inline NetworkInstance make_instance(
    std::vector<std::string> nodes, const std::string& source,
    const std::vector<std::tuple<std::string, std::string, std::string>>& edges) {
  TopologyDraft draft;
  draft.nodes = std::move(nodes);
  for (const auto& [from, to, in] : edges) {
    EdgeLabel label = in == "i"    ? EdgeLabel::InitialOnly
                      : in == "f"  ? EdgeLabel::FinalOnly
                                   : EdgeLabel::Both;
    draft.edges.push_back({from, to, label});
  }
  return NetworkInstance::create(draft, source);
}

inline std::vector<std::string> edge_names(const NetworkInstance& inst,
                                           const std::vector<Edge>& edges) {
  std::vector<std::string> out;
  for (const Edge& e : edges)
    out.push_back(inst.name(e.from) + "->" + inst.name(e.to));
  return out;
}

}  // namespace cnup::test
