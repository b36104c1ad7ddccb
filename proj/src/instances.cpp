#include "cnup/instances.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <random>

namespace cnup {

namespace {

constexpr const char* kFig1 = R"({
  "nodes": ["A", "B", "C", "D", "H1", "H2"],
  "source": "H1",
  "edges": [
    {"from": "A", "to": "C", "in": "i"},
    {"from": "A", "to": "D", "in": "f"},
    {"from": "B", "to": "H2", "in": "both"},
    {"from": "C", "to": "B", "in": "both"},
    {"from": "D", "to": "B", "in": "f"},
    {"from": "H1", "to": "A", "in": "both"}
  ]
}
)";

constexpr const char* kFig2 = R"({
  "nodes": ["A", "B", "C", "D", "E", "H1", "H2"],
  "source": "H1",
  "edges": [
    {"from": "A", "to": "C", "in": "f"},
    {"from": "B", "to": "C", "in": "i"},
    {"from": "C", "to": "D", "in": "f"},
    {"from": "C", "to": "E", "in": "i"},
    {"from": "D", "to": "H2", "in": "f"},
    {"from": "E", "to": "H2", "in": "i"},
    {"from": "H1", "to": "A", "in": "f"},
    {"from": "H1", "to": "B", "in": "i"}
  ]
}
)";

constexpr const char* kFig4 = R"({
  "nodes": ["A", "B", "C", "D", "E", "F", "G", "H", "H1", "H2", "I", "J", "K", "L", "M"],
  "source": "H1",
  "edges": [
    {"from": "A", "to": "B", "in": "both"},
    {"from": "A", "to": "C", "in": "both"},
    {"from": "B", "to": "D", "in": "i"},
    {"from": "B", "to": "L", "in": "f"},
    {"from": "C", "to": "D", "in": "f"},
    {"from": "C", "to": "M", "in": "i"},
    {"from": "D", "to": "E", "in": "i"},
    {"from": "D", "to": "F", "in": "f"},
    {"from": "E", "to": "G", "in": "i"},
    {"from": "F", "to": "G", "in": "f"},
    {"from": "G", "to": "H", "in": "i"},
    {"from": "G", "to": "I", "in": "f"},
    {"from": "H", "to": "J", "in": "i"},
    {"from": "H1", "to": "A", "in": "both"},
    {"from": "I", "to": "J", "in": "f"},
    {"from": "J", "to": "K", "in": "both"},
    {"from": "K", "to": "H2", "in": "both"},
    {"from": "L", "to": "K", "in": "f"},
    {"from": "M", "to": "K", "in": "both"}
  ]
}
)";

constexpr const char* kFig5 = R"({
  "nodes": ["A", "B", "C", "H1", "TA", "TB1", "TB2", "TC"],
  "source": "H1",
  "edges": [
    {"from": "A", "to": "B", "in": "i"},
    {"from": "A", "to": "TA", "in": "f"},
    {"from": "B", "to": "TB1", "in": "i"},
    {"from": "B", "to": "TB2", "in": "f"},
    {"from": "C", "to": "B", "in": "f"},
    {"from": "C", "to": "TC", "in": "i"},
    {"from": "H1", "to": "A", "in": "both"},
    {"from": "H1", "to": "B", "in": "both"},
    {"from": "H1", "to": "C", "in": "both"}
  ]
}
)";

constexpr const char* kFig6 = R"({
  "nodes": ["A1", "A2", "B1", "B2", "C1", "C2", "HA", "HB", "HC"],
  "sources": ["HA", "HB", "HC"],
  "edges": [
    {"from": "HA", "to": "A1", "in": "i"},
    {"from": "HA", "to": "A2", "in": "f"},
    {"from": "HB", "to": "B1", "in": "i"},
    {"from": "HB", "to": "B2", "in": "f"},
    {"from": "HC", "to": "C1", "in": "i"},
    {"from": "HC", "to": "C2", "in": "f"}
  ]
}
)";

Fixture make_fixture(std::string name, const char* text, bool solvable,
                     std::optional<int> min_rounds, std::string notes) {
  return Fixture{std::move(name), text, parse_instance(text, MultiSourcePolicy::Reduce),
                 solvable, min_rounds, std::move(notes)};
}

std::vector<Fixture> build_fixtures() {
  std::vector<Fixture> fs;
  fs.push_back(make_fixture("fig1_trivial", kFig1, true, 2,
                            "draining a switch: the freshly installed detour must be "
                            "ready before traffic is steered onto it"));
  fs.push_back(make_fixture("fig2_double_diamond", kFig2, false, std::nullopt,
                            "minimal unsolvable shape: the source needs the downstream "
                            "path ready first, the middle switch needs the upstream one"));
  fs.push_back(make_fixture("fig4_removable_dd", kFig4, true, 4,
                            "a double diamond that one early update disconnects; "
                            "minimal round count confirmed by exhaustive search"));
  fs.push_back(make_fixture("fig5_wait_example", kFig5, true, 3,
                            "three switches forcing two distinct waits; minimal round "
                            "count confirmed by exhaustive search"));
  fs.push_back(make_fixture("fig6_multi_source", kFig6, true, 1,
                            "three independent sources behind the synthesized master; "
                            "all updates land in one round"));
  return fs;
}

}  // namespace

const std::vector<Fixture>& all_fixtures() {
  static const std::vector<Fixture> fixtures = build_fixtures();
  return fixtures;
}

const Fixture& fixture(std::string_view name) {
  for (const Fixture& f : all_fixtures())
    if (f.name == name) return f;
  throw InstanceError("unknown fixture \"" + std::string(name) + "\"");
}

std::vector<std::string> fixture_names() {
  std::vector<std::string> names;
  for (const Fixture& f : all_fixtures()) names.push_back(f.name);
  return names;
}

namespace {

// Thin deterministic helpers over mt19937_64; avoids distribution classes,
// whose output is implementation-defined.
struct Rng {
  std::mt19937_64 engine;

  explicit Rng(std::uint64_t seed) : engine(seed) {}

  std::uint64_t bounded(std::uint64_t n) { return engine() % n; }
  bool chance(double p) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53 < p;
  }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[bounded(i)]);
  }
};

std::string node_name(int i) {
  if (i == 0) return "H1";
  char buf[8];
  std::snprintf(buf, sizeof buf, "N%03d", i);
  return buf;
}

}  // namespace

NetworkInstance generate_random(int nodes, double density, std::uint64_t seed,
                                GenMode mode) {
  if (nodes < 2) throw InstanceError("generator needs at least 2 nodes");
  if (!(density > 0.0) || density > 1.0)
    throw InstanceError("generator density must be in (0, 1]");

  Rng rng(seed);
  TopologyDraft draft;
  for (int i = 0; i < nodes; ++i) draft.nodes.push_back(node_name(i));

  // position 0 is always the source, so it never gains an incoming edge
  auto sample_order = [&]() {
    std::vector<int> order(nodes);
    for (int i = 0; i < nodes; ++i) order[i] = i;
    std::vector<int> tail(order.begin() + 1, order.end());
    rng.shuffle(tail);
    std::copy(tail.begin(), tail.end(), order.begin() + 1);
    return order;
  };

  std::map<std::pair<int, int>, int> membership;  // 1 = initial, 2 = final
  auto sample_config = [&](const std::vector<int>& order, int flag) {
    for (int i = 0; i < nodes; ++i)
      for (int j = i + 1; j < nodes; ++j)
        if (rng.chance(density)) membership[{order[i], order[j]}] |= flag;
  };

  if (mode == GenMode::Independent) {
    sample_config(sample_order(), 1);
    sample_config(sample_order(), 2);
  } else {
    std::vector<int> order = sample_order();
    std::vector<int> position(nodes);
    for (int i = 0; i < nodes; ++i) position[order[i]] = i;
    sample_config(order, 1);
    for (auto& [edge, flags] : membership) flags |= 2;  // final starts as a copy
    // rewire the out-edges of a few non-source nodes, forward in the same
    // order so the result stays acyclic
    int rewired = std::max(1, nodes / 3);
    std::vector<int> pool(order.begin() + 1, order.end());
    rng.shuffle(pool);
    pool.resize(rewired);
    for (int u : pool) {
      for (auto& [edge, flags] : membership)
        if (edge.first == u) flags &= ~2;
      for (int j = position[u] + 1; j < nodes; ++j)
        if (rng.chance(density)) membership[{u, order[j]}] |= 2;
    }
  }

  for (auto it = membership.begin(); it != membership.end();) {
    if (it->second == 0) {
      it = membership.erase(it);
      continue;
    }
    EdgeLabel label = it->second == 1   ? EdgeLabel::InitialOnly
                      : it->second == 2 ? EdgeLabel::FinalOnly
                                        : EdgeLabel::Both;
    draft.edges.push_back(
        {node_name(it->first.first), node_name(it->first.second), label});
    ++it;
  }
  return NetworkInstance::create(draft, "H1");
}

}  // namespace cnup
