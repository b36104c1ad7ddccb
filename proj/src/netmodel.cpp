#include "cnup/netmodel.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <unordered_set>

#include "json.hpp"

namespace cnup {

namespace {

using nlohmann::json;

const char* label_text(EdgeLabel l) {
  switch (l) {
    case EdgeLabel::InitialOnly: return "i";
    case EdgeLabel::FinalOnly: return "f";
    case EdgeLabel::Both: return "both";
  }
  return "?";
}

EdgeLabel label_from_text(const std::string& s) {
  if (s == "i") return EdgeLabel::InitialOnly;
  if (s == "f") return EdgeLabel::FinalOnly;
  if (s == "both") return EdgeLabel::Both;
  throw InstanceError("edge label must be one of \"i\", \"f\", \"both\", got \"" + s + "\"");
}

// Kahn pass over one configuration; returns false when a cycle remains.
bool configuration_acyclic(std::size_t node_count, const std::vector<Edge>& edges,
                           bool initial) {
  std::vector<std::uint32_t> indeg(node_count, 0);
  for (const Edge& e : edges) {
    bool member = initial ? label_in_initial(e.label) : label_in_final(e.label);
    if (member) ++indeg[e.to];
  }
  std::vector<NodeIndex> stack;
  for (NodeIndex n = 0; n < node_count; ++n)
    if (indeg[n] == 0) stack.push_back(n);
  std::size_t seen = 0;
  // adjacency on the fly: edge list is small enough to scan per node via
  // a prebuilt bucket
  std::vector<std::vector<NodeIndex>> succ(node_count);
  for (const Edge& e : edges) {
    bool member = initial ? label_in_initial(e.label) : label_in_final(e.label);
    if (member) succ[e.from].push_back(e.to);
  }
  while (!stack.empty()) {
    NodeIndex n = stack.back();
    stack.pop_back();
    ++seen;
    for (NodeIndex v : succ[n])
      if (--indeg[v] == 0) stack.push_back(v);
  }
  return seen == node_count;
}

}  // namespace

std::size_t Configuration::count() const {
  std::size_t c = 0;
  for (std::uint64_t w : words_) c += std::popcount(w);
  return c;
}

NetworkInstance NetworkInstance::create(const TopologyDraft& draft,
                                        const std::string& source,
                                        std::optional<std::string> master) {
  NetworkInstance inst;
  inst.names_ = draft.nodes;
  for (const std::string& n : inst.names_)
    if (n.empty()) throw InstanceError("node ids must be nonempty");
  std::sort(inst.names_.begin(), inst.names_.end());
  for (std::size_t i = 1; i < inst.names_.size(); ++i)
    if (inst.names_[i] == inst.names_[i - 1])
      throw InstanceError("duplicate node id \"" + inst.names_[i] + "\"");

  auto idx = [&](const std::string& name, const char* what) -> NodeIndex {
    auto it = std::lower_bound(inst.names_.begin(), inst.names_.end(), name);
    if (it == inst.names_.end() || *it != name)
      throw InstanceError(std::string(what) + " references unknown node \"" + name + "\"");
    return static_cast<NodeIndex>(it - inst.names_.begin());
  };

  inst.source_ = idx(source, "source");
  if (master) inst.master_ = idx(*master, "master");

  for (const auto& de : draft.edges) {
    NodeIndex from = idx(de.from, "edge");
    NodeIndex to = idx(de.to, "edge");
    if (from == to)
      throw InstanceError("self-loop at node \"" + de.from + "\"");
    inst.edges_.push_back(Edge{from, to, de.label});
  }
  std::sort(inst.edges_.begin(), inst.edges_.end(),
            [](const Edge& a, const Edge& b) {
              return a.from != b.from ? a.from < b.from : a.to < b.to;
            });
  for (std::size_t i = 1; i < inst.edges_.size(); ++i)
    if (inst.edges_[i].from == inst.edges_[i - 1].from &&
        inst.edges_[i].to == inst.edges_[i - 1].to)
      throw InstanceError("duplicate edge " + inst.names_[inst.edges_[i].from] +
                          " -> " + inst.names_[inst.edges_[i].to]);

  std::size_t n = inst.names_.size();
  inst.out_all_.resize(n);
  inst.in_all_.resize(n);
  inst.out_initial_.resize(n);
  inst.out_final_.resize(n);
  inst.config_initial_ = Configuration(inst.edges_.size());
  inst.config_final_ = Configuration(inst.edges_.size());
  for (EdgeId e = 0; e < inst.edges_.size(); ++e) {
    const Edge& ed = inst.edges_[e];
    inst.out_all_[ed.from].push_back(e);
    inst.in_all_[ed.to].push_back(e);
    if (label_in_initial(ed.label)) {
      inst.out_initial_[ed.from].push_back(e);
      inst.config_initial_.insert(e);
    }
    if (label_in_final(ed.label)) {
      inst.out_final_[ed.from].push_back(e);
      inst.config_final_.insert(e);
    }
  }

  for (EdgeId e : inst.in_all_[inst.source_]) {
    const Edge& ed = inst.edges_[e];
    if (label_in_initial(ed.label))
      throw InstanceError("source \"" + inst.names_[inst.source_] +
                          "\" has an incoming edge in the initial configuration");
    throw InstanceError("source \"" + inst.names_[inst.source_] +
                        "\" has an incoming edge in the final configuration");
  }
  if (!configuration_acyclic(n, inst.edges_, true))
    throw InstanceError("cycle in initial configuration");
  if (!configuration_acyclic(n, inst.edges_, false))
    throw InstanceError("cycle in final configuration");

  inst.changed_mask_.assign(n, 0);
  for (NodeIndex u = 0; u < n; ++u) {
    if (inst.out_initial_[u] != inst.out_final_[u]) {
      inst.changed_.push_back(u);
      inst.changed_mask_[u] = 1;
    }
  }
  return inst;
}

std::optional<NodeIndex> NetworkInstance::index_of(std::string_view name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) return std::nullopt;
  return static_cast<NodeIndex>(it - names_.begin());
}

NodeIndex NetworkInstance::require_index(std::string_view name) const {
  auto i = index_of(name);
  if (!i) throw InstanceError("unknown node \"" + std::string(name) + "\"");
  return *i;
}

std::vector<Edge> out(const NetworkInstance& inst, const Configuration& c, NodeIndex u) {
  if (u >= inst.node_count()) throw InstanceError("node index out of range");
  std::vector<Edge> result;
  for (EdgeId e : inst.out_all(u))
    if (c.contains(e)) result.push_back(inst.edge(e));
  return result;
}

std::vector<Edge> out(const NetworkInstance& inst, const Configuration& c,
                      std::string_view node) {
  return out(inst, c, inst.require_index(node));
}

Configuration upd1(const NetworkInstance& inst, const Configuration& c, NodeIndex u) {
  if (u >= inst.node_count()) throw InstanceError("node index out of range");
  Configuration r = c;
  for (EdgeId e : inst.out_initial(u)) r.erase(e);
  for (EdgeId e : inst.out_final(u)) r.insert(e);
  return r;
}

Configuration upd1(const NetworkInstance& inst, const Configuration& c,
                   std::string_view node) {
  return upd1(inst, c, inst.require_index(node));
}

Configuration upd(const NetworkInstance& inst, Configuration c,
                  std::span<const NodeIndex> seq) {
  std::vector<std::uint8_t> seen(inst.node_count(), 0);
  for (NodeIndex u : seq) {
    if (u >= inst.node_count()) throw InstanceError("node index out of range");
    if (seen[u]) throw InstanceError("repeated node \"" + inst.name(u) + "\" in update sequence");
    seen[u] = 1;
    c = upd1(inst, c, u);
  }
  return c;
}

Configuration upd(const NetworkInstance& inst, Configuration c,
                  std::span<const std::string> seq) {
  std::vector<NodeIndex> ids;
  ids.reserve(seq.size());
  for (const std::string& s : seq) ids.push_back(inst.require_index(s));
  return upd(inst, std::move(c), ids);
}

namespace {

json parse_json_or_throw(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InstanceError(std::string("invalid JSON: ") + e.what());
  }
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok)
      throw InstanceError(std::string("unknown field \"") + it.key() + "\" in " + where);
  }
}

std::string fresh_master_name(const std::vector<std::string>& nodes) {
  std::set<std::string> taken(nodes.begin(), nodes.end());
  if (!taken.count("master")) return "master";
  for (int k = 2;; ++k) {
    std::string cand = "master_" + std::to_string(k);
    if (!taken.count(cand)) return cand;
  }
}

}  // namespace

NetworkInstance reduce_multi_source(const std::vector<std::string>& sources,
                                    const TopologyDraft& draft) {
  if (sources.empty()) throw InstanceError("sources list is empty");
  std::set<std::string> uniq(sources.begin(), sources.end());
  if (uniq.size() != sources.size())
    throw InstanceError("duplicate entry in sources list");
  std::set<std::string> known(draft.nodes.begin(), draft.nodes.end());
  for (const std::string& s : sources)
    if (!known.count(s)) throw InstanceError("sources references unknown node \"" + s + "\"");
  for (const auto& e : draft.edges)
    if (uniq.count(e.to))
      throw InstanceError("declared source \"" + e.to + "\" has incoming edges");

  if (sources.size() == 1) return NetworkInstance::create(draft, sources.front());

  TopologyDraft reduced = draft;
  std::string master = fresh_master_name(draft.nodes);
  reduced.nodes.push_back(master);
  for (const std::string& s : sources)
    reduced.edges.push_back({master, s, EdgeLabel::Both});
  return NetworkInstance::create(reduced, master, master);
}

NetworkInstance parse_instance(std::string_view text, MultiSourcePolicy policy) {
  json doc = parse_json_or_throw(text);
  if (!doc.is_object()) throw InstanceError("instance must be a JSON object");
  reject_unknown_keys(doc, {"nodes", "source", "sources", "edges", "master"}, "instance");

  if (!doc.contains("nodes") || !doc["nodes"].is_array())
    throw InstanceError("missing or malformed \"nodes\" list");
  TopologyDraft draft;
  for (const json& n : doc["nodes"]) {
    if (!n.is_string()) throw InstanceError("node ids must be strings");
    draft.nodes.push_back(n.get<std::string>());
  }

  if (!doc.contains("edges") || !doc["edges"].is_array())
    throw InstanceError("missing or malformed \"edges\" list");
  for (const json& e : doc["edges"]) {
    if (!e.is_object()) throw InstanceError("edges must be objects");
    reject_unknown_keys(e, {"from", "to", "in"}, "edge");
    if (!e.contains("from") || !e.contains("to") || !e.contains("in"))
      throw InstanceError("edge needs \"from\", \"to\" and \"in\"");
    if (!e["from"].is_string() || !e["to"].is_string() || !e["in"].is_string())
      throw InstanceError("edge fields must be strings");
    draft.edges.push_back({e["from"].get<std::string>(), e["to"].get<std::string>(),
                           label_from_text(e["in"].get<std::string>())});
  }

  bool has_source = doc.contains("source");
  bool has_sources = doc.contains("sources");
  if (has_source == has_sources)
    throw InstanceError("exactly one of \"source\" or \"sources\" is required");

  if (has_source) {
    if (!doc["source"].is_string()) throw InstanceError("\"source\" must be a string");
    std::string source = doc["source"].get<std::string>();
    std::optional<std::string> master;
    if (doc.contains("master")) {
      if (!doc["master"].is_string()) throw InstanceError("\"master\" must be a string");
      master = doc["master"].get<std::string>();
      if (*master != source)
        throw InstanceError("\"master\" must name the designated source");
    }
    return NetworkInstance::create(draft, source, master);
  }

  if (doc.contains("master"))
    throw InstanceError("\"master\" is only valid with \"source\"");
  if (!doc["sources"].is_array() || doc["sources"].empty())
    throw InstanceError("\"sources\" must be a nonempty list");
  std::vector<std::string> sources;
  for (const json& s : doc["sources"]) {
    if (!s.is_string()) throw InstanceError("source ids must be strings");
    sources.push_back(s.get<std::string>());
  }
  if (sources.size() > 1 && policy == MultiSourcePolicy::Reject)
    throw InstanceError("multiple sources require the multi-source reduction");
  return reduce_multi_source(sources, draft);
}

std::string serialize_instance(const NetworkInstance& inst) {
  json doc;
  json nodes = json::array();
  for (NodeIndex n = 0; n < inst.node_count(); ++n) nodes.push_back(inst.name(n));
  doc["nodes"] = nodes;
  doc["source"] = inst.name(inst.source());
  if (inst.master()) doc["master"] = inst.name(*inst.master());
  json edges = json::array();
  for (const Edge& e : inst.edges()) {
    edges.push_back(json{{"from", inst.name(e.from)},
                         {"to", inst.name(e.to)},
                         {"in", label_text(e.label)}});
  }
  doc["edges"] = edges;
  return doc.dump(2) + "\n";
}

}  // namespace cnup
