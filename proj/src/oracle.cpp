#include "cnup/oracle.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>

namespace cnup {

namespace enumeration {

namespace {

constexpr std::size_t kPathBudget = 1u << 20;

// Walks every maximal path from `start`, invoking `fn(edge-ids, end-node)`
// per finite path. Returns false when an infinite path exists (a cycle is
// reachable from `start`). `fn` may return false to stop early.
template <typename Fn>
bool for_each_max_path(const NetworkInstance& inst, const Configuration& c,
                       NodeIndex start, Fn&& fn, bool* stopped = nullptr) {
  std::vector<std::uint8_t> on_path(inst.node_count(), 0);
  std::vector<EdgeId> path;
  std::size_t emitted = 0;
  bool infinite = false;
  bool stop = false;

  auto rec = [&](auto&& self, NodeIndex u) -> void {
    if (stop) return;
    if (on_path[u]) {
      infinite = true;
      return;
    }
    on_path[u] = 1;
    bool extended = false;
    for (EdgeId e : inst.out_all(u)) {
      if (!c.contains(e)) continue;
      extended = true;
      path.push_back(e);
      self(self, inst.edge(e).to);
      path.pop_back();
      if (stop) break;
    }
    if (!extended) {
      if (++emitted > kPathBudget)
        throw OracleError("path enumeration budget exceeded");
      if (!fn(path, u)) stop = true;
    }
    on_path[u] = 0;
  };
  rec(rec, start);
  if (stopped) *stopped = stop;
  return !infinite;
}

bool path_initial_max(const NetworkInstance& inst, const std::vector<EdgeId>& path,
                      NodeIndex end) {
  for (EdgeId e : path)
    if (!inst.edge_in_initial(e)) return false;
  return inst.out_initial(end).empty();
}

bool path_final_max(const NetworkInstance& inst, const std::vector<EdgeId>& path,
                    NodeIndex end) {
  for (EdgeId e : path)
    if (!inst.edge_in_final(e)) return false;
  return inst.out_final(end).empty();
}

}  // namespace

bool consistent(const NetworkInstance& inst, const Configuration& c) {
  bool all_ok = true;
  bool finite = for_each_max_path(
      inst, c, inst.source(),
      [&](const std::vector<EdgeId>& path, NodeIndex end) {
        if (!path_initial_max(inst, path, end) && !path_final_max(inst, path, end)) {
          all_ok = false;
          return false;
        }
        return true;
      });
  return finite && all_ok;
}

std::optional<Witness> inconsistency_witness(const NetworkInstance& inst,
                                             const Configuration& c) {
  // A second pass that records the offending path; cycles are reported as a
  // walk to a node already on the path.
  std::optional<Witness> found;
  std::vector<std::uint8_t> on_path(inst.node_count(), 0);
  std::vector<NodeIndex> nodes{inst.source()};
  std::vector<EdgeId> path;

  auto rec = [&](auto&& self, NodeIndex u) -> void {
    if (found) return;
    if (on_path[u]) {
      found = Witness{nodes, true};
      return;
    }
    on_path[u] = 1;
    bool extended = false;
    for (EdgeId e : inst.out_all(u)) {
      if (!c.contains(e)) continue;
      extended = true;
      path.push_back(e);
      nodes.push_back(inst.edge(e).to);
      self(self, inst.edge(e).to);
      nodes.pop_back();
      path.pop_back();
      if (found) break;
    }
    if (!extended && !path_initial_max(inst, path, u) && !path_final_max(inst, path, u))
      found = Witness{nodes, false};
    on_path[u] = 0;
  };
  rec(rec, inst.source());
  return found;
}

DownMark downmark_at(const NetworkInstance& inst, const Configuration& c, NodeIndex u) {
  DownMark m;
  m.all_initial_max = m.all_final_max = m.all_either_max = m.all_both_max = true;
  bool finite = for_each_max_path(
      inst, c, u,
      [&](const std::vector<EdgeId>& path, NodeIndex end) {
        bool im = path_initial_max(inst, path, end);
        bool fm = path_final_max(inst, path, end);
        m.all_initial_max = m.all_initial_max && im;
        m.all_final_max = m.all_final_max && fm;
        m.all_either_max = m.all_either_max && (im || fm);
        m.all_both_max = m.all_both_max && im && fm;
        return true;
      });
  if (!finite) return DownMark{};
  return m;
}

std::vector<DownMark> downmarks(const NetworkInstance& inst, const Configuration& c) {
  std::vector<DownMark> result;
  result.reserve(inst.node_count());
  for (NodeIndex u = 0; u < inst.node_count(); ++u)
    result.push_back(downmark_at(inst, c, u));
  return result;
}

std::vector<UpstreamClass> classify(const NetworkInstance& inst, const Configuration& c) {
  const std::size_t n = inst.node_count();
  // seen[u] bit 0: some all-initial-and-all-final path, bit 1: initial-only,
  // bit 2: final-only, bit 3: neither
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::uint8_t> on_path(n, 0);
  bool cyclic = false;

  auto rec = [&](auto&& self, NodeIndex u, bool all_i, bool all_f) -> void {
    if (cyclic) return;
    if (on_path[u]) {
      cyclic = true;
      return;
    }
    std::uint8_t bucket = all_i && all_f ? 1 : all_i ? 2 : all_f ? 4 : 8;
    seen[u] |= bucket;
    on_path[u] = 1;
    for (EdgeId e : inst.out_all(u)) {
      if (!c.contains(e)) continue;
      const Edge& ed = inst.edge(e);
      self(self, ed.to, all_i && label_in_initial(ed.label),
           all_f && label_in_final(ed.label));
      if (cyclic) break;
    }
    on_path[u] = 0;
  };
  rec(rec, inst.source(), true, true);
  if (cyclic) throw AnalysisError("cycle reachable from the source");

  std::vector<UpstreamClass> result(n);
  for (NodeIndex u = 0; u < n; ++u) {
    UpstreamClass uc;
    uc.anomalous = seen[u] & 8;
    bool only_i = seen[u] & 2, only_f = seen[u] & 4;
    if (!seen[u])
      uc.kind = UpstreamKind::TypeA;
    else if (only_i && only_f)
      uc.kind = UpstreamKind::TypeE;
    else if (only_i)
      uc.kind = UpstreamKind::TypeD;
    else if (only_f)
      uc.kind = UpstreamKind::TypeC;
    else
      uc.kind = UpstreamKind::TypeB;
    result[u] = uc;
  }
  return result;
}

namespace {

bool downstream_condition_enum(const NetworkInstance& inst, UpstreamKind kind,
                               NodeIndex u, const DownMark& post) {
  switch (kind) {
    case UpstreamKind::TypeA:
      return inst.out_final(u).empty() || post.all_final_max;
    case UpstreamKind::TypeB:
      return post.all_either_max;
    case UpstreamKind::TypeC:
      return post.all_final_max;
    case UpstreamKind::TypeD:
      return post.all_initial_max;
    case UpstreamKind::TypeE:
      return post.all_both_max;
  }
  return false;
}

}  // namespace

bool node_valid(const NetworkInstance& inst, const Configuration& c, NodeIndex u) {
  auto classes = classify(inst, c);
  DownMark post = downmark_at(inst, upd1(inst, c, u), u);
  return downstream_condition_enum(inst, classes[u].kind, u, post);
}

bool node_safe(const NetworkInstance& inst, const Configuration& c, NodeIndex u) {
  return consistent(inst, upd1(inst, c, u));
}

}  // namespace enumeration

namespace {

struct ConfigHash {
  std::size_t operator()(const std::vector<std::uint64_t>& words) const {
    std::size_t h = 0xcbf29ce484222325ull;
    for (std::uint64_t w : words) {
      h ^= w;
      h *= 0x100000001b3ull;
    }
    return h;
  }
};

std::vector<std::string> witness_names(const NetworkInstance& inst, const Witness& w) {
  std::vector<std::string> names;
  names.reserve(w.path.size());
  for (NodeIndex n : w.path) names.push_back(inst.name(n));
  return names;
}

// Shared machinery for verify_plan and the searches: cached enumeration
// consistency keyed by edge set.
struct ConsistencyCache {
  const NetworkInstance& inst;
  std::unordered_map<std::vector<std::uint64_t>, bool, ConfigHash> cache;

  explicit ConsistencyCache(const NetworkInstance& i) : inst(i) {}

  bool consistent(const Configuration& c) {
    auto [it, fresh] = cache.try_emplace(c.words(), false);
    if (fresh) it->second = enumeration::consistent(inst, c);
    return it->second;
  }
};

Configuration apply_nodes(const NetworkInstance& inst, Configuration c,
                          const std::vector<NodeIndex>& nodes, std::uint32_t mask) {
  for (std::size_t k = 0; k < nodes.size(); ++k)
    if (mask & (1u << k)) c = upd1(inst, c, nodes[k]);
  return c;
}

Configuration union_after(const NetworkInstance& inst, Configuration base,
                          const std::vector<NodeIndex>& nodes, std::uint32_t window) {
  for (std::size_t k = 0; k < nodes.size(); ++k)
    if (window & (1u << k))
      for (EdgeId e : inst.out_final(nodes[k])) base.insert(e);
  return base;
}

}  // namespace

VerifyResult verify_plan(const NetworkInstance& inst, const WaitedPlan& plan) {
  if (plan.status != WaitedPlan::Status::Solved)
    throw InstanceError("verify_plan: plan status is not Solved");

  VerifyResult result;
  std::vector<std::vector<NodeIndex>> rounds;
  std::vector<std::uint8_t> seen(inst.node_count(), 0);
  for (std::size_t r = 0; r < plan.rounds.size(); ++r) {
    if (plan.rounds[r].empty()) {
      result.violation = PlanViolation{"partition", "round " + std::to_string(r + 1) + " is empty", {}, false};
      result.regime = "exhaustive";
      return result;
    }
    std::vector<NodeIndex> round;
    for (const std::string& name : plan.rounds[r]) {
      NodeIndex u = inst.require_index(name);
      if (!inst.is_changed(u)) continue;  // no-op updates are harmless
      if (seen[u]) {
        result.violation =
            PlanViolation{"partition", "node " + name + " updated twice", {}, false};
        result.regime = "exhaustive";
        return result;
      }
      seen[u] = 1;
      round.push_back(u);
    }
    if (!round.empty()) rounds.push_back(std::move(round));
  }
  for (NodeIndex u : inst.changed_nodes()) {
    if (!seen[u]) {
      result.violation = PlanViolation{
          "partition", "changed node " + inst.name(u) + " missing from plan", {}, false};
      result.regime = "exhaustive";
      return result;
    }
  }

  std::size_t largest = 0;
  for (const auto& r : rounds) largest = std::max(largest, r.size());
  bool exhaustive = largest <= 6;
  result.regime = exhaustive ? "exhaustive" : "sampled";
  ConsistencyCache cache(inst);

  auto prefix_violation = [&](std::size_t round_no, const Configuration& cfg,
                              const std::string& after) -> bool {
    if (cache.consistent(cfg)) return false;
    auto w = enumeration::inconsistency_witness(inst, cfg);
    result.violation = PlanViolation{"prefix",
                                     "round " + std::to_string(round_no + 1) + ", " + after,
                                     w ? witness_names(inst, *w) : std::vector<std::string>{},
                                     w ? w->cycle : false};
    return true;
  };
  auto union_violation = [&](std::size_t round_no, const Configuration& cfg,
                             const std::string& where) -> bool {
    if (cache.consistent(cfg)) return false;
    auto w = enumeration::inconsistency_witness(inst, cfg);
    result.violation = PlanViolation{"union",
                                     "round " + std::to_string(round_no + 1) + ", " + where,
                                     w ? witness_names(inst, *w) : std::vector<std::string>{},
                                     w ? w->cycle : false};
    return true;
  };

  auto subset_names = [&](const std::vector<NodeIndex>& round, std::uint32_t mask) {
    std::string s = "{";
    for (std::size_t k = 0; k < round.size(); ++k)
      if (mask & (1u << k)) {
        if (s.size() > 1) s += ",";
        s += inst.name(round[k]);
      }
    return s + "}";
  };

  Configuration c0 = inst.config_initial();
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    const auto& round = rounds[r];
    std::uint32_t full =
        round.size() >= 31 ? 0 : (1u << round.size()) - 1;  // exhaustive path only
    if (exhaustive) {
      // every within-round order: prefix configurations are exactly the
      // subset updates, and every pair window is some (before, span) split
      for (std::uint32_t t = full;; t = (t - 1) & full) {
        if (prefix_violation(r, apply_nodes(inst, c0, round, t),
                             "after updating " + subset_names(round, t)))
          return result;
        if (t == 0) break;
      }
      for (std::uint32_t x = full;; x = (x - 1) & full) {
        if (std::popcount(x) >= 2) {
          std::uint32_t rest = full & ~x;
          for (std::uint32_t p = rest;; p = (p - 1) & rest) {
            Configuration u =
                union_after(inst, apply_nodes(inst, c0, round, p), round, x);
            if (union_violation(r, u,
                                "union over " + subset_names(round, x) + " after " +
                                    subset_names(round, p)))
              return result;
            if (p == 0) break;
          }
        }
        if (x == 0) break;
      }
    } else {
      std::vector<std::vector<NodeIndex>> orders;
      orders.push_back(round);
      for (std::size_t i = 0; i + 1 < round.size(); ++i) {
        auto swapped = round;
        std::swap(swapped[i], swapped[i + 1]);
        orders.push_back(std::move(swapped));
      }
      for (const auto& order : orders) {
        Configuration cfg = c0;
        for (std::size_t i = 0; i < order.size(); ++i) {
          cfg = upd1(inst, cfg, order[i]);
          if (prefix_violation(r, cfg, "after updating " + inst.name(order[i]) +
                                           " (sampled order)"))
            return result;
        }
        for (std::size_t j = 0; j < order.size(); ++j) {
          Configuration before = c0;
          for (std::size_t i = 0; i < j; ++i) before = upd1(inst, before, order[i]);
          Configuration u = before;
          for (std::size_t k = j; k < order.size(); ++k) {
            for (EdgeId e : inst.out_final(order[k])) u.insert(e);
            if (k > j &&
                union_violation(r, u,
                                "union " + inst.name(order[j]) + ".." +
                                    inst.name(order[k]) + " (sampled order)"))
              return result;
          }
        }
      }
    }
    for (NodeIndex u : round) c0 = upd1(inst, c0, u);
  }
  result.ok = true;
  return result;
}

namespace {

// Exhaustive minimal-round search over updated-node sets. A transition is a
// round: a set whose members can be applied in every order with consistent
// prefixes (checked as subset configurations) and whose pairwise
// configuration unions stay consistent.
struct RoundSearch {
  const NetworkInstance& inst;
  std::vector<NodeIndex> changed;
  bool careful;
  ConsistencyCache cache;
  std::unordered_map<std::vector<std::uint64_t>, std::vector<UpstreamClass>, ConfigHash>
      class_cache;

  RoundSearch(const NetworkInstance& i, bool careful_mode)
      : inst(i), changed(i.changed_nodes()), careful(careful_mode), cache(i) {}

  Configuration config_of(std::uint32_t mask) {
    return apply_nodes(inst, inst.config_initial(), changed, mask);
  }

  bool valid_at(const Configuration& c, NodeIndex u) {
    auto [it, fresh] = class_cache.try_emplace(c.words());
    if (fresh) it->second = enumeration::classify(inst, c);
    DownMark post = enumeration::downmark_at(inst, upd1(inst, c, u), u);
    return enumeration::downstream_condition_enum(inst, it->second[u].kind, u, post);
  }

  bool round_ok(const Configuration& c0, std::uint32_t round_mask) {
    for (std::uint32_t t = round_mask;; t = (t - 1) & round_mask) {
      if (!cache.consistent(apply_nodes(inst, c0, changed, t))) return false;
      if (t == 0) break;
    }
    for (std::uint32_t x = round_mask;; x = (x - 1) & round_mask) {
      if (std::popcount(x) >= 2) {
        std::uint32_t rest = round_mask & ~x;
        for (std::uint32_t p = rest;; p = (p - 1) & rest) {
          if (!cache.consistent(
                  union_after(inst, apply_nodes(inst, c0, changed, p), changed, x)))
            return false;
          if (p == 0) break;
        }
      }
      if (x == 0) break;
    }
    if (careful && !careful_orderable(c0, round_mask)) return false;
    return true;
  }

  // Some order of the round updates only valid nodes.
  bool careful_orderable(const Configuration& c0, std::uint32_t round_mask) {
    std::unordered_map<std::uint32_t, bool> memo;
    auto rec = [&](auto&& self, std::uint32_t done) -> bool {
      if (done == round_mask) return true;
      auto it = memo.find(done);
      if (it != memo.end()) return it->second;
      Configuration c = apply_nodes(inst, c0, changed, done);
      bool ok = false;
      for (std::size_t k = 0; k < changed.size() && !ok; ++k) {
        std::uint32_t bit = 1u << k;
        if ((round_mask & bit) && !(done & bit) && valid_at(c, changed[k]))
          ok = self(self, done | bit);
      }
      memo[done] = ok;
      return ok;
    };
    return rec(rec, 0);
  }

  OracleResult run() {
    const std::size_t m = changed.size();
    const std::uint32_t full = m == 0 ? 0 : (1u << m) - 1;
    std::vector<int> dist(full + 1u, -1);
    std::vector<std::uint32_t> parent_state(full + 1u, 0), parent_round(full + 1u, 0);
    std::vector<std::uint32_t> queue;
    dist[0] = 0;
    queue.push_back(0);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      std::uint32_t state = queue[qi];
      if (state == full) break;
      Configuration c0 = config_of(state);
      std::uint32_t pend = full & ~state;
      std::uint32_t candidates = 0;
      for (std::size_t k = 0; k < m; ++k) {
        std::uint32_t bit = 1u << k;
        if (!(pend & bit)) continue;
        // a single-node prefix must stay consistent whichever position the
        // node takes, so only safe nodes can join a round at all; careful
        // mode adds the orderability requirement inside round_ok
        if (cache.consistent(upd1(inst, c0, changed[k]))) candidates |= bit;
      }
      for (std::uint32_t s = candidates; s != 0; s = (s - 1) & candidates) {
        std::uint32_t next = state | s;
        if (dist[next] < 0 && round_ok(c0, s)) {
          dist[next] = dist[state] + 1;
          parent_state[next] = state;
          parent_round[next] = s;
          queue.push_back(next);
          if (next == full) break;  // first reach is minimal under unit steps
        }
      }
      if (dist[full] >= 0) break;
    }

    OracleResult result;
    if (dist[full] < 0) return result;
    result.exists = true;
    result.min_rounds = dist[full];
    WaitedPlan plan;
    plan.status = WaitedPlan::Status::Solved;
    std::vector<std::uint32_t> masks;
    for (std::uint32_t s = full; s != 0; s = parent_state[s])
      masks.push_back(parent_round[s]);
    std::reverse(masks.begin(), masks.end());
    for (std::uint32_t mask : masks) {
      std::vector<std::string> round;
      for (std::size_t k = 0; k < m; ++k)
        if (mask & (1u << k)) round.push_back(inst.name(changed[k]));
      plan.rounds.push_back(std::move(round));
    }
    result.witness = std::move(plan);
    return result;
  }
};

OracleResult search_impl(const NetworkInstance& inst, int node_limit, bool careful) {
  if (static_cast<int>(inst.changed_nodes().size()) > node_limit)
    throw OracleError("instance has " + std::to_string(inst.changed_nodes().size()) +
                      " changed nodes, above the search limit of " +
                      std::to_string(node_limit));
  RoundSearch search(inst, careful);
  return search.run();
}

}  // namespace

OracleResult search_min_rounds(const NetworkInstance& inst, int node_limit) {
  return search_impl(inst, node_limit, false);
}

OracleResult search_min_rounds_careful(const NetworkInstance& inst, int node_limit) {
  return search_impl(inst, node_limit, true);
}

}  // namespace cnup
