#include "cnup/analysis.hpp"

#include <algorithm>

namespace cnup {

namespace {

constexpr std::uint8_t kStateBoth = 3;  // (all-initial, all-final) flag pair

inline std::uint32_t state_id(NodeIndex n, std::uint8_t flags) { return n * 4 + flags; }

// Depth-first search from the source over `c`; true when a cycle is
// reachable.
bool cycle_reachable_from_source(const NetworkInstance& inst, const Configuration& c) {
  std::vector<std::uint8_t> color(inst.node_count(), 0);
  std::vector<std::pair<NodeIndex, std::size_t>> stack;
  color[inst.source()] = 1;
  stack.push_back({inst.source(), 0});
  while (!stack.empty()) {
    NodeIndex u = stack.back().first;
    std::size_t i = stack.back().second;
    const auto& edges = inst.out_all(u);
    bool descended = false;
    while (i < edges.size()) {
      EdgeId e = edges[i++];
      if (!c.contains(e)) continue;
      NodeIndex v = inst.edge(e).to;
      if (color[v] == 1) return true;
      if (color[v] == 0) {
        stack.back().second = i;
        color[v] = 1;
        stack.push_back({v, 0});
        descended = true;
        break;
      }
    }
    if (!descended) {
      color[u] = 2;
      stack.pop_back();
    }
  }
  return false;
}

// Downstream marks plus, for nodes not reaching a cycle, their descendant
// bitset. `settled[u]` is false exactly when u can reach a cycle in `c`.
struct DownAnalysis {
  std::vector<DownMark> marks;
  std::vector<std::uint8_t> settled;
  std::vector<std::uint64_t> reach;  // node_count * words, settled nodes only
  std::size_t words = 0;
};

DownAnalysis analyze_down(const NetworkInstance& inst, const Configuration& c,
                          bool want_reach) {
  const std::size_t n = inst.node_count();
  DownAnalysis a;
  a.marks.assign(n, DownMark{});
  a.settled.assign(n, 0);
  a.words = (n + 63) / 64;
  if (want_reach) a.reach.assign(n * a.words, 0);

  std::vector<std::uint32_t> pending(n, 0);
  std::vector<NodeIndex> ready;
  for (NodeIndex u = 0; u < n; ++u) {
    std::uint32_t deg = 0;
    for (EdgeId e : inst.out_all(u))
      if (c.contains(e)) ++deg;
    pending[u] = deg;
    if (deg == 0) ready.push_back(u);
  }

  while (!ready.empty()) {
    NodeIndex u = ready.back();
    ready.pop_back();
    a.settled[u] = 1;

    DownMark m;
    bool base = true;
    m.all_initial_max = m.all_final_max = m.all_either_max = m.all_both_max = true;
    for (EdgeId e : inst.out_all(u)) {
      if (!c.contains(e)) continue;
      base = false;
      const Edge& ed = inst.edge(e);
      const DownMark& mv = a.marks[ed.to];
      bool in_i = label_in_initial(ed.label);
      bool in_f = label_in_final(ed.label);
      m.all_initial_max = m.all_initial_max && in_i && mv.all_initial_max;
      m.all_final_max = m.all_final_max && in_f && mv.all_final_max;
      m.all_both_max = m.all_both_max && in_i && in_f && mv.all_both_max;
      bool either_here = (in_i && in_f)  ? mv.all_either_max
                         : in_i          ? mv.all_initial_max
                                         : mv.all_final_max;
      m.all_either_max = m.all_either_max && either_here;
      if (want_reach) {
        std::uint64_t* ru = &a.reach[u * a.words];
        const std::uint64_t* rv = &a.reach[ed.to * a.words];
        for (std::size_t w = 0; w < a.words; ++w) ru[w] |= rv[w];
        ru[ed.to >> 6] |= std::uint64_t{1} << (ed.to & 63);
      }
    }
    if (base) {
      m.all_initial_max = inst.out_initial(u).empty();
      m.all_final_max = inst.out_final(u).empty();
      m.all_either_max = m.all_initial_max || m.all_final_max;
      m.all_both_max = m.all_initial_max && m.all_final_max;
    }
    a.marks[u] = m;

    for (EdgeId e : inst.in_all(u)) {
      if (!c.contains(e)) continue;
      NodeIndex w = inst.edge(e).from;
      if (--pending[w] == 0) ready.push_back(w);
    }
  }
  return a;
}

// Downstream verdict of `u` on upd1(cc, u), folded from the marks of the
// current configuration. Valid because every other node keeps its out-edges,
// so its downstream subgraph (and mark) is unchanged unless the update
// closes a cycle through u, which the reach bitsets detect.
DownMark fold_post_update_mark(const NetworkInstance& inst, NodeIndex u,
                               const DownAnalysis& down) {
  const auto& outf = inst.out_final(u);
  DownMark m;
  if (outf.empty()) {
    m.all_initial_max = inst.out_initial(u).empty();
    m.all_final_max = true;
    m.all_either_max = true;
    m.all_both_max = m.all_initial_max;
    return m;
  }
  for (EdgeId e : outf) {
    NodeIndex v = inst.edge(e).to;
    if (down.settled[v] &&
        (down.reach[v * down.words + (u >> 6)] >> (u & 63)) & 1u) {
      return DownMark{};  // update would close a cycle through u
    }
  }
  m.all_initial_max = m.all_final_max = m.all_either_max = m.all_both_max = true;
  for (EdgeId e : outf) {
    const Edge& ed = inst.edge(e);
    const DownMark& mv = down.marks[ed.to];
    bool both_label = ed.label == EdgeLabel::Both;
    m.all_final_max = m.all_final_max && mv.all_final_max;
    m.all_initial_max = m.all_initial_max && both_label && mv.all_initial_max;
    m.all_both_max = m.all_both_max && both_label && mv.all_both_max;
    m.all_either_max =
        m.all_either_max && (both_label ? mv.all_either_max : mv.all_final_max);
  }
  return m;
}

bool downstream_condition(UpstreamKind kind, const NetworkInstance& inst, NodeIndex u,
                          const DownMark& post) {
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

std::vector<UpstreamClass> classify_upstream(const NetworkInstance& inst,
                                             const Configuration& cc) {
  if (cycle_reachable_from_source(inst, cc))
    throw AnalysisError("cycle reachable from the source");

  const std::size_t n = inst.node_count();
  std::vector<std::uint8_t> seen(n * 4, 0);
  std::vector<std::uint32_t> queue;
  std::uint32_t start = state_id(inst.source(), kStateBoth);  // empty path
  seen[start] = 1;
  queue.push_back(start);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    std::uint32_t s = queue[qi];
    NodeIndex u = s / 4;
    bool all_i = s & 1, all_f = s & 2;
    for (EdgeId e : inst.out_all(u)) {
      if (!cc.contains(e)) continue;
      const Edge& ed = inst.edge(e);
      std::uint8_t flags = static_cast<std::uint8_t>(
          (all_i && label_in_initial(ed.label) ? 1 : 0) |
          (all_f && label_in_final(ed.label) ? 2 : 0));
      std::uint32_t next = state_id(ed.to, flags);
      if (!seen[next]) {
        seen[next] = 1;
        queue.push_back(next);
      }
    }
  }

  std::vector<UpstreamClass> result(n);
  for (NodeIndex u = 0; u < n; ++u) {
    bool both = seen[state_id(u, 3)];
    bool only_i = seen[state_id(u, 1)];
    bool only_f = seen[state_id(u, 2)];
    bool neither = seen[state_id(u, 0)];
    UpstreamClass uc;
    uc.anomalous = neither;
    if (!both && !only_i && !only_f && !neither) {
      uc.kind = UpstreamKind::TypeA;
    } else if (only_i && only_f) {
      uc.kind = UpstreamKind::TypeE;
    } else if (only_i) {
      uc.kind = UpstreamKind::TypeD;
    } else if (only_f) {
      uc.kind = UpstreamKind::TypeC;
    } else {
      uc.kind = UpstreamKind::TypeB;
    }
    result[u] = uc;
  }
  return result;
}

std::vector<DownMark> mark_downstream(const NetworkInstance& inst,
                                      const Configuration& c) {
  return analyze_down(inst, c, false).marks;
}

NodeValidity is_valid(const NetworkInstance& inst, const Configuration& cc, NodeIndex s) {
  if (s >= inst.node_count()) throw InstanceError("node index out of range");
  if (!inst.is_changed(s)) return NodeValidity::NotAChangedNode;
  auto classes = classify_upstream(inst, cc);
  if (classes[s].anomalous)
    throw AnalysisError("anomalous upstream state at \"" + inst.name(s) +
                        "\": current configuration is not consistent");
  auto post_marks = mark_downstream(inst, upd1(inst, cc, s));
  return downstream_condition(classes[s].kind, inst, s, post_marks[s])
             ? NodeValidity::Valid
             : NodeValidity::Invalid;
}

NodeValidity is_valid(const NetworkInstance& inst, const Configuration& cc,
                      std::string_view node) {
  return is_valid(inst, cc, inst.require_index(node));
}

std::vector<SweepEntry> sweep_changed(const NetworkInstance& inst,
                                      const Configuration& cc) {
  auto classes = classify_upstream(inst, cc);
  for (NodeIndex u : inst.changed_nodes())
    if (classes[u].anomalous)
      throw AnalysisError("anomalous upstream state at \"" + inst.name(u) +
                          "\": current configuration is not consistent");
  DownAnalysis down = analyze_down(inst, cc, true);

  std::vector<SweepEntry> result;
  result.reserve(inst.changed_nodes().size());
  for (NodeIndex u : inst.changed_nodes()) {
    SweepEntry entry;
    entry.kind = classes[u].kind;
    DownMark post = fold_post_update_mark(inst, u, down);
    entry.valid = downstream_condition(entry.kind, inst, u, post);
    entry.safe = entry.kind == UpstreamKind::TypeA || entry.valid;
    result.push_back(entry);
  }
  return result;
}

namespace {

// Product-state search for a maximal path from the source lying in neither
// configuration. State flags track whether the path so far is all-initial /
// all-final; a revisit of an on-stack state is a reachable cycle.
struct FailSearch {
  const NetworkInstance& inst;
  const Configuration& c;
  std::vector<std::int8_t> memo;     // -1 unknown, 0 cannot fail, 1 can fail
  std::vector<std::uint8_t> onstack;

  FailSearch(const NetworkInstance& i, const Configuration& cfg)
      : inst(i), c(cfg), memo(i.node_count() * 4, -1), onstack(i.node_count() * 4, 0) {}

  bool base_fails(NodeIndex u, bool all_i, bool all_f) const {
    bool i_max = all_i && inst.out_initial(u).empty();
    bool f_max = all_f && inst.out_final(u).empty();
    return !i_max && !f_max;
  }

  bool run(NodeIndex u, bool all_i, bool all_f) {
    std::uint32_t s = state_id(u, static_cast<std::uint8_t>((all_i ? 1 : 0) | (all_f ? 2 : 0)));
    if (onstack[s]) return true;
    if (memo[s] >= 0) return memo[s] != 0;
    onstack[s] = 1;
    bool fail = false;
    bool has_edge = false;
    for (EdgeId e : inst.out_all(u)) {
      if (!c.contains(e)) continue;
      has_edge = true;
      const Edge& ed = inst.edge(e);
      if (run(ed.to, all_i && label_in_initial(ed.label),
              all_f && label_in_final(ed.label))) {
        fail = true;
        break;
      }
    }
    if (!has_edge) fail = base_fails(u, all_i, all_f);
    onstack[s] = 0;
    memo[s] = fail ? 1 : 0;
    return fail;
  }

  // Greedy descent through failing states; terminates because a revisited
  // state closes a cycle witness.
  Witness extract_witness() {
    Witness w;
    std::vector<std::uint8_t> visited(inst.node_count() * 4, 0);
    NodeIndex u = inst.source();
    bool all_i = true, all_f = true;
    for (;;) {
      std::uint32_t s =
          state_id(u, static_cast<std::uint8_t>((all_i ? 1 : 0) | (all_f ? 2 : 0)));
      w.path.push_back(u);
      visited[s] = 1;
      bool stepped = false;
      for (EdgeId e : inst.out_all(u)) {
        if (!c.contains(e)) continue;
        const Edge& ed = inst.edge(e);
        bool ni = all_i && label_in_initial(ed.label);
        bool nf = all_f && label_in_final(ed.label);
        std::uint32_t next =
            state_id(ed.to, static_cast<std::uint8_t>((ni ? 1 : 0) | (nf ? 2 : 0)));
        if (visited[next]) {
          w.path.push_back(ed.to);
          w.cycle = true;
          return w;
        }
        if (memo[next] == 1) {
          u = ed.to;
          all_i = ni;
          all_f = nf;
          stepped = true;
          break;
        }
      }
      if (!stepped) return w;  // dead end maximal in neither configuration
    }
  }
};

}  // namespace

ConsistencyVerdict is_consistent(const NetworkInstance& inst, const Configuration& c) {
  FailSearch search(inst, c);
  ConsistencyVerdict verdict;
  verdict.consistent = !search.run(inst.source(), true, true);
  if (!verdict.consistent) verdict.witness = search.extract_witness();
  return verdict;
}

}  // namespace cnup
