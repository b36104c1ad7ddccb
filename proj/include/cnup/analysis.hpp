#pragma once

#include <optional>
#include <vector>

#include "cnup/netmodel.hpp"

namespace cnup {

/// A precondition of an analysis operation does not hold (cyclic current
/// configuration where acyclicity is required, or an inconsistent
/// configuration handed to a classifier that assumes consistency).
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Upstream candidate types. A: unreachable from the source. B: every
/// source path lies in both configurations. C: every source path lies in
/// the final configuration (not B). D: symmetric with the initial one.
/// E: both an initial-only and a final-only source path exist.
enum class UpstreamKind : std::uint8_t { TypeA, TypeB, TypeC, TypeD, TypeE };

struct UpstreamClass {
  UpstreamKind kind = UpstreamKind::TypeA;
  /// Some source path lies in neither configuration. Never set when the
  /// analyzed configuration is consistent.
  bool anomalous = false;
};

/// Per-node downstream verdicts over the maximal paths starting there:
/// whether all of them are maximal paths of the initial configuration, of
/// the final one, of one-or-the-other per path, or of both at once.
/// A node that can reach a cycle has all four flags false.
struct DownMark {
  bool all_initial_max = false;
  bool all_final_max = false;
  bool all_either_max = false;
  bool all_both_max = false;

  friend bool operator==(const DownMark&, const DownMark&) = default;
};

/// Maximal path (or lasso ending in a cycle) from the source witnessing an
/// inconsistency.
struct Witness {
  std::vector<NodeIndex> path;  // starts at the source
  bool cycle = false;           // true: the last node closes a loop into `path`
};

struct ConsistencyVerdict {
  bool consistent = false;
  std::optional<Witness> witness;
};

/// Classify every node by the product-state reachability of its source
/// paths in `cc`. Throws AnalysisError when a cycle is reachable from the
/// source (path sets would be infinite).
std::vector<UpstreamClass> classify_upstream(const NetworkInstance& inst,
                                             const Configuration& cc);

/// Evaluate the downstream-mark recurrences over `c` for every node.
/// Cycle-tolerant: nodes on or upstream of a cycle come back all-false.
std::vector<DownMark> mark_downstream(const NetworkInstance& inst,
                                      const Configuration& c);

enum class NodeValidity { Valid, Invalid, NotAChangedNode };

/// A single node's upstream type paired with its downstream verdict on the
/// post-update configuration.
NodeValidity is_valid(const NetworkInstance& inst, const Configuration& cc, NodeIndex s);
NodeValidity is_valid(const NetworkInstance& inst, const Configuration& cc,
                      std::string_view node);

/// Per-packet consistency of `c`: every maximal path from the source is a
/// maximal path of the initial or of the final configuration. A cycle
/// reachable from the source is inconsistent by definition.
ConsistencyVerdict is_consistent(const NetworkInstance& inst, const Configuration& c);

/// One entry per changed node (indexed like changed_nodes()).
/// `valid`: upstream condition plus the paired downstream condition hold.
/// `safe`: updating the node right now preserves consistency — equal to
/// `valid` for reachable nodes, always true for unreachable (type A) ones,
/// whose downstream condition is required for progress but not for safety.
struct SweepEntry {
  UpstreamKind kind = UpstreamKind::TypeA;
  bool valid = false;
  bool safe = false;
};

/// Validity/safety of every pending changed node in one pass: one upstream
/// classification plus per-candidate downstream folds against the marks of
/// the current configuration. Throws AnalysisError on anomalous upstream
/// state (the current configuration was not consistent).
std::vector<SweepEntry> sweep_changed(const NetworkInstance& inst,
                                      const Configuration& cc);

}  // namespace cnup
