#pragma once

#include <string>
#include <vector>

#include "cnup/netmodel.hpp"

namespace cnup {

/// Ordered rounds of node updates. Rounds are separated by waits; nodes in
/// one round may be applied in any order. No-op nodes and the synthetic
/// master never appear. A failed run keeps the partial trace in `rounds`
/// for diagnostics.
struct WaitedPlan {
  enum class Status { Solved, NoConsistentOrder };
  Status status = Status::Solved;
  std::vector<std::vector<std::string>> rounds;

  int waits() const { return rounds.empty() ? 0 : static_cast<int>(rounds.size()) - 1; }

  friend bool operator==(const WaitedPlan&, const WaitedPlan&) = default;
};

/// Step-by-step instrumentation for the planner. `violations` holds
/// failures of the planner's own invariants (prefix consistency, priority
/// set contained in the safe set, wait-condition/priority equivalence);
/// any entry is an implementation bug. `persistence_violations` tracks the
/// textbook persistence claims — a valid node never turns invalid, a
/// priority-0 node keeps its priority until updated — which a node crossing
/// from reachable to disconnected can genuinely falsify; they are recorded
/// for audit rather than enforced.
struct PlannerProbe {
  std::vector<std::string> violations;
  std::vector<std::string> persistence_violations;
  std::size_t steps = 0;
  std::size_t waits = 0;
};

/// One update per round: wait after every update, always picking the
/// lexicographically smallest valid node.
WaitedPlan plan_sequential(const NetworkInstance& inst, PlannerProbe* probe = nullptr);

/// Wait-minimizing variant: a round's candidates are the nodes whose update
/// was safe at the round boundary; a wait is emitted only when no such
/// candidate is currently valid.
WaitedPlan plan_optimal(const NetworkInstance& inst, PlannerProbe* probe = nullptr);

/// Whether updating `node` now would require a wait, given the partial plan
/// `history` (its last round is the one in progress unless
/// `wait_after_history` is set). True iff the node's update was unsafe at
/// some configuration since the last wait.
bool needs_wait(const NetworkInstance& inst,
                const std::vector<std::vector<std::string>>& history,
                bool wait_after_history, std::string_view node);

std::string plan_to_json(const WaitedPlan& plan);
WaitedPlan plan_from_json(std::string_view text);

}  // namespace cnup
