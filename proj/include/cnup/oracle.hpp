#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cnup/analysis.hpp"
#include "cnup/netmodel.hpp"
#include "cnup/planner.hpp"

namespace cnup {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ground-truth predicates computed by explicit path enumeration. Feasible
/// at desk scale only; they share nothing with the marking algorithms in
/// the analysis module and exist to check them.
namespace enumeration {

bool consistent(const NetworkInstance& inst, const Configuration& c);
std::optional<Witness> inconsistency_witness(const NetworkInstance& inst,
                                             const Configuration& c);
std::vector<DownMark> downmarks(const NetworkInstance& inst, const Configuration& c);
DownMark downmark_at(const NetworkInstance& inst, const Configuration& c, NodeIndex u);
/// Throws AnalysisError when a cycle is reachable from the source.
std::vector<UpstreamClass> classify(const NetworkInstance& inst, const Configuration& c);
bool node_valid(const NetworkInstance& inst, const Configuration& c, NodeIndex u);
/// Updating u now keeps the configuration consistent.
bool node_safe(const NetworkInstance& inst, const Configuration& c, NodeIndex u);

}  // namespace enumeration

struct PlanViolation {
  std::string kind;      // "partition", "prefix" or "union"
  std::string location;  // human-readable position inside the plan
  std::vector<std::string> witness;
  bool witness_cycle = false;
};

struct VerifyResult {
  bool ok = false;
  std::string regime;  // "exhaustive" or "sampled"
  std::optional<PlanViolation> violation;
};

/// Check a waited plan against the definition of a consistent update
/// sequence: the rounds partition the changed-node set, every within-round
/// order keeps all prefix configurations consistent, and the running union
/// of configurations between any two same-round updates stays consistent.
/// Rounds of more than six nodes are checked on the serialized order plus
/// all adjacent transpositions instead of exhaustively; `regime` reports
/// which applied. No-op nodes are tolerated and ignored.
VerifyResult verify_plan(const NetworkInstance& inst, const WaitedPlan& plan);

struct OracleResult {
  bool exists = false;
  std::optional<int> min_rounds;
  std::optional<WaitedPlan> witness;
};

/// Exhaustive search for the minimal number of rounds over all consistent
/// update sequences. Throws OracleError when the changed-node count exceeds
/// `node_limit`.
OracleResult search_min_rounds(const NetworkInstance& inst, int node_limit = 10);

/// Same search restricted to careful behavior: every round must admit an
/// order that updates only valid nodes.
OracleResult search_min_rounds_careful(const NetworkInstance& inst, int node_limit = 10);

}  // namespace cnup
