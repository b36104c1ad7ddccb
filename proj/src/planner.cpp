#include "cnup/planner.hpp"

#include <algorithm>

#include "cnup/analysis.hpp"
#include "json.hpp"

namespace cnup {

namespace {

using nlohmann::json;

bool node_safe(const NetworkInstance& inst, const Configuration& c, NodeIndex u) {
  auto classes = classify_upstream(inst, c);
  if (classes[u].anomalous)
    throw AnalysisError("anomalous upstream state at \"" + inst.name(u) + "\"");
  if (classes[u].kind == UpstreamKind::TypeA) return true;
  return is_valid(inst, c, u) == NodeValidity::Valid;
}

struct OptimalRunner {
  const NetworkInstance& inst;
  PlannerProbe* probe;
  const std::vector<NodeIndex>& changed;
  Configuration cc;
  std::vector<std::uint8_t> pending, p0;
  std::vector<SweepEntry> sweep;
  WaitedPlan plan;
  std::vector<std::string> current;

  explicit OptimalRunner(const NetworkInstance& i, PlannerProbe* pr)
      : inst(i),
        probe(pr),
        changed(i.changed_nodes()),
        cc(i.config_initial()),
        pending(changed.size(), 1),
        p0(changed.size(), 0) {
    sweep = sweep_changed(inst, cc);
    for (std::size_t k = 0; k < changed.size(); ++k) p0[k] = sweep[k].safe;
  }

  void fail(const std::string& msg) { probe->violations.push_back(msg); }

  void check_membership_invariants() {
    if (!probe) return;
    for (std::size_t k = 0; k < changed.size(); ++k) {
      if (p0[k] && !pending[k]) fail("p0 contains updated node " + inst.name(changed[k]));
      if (p0[k] && !sweep[k].safe)
        fail("p0 member " + inst.name(changed[k]) + " is no longer safe");
      if (pending[k] && sweep[k].valid && !sweep[k].safe)
        fail("valid node " + inst.name(changed[k]) + " not marked safe");
    }
  }

  void check_wait_equivalence(bool waited_just_now) {
    if (!probe) return;
    std::vector<std::vector<std::string>> history = plan.rounds;
    if (!waited_just_now && !current.empty()) history.push_back(current);
    bool wait_after = waited_just_now;
    for (std::size_t k = 0; k < changed.size(); ++k) {
      if (!pending[k] || !sweep[k].valid) continue;
      bool nw = needs_wait(inst, history, wait_after, inst.name(changed[k]));
      if (nw == static_cast<bool>(p0[k]))
        fail("wait condition disagrees with priority for " + inst.name(changed[k]));
    }
  }

  void check_persistence(const std::vector<SweepEntry>& next, NodeIndex updated) {
    if (!probe) return;
    for (std::size_t k = 0; k < changed.size(); ++k) {
      if (!pending[k]) continue;
      if (sweep[k].valid && !next[k].valid)
        probe->persistence_violations.push_back(
            "validity lost at " + inst.name(changed[k]) + " after updating " +
            inst.name(updated));
    }
  }

  WaitedPlan run() {
    while (!(cc == inst.config_final())) {
      int pick = -1;
      bool any_valid = false;
      for (std::size_t k = 0; k < changed.size(); ++k) {
        if (!pending[k] || !sweep[k].valid) continue;
        any_valid = true;
        if (p0[k]) {
          pick = static_cast<int>(k);
          break;
        }
      }
      if (!any_valid) {
        if (!current.empty()) plan.rounds.push_back(current);
        plan.status = WaitedPlan::Status::NoConsistentOrder;
        return plan;
      }
      bool waited = false;
      if (pick < 0) {
        plan.rounds.push_back(current);
        current.clear();
        waited = true;
        if (probe) ++probe->waits;
        for (std::size_t k = 0; k < changed.size(); ++k) {
          std::uint8_t fresh = pending[k] && sweep[k].safe;
          if (probe && p0[k] && pending[k] && !fresh)
            probe->persistence_violations.push_back(
                "p0 membership lost across wait at " + inst.name(changed[k]));
          p0[k] = fresh;
        }
        for (std::size_t k = 0; k < changed.size(); ++k) {
          if (pending[k] && sweep[k].valid) {
            pick = static_cast<int>(k);
            break;
          }
        }
      }
      check_membership_invariants();
      check_wait_equivalence(waited);

      NodeIndex node = changed[pick];
      cc = upd1(inst, cc, node);
      pending[pick] = 0;
      p0[pick] = 0;
      current.push_back(inst.name(node));
      if (probe) {
        ++probe->steps;
        auto verdict = is_consistent(inst, cc);
        if (!verdict.consistent)
          fail("inconsistent configuration after updating " + inst.name(node));
      }
      auto next = sweep_changed(inst, cc);
      check_persistence(next, node);
      // A priority-0 node whose update just became unsafe needs a wait even
      // if a later update in this round would make it safe again: some
      // within-round order would cross the unsafe configuration. Revoke its
      // priority until the next wait.
      for (std::size_t k = 0; k < changed.size(); ++k) {
        if (p0[k] && pending[k] && !next[k].safe) {
          if (probe)
            probe->persistence_violations.push_back(
                "p0 membership revoked at " + inst.name(changed[k]) +
                " after updating " + inst.name(node));
          p0[k] = 0;
        }
      }
      sweep = std::move(next);
    }
    if (!current.empty()) plan.rounds.push_back(current);
    plan.status = WaitedPlan::Status::Solved;
    return plan;
  }
};

}  // namespace

WaitedPlan plan_sequential(const NetworkInstance& inst, PlannerProbe* probe) {
  const auto& changed = inst.changed_nodes();
  Configuration cc = inst.config_initial();
  std::vector<std::uint8_t> pending(changed.size(), 1);
  WaitedPlan plan;
  auto sweep = sweep_changed(inst, cc);
  while (!(cc == inst.config_final())) {
    int pick = -1;
    for (std::size_t k = 0; k < changed.size(); ++k) {
      if (pending[k] && sweep[k].valid) {
        pick = static_cast<int>(k);
        break;
      }
    }
    if (pick < 0) {
      plan.status = WaitedPlan::Status::NoConsistentOrder;
      return plan;
    }
    NodeIndex node = changed[pick];
    cc = upd1(inst, cc, node);
    pending[pick] = 0;
    plan.rounds.push_back({inst.name(node)});
    if (probe) {
      ++probe->steps;
      auto verdict = is_consistent(inst, cc);
      if (!verdict.consistent)
        probe->violations.push_back("inconsistent configuration after updating " +
                                    inst.name(node));
    }
    auto next = sweep_changed(inst, cc);
    if (probe) {
      for (std::size_t k = 0; k < changed.size(); ++k)
        if (pending[k] && sweep[k].valid && !next[k].valid)
          probe->persistence_violations.push_back(
              "validity lost at " + inst.name(changed[k]) + " after updating " +
              inst.name(node));
    }
    sweep = std::move(next);
  }
  plan.status = WaitedPlan::Status::Solved;
  return plan;
}

WaitedPlan plan_optimal(const NetworkInstance& inst, PlannerProbe* probe) {
  OptimalRunner runner(inst, probe);
  return runner.run();
}

bool needs_wait(const NetworkInstance& inst,
                const std::vector<std::vector<std::string>>& history,
                bool wait_after_history, std::string_view node) {
  NodeIndex u = inst.require_index(node);
  if (!inst.is_changed(u))
    throw InstanceError("needs_wait: \"" + std::string(node) + "\" is not a changed node");

  std::vector<std::uint8_t> updated(inst.node_count(), 0);
  for (const auto& round : history) {
    for (const std::string& name : round) {
      NodeIndex v = inst.require_index(name);
      if (v == u) throw InstanceError("needs_wait: node already updated in history");
      if (inst.is_changed(v)) {
        if (updated[v]) throw InstanceError("repeated node \"" + name + "\" in history");
        updated[v] = 1;
      }
    }
  }

  std::size_t boundary =
      wait_after_history || history.empty() ? history.size() : history.size() - 1;
  Configuration c = inst.config_initial();
  for (std::size_t r = 0; r < boundary; ++r)
    for (const std::string& name : history[r]) c = upd1(inst, c, name);

  if (!node_safe(inst, c, u)) return true;
  for (std::size_t r = boundary; r < history.size(); ++r) {
    for (const std::string& name : history[r]) {
      c = upd1(inst, c, name);
      if (!node_safe(inst, c, u)) return true;
    }
  }
  return false;
}

std::string plan_to_json(const WaitedPlan& plan) {
  json doc;
  doc["status"] =
      plan.status == WaitedPlan::Status::Solved ? "Solved" : "NoConsistentOrder";
  json rounds = json::array();
  for (const auto& round : plan.rounds) rounds.push_back(round);
  doc["rounds"] = rounds;
  doc["waits"] = plan.waits();
  return doc.dump(2) + "\n";
}

WaitedPlan plan_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InstanceError(std::string("invalid plan JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InstanceError("plan must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (it.key() != "status" && it.key() != "rounds" && it.key() != "waits")
      throw InstanceError("unknown field \"" + it.key() + "\" in plan");
  if (!doc.contains("status") || !doc["status"].is_string())
    throw InstanceError("plan needs a \"status\" string");
  if (!doc.contains("rounds") || !doc["rounds"].is_array())
    throw InstanceError("plan needs a \"rounds\" list");

  WaitedPlan plan;
  std::string status = doc["status"].get<std::string>();
  if (status == "Solved")
    plan.status = WaitedPlan::Status::Solved;
  else if (status == "NoConsistentOrder")
    plan.status = WaitedPlan::Status::NoConsistentOrder;
  else
    throw InstanceError("unknown plan status \"" + status + "\"");
  for (const json& round : doc["rounds"]) {
    if (!round.is_array()) throw InstanceError("plan rounds must be lists");
    std::vector<std::string> nodes;
    for (const json& n : round) {
      if (!n.is_string()) throw InstanceError("plan round entries must be strings");
      nodes.push_back(n.get<std::string>());
    }
    plan.rounds.push_back(std::move(nodes));
  }
  if (doc.contains("waits")) {
    if (!doc["waits"].is_number_integer() ||
        doc["waits"].get<int>() != plan.waits())
      throw InstanceError("plan \"waits\" does not match the round count");
  }
  return plan;
}

}  // namespace cnup
