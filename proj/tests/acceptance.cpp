// Acceptance suite: one line per criterion, exit code = number of failures.
//
// Criterion 10 checks two textbook persistence claims (a valid node stays
// valid; a priority-0 node keeps its priority until updated) on an
// instrumented planner. Both claims have genuine counterexamples — a node
// whose upstream is removed crosses into the disconnected class, whose
// stricter downstream requirement it may fail, and a node connected by a
// fresh final-only edge can become temporarily un-updatable. The planner
// must handle both to emit verifiable plans (criteria 6 and 7), so this
// criterion reports violations honestly instead of hiding them.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cnup/analysis.hpp"
#include "cnup/instances.hpp"
#include "cnup/oracle.hpp"
#include "cnup/planner.hpp"

using namespace cnup;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct RandomRun {
  std::uint64_t seed;
  GenMode mode;
  NetworkInstance instance;
  WaitedPlan plan;
  OracleResult oracle;
};

struct Suite {
  int failures = 0;
  std::vector<RandomRun> runs;                       // the 500 instances of criterion 5
  std::vector<std::string> persistence_violations;   // criterion 10 tally
  std::vector<std::string> selfcheck_violations;

  void report(int id, const char* title, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", id, title,
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++failures;
  }

  void absorb(const PlannerProbe& probe, std::uint64_t seed) {
    for (const std::string& v : probe.persistence_violations)
      persistence_violations.push_back("seed " + std::to_string(seed) + ": " + v);
    for (const std::string& v : probe.violations)
      selfcheck_violations.push_back("seed " + std::to_string(seed) + ": " + v);
  }
};

std::string rounds_text(const WaitedPlan& plan) {
  std::string s;
  for (const auto& r : plan.rounds) {
    s += "[";
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
    s += "]";
  }
  return s;
}

}  // namespace

int main() {
  Suite suite;

  // 1. the drain example plans as exactly [[D],[A]] with one wait
  {
    auto start = Clock::now();
    PlannerProbe probe;
    WaitedPlan plan = plan_optimal(fixture("fig1_trivial").instance, &probe);
    double ms = ms_since(start);
    suite.absorb(probe, 0);
    bool pass = plan.status == WaitedPlan::Status::Solved &&
                plan.rounds == std::vector<std::vector<std::string>>{{"D"}, {"A"}} &&
                plan.waits() == 1 && ms < 10.0;
    char detail[128];
    std::snprintf(detail, sizeof detail, "rounds=%s waits=%d time=%.2fms",
                  rounds_text(plan).c_str(), plan.waits(), ms);
    suite.report(1, "fig1 plans [[D],[A]] in under 10 ms", pass, detail);
  }

  // 2. the double diamond is reported unsolvable by both planners and the search
  {
    auto start = Clock::now();
    const NetworkInstance& inst = fixture("fig2_double_diamond").instance;
    PlannerProbe po, ps;
    WaitedPlan opt = plan_optimal(inst, &po);
    WaitedPlan seq = plan_sequential(inst, &ps);
    OracleResult oracle = search_min_rounds(inst);
    double ms = ms_since(start);
    suite.absorb(po, 0);
    suite.absorb(ps, 0);
    bool pass = opt.status == WaitedPlan::Status::NoConsistentOrder &&
                seq.status == WaitedPlan::Status::NoConsistentOrder && !oracle.exists &&
                ms < 1000.0;
    char detail[96];
    std::snprintf(detail, sizeof detail, "exists=%d time=%.2fms", oracle.exists, ms);
    suite.report(2, "fig2 is unsolvable for planner and search", pass, detail);
  }

  // 3. the removable double diamond plans in exactly four rounds and verifies
  {
    auto start = Clock::now();
    const NetworkInstance& inst = fixture("fig4_removable_dd").instance;
    PlannerProbe probe;
    WaitedPlan plan = plan_optimal(inst, &probe);
    double ms = ms_since(start);
    suite.absorb(probe, 0);
    bool verified =
        plan.status == WaitedPlan::Status::Solved && verify_plan(inst, plan).ok;
    bool pass = plan.rounds.size() == 4 && plan.waits() == 3 && verified && ms < 100.0;
    char detail[160];
    std::snprintf(detail, sizeof detail, "rounds=%s verified=%d time=%.2fms",
                  rounds_text(plan).c_str(), verified, ms);
    suite.report(3, "fig4 plans in four rounds, verified", pass, detail);
  }

  // 4. the wait example separates B and C into consecutive rounds after A's
  {
    auto start = Clock::now();
    PlannerProbe probe;
    WaitedPlan plan = plan_optimal(fixture("fig5_wait_example").instance, &probe);
    double ms = ms_since(start);
    suite.absorb(probe, 0);
    auto in_round = [&](std::size_t r, const char* n) {
      return r < plan.rounds.size() &&
             std::find(plan.rounds[r].begin(), plan.rounds[r].end(), n) !=
                 plan.rounds[r].end();
    };
    bool pass = plan.status == WaitedPlan::Status::Solved && plan.rounds.size() == 3 &&
                in_round(0, "A") && in_round(1, "B") && in_round(2, "C") && ms < 10.0;
    char detail[128];
    std::snprintf(detail, sizeof detail, "rounds=%s time=%.2fms",
                  rounds_text(plan).c_str(), ms);
    suite.report(4, "fig5 orders A, wait, B, wait, C", pass, detail);
  }

  // 5. completeness across 500 seeded instances, both generator modes
  {
    auto start = Clock::now();
    const double densities[3] = {0.2, 0.35, 0.5};
    int disagreements = 0;
    for (int m = 0; m < 2; ++m) {
      GenMode mode = m == 0 ? GenMode::Independent : GenMode::Perturb;
      int collected = 0;
      for (std::uint64_t seed = 1; collected < 250 && seed < 100000; ++seed) {
        NetworkInstance inst =
            generate_random(4 + static_cast<int>(seed % 6), densities[seed % 3],
                            seed + (m ? 1000000 : 0), mode);
        if (inst.changed_nodes().size() > 8) continue;
        ++collected;
        PlannerProbe probe;
        WaitedPlan plan = plan_optimal(inst, &probe);
        suite.absorb(probe, seed + (m ? 1000000 : 0));
        OracleResult oracle = search_min_rounds(inst);
        if ((plan.status == WaitedPlan::Status::Solved) != oracle.exists)
          ++disagreements;
        suite.runs.push_back(
            {seed, mode, std::move(inst), std::move(plan), std::move(oracle)});
      }
    }
    double ms = ms_since(start);
    int solvable = 0;
    for (const RandomRun& r : suite.runs) solvable += r.oracle.exists;
    bool pass = suite.runs.size() == 500 && disagreements == 0 && ms < 300000.0;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "instances=%zu solvable=%d disagreements=%d time=%.0fms",
                  suite.runs.size(), solvable, disagreements, ms);
    suite.report(5, "planner solves iff the exhaustive search finds an order", pass,
                 detail);
  }

  // 6. optimality: the planner's round count equals the searched minimum
  {
    int disagreements = 0, checked = 0;
    for (const RandomRun& r : suite.runs) {
      if (!r.oracle.exists) continue;
      ++checked;
      if (static_cast<int>(r.plan.rounds.size()) != *r.oracle.min_rounds)
        ++disagreements;
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "checked=%d disagreements=%d", checked,
                  disagreements);
    suite.report(6, "planner round counts match the searched minimum", checked > 0 && disagreements == 0,
                 detail);
  }

  // 7. every emitted plan passes verification
  {
    int violations = 0, verified = 0;
    for (const char* name : {"fig1_trivial", "fig4_removable_dd", "fig5_wait_example",
                             "fig6_multi_source"}) {
      const NetworkInstance& inst = fixture(name).instance;
      for (bool sequential : {false, true}) {
        WaitedPlan plan = sequential ? plan_sequential(inst) : plan_optimal(inst);
        ++verified;
        if (!verify_plan(inst, plan).ok) ++violations;
      }
    }
    for (const RandomRun& r : suite.runs) {
      if (r.plan.status != WaitedPlan::Status::Solved) continue;
      ++verified;
      if (!verify_plan(r.instance, r.plan).ok) ++violations;
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "plans=%d violations=%d", verified, violations);
    suite.report(7, "prefix and union consistency of every emitted plan", violations == 0,
                 detail);
  }

  // 8. the marking algorithms agree with explicit path enumeration
  {
    auto start = Clock::now();
    int disagreements = 0, configs = 0;
    std::mt19937_64 rng(20240817);
    for (std::uint64_t seed = 1; configs < 1000; ++seed) {
      NetworkInstance inst = generate_random(4 + static_cast<int>(seed % 9),
                                             0.25 + (seed % 4) * 0.1, seed,
                                             seed % 2 ? GenMode::Perturb
                                                      : GenMode::Independent);
      Configuration c = inst.empty_config();
      for (EdgeId e = 0; e < inst.edge_count(); ++e)
        if (rng() & 1) c.insert(e);
      ++configs;

      auto fast_marks = mark_downstream(inst, c);
      auto slow_marks = enumeration::downmarks(inst, c);
      for (NodeIndex u = 0; u < inst.node_count(); ++u)
        if (!(fast_marks[u] == slow_marks[u])) ++disagreements;

      if (is_consistent(inst, c).consistent != enumeration::consistent(inst, c))
        ++disagreements;

      bool fast_cyclic = false, slow_cyclic = false;
      std::vector<UpstreamClass> fast_classes, slow_classes;
      try {
        fast_classes = classify_upstream(inst, c);
      } catch (const AnalysisError&) {
        fast_cyclic = true;
      }
      try {
        slow_classes = enumeration::classify(inst, c);
      } catch (const AnalysisError&) {
        slow_cyclic = true;
      }
      if (fast_cyclic != slow_cyclic) {
        ++disagreements;
      } else if (!fast_cyclic) {
        for (NodeIndex u = 0; u < inst.node_count(); ++u)
          if (fast_classes[u].kind != slow_classes[u].kind ||
              fast_classes[u].anomalous != slow_classes[u].anomalous)
            ++disagreements;
      }
    }
    double ms = ms_since(start);
    char detail[96];
    std::snprintf(detail, sizeof detail, "configs=%d disagreements=%d time=%.0fms",
                  configs, disagreements, ms);
    suite.report(8, "marking agrees with enumeration on 1000 configurations",
                 disagreements == 0, detail);
  }

  // 9. scaling: under 5 s at 200 nodes, at most cubic growth (2x slack) at
  //    constant average degree
  {
    const int sizes[4] = {50, 100, 200, 400};
    double times[4] = {0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) {
      double density = 10.0 / sizes[i];  // 0.05 at n=200, constant degree
      NetworkInstance inst = generate_random(sizes[i], density, 424242);
      auto start = Clock::now();
      WaitedPlan plan = plan_optimal(inst);
      times[i] = ms_since(start);
      (void)plan;
    }
    double base = std::max(times[0], 2.0);  // noise floor
    bool growth_ok = true;
    for (int i = 1; i < 4; ++i) {
      double ratio = static_cast<double>(sizes[i]) / sizes[0];
      if (times[i] > 2.0 * base * ratio * ratio * ratio) growth_ok = false;
    }
    bool pass = times[2] < 5000.0 && growth_ok;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "t(50)=%.1fms t(100)=%.1fms t(200)=%.1fms t(400)=%.1fms", times[0],
                  times[1], times[2], times[3]);
    suite.report(9, "planning scales no worse than cubically", pass, detail);
  }

  // 10. the textbook persistence claims, checked literally on every run above
  {
    bool pass = suite.persistence_violations.empty() && suite.selfcheck_violations.empty();
    char detail[128];
    std::snprintf(detail, sizeof detail, "persistence violations=%zu self-check violations=%zu",
                  suite.persistence_violations.size(), suite.selfcheck_violations.size());
    suite.report(10, "validity and priority persistence at every step", pass, detail);
    std::size_t shown = 0;
    for (const std::string& v : suite.persistence_violations) {
      if (++shown > 6) {
        std::printf("    ... %zu more\n", suite.persistence_violations.size() - 6);
        break;
      }
      std::printf("    %s\n", v.c_str());
    }
    for (const std::string& v : suite.selfcheck_violations)
      std::printf("    self-check: %s\n", v.c_str());
    if (!pass)
      std::printf(
          "    note: these are recorded counterexamples to the literal persistence\n"
          "    claims; a node disconnected by an upstream update faces the stricter\n"
          "    disconnected-candidate downstream condition, and a node connected by a\n"
          "    fresh final-only edge can become temporarily un-updatable. The planner\n"
          "    handles both (criteria 5-7 above), so the claims fail as stated.\n");
  }

  std::printf("%d of 10 criteria passed\n", 10 - suite.failures);
  return suite.failures;
}
