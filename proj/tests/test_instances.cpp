#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>

#include "cnup/analysis.hpp"
#include "cnup/instances.hpp"
#include "cnup/oracle.hpp"
#include "cnup/planner.hpp"

using namespace cnup;

TEST_CASE("every fixture parses and both configurations are proper") {
  CHECK(fixture_names().size() == 5);
  for (const Fixture& f : all_fixtures()) {
    CHECK(is_consistent(f.instance, f.instance.config_initial()).consistent);
    CHECK(is_consistent(f.instance, f.instance.config_final()).consistent);
  }
  CHECK_THROWS_AS(fixture("fig3"), InstanceError);
}

TEST_CASE("fixture expectations match the planner and the exhaustive search") {
  for (const Fixture& f : all_fixtures()) {
    WaitedPlan plan = plan_optimal(f.instance);
    OracleResult oracle = search_min_rounds(f.instance);
    CHECK((plan.status == WaitedPlan::Status::Solved) == f.solvable);
    CHECK(oracle.exists == f.solvable);
    if (f.solvable) {
      REQUIRE(f.min_rounds.has_value());
      CHECK(static_cast<int>(plan.rounds.size()) == *f.min_rounds);
      CHECK(*oracle.min_rounds == *f.min_rounds);
    }
  }
}

TEST_CASE("shipped fixture files equal the built-in definitions") {
  for (const Fixture& f : all_fixtures()) {
    std::ifstream in(std::string(CNUP_DATA_DIR) + "/" + f.name + ".json",
                     std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == f.text);
  }
}

TEST_CASE("generator output always parses as proper") {
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    for (GenMode mode : {GenMode::Independent, GenMode::Perturb}) {
      NetworkInstance inst = generate_random(2 + seed % 12, 0.1 + (seed % 9) * 0.1,
                                             seed, mode);
      CHECK_NOTHROW(parse_instance(serialize_instance(inst)));
    }
  }
}

TEST_CASE("generator is deterministic per seed") {
  for (GenMode mode : {GenMode::Independent, GenMode::Perturb}) {
    std::string a = serialize_instance(generate_random(10, 0.4, 99, mode));
    std::string b = serialize_instance(generate_random(10, 0.4, 99, mode));
    CHECK(a == b);
    std::string c = serialize_instance(generate_random(10, 0.4, 100, mode));
    CHECK(a != c);
  }
}

TEST_CASE("two nodes leave room for at most one edge per configuration") {
  NetworkInstance inst = generate_random(2, 1.0, 5);
  CHECK(out(inst, inst.config_initial(), inst.source()).size() <= 1);
  CHECK(out(inst, inst.config_final(), inst.source()).size() <= 1);
}

TEST_CASE("generator rejects degenerate parameters") {
  CHECK_THROWS_AS(generate_random(1, 0.5, 1), InstanceError);
  CHECK_THROWS_AS(generate_random(5, 0.0, 1), InstanceError);
  CHECK_THROWS_AS(generate_random(5, 1.5, 1), InstanceError);
}

TEST_CASE("perturb mode keeps most rules shared") {
  int shared = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    NetworkInstance inst = generate_random(10, 0.4, seed, GenMode::Perturb);
    for (const Edge& e : inst.edges()) {
      ++total;
      if (e.label == EdgeLabel::Both) ++shared;
    }
  }
  CHECK(total > 0);
  CHECK(shared * 2 > total);  // rewiring touches only a third of the nodes
}
