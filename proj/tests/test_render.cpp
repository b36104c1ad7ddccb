#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cnup/instances.hpp"
#include "cnup/planner.hpp"
#include "cnup/render.hpp"

using namespace cnup;

TEST_CASE("union rendering draws label conventions, shared edges doubled") {
  const NetworkInstance& inst = fixture("fig1_trivial").instance;
  std::string dot = render_dot(inst, RenderTarget::Union);
  CHECK(dot.find("\"A\" -> \"C\" [style=solid];") != std::string::npos);
  CHECK(dot.find("\"A\" -> \"D\" [style=dashed];") != std::string::npos);
  // Both-labeled edges appear once solid and once dashed
  CHECK(dot.find("\"H1\" -> \"A\" [style=solid];") != std::string::npos);
  CHECK(dot.find("\"H1\" -> \"A\" [style=dashed];") != std::string::npos);
  CHECK(dot.find("\"H1\" [shape=doublecircle];") != std::string::npos);
}

TEST_CASE("initial and final renderings filter by configuration") {
  const NetworkInstance& inst = fixture("fig1_trivial").instance;
  std::string initial = render_dot(inst, RenderTarget::Initial);
  CHECK(initial.find("\"A\" -> \"C\"") != std::string::npos);
  CHECK(initial.find("\"A\" -> \"D\"") == std::string::npos);
  CHECK(initial.find("dashed") == std::string::npos);
  std::string final_dot = render_dot(inst, RenderTarget::Final);
  CHECK(final_dot.find("\"A\" -> \"D\"") != std::string::npos);
  CHECK(final_dot.find("\"A\" -> \"C\"") == std::string::npos);
  CHECK(final_dot.find("solid") == std::string::npos);
}

TEST_CASE("plan-step rendering highlights the chosen round") {
  const NetworkInstance& inst = fixture("fig1_trivial").instance;
  WaitedPlan plan = plan_optimal(inst);
  std::string dot = render_dot(inst, RenderTarget::PlanStep, &plan, 2);
  CHECK(dot.find("\"A\" [style=filled, fillcolor=lightblue];") != std::string::npos);
  CHECK(dot.find("\"D\" [style=filled, fillcolor=gray85];") != std::string::npos);
  CHECK_THROWS_AS(render_dot(inst, RenderTarget::PlanStep, &plan, 3), InstanceError);
  CHECK_THROWS_AS(render_dot(inst, RenderTarget::PlanStep, nullptr, 1), InstanceError);
}

TEST_CASE("the synthetic master never shows up in drawings") {
  const NetworkInstance& inst = fixture("fig6_multi_source").instance;
  std::string dot = render_dot(inst, RenderTarget::Union);
  CHECK(dot.find("master") == std::string::npos);
  CHECK(dot.find("\"HA\"") != std::string::npos);
}

TEST_CASE("rendering is deterministic") {
  const NetworkInstance& inst = fixture("fig4_removable_dd").instance;
  CHECK(render_dot(inst, RenderTarget::Union) == render_dot(inst, RenderTarget::Union));
}
