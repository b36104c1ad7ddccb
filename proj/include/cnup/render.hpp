#pragma once

#include <string>

#include "cnup/netmodel.hpp"
#include "cnup/planner.hpp"

namespace cnup {

enum class RenderTarget { Initial, Final, Union, PlanStep };

/// DOT rendering with the conventions of the instance files: initial-only
/// edges solid, final-only dashed, shared edges drawn doubled (one solid,
/// one dashed arrow). PlanStep highlights the nodes of round `step`
/// (1-based) and shades earlier rounds. The synthetic master of a
/// multi-source reduction is stripped.
std::string render_dot(const NetworkInstance& inst, RenderTarget target,
                       const WaitedPlan* plan = nullptr, int step = 0);

}  // namespace cnup
