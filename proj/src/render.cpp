#include "cnup/render.hpp"

#include <sstream>

namespace cnup {

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string render_dot(const NetworkInstance& inst, RenderTarget target,
                       const WaitedPlan* plan, int step) {
  std::vector<int> round_of(inst.node_count(), 0);  // 1-based round, 0 = none
  if (target == RenderTarget::PlanStep) {
    if (!plan) throw InstanceError("plan-step rendering needs a plan");
    if (step < 1 || static_cast<std::size_t>(step) > plan->rounds.size())
      throw InstanceError("plan step out of range");
    for (std::size_t r = 0; r < plan->rounds.size(); ++r)
      for (const std::string& name : plan->rounds[r])
        round_of[inst.require_index(name)] = static_cast<int>(r) + 1;
  }

  const auto master = inst.master();
  std::ostringstream os;
  os << "digraph network {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=circle, fontsize=11];\n";
  for (NodeIndex n = 0; n < inst.node_count(); ++n) {
    if (master && *master == n) continue;
    os << "  " << quoted(inst.name(n));
    std::string attrs;
    if (n == inst.source()) attrs = "shape=doublecircle";
    if (target == RenderTarget::PlanStep && round_of[n] != 0) {
      if (!attrs.empty()) attrs += ", ";
      if (round_of[n] == step)
        attrs += "style=filled, fillcolor=lightblue";
      else if (round_of[n] < step)
        attrs += "style=filled, fillcolor=gray85";
    }
    if (!attrs.empty()) os << " [" << attrs << "]";
    os << ";\n";
  }
  for (const Edge& e : inst.edges()) {
    if (master && (e.from == *master || e.to == *master)) continue;
    bool want_initial = target != RenderTarget::Final && label_in_initial(e.label);
    bool want_final = target != RenderTarget::Initial && label_in_final(e.label);
    std::string line = "  " + quoted(inst.name(e.from)) + " -> " + quoted(inst.name(e.to));
    if (want_initial) os << line << " [style=solid];\n";
    if (want_final) os << line << " [style=dashed];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace cnup
