#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "cnup/analysis.hpp"
#include "cnup/instances.hpp"
#include "cnup/netmodel.hpp"
#include "cnup/oracle.hpp"
#include "cnup/planner.hpp"
#include "cnup/render.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;     // bad input, unreadable files, parse errors
constexpr int kExitNegative = 2;  // no consistent order / verification violation

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cnup::InstanceError("cannot read \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw cnup::InstanceError("cannot write \"" + tmp + "\"");
    out << content;
  }
  fs::rename(tmp, path);
}

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty())
    std::cout << content;
  else
    write_file_atomic(out_path, content);
}

cnup::NetworkInstance load_instance(const std::string& instance_path,
                                    const std::string& fixture_name) {
  if (!fixture_name.empty()) return cnup::fixture(fixture_name).instance;
  return cnup::parse_instance(read_file(instance_path), cnup::MultiSourcePolicy::Reduce);
}

int run_plan_batch(const std::string& dir, bool sequential) {
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (entry.path().extension() == ".json" && name.find(".plan.") == std::string::npos)
      files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "error: no instance files in \"" << dir << "\"\n";
    return kExitUsage;
  }

  struct Item {
    std::string summary;
    int code = kExitOk;
  };
  std::vector<Item> items(files.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= files.size()) return;
      try {
        cnup::NetworkInstance inst =
            cnup::parse_instance(read_file(files[i]), cnup::MultiSourcePolicy::Reduce);
        cnup::WaitedPlan plan =
            sequential ? cnup::plan_sequential(inst) : cnup::plan_optimal(inst);
        std::string out = fs::path(files[i]).replace_extension(".plan.json").string();
        write_file_atomic(out, cnup::plan_to_json(plan));
        bool solved = plan.status == cnup::WaitedPlan::Status::Solved;
        items[i].summary =
            files[i] + ": " +
            (solved ? "Solved, rounds=" + std::to_string(plan.rounds.size()) +
                          ", waits=" + std::to_string(plan.waits())
                    : "NoConsistentOrder");
        items[i].code = solved ? kExitOk : kExitNegative;
      } catch (const std::exception& e) {
        items[i].summary = files[i] + ": error: " + e.what();
        items[i].code = kExitUsage;
      }
    }
  };
  unsigned n = std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                                  static_cast<unsigned>(files.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int code = kExitOk;
  for (const Item& item : items) {
    std::cout << item.summary << "\n";
    if (item.code == kExitUsage)
      code = kExitUsage;
    else if (item.code == kExitNegative && code == kExitOk)
      code = kExitNegative;
  }
  return code;
}

json violation_json(const cnup::PlanViolation& v) {
  json j;
  j["kind"] = v.kind;
  j["location"] = v.location;
  j["witness"] = v.witness;
  j["witnessCycle"] = v.witness_cycle;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"per-packet-consistent switch update planning"};
  app.require_subcommand(1);

  std::string instance_path, fixture_name, out_path, plan_path, batch_dir;
  std::string mode = "optimal", target = "union", gen_mode = "independent";
  std::string export_dir;
  int node_limit = 10, step = 1, gen_nodes = 8;
  double gen_density = 0.3;
  std::uint64_t gen_seed = 1;

  auto add_input = [&](CLI::App* cmd) {
    auto* inst = cmd->add_option("--instance", instance_path, "instance file (JSON)");
    auto* fix = cmd->add_option("--fixture", fixture_name, "built-in fixture name");
    inst->excludes(fix);
  };

  auto* plan_cmd = app.add_subcommand("plan", "compute an update plan");
  add_input(plan_cmd);
  plan_cmd->add_option("--batch", batch_dir, "plan every instance in a directory");
  plan_cmd->add_option("--mode", mode, "optimal or sequential")
      ->check(CLI::IsMember({"optimal", "sequential"}));
  plan_cmd->add_option("-o,--output", out_path, "write the plan here");

  auto* verify_cmd = app.add_subcommand("verify", "check a plan against an instance");
  add_input(verify_cmd);
  verify_cmd->add_option("--plan", plan_path, "plan file (JSON)")->required();

  auto* oracle_cmd =
      app.add_subcommand("oracle", "exhaustive minimal-round search (small instances)");
  add_input(oracle_cmd);
  oracle_cmd->add_option("--node-limit", node_limit, "changed-node limit (default 10)");

  auto* gen_cmd = app.add_subcommand("gen", "generate a random instance");
  gen_cmd->add_option("--nodes", gen_nodes, "node count (>= 2)")->required();
  gen_cmd->add_option("--density", gen_density, "forward-edge probability (0, 1]")
      ->required();
  gen_cmd->add_option("--seed", gen_seed, "RNG seed")->required();
  gen_cmd->add_option("--mode", gen_mode, "independent or perturb")
      ->check(CLI::IsMember({"independent", "perturb"}));
  gen_cmd->add_option("-o,--output", out_path, "write the instance here");

  auto* render_cmd = app.add_subcommand("render", "emit a DOT drawing");
  add_input(render_cmd);
  render_cmd->add_option("--target", target, "initial, final, union or plan-step")
      ->check(CLI::IsMember({"initial", "final", "union", "plan-step"}));
  render_cmd->add_option("--plan", plan_path, "plan file (for plan-step)");
  render_cmd->add_option("--step", step, "1-based round to highlight");
  render_cmd->add_option("-o,--output", out_path, "write the DOT here");

  auto* fixtures_cmd = app.add_subcommand("fixtures", "list built-in fixtures");
  fixtures_cmd->add_option("--export", export_dir, "write fixture files to a directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (plan_cmd->parsed()) {
      if (!batch_dir.empty()) {
        if (!instance_path.empty() || !fixture_name.empty()) {
          std::cerr << "error: --batch excludes --instance/--fixture\n";
          return kExitUsage;
        }
        return run_plan_batch(batch_dir, mode == "sequential");
      }
      if (instance_path.empty() && fixture_name.empty()) {
        std::cerr << "error: plan needs --instance, --fixture or --batch\n";
        return kExitUsage;
      }
      cnup::NetworkInstance inst = load_instance(instance_path, fixture_name);
      cnup::WaitedPlan plan =
          mode == "sequential" ? cnup::plan_sequential(inst) : cnup::plan_optimal(inst);
      emit(cnup::plan_to_json(plan), out_path);
      return plan.status == cnup::WaitedPlan::Status::Solved ? kExitOk : kExitNegative;
    }

    if (verify_cmd->parsed()) {
      if (instance_path.empty() && fixture_name.empty()) {
        std::cerr << "error: verify needs --instance or --fixture\n";
        return kExitUsage;
      }
      cnup::NetworkInstance inst = load_instance(instance_path, fixture_name);
      cnup::WaitedPlan plan = cnup::plan_from_json(read_file(plan_path));
      cnup::VerifyResult result = cnup::verify_plan(inst, plan);
      json j;
      j["verdict"] = result.ok ? "ok" : "violation";
      j["regime"] = result.regime;
      if (result.violation) j["violation"] = violation_json(*result.violation);
      std::cout << j.dump(2) << "\n";
      return result.ok ? kExitOk : kExitNegative;
    }

    if (oracle_cmd->parsed()) {
      if (instance_path.empty() && fixture_name.empty()) {
        std::cerr << "error: oracle needs --instance or --fixture\n";
        return kExitUsage;
      }
      cnup::NetworkInstance inst = load_instance(instance_path, fixture_name);
      cnup::OracleResult result = cnup::search_min_rounds(inst, node_limit);
      json j;
      j["exists"] = result.exists;
      if (result.min_rounds) j["minRounds"] = *result.min_rounds;
      if (result.witness) j["witness"] = json::parse(cnup::plan_to_json(*result.witness));
      std::cout << j.dump(2) << "\n";
      return result.exists ? kExitOk : kExitNegative;
    }

    if (gen_cmd->parsed()) {
      cnup::NetworkInstance inst = cnup::generate_random(
          gen_nodes, gen_density, gen_seed,
          gen_mode == "perturb" ? cnup::GenMode::Perturb : cnup::GenMode::Independent);
      emit(cnup::serialize_instance(inst), out_path);
      return kExitOk;
    }

    if (render_cmd->parsed()) {
      if (instance_path.empty() && fixture_name.empty()) {
        std::cerr << "error: render needs --instance or --fixture\n";
        return kExitUsage;
      }
      cnup::NetworkInstance inst = load_instance(instance_path, fixture_name);
      cnup::RenderTarget t = cnup::RenderTarget::Union;
      if (target == "initial")
        t = cnup::RenderTarget::Initial;
      else if (target == "final")
        t = cnup::RenderTarget::Final;
      else if (target == "plan-step")
        t = cnup::RenderTarget::PlanStep;
      if (t == cnup::RenderTarget::PlanStep) {
        if (plan_path.empty()) {
          std::cerr << "error: plan-step rendering needs --plan\n";
          return kExitUsage;
        }
        cnup::WaitedPlan plan = cnup::plan_from_json(read_file(plan_path));
        emit(cnup::render_dot(inst, t, &plan, step), out_path);
      } else {
        emit(cnup::render_dot(inst, t), out_path);
      }
      return kExitOk;
    }

    if (fixtures_cmd->parsed()) {
      for (const cnup::Fixture& f : cnup::all_fixtures()) {
        std::cout << f.name << ": nodes=" << f.instance.node_count()
                  << " changed=" << f.instance.changed_nodes().size()
                  << (f.solvable ? " solvable" : " unsolvable");
        if (f.min_rounds) std::cout << " minRounds=" << *f.min_rounds;
        std::cout << " -- " << f.notes << "\n";
        if (!export_dir.empty()) {
          fs::create_directories(export_dir);
          write_file_atomic((fs::path(export_dir) / (f.name + ".json")).string(), f.text);
        }
      }
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
