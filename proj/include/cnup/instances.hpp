#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cnup/netmodel.hpp"

namespace cnup {

/// Canonical worked example shipped with the tool, plus its expected
/// planning outcome.
struct Fixture {
  std::string name;
  std::string text;  // instance file contents, verbatim
  NetworkInstance instance;
  bool solvable = false;
  std::optional<int> min_rounds;
  std::string notes;
};

const std::vector<Fixture>& all_fixtures();
const Fixture& fixture(std::string_view name);  // throws InstanceError on unknown name
std::vector<std::string> fixture_names();

enum class GenMode {
  /// Sample the two configurations independently over private topological
  /// orders.
  Independent,
  /// Sample the initial configuration, then rewire the out-edges of a few
  /// nodes within the same order; keeps most edges shared and produces the
  /// contended shapes the independent mode rarely hits.
  Perturb,
};

/// Deterministic random proper instance: `nodes` total nodes including the
/// source, forward-edge probability `density` per configuration.
NetworkInstance generate_random(int nodes, double density, std::uint64_t seed,
                                GenMode mode = GenMode::Independent);

}  // namespace cnup
