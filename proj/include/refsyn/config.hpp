#pragma once

// JSON problem descriptions: either a thermal network or raw affine modes,
// plus the specification and refinement settings.

#include "refsyn/abstraction.hpp"
#include "refsyn/bdd.hpp"
#include "refsyn/synthesis.hpp"
#include "refsyn/thermal.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace refsyn {

struct RefineSettings {
  std::size_t splits_per_iteration = 1;
  double min_width = 0.0;
  std::size_t max_iterations = 100;
};

struct ProblemConfig {
  std::string name;
  System system;
  std::optional<ThermalConfig> thermal;
  Spec spec;
  ActionScope scope = ActionScope::Enabled;
  RefineSettings refine;
  bdd::ManagerConfig manager;
  /// Optional box whose cells should all become winning.
  std::optional<Box> target;
};

/// Throws ConfigError naming the offending JSON path.
ProblemConfig parse_config(const std::string &json_text, const std::string &origin = "config");
ProblemConfig load_config(const std::filesystem::path &path);

/// Spec files hold {"safe": .., "persist": .., "goals": [..]}.
Spec load_spec(const std::filesystem::path &path);
Spec parse_spec(const std::string &json_text, const std::string &origin = "spec");

} // namespace refsyn
