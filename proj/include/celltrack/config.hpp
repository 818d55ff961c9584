#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>

#include "celltrack/filters.hpp"
#include "celltrack/models.hpp"
#include "celltrack/simulator.hpp"

namespace celltrack {

struct MetricsConfig {
  double ospa_p = 1.0;
  double ospa_c = 25.0;
  int ospa2_window = 20;
  double tra_radius = 25.0;
};

/// Which truth generator `simulate` uses.
enum class ScenarioKind { Random, Fixed12, Fixed6 };

struct RunConfig {
  SystemModel model = SystemModel::cell_default();
  FilterConfig filter;
  ScenarioConfig simulator;
  ScenarioKind scenario = ScenarioKind::Random;
  MetricsConfig metrics;
  std::uint64_t seed = 1;

  /// Pushes `seed` into the filter and simulator.
  void apply_seed(std::uint64_t s);
  void validate() const;
};

/// Sections "model", "filter", "simulator", "metrics" and a top-level "seed".
/// Missing keys keep their defaults; unknown keys are rejected with their path.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace celltrack
