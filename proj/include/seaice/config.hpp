#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "seaice/da.hpp"
#include "seaice/floe.hpp"
#include "seaice/integrator.hpp"
#include "seaice/ocean.hpp"
#include "seaice/superfloe.hpp"

namespace seaice {

struct UqConfig {
  int members = 1000;
  double horizon = 2.0 * 86'400.0;  ///< s, length of the ensemble forecast
  double burn_in = 0.25;  ///< fraction of the long run discarded before statistics
  int bins = 100;
};

struct DaConfig {
  int members = 1000;
  int cycles = 100;
  int obs_interval_steps = 100;
  double sigma_x = 80.0;       ///< m
  double sigma_angle = 0.01;   ///< rad
  ForecastModel forecast = ForecastModel::inflation;
  bool forecast_gravity = true;  ///< forecast ocean keeps the gravity modes
  int forecast_k_max = -1;       ///< -1: same as the truth ocean
  std::int64_t inflation_steps = 10'000;
  std::int64_t inflation_spinup = 1'000;
};

/// Everything needed to reproduce a run. Defaults describe the 18-floe
/// scenario with the standard material and ocean parameters.
struct ScenarioConfig {
  Domain domain;
  MaterialParams material;
  FieldGenerator generator{{1.0, 1500.0}, {2.0, 1.3}, {1000.0, 10'000.0}, {0.1, 3.5}, 50, 0.85};
  int floe_count = 18;
  ReductionConfig reduction{6, 6, 1.4142135623730951, ThicknessRule::area_consistent};
  OceanSpec ocean;
  IntegratorOptions integrator;
  double t_final = 120.0 * 86'400.0;  ///< s
  int record_every = 100;             ///< steps between trajectory snapshots
  UqConfig uq;
  DaConfig da;
  std::int64_t bench_steps = 10'000;
  std::uint64_t seed = 0;
  int threads = 1;

  /// Check cross-field invariants; throws ConfigurationError.
  void validate() const;
};

/// Parsed configuration plus one line per key that differs from the default.
struct ParsedConfig {
  ScenarioConfig config;
  std::vector<std::string> deviations;
};

/// Parse `key = value [unit]` lines ('#' starts a comment). Omitted keys keep
/// their defaults; a missing unit means SI. Throws ParseError with the line
/// number on unknown keys, malformed values, wrong units or violated
/// invariants.
ParsedConfig parse_config_text(const std::string& text);
ParsedConfig parse_config(const std::filesystem::path& path);

/// Reference of every key with its unit family and default value.
std::string config_reference();

/// Canonical `key = value unit` rendering of every key (SI units).
std::string render_config(const ScenarioConfig& cfg);

/// Scenario pieces assembled from a configuration.
DaScenario make_da_scenario(const ScenarioConfig& cfg, const FloeField& field);

}  // namespace seaice
