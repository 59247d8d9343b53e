#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seaice/integrator.hpp"
#include "seaice/superfloe.hpp"
#include "seaice/uq.hpp"

namespace seaice {

/// Noisy positions and angles of the observed floes at one time.
struct ObservationRecord {
  double time = 0.0;
  std::vector<int> floes;  ///< indices into the observed field
  std::vector<Vec2> position;
  std::vector<double> angle;
  double sigma_x = 80.0;      ///< m, per position component
  double sigma_angle = 0.01;  ///< rad
};

struct ObservationConfig {
  int observed_count = 6;  ///< the first floes of the field are observed
  double sigma_x = 80.0;
  double sigma_angle = 0.01;
};

/// Observe the first `observed_count` floes with independent Gaussian noise.
/// Positions wrap into the domain and angles into [0, 2 pi).
ObservationRecord observe(const SimulationState& truth, const ObservationConfig& cfg, Rng& rng);

/// Per large floe force and torque noise amplitudes for the forecast model.
struct InflationCoefficients {
  std::vector<Vec2> force_std;     ///< N
  std::vector<double> torque_std;  ///< N m
  std::int64_t steps = 0;          ///< length of the contact series used
  int lag = 0;                     ///< M, in steps

  [[nodiscard]] InflationNoise noise() const;
};

/// Standard deviation (divisor N - M - 1) of the lag-M differences of each
/// contact series.
InflationCoefficients compute_inflation(const ContactForceSeries& series, int lag);
/// Same for a single scalar series.
double lagged_difference_std(std::span<const double> series, int lag);

/// Fixed layout of the assimilated state vector:
/// x1[0..n), x2[0..n), angle[0..n), v1[0..n), v2[0..n), omega[0..n), then
/// the real and imaginary part of each independent ocean mode.
struct StateLayout {
  std::size_t floes = 0;
  std::vector<int> modes;  ///< indices of independent modes in OceanState
  double side = 0.0;

  [[nodiscard]] std::size_t size() const { return 6 * floes + 2 * modes.size(); }
  [[nodiscard]] std::size_t x1(std::size_t i) const { return i; }
  [[nodiscard]] std::size_t x2(std::size_t i) const { return floes + i; }
  [[nodiscard]] std::size_t angle(std::size_t i) const { return 2 * floes + i; }
  [[nodiscard]] std::size_t v1(std::size_t i) const { return 3 * floes + i; }
  [[nodiscard]] std::size_t v2(std::size_t i) const { return 4 * floes + i; }
  [[nodiscard]] std::size_t omega(std::size_t i) const { return 5 * floes + i; }
  [[nodiscard]] std::size_t mode_re(std::size_t q) const { return 6 * floes + 2 * q; }
  [[nodiscard]] std::size_t mode_im(std::size_t q) const { return 6 * floes + 2 * q + 1; }
  /// Period of each component (0 for non-periodic ones).
  [[nodiscard]] std::vector<double> periods() const;
};

StateLayout make_layout(const SimulationState& state);
std::vector<double> pack(const SimulationState& state, const StateLayout& layout);
/// Write a state vector back, wrapping positions and angles and restoring
/// the conjugate partners of the ocean modes.
void unpack(std::span<const double> vec, const StateLayout& layout, SimulationState& state);

/// One scalar observation of a state component.
struct ScalarObservation {
  std::size_t component = 0;
  double value = 0.0;
  double variance = 0.0;
};

/// Member-major ensemble matrix.
struct EnsembleMatrix {
  std::size_t members = 0;
  std::size_t dim = 0;
  std::vector<double> data;

  EnsembleMatrix() = default;
  EnsembleMatrix(std::size_t n, std::size_t d) : members(n), dim(d), data(n * d, 0.0) {}
  double& operator()(std::size_t m, std::size_t k) { return data[m * dim + k]; }
  double operator()(std::size_t m, std::size_t k) const { return data[m * dim + k]; }
};

struct UpdateStats {
  int applied = 0;
  int skipped = 0;  ///< observations whose prior spread was zero
};

/// Deterministic sequential EAKF. Components with a nonzero period are
/// treated as circular: anomalies are taken as wrapped differences and the
/// updated values are wrapped back into [0, period).
UpdateStats eakf_update(EnsembleMatrix& ens, std::span<const ScalarObservation> obs, std::span<const double> periods);

/// Ensemble mean and sample spread (divisor N - 1) of one component.
struct Moments {
  double mean = 0.0;
  double spread = 0.0;
};
Moments component_moments(const EnsembleMatrix& ens, std::size_t k, double period = 0.0);

double rmse(std::span<const double> truth, std::span<const double> estimate);
/// Pattern correlation. Throws UndefinedStatisticError when either series is
/// constant.
double pcc(std::span<const double> truth, std::span<const double> estimate);

enum class ForecastModel { full, bare, inflation };
const char* to_string(ForecastModel m);

struct DaScenario {
  FloeField field;         ///< truth initial floes, largest first
  OceanSpec truth_ocean;
  OceanSpec forecast_ocean;
  MaterialParams material;
  IntegratorOptions integrator;
  ForecastModel model = ForecastModel::inflation;
  int large_count = 6;      ///< L0
  int superfloe_count = 6;  ///< Ls, used to derive the inflation
  int members = 1000;
  int cycles = 20;
  int obs_interval_steps = 100;
  double sigma_x = 80.0;
  double sigma_angle = 0.01;
  /// Steps of the superfloe run used for the inflation statistics.
  std::int64_t inflation_steps = 10'000;
  std::int64_t inflation_spinup = 1'000;
  std::uint64_t seed = 0;
  int threads = 1;
  /// Reuse previously computed coefficients instead of running the
  /// superfloe model.
  std::optional<InflationCoefficients> inflation;
};

/// One row of the assimilation output.
struct DaRecord {
  int cycle = 0;
  double time = 0.0;
  std::string variable;
  double truth = 0.0;
  double mean = 0.0;
  double spread = 0.0;
};

struct SkillScore {
  double rmse = 0.0;
  double pcc = 0.0;
  int series = 0;      ///< series averaged for the RMSE
  int pcc_series = 0;  ///< series with a defined PCC
};

struct DaResult {
  std::vector<DaRecord> records;
  SkillScore velocity;  ///< floe velocities of the observed floes
  SkillScore ocean;     ///< real and imaginary parts of the forecast GB modes
  std::optional<InflationCoefficients> inflation;
  int skipped_observations = 0;
};

/// Run the superfloe model of the scenario's truth field and derive the
/// inflation coefficients of its large floes at the observation lag.
InflationCoefficients superfloe_inflation(const DaScenario& scenario);

/// Twin experiment: simulate the truth, forecast the ensemble with the chosen
/// model, observe the large floes every obs_interval_steps and update.
DaResult assimilate(const DaScenario& scenario);

/// Average RMSE and PCC over paired truth/estimate series.
SkillScore score_series(const std::vector<std::vector<double>>& truth, const std::vector<std::vector<double>>& estimate);

/// Skill of the posterior means in a list of records, per variable class:
/// floe velocities (v1/v2 rows) and geostrophic ocean modes (gb rows).
struct SkillSummary {
  SkillScore velocity;
  SkillScore ocean;
};
SkillSummary score_records(const std::vector<DaRecord>& records);

}  // namespace seaice
