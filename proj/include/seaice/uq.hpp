#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "seaice/integrator.hpp"

namespace seaice {

struct Momenta {
  Vec2 linear;          ///< sum m v
  double angular = 0.0; ///< sum I omega
};

/// Total momenta of floes [first, last) (whole field by default).
Momenta total_momenta(const FloeField& field, const MaterialParams& mat, std::size_t first = 0,
                      std::size_t last = static_cast<std::size_t>(-1));

/// Ensemble mean and sample standard deviation (divisor N - 1) per record.
struct MomentumSeries {
  std::vector<double> times;
  std::vector<Vec2> mean_linear;
  std::vector<Vec2> std_linear;
  std::vector<double> mean_angular;
  std::vector<double> std_angular;
  /// per member, per record (member-major); kept for pooled statistics
  std::vector<std::vector<Momenta>> members;
};

struct EnsembleOptions {
  int members = 100;
  double t_final = 0.0;     ///< s, absolute
  int record_every = 1;     ///< steps
  std::uint64_t seed = 0;
  int threads = 1;
  /// floes contributing to the momenta: [first, last)
  std::size_t first_floe = 0;
  std::size_t last_floe = static_cast<std::size_t>(-1);
};

/// Run `members` copies of the identical initial state with independent
/// noise streams and summarise total momenta.
MomentumSeries ensemble_forecast(const SimulationState& ic, const MaterialParams& mat, const IntegratorOptions& opt,
                                 const InflationNoise& inflation, const EnsembleOptions& ens);

/// Run f(member) for member in [0, n) on up to `threads` threads. Exceptions
/// from workers are rethrown (lowest member id first).
void parallel_members(int n, int threads, const std::function<void(int)>& f);

struct PdfTable {
  double lo = 0.0;
  double hi = 0.0;
  double width = 0.0;
  std::vector<double> centers;
  std::vector<double> density;
  double mean = 0.0;     ///< moment-matched normal fit
  double stddev = 0.0;
  bool degenerate = false;  ///< all samples identical
  [[nodiscard]] double normal_fit(double x) const;
};

/// Normalised fixed-bin histogram over [min, max].
PdfTable empirical_pdf(std::span<const double> samples, int bins = 100);

double sample_mean(std::span<const double> x);
double sample_stddev(std::span<const double> x);
/// Fourth standardised moment minus 3 (population moments).
double excess_kurtosis(std::span<const double> x);

/// Contact loads on each of the first `large_count` floes from the other
/// floes, sampled every step (step-averaged over sub-steps).
struct ContactForceSeries {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<std::vector<Vec2>> force;    ///< [large floe][step]
  std::vector<std::vector<double>> torque; ///< [large floe][step]
};

/// Advance `state` for `steps` steps recording the large-floe contact series.
ContactForceSeries contact_force_series(SimulationState& state, int large_count, std::int64_t steps,
                                        const MaterialParams& mat, const IntegratorOptions& opt, Rng& rng);

}  // namespace seaice
