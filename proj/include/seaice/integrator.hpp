#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "seaice/contact.hpp"
#include "seaice/floe.hpp"
#include "seaice/ocean.hpp"
#include "seaice/rng.hpp"

namespace seaice {

struct SimulationState {
  FloeField field;
  OceanState ocean;
  double time = 0.0;  ///< s
};

/// Additive stochastic forcing on floe velocity and spin. Entries beyond the
/// vector sizes are treated as zero.
struct InflationNoise {
  bool enabled = false;
  std::vector<Vec2> force_std;    ///< N, per floe and component
  std::vector<double> torque_std; ///< N m, per floe
};

struct IntegratorOptions {
  double dt = 25.0;  ///< s
  bool drag = true;
  bool contacts = true;
  bool advance_ocean = true;
  bool substepping = true;
  /// Required ratio of the shortest contact oscillation period to the sub-step.
  double period_margin = 10.0;
  int max_substeps = 200'000;
  /// Smallest gap (m) below which a non-touching pair is tracked during a step.
  double min_skin = 50.0;
  NeighborSearch search = NeighborSearch::grid;
};

/// Quadratic ocean drag alpha (u_o - v)|u_o - v|, alpha = d_o rho_o pi r^2.
Vec2 drag_force(const Floe& floe, const Vec2& ocean_velocity, const MaterialParams& mat);
/// beta (curl/2 - omega)|curl/2 - omega|, beta = d_o rho_o pi r^4.
double drag_torque(const Floe& floe, double ocean_curl, const MaterialParams& mat);

/// Step-averaged loads on the first `large_count` floes from the remaining
/// ones. Filled by step() when passed.
struct LoadTap {
  int large_count = 0;
  std::vector<Vec2> force;
  std::vector<double> torque;
};

struct StepInfo {
  int substeps = 1;
  int contacts = 0;
};

/// Gap (m) within which pairs are tracked for one step: twice the distance
/// the fastest floe covers in a step, floored at opt.min_skin.
double search_skin(const FloeField& field, const IntegratorOptions& opt);

/// Number of equal sub-steps that resolve every contact oscillation for
/// pairs touching now or within reach during the step.
int required_substeps(const FloeField& field, const MaterialParams& mat, const IntegratorOptions& opt);
/// Same, for an explicit list of candidate pairs.
int required_substeps(const FloeField& field, const std::vector<std::pair<int, int>>& candidates,
                      const MaterialParams& mat, const IntegratorOptions& opt);

/// Advance floes and ocean by one step of opt.dt. Throws NumericalBlowupError.
StepInfo step(SimulationState& state, const MaterialParams& mat, const IntegratorOptions& opt,
              const InflationNoise& inflation, Rng& rng, LoadTap* tap = nullptr);

using SnapshotSink = std::function<void(const SimulationState&, std::int64_t step_index)>;

/// Advance until t_final, calling sink on the initial state and every
/// record_every steps. Returns the number of steps taken.
std::int64_t run(SimulationState& state, double t_final, int record_every, const SnapshotSink& sink,
                 const MaterialParams& mat, const IntegratorOptions& opt, const InflationNoise& inflation, Rng& rng);

}  // namespace seaice
