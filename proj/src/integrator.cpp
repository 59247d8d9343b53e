#include "seaice/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "seaice/error.hpp"

namespace seaice {

Vec2 drag_force(const Floe& floe, const Vec2& ocean_velocity, const MaterialParams& mat) {
  const double alpha = mat.ocean_drag * mat.water_density * std::numbers::pi * floe.radius * floe.radius;
  const Vec2 slip = ocean_velocity - floe.velocity;
  return slip * (alpha * slip.norm());
}

double drag_torque(const Floe& floe, double ocean_curl, const MaterialParams& mat) {
  const double r2 = floe.radius * floe.radius;
  const double beta = mat.ocean_drag * mat.water_density * std::numbers::pi * r2 * r2;
  const double slip = 0.5 * ocean_curl - floe.omega;
  return beta * slip * std::abs(slip);
}

double search_skin(const FloeField& field, const IntegratorOptions& opt) {
  double vmax = 0.0;
  for (const auto& f : field.floes) vmax = std::max(vmax, f.velocity.norm());
  return std::max(4.0 * vmax * opt.dt, opt.min_skin);
}

int required_substeps(const FloeField& field, const std::vector<std::pair<int, int>>& candidates,
                      const MaterialParams& mat, const IntegratorOptions& opt) {
  if (!opt.substepping) return 1;
  const auto& fl = field.floes;
  // Stiffness grows with the chord as a pair closes, so each pair is rated at
  // the closest separation it could reach within the step, allowing the
  // closing speed to double.
  double ratio = 1.0;  // dt / admissible sub-step
  for (const auto& [l, j] : candidates) {
    const Floe& a = fl[static_cast<std::size_t>(l)];
    const Floe& b = fl[static_cast<std::size_t>(j)];
    const double d = minimum_image_displacement(a.position, b.position, field.domain).norm();
    const double closest = d - 2.0 * (a.velocity.norm() + b.velocity.norm()) * opt.dt;
    const double chord =
        closest > 0.0 ? intersection_chord(closest, a.radius, b.radius) : 2.0 * std::min(a.radius, b.radius);
    if (chord <= 0.0) continue;
    double k = chord * mat.young_modulus;
    if (mat.thickness_scaling) k *= std::min(a.thickness, b.thickness) / mat.reference_thickness;
    const double ml = mass(a, mat), mj = mass(b, mat);
    const double period = 2.0 * std::numbers::pi * std::sqrt(ml * mj / (ml + mj) / k);
    ratio = std::max(ratio, opt.period_margin * opt.dt / period);
  }
  if (!std::isfinite(ratio)) return opt.max_substeps + 1;
  const double n = std::ceil(ratio - 1e-12);
  return n > static_cast<double>(opt.max_substeps) ? opt.max_substeps + 1 : std::max(1, static_cast<int>(n));
}

int required_substeps(const FloeField& field, const MaterialParams& mat, const IntegratorOptions& opt) {
  const double skin = search_skin(field, opt);
  if (!std::isfinite(skin)) return opt.max_substeps + 1;
  return required_substeps(field, find_pairs_within(field, skin, opt.search), mat, opt);
}

namespace {

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a, two_pi);
  if (w < 0.0) w += two_pi;
  if (w >= two_pi) w = 0.0;
  return w;
}

struct Workspace {
  ContactResult contacts;
  std::vector<std::pair<int, int>> candidates;
  std::vector<Vec2> moved;
  std::vector<Vec2> ocean_vel;
  std::vector<double> ocean_curl;
  std::vector<double> mass, inertia;
};

}  // namespace

StepInfo step(SimulationState& state, const MaterialParams& mat, const IntegratorOptions& opt,
              const InflationNoise& inflation, Rng& rng, LoadTap* tap) {
  if (!(opt.dt > 0.0)) throw ParameterError("time step must be > 0");
  thread_local Workspace ws;
  auto& fl = state.field.floes;
  const std::size_t n = fl.size();

  ws.ocean_vel.assign(n, Vec2{});
  ws.ocean_curl.assign(n, 0.0);
  ws.mass.resize(n);
  ws.inertia.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ws.mass[i] = mass(fl[i], mat);
    ws.inertia[i] = ws.mass[i] * fl[i].radius * fl[i].radius;
    if (opt.drag && !state.ocean.modes.empty()) {
      const auto s = sample_at(state.ocean, fl[i].position);
      ws.ocean_vel[i] = s.velocity;
      ws.ocean_curl[i] = s.curl;
    }
  }

  StepInfo info;
  double skin = 0.0;
  auto rebuild = [&] {
    skin = search_skin(state.field, opt);
    if (!std::isfinite(skin)) throw NumericalBlowupError(fl.empty() ? -1 : fl.front().id, state.time);
    ws.candidates = find_pairs_within(state.field, skin, opt.search);
    ws.moved.assign(n, Vec2{});
  };
  if (opt.contacts) {
    rebuild();
    accumulate_loads(state.field, mat, ws.candidates, ws.contacts);
    info.substeps = required_substeps(state.field, ws.candidates, mat, opt);
  } else {
    ws.contacts.loads.reset(n), ws.contacts.pairs.clear();
  }
  info.contacts = static_cast<int>(ws.contacts.pairs.size());
  if (info.substeps > opt.max_substeps)
    throw StepError(Error("contact stiffness requires more than " + std::to_string(opt.max_substeps) + " sub-steps"),
                    state.time);

  if (tap) {
    tap->force.assign(static_cast<std::size_t>(tap->large_count), Vec2{});
    tap->torque.assign(static_cast<std::size_t>(tap->large_count), 0.0);
  }

  const int nsub = info.substeps;
  const double h = opt.dt / nsub;
  const double sqrt_dt = std::sqrt(opt.dt);
  const auto& domain = state.field.domain;
  for (int s = 0; s < nsub; ++s) {
    if (s > 0 && opt.contacts) {
      double worst = 0.0;
      for (const auto& d : ws.moved) worst = std::max(worst, d.norm2());
      if (4.0 * worst > skin * skin) rebuild();
      accumulate_loads(state.field, mat, ws.candidates, ws.contacts);
    }
    if (tap) {
      const double w = 1.0 / nsub;
      for (const auto& p : ws.contacts.pairs) {
        if (p.l < tap->large_count && p.j >= tap->large_count) {
          tap->force[static_cast<std::size_t>(p.l)] += (p.normal_force + p.tangential_force) * w;
          tap->torque[static_cast<std::size_t>(p.l)] += p.torque_l * w;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto& f = fl[i];
      f.velocity += ws.contacts.loads.force[i] * (h / ws.mass[i]);
      f.omega += ws.contacts.loads.torque[i] * (h / ws.inertia[i]);
      if (opt.drag) {
        // Drag is applied implicitly in the slip with its magnitude frozen.
        const double area = std::numbers::pi * f.radius * f.radius;
        const double rate = mat.ocean_drag * mat.water_density * area * h / ws.mass[i];
        const Vec2 slip = ws.ocean_vel[i] - f.velocity;
        f.velocity = ws.ocean_vel[i] - slip / (1.0 + rate * slip.norm());
        const double spin_slip = 0.5 * ws.ocean_curl[i] - f.omega;
        f.omega = 0.5 * ws.ocean_curl[i] - spin_slip / (1.0 + rate * std::abs(spin_slip));
      }
      if (s == 0 && inflation.enabled) {
        if (i < inflation.force_std.size()) {
          const Vec2 sd = inflation.force_std[i];
          const double a = standard_normal(rng), b = standard_normal(rng);
          f.velocity += Vec2{sd.x * a, sd.y * b} * (sqrt_dt / ws.mass[i]);
        }
        if (i < inflation.torque_std.size()) f.omega += inflation.torque_std[i] * standard_normal(rng) * sqrt_dt / ws.inertia[i];
      }
      if (!f.velocity.finite() || !std::isfinite(f.omega)) throw NumericalBlowupError(f.id, state.time + (s + 1) * h);
      f.position = domain.wrap(f.position + f.velocity * h);
      if (opt.contacts) ws.moved[i] += f.velocity * h;
      f.angle = wrap_angle(f.angle + f.omega * h);
    }
  }

  for (const auto& f : fl) {
    if (!f.velocity.finite() || !f.position.finite() || !std::isfinite(f.omega) || !std::isfinite(f.angle))
      throw NumericalBlowupError(f.id, state.time + opt.dt);
  }
  if (opt.advance_ocean && !state.ocean.modes.empty()) step_modes(state.ocean, opt.dt, rng);
  state.time += opt.dt;
  return info;
}

std::int64_t run(SimulationState& state, double t_final, int record_every, const SnapshotSink& sink,
                 const MaterialParams& mat, const IntegratorOptions& opt, const InflationNoise& inflation, Rng& rng) {
  if (record_every < 1) throw ParameterError("record_every must be >= 1");
  const auto steps = static_cast<std::int64_t>(std::llround(std::max(0.0, t_final - state.time) / opt.dt));
  if (steps == 0) return 0;
  if (sink) sink(state, 0);
  for (std::int64_t k = 1; k <= steps; ++k) {
    try {
      step(state, mat, opt, inflation, rng);
    } catch (const StepError&) {
      throw;
    } catch (const NumericalBlowupError&) {
      throw;
    } catch (const Error& e) {
      throw StepError(e, state.time);
    }
    if (sink && k % record_every == 0) sink(state, k);
  }
  return steps;
}

}  // namespace seaice
