// Acceptance checks for the floe model, the reduction, the ensemble tools and
// the filter. Prints one PASS/FAIL line per criterion and exits non-zero when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "seaice/da.hpp"
#include "seaice/error.hpp"
#include "seaice/io.hpp"
#include "seaice/superfloe.hpp"
#include "seaice/uq.hpp"

using namespace seaice;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

const InflationNoise no_noise;

// 1 -------------------------------------------------------------------------
Outcome merge_conservation() {
  const auto t0 = std::chrono::steady_clock::now();
  MaterialParams mat;
  const Domain dom{50'000.0};
  SizeDistribution size;
  ThicknessDistribution thick;
  Rng rng = make_stream(1, {0xACC1});
  double worst_m = 0, worst_a = 0, worst_p = 0, worst_l = 0;
  for (int n = 0; n < 100'000; ++n) {
    Floe f[2];
    for (auto& g : f) {
      g.radius = sample_radius(uniform01(rng), size, Caps{1000.0, 10'000.0}, rng);
      g.thickness = sample_thickness(rng, thick, Caps{0.1, 3.5});
      g.position = {uniform01(rng) * dom.side, uniform01(rng) * dom.side};
      g.velocity = {0.3 * standard_normal(rng), 0.3 * standard_normal(rng)};
      g.omega = 1e-4 * standard_normal(rng);
      g.angle = 2.0 * std::numbers::pi * uniform01(rng);
    }
    f[1].id = 1;
    const Floe c = merge_pair(f[0], f[1], dom, mat);
    const double ma = mass(f[0], mat), mb = mass(f[1], mat), mc = mass(c, mat);
    const double area = f[0].radius * f[0].radius + f[1].radius * f[1].radius;
    const Vec2 p = f[0].velocity * ma + f[1].velocity * mb;
    const double pscale = (f[0].velocity * ma).norm() + (f[1].velocity * mb).norm();
    const double l = inertia(f[0], mat) * f[0].omega + inertia(f[1], mat) * f[1].omega;
    const double lscale = std::abs(inertia(f[0], mat) * f[0].omega) + std::abs(inertia(f[1], mat) * f[1].omega);
    worst_m = std::max(worst_m, std::abs(mc - (ma + mb)) / (ma + mb));
    worst_a = std::max(worst_a, std::abs(c.radius * c.radius - area) / area);
    worst_p = std::max(worst_p, (c.velocity * mc - p).norm() / pscale);
    worst_l = std::max(worst_l, std::abs(inertia(c, mat) * c.omega - l) / lscale);
  }
  const double t = seconds_since(t0);
  const double worst = std::max({worst_m, worst_a, worst_p, worst_l});
  return {worst < 1e-12 && t < 5.0,
          fmt("max rel err mass %.2e area %.2e", worst_m, worst_a) +
              fmt(" momentum %.2e spin %.2e", worst_p, worst_l) + fmt(", %.2f s", t)};
}

// 2 -------------------------------------------------------------------------
Outcome table_pattern() {
  const auto t0 = std::chrono::steady_clock::now();
  MaterialParams mat;
  FieldGenerator gen;  // radii 1.5 to 4 km, thickness 0.1 to 3.5 m
  FloeField field;
  std::uint64_t seed = 0;
  for (;; ++seed) {
    try {
      field = initialize_field(100, Domain{50'000.0}, gen, seed);
      break;
    } catch (const ConfigurationError&) {
    }
  }
  const auto red = reduce(field, ReductionConfig{20, 20, std::sqrt(2.0), ThicknessRule::area_consistent}, mat);
  const auto& b = red.report.before;
  const auto& a = red.report.after;
  const double dc = std::abs(a.concentration - b.concentration) / b.concentration;
  const bool ok = dc < 0.03 && a.extent.r_min > b.extent.r_min && a.extent.h_min >= b.extent.h_min &&
                  a.extent.h_max <= b.extent.h_max;
  const double t = seconds_since(t0);
  return {ok && t < 10.0, "seed " + std::to_string(seed) + ": " + io::reduction_table_row(red.report, 20, 20) +
                              fmt(", concentration change %.2f%%, %.2f s", 100.0 * dc, t)};
}

// 3 -------------------------------------------------------------------------
Outcome contact_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  MaterialParams mat;
  FieldGenerator gen;
  gen.relax_sweeps = 0;  // keep the overlaps of the uniform placement
  double worst = 0.0;
  std::size_t pairs = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto field = initialize_field(50, Domain{50'000.0}, gen, 1000 + s);
    Rng rng = make_stream(s, {0xACC3});
    for (auto& f : field.floes) {
      f.velocity = {0.3 * standard_normal(rng), 0.3 * standard_normal(rng)};
      f.omega = 1e-4 * standard_normal(rng);
    }
    const auto g = accumulate_loads(field, mat, NeighborSearch::grid);
    const auto o = accumulate_loads(field, mat, NeighborSearch::all_pairs);
    pairs += o.pairs.size();
    if (g.pairs.size() != o.pairs.size()) return {false, "pair count differs on field " + std::to_string(s)};
    double fmax = 0.0, tmax = 0.0;
    for (std::size_t i = 0; i < field.floes.size(); ++i) {
      fmax = std::max(fmax, o.loads.force[i].norm());
      tmax = std::max(tmax, std::abs(o.loads.torque[i]));
    }
    for (std::size_t i = 0; i < field.floes.size(); ++i) {
      if (fmax > 0) worst = std::max(worst, (g.loads.force[i] - o.loads.force[i]).norm() / fmax);
      if (tmax > 0) worst = std::max(worst, std::abs(g.loads.torque[i] - o.loads.torque[i]) / tmax);
    }
  }
  const double t = seconds_since(t0);
  return {worst < 1e-9 && t < 30.0 && pairs > 0,
          std::to_string(pairs) + " contacts" + fmt(", max rel diff %.2e, %.2f s", worst, t)};
}

// 4 -------------------------------------------------------------------------
SimulationState floes_without_ocean(std::vector<Floe> floes, double side) {
  SimulationState s;
  s.field.domain = {side};
  s.field.floes = std::move(floes);
  OceanSpec spec;
  spec.side = side;
  s.ocean = build_mode_set(spec);
  return s;
}

Outcome collision_momentum() {
  MaterialParams mat;
  IntegratorOptions opt;
  opt.drag = false;
  opt.advance_ocean = false;
  Rng rng = make_stream(4, {0xACC4});

  Floe a, b;
  a.id = 0;
  a.radius = 2000.0;
  a.thickness = 1.5;
  a.position = {20'000.0, 25'000.0};
  a.velocity = {0.4, 0.0};
  b.id = 1;
  b.radius = 1200.0;
  b.thickness = 0.8;
  b.position = {24'000.0, 25'000.0};
  b.velocity = {-0.5, 0.0};
  auto pair = floes_without_ocean({a, b}, 50'000.0);
  const Vec2 p0 = total_momenta(pair.field, mat).linear;
  double worst_pair = 0.0;
  bool touched = false;
  for (int k = 0; k < 400; ++k) {
    step(pair, mat, opt, no_noise, rng);
    touched = touched || pair.field.floes[0].velocity.x < 0.4;
    worst_pair = std::max(worst_pair, (total_momenta(pair.field, mat).linear - p0).norm() / p0.norm());
  }
  const bool bounced = pair.field.floes[1].velocity.x > 0.0;

  std::vector<Floe> cluster;
  for (int i = 0; i < 10; ++i) {
    Floe f;
    f.id = i;
    f.radius = 1000.0;
    f.thickness = 1.0 + 0.1 * i;
    f.position = {20'000.0 + 2010.0 * (i % 5), 20'000.0 + 2010.0 * (i / 5)};
    // converge on the cluster centre with a common drift
    const Vec2 inward = Vec2{24'020.0, 21'005.0} - f.position;
    f.velocity = Vec2{0.2, 0.1} + inward * (0.3 / (inward.norm() + 1.0)) +
                 Vec2{0.05 * standard_normal(rng), 0.05 * standard_normal(rng)};
    f.omega = 1e-4 * standard_normal(rng);
    cluster.push_back(f);
  }
  auto cl = floes_without_ocean(cluster, 50'000.0);
  const Vec2 q0 = total_momenta(cl.field, mat).linear;
  int contact_steps = 0;
  for (int k = 0; k < 10'000; ++k) {
    std::vector<Vec2> before;
    for (const auto& f : cl.field.floes) before.push_back(f.velocity);
    step(cl, mat, opt, no_noise, rng);
    bool changed = false;
    for (std::size_t i = 0; i < before.size(); ++i) changed = changed || cl.field.floes[i].velocity != before[i];
    contact_steps += changed;
  }
  const double drift = (total_momenta(cl.field, mat).linear - q0).norm() / q0.norm();
  return {touched && bounced && worst_pair < 1e-6 && drift < 1e-4 && contact_steps > 0,
          fmt("head-on max rel change %.2e, cluster drift %.2e over 1e4 steps", worst_pair, drift) +
              " (" + std::to_string(contact_steps) + " steps with collisions)"};
}

// 5 -------------------------------------------------------------------------
Outcome ocean_statistics() {
  const auto t0 = std::chrono::steady_clock::now();
  OceanSpec spec;
  spec.k_max = 1;
  spec.include_gravity = false;
  spec.gb = {0.5, 0.1, {0.0, 0.0}, 0.0};
  auto o = build_mode_set(spec);
  Rng rng = make_stream(5, {0xACC5});
  draw_stationary(o, rng);
  const double dt = 0.01 * o.time_unit;
  double acc = 0.0;
  long count = 0;
  for (int s = 0; s < 1'000'000; ++s) {
    step_modes(o, dt, rng);
    for (const auto& m : o.modes)
      if (m.independent) {
        acc += std::norm(m.amplitude);
        ++count;
      }
  }
  const double var = acc / static_cast<double>(count);
  const double target = 0.1 * 0.1 / (2.0 * 0.5);
  const double rel = std::abs(var - target) / target;

  // divergence of the balanced field on a 64 x 64 grid by centred differences
  auto g = build_mode_set(OceanSpec{1, 0.1, true, false});
  draw_stationary(g, rng);
  const double h = 1.0, kscale = 2.0 * std::numbers::pi / g.side;
  double div_max = 0.0, grad_scale = 0.0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      const Vec2 x{(i + 0.5) * g.side / 64, (j + 0.5) * g.side / 64};
      const Vec2 dx = velocity_at(g, x + Vec2{h, 0}) - velocity_at(g, x - Vec2{h, 0});
      const Vec2 dy = velocity_at(g, x + Vec2{0, h}) - velocity_at(g, x - Vec2{0, h});
      div_max = std::max(div_max, std::abs((dx.x + dy.y) / (2 * h)));
      grad_scale = std::max(grad_scale, velocity_at(g, x).norm() * kscale);
    }
  const double div_rel = div_max / grad_scale;
  const double t = seconds_since(t0);
  return {rel < 0.05 && div_rel < 1e-6 && t < 60.0,
          fmt("variance %.5f (target 0.01, %.2f%% off)", var, 100.0 * rel) +
              fmt(", max |div u| / (|u| |k|) %.2e, %.1f s", div_rel, t)};
}

// 6 -------------------------------------------------------------------------
Outcome mode_counts() {
  OceanSpec s;
  s.k_max = 1;
  const auto a = build_mode_set(s);
  s.k_max = 4;
  const auto b = build_mode_set(s);
  const bool ok = a.modes.size() == 26 && a.gb_count() == 8 && b.modes.size() == 242 && b.gb_count() == 80;
  return {ok, "K=1: " + std::to_string(a.modes.size()) + " modes (" + std::to_string(a.gb_count()) +
                  " GB), K=4: " + std::to_string(b.modes.size()) + " modes (" + std::to_string(b.gb_count()) + " GB)"};
}

// shared 18-floe scenario: radii 1.5 to 10 km on the 50 km domain
FloeField eighteen_floes(std::uint64_t seed) {
  FieldGenerator gen;
  gen.radius_caps = {1000.0, 10'000.0};
  return initialize_field(18, Domain{50'000.0}, gen, seed);
}

// 7 -------------------------------------------------------------------------
Outcome uq_spread() {
  const auto t0 = std::chrono::steady_clock::now();
  MaterialParams mat;
  IntegratorOptions opt;
  const std::uint64_t seed = 15;  // the field whose small floes carry the most mass
  const auto field = eighteen_floes(seed);
  SimulationState full;
  full.field = field;
  full.ocean = build_mode_set(OceanSpec{});
  Rng rng = make_stream(seed, {0x7207});
  draw_stationary(full.ocean, rng);
  auto super = full, bare = full;
  super.field = reduce(field, ReductionConfig{6, 6, std::sqrt(2.0), ThicknessRule::area_consistent}, mat).field;
  bare.field = truncate(field, 6);

  EnsembleOptions ens;
  ens.members = 200;
  ens.t_final = 2.0 * 86'400.0;
  ens.record_every = static_cast<int>(std::llround(ens.t_final / opt.dt));
  ens.seed = seed;
  const double sf = ensemble_forecast(full, mat, opt, no_noise, ens).std_linear.back().norm();
  const double ss = ensemble_forecast(super, mat, opt, no_noise, ens).std_linear.back().norm();
  const double sb = ensemble_forecast(bare, mat, opt, no_noise, ens).std_linear.back().norm();
  const double t = seconds_since(t0);
  const double rs = ss / sf, rb = sb / sf;
  return {rs >= 0.5 && rs <= 2.0 && rb < 0.5 && t < 600.0,
          fmt("std ratio superfloe/full %.3f, bare/full %.3f (need [0.5, 2] and < 0.5)", rs, rb) +
              fmt(", %.0f s", t)};
}

// 8 -------------------------------------------------------------------------
Outcome fat_tails() {
  const auto t0 = std::chrono::steady_clock::now();
  MaterialParams mat;
  IntegratorOptions opt;
  const std::uint64_t seed = 15;
  const auto field = eighteen_floes(seed);
  const auto steps = static_cast<std::int64_t>(std::llround(10.0 * 86'400.0 / opt.dt));
  double k[2] = {0.0, 0.0};
  for (int sys = 0; sys < 2; ++sys) {
    SimulationState st;
    st.field = sys == 0 ? field
                        : reduce(field, ReductionConfig{6, 6, std::sqrt(2.0), ThicknessRule::area_consistent}, mat).field;
    st.ocean = build_mode_set(OceanSpec{});
    Rng rng = make_stream(seed, {0x10C6});
    draw_stationary(st.ocean, rng);
    const auto series = contact_force_series(st, 1, steps, mat, opt, rng);
    try {
      k[sys] = excess_kurtosis(series.torque[0]);
    } catch (const UndefinedStatisticError&) {
      k[sys] = std::nan("");
    }
  }
  const double t = seconds_since(t0);
  return {k[0] > 0.5 && k[1] > 0.5, fmt("excess kurtosis of the largest floe's contact torque: full %.2f, superfloe %.2f",
                                        k[0], k[1]) +
                                        fmt(", %.0f s", t)};
}

// 9 -------------------------------------------------------------------------

/// Gaussian perturbations with zero sample mean and sample covariance exactly
/// `cov`. With `ortho`, they are also uncorrelated with the ensemble's
/// anomalies, so the forecast covariance is A P A^T + Q without sampling error.
void match_moments(std::vector<double>& z0, std::vector<double>& z1, const double cov[2][2],
                   const EnsembleMatrix* ortho, Rng& rng) {
  const std::size_t n = z0.size();
  for (std::size_t m = 0; m < n; ++m) {
    z0[m] = standard_normal(rng);
    z1[m] = standard_normal(rng);
  }
  auto center = [n](std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    for (double& x : v) x -= mean;
  };
  auto dotp = [n](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t m = 0; m < n; ++m) s += a[m] * b[m];
    return s;
  };
  center(z0);
  center(z1);
  if (ortho) {
    // Gram-Schmidt against the two anomaly columns
    std::vector<double> e0(n), e1(n);
    for (std::size_t m = 0; m < n; ++m) {
      e0[m] = (*ortho)(m, 0);
      e1[m] = (*ortho)(m, 1);
    }
    center(e0);
    center(e1);
    const double c = dotp(e1, e0) / dotp(e0, e0);
    for (std::size_t m = 0; m < n; ++m) e1[m] -= c * e0[m];
    for (const auto* e : {&e0, &e1}) {
      const double ee = dotp(*e, *e);
      const double c0 = dotp(z0, *e) / ee, c1 = dotp(z1, *e) / ee;
      for (std::size_t m = 0; m < n; ++m) {
        z0[m] -= c0 * (*e)[m];
        z1[m] -= c1 * (*e)[m];
      }
    }
  }
  // whiten to unit sample covariance, then colour with chol(cov)
  const double nm1 = static_cast<double>(n) - 1.0;
  const double s00 = dotp(z0, z0) / nm1, s01 = dotp(z0, z1) / nm1, s11 = dotp(z1, z1) / nm1;
  const double l00 = std::sqrt(s00), l10 = s01 / l00, l11 = std::sqrt(s11 - l10 * l10);
  const double c00 = std::sqrt(cov[0][0]), c10 = cov[1][0] / c00, c11 = std::sqrt(cov[1][1] - c10 * c10);
  for (std::size_t m = 0; m < n; ++m) {
    const double w0 = z0[m] / l00;
    const double w1 = (z1[m] - l10 * w0) / l11;
    z0[m] = c00 * w0;
    z1[m] = c10 * w0 + c11 * w1;
  }
}

Outcome eakf_toy() {
  // scalar case against the closed form
  const std::size_t ns = 1000;
  EnsembleMatrix s(ns, 1);
  {
    Rng rng = make_stream(9, {0xACC9});
    double m = 0.0, v = 0.0;
    for (std::size_t i = 0; i < ns; ++i) m += (s(i, 0) = standard_normal(rng));
    m /= ns;
    for (std::size_t i = 0; i < ns; ++i) v += (s(i, 0) - m) * (s(i, 0) - m);
    v /= (ns - 1);
    const double prior_mean = m, prior_var = v;
    const ScalarObservation obs{0, 1.7, 0.4};
    const std::vector<double> periods{0.0};
    eakf_update(s, std::span(&obs, 1), periods);
    const double post_var = 1.0 / (1.0 / prior_var + 1.0 / 0.4);
    const double post_mean = post_var * (prior_mean / prior_var + 1.7 / 0.4);
    const auto mom = component_moments(s, 0);
    if (std::abs(mom.mean - post_mean) > 1e-12 * std::max(1.0, std::abs(post_mean)) ||
        std::abs(mom.spread * mom.spread - post_var) > 1e-12 * post_var)
      return {false, "scalar update differs from the closed form"};
  }

  // 2-D linear Gaussian system observed in its first component
  const double A[2][2] = {{0.95, 0.2}, {-0.15, 0.9}};
  const double Q[2][2] = {{0.1, 0.02}, {0.02, 0.05}};
  const double r = 0.2;
  const std::size_t n = 10'000;
  Rng rng = make_stream(9, {0xACCA});
  const double lq00 = std::sqrt(Q[0][0]), lq10 = Q[1][0] / lq00, lq11 = std::sqrt(Q[1][1] - lq10 * lq10);

  double mu[2] = {1.0, -0.5};
  double P[2][2] = {{1.0, 0.3}, {0.3, 0.8}};
  EnsembleMatrix ens(n, 2);
  {
    std::vector<double> z0(n), z1(n);
    match_moments(z0, z1, P, nullptr, rng);
    for (std::size_t m = 0; m < n; ++m) {
      ens(m, 0) = mu[0] + z0[m];
      ens(m, 1) = mu[1] + z1[m];
    }
  }
  double truth[2] = {1.5, 0.0};
  const std::vector<double> periods(2, 0.0);
  double worst_mean = 0.0, worst_var = 0.0;
  for (int cycle = 0; cycle < 50; ++cycle) {
    // truth and observation
    {
      const double z0 = standard_normal(rng), z1 = standard_normal(rng);
      const double t0 = A[0][0] * truth[0] + A[0][1] * truth[1] + lq00 * z0;
      const double t1 = A[1][0] * truth[0] + A[1][1] * truth[1] + lq10 * z0 + lq11 * z1;
      truth[0] = t0;
      truth[1] = t1;
    }
    const double y = truth[0] + std::sqrt(r) * standard_normal(rng);
    // ensemble forecast with perturbations of exact sample covariance Q
    for (std::size_t m = 0; m < n; ++m) {
      const double a0 = ens(m, 0), a1 = ens(m, 1);
      ens(m, 0) = A[0][0] * a0 + A[0][1] * a1;
      ens(m, 1) = A[1][0] * a0 + A[1][1] * a1;
    }
    std::vector<double> z0(n), z1(n);
    match_moments(z0, z1, Q, &ens, rng);
    for (std::size_t m = 0; m < n; ++m) {
      ens(m, 0) += z0[m];
      ens(m, 1) += z1[m];
    }
    // Kalman filter
    const double f0 = A[0][0] * mu[0] + A[0][1] * mu[1], f1 = A[1][0] * mu[0] + A[1][1] * mu[1];
    double F[2][2];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        F[i][j] = Q[i][j];
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) F[i][j] += A[i][k] * P[k][l] * A[j][l];
      }
    const double sden = F[0][0] + r, k0 = F[0][0] / sden, k1 = F[1][0] / sden;
    mu[0] = f0 + k0 * (y - f0);
    mu[1] = f1 + k1 * (y - f0);
    P[0][0] = (1 - k0) * F[0][0];
    P[0][1] = P[1][0] = (1 - k0) * F[0][1];
    P[1][1] = F[1][1] - k1 * F[0][1];
    // filter
    const ScalarObservation obs{0, y, r};
    eakf_update(ens, std::span(&obs, 1), periods);
    for (std::size_t c = 0; c < 2; ++c) {
      const auto mom = component_moments(ens, c);
      worst_mean = std::max(worst_mean, std::abs(mom.mean - mu[c]) / std::sqrt(P[c][c]));
      worst_var = std::max(worst_var, std::abs(mom.spread * mom.spread - P[c][c]) / P[c][c]);
    }
  }
  return {worst_mean < 0.02 && worst_var < 0.02,
          fmt("scalar update exact; 2-D toy max mean error %.2e posterior std, max relative variance error %.2e",
              worst_mean, worst_var)};
}

// 10 ------------------------------------------------------------------------
Outcome da_ordering() {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = true;
  for (std::uint64_t seed : {1, 2}) {
    DaScenario sc;
    sc.field = eighteen_floes(seed);
    sc.truth_ocean.include_gravity = false;
    sc.forecast_ocean.include_gravity = false;
    sc.members = 200;
    sc.cycles = 20;
    sc.obs_interval_steps = 200;
    sc.seed = seed;
    sc.model = ForecastModel::bare;
    const auto bare = assimilate(sc);
    sc.model = ForecastModel::inflation;
    const auto infl = assimilate(sc);
    const bool good = infl.ocean.rmse < bare.ocean.rmse && infl.ocean.pcc > bare.ocean.pcc;
    ok = ok && good;
    detail += "seed " + std::to_string(seed) +
              fmt(": ocean RMSE inflation %.4f vs bare %.4f,", infl.ocean.rmse, bare.ocean.rmse) +
              fmt(" PCC %.3f vs %.3f; ", infl.ocean.pcc, bare.ocean.pcc);
  }
  const double t = seconds_since(t0);
  return {ok && t < 1200.0, detail + fmt("%.0f s", t)};
}

// 11 ------------------------------------------------------------------------
Outcome runtime_saving() {
  MaterialParams mat;
  IntegratorOptions opt;
  FieldGenerator gen;
  gen.size.scale = 800.0;
  gen.radius_caps = {800.0, 3820.0};
  const auto field = initialize_field(200, Domain{50'000.0}, gen, 7);
  SimulationState full;
  full.field = field;
  full.ocean = build_mode_set(OceanSpec{});
  Rng ic = make_stream(7, {0x7207});
  draw_stationary(full.ocean, ic);
  auto reduced = full;
  reduced.field = reduce(field, ReductionConfig{30, 30, std::sqrt(2.0), ThicknessRule::area_consistent}, mat).field;

  double wall[2];
  SimulationState* sys[2] = {&full, &reduced};
  for (int i = 0; i < 2; ++i) {
    auto st = *sys[i];
    Rng rng = make_stream(7, {0xBE7C});
    const auto t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < 10'000; ++k) step(st, mat, opt, no_noise, rng);
    wall[i] = seconds_since(t0);
  }
  const double ratio = wall[1] / wall[0];
  return {ratio < 0.5, fmt("200 floes %.1f s, ", wall[0]) + std::to_string(reduced.field.floes.size()) +
                           fmt(" floes %.1f s, ratio %.3f", wall[1], ratio)};
}

}  // namespace

/// Runs every criterion, or only the numbers given on the command line.
int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"merge conservation", merge_conservation},
      {"reduction table pattern", table_pattern},
      {"contact search equivalence", contact_oracle},
      {"momentum conservation in collisions", collision_momentum},
      {"ocean mode statistics", ocean_statistics},
      {"mode counts", mode_counts},
      {"ensemble spread of reduced models", uq_spread},
      {"fat-tailed contact torque", fat_tails},
      {"EAKF against the Kalman filter", eakf_toy},
      {"assimilation skill ordering", da_ordering},
      {"runtime saving of the reduced model", runtime_saving},
  };
  int failed = 0, ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && std::find(only.begin(), only.end(), static_cast<int>(i + 1)) == only.end()) continue;
    ++ran;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
