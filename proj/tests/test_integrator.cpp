#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "seaice/error.hpp"
#include "seaice/integrator.hpp"
#include "seaice/uq.hpp"

using namespace seaice;

namespace {

Floe disc(int id, double x, double y, double r, double h = 1.0) {
  Floe f;
  f.id = id;
  f.radius = r;
  f.thickness = h;
  f.position = {x, y};
  return f;
}

SimulationState still_ocean_state(std::vector<Floe> floes, double side = 50'000.0) {
  SimulationState s;
  s.field.domain = {side};
  s.field.floes = std::move(floes);
  OceanSpec spec;
  spec.side = side;
  spec.gb.noise = 0.0;
  spec.gravity.noise = 0.0;
  s.ocean = build_mode_set(spec);
  return s;
}

}  // namespace

TEST_CASE("ocean drag") {
  MaterialParams mat;
  Floe f = disc(0, 0, 0, 1000.0);
  const Vec2 fd = drag_force(f, {0.1, 0.0}, mat);
  CHECK(fd.x == doctest::Approx(3e-3 * 1000.0 * std::numbers::pi * 1e6 * 0.01).epsilon(1e-14));
  CHECK(fd.x == doctest::Approx(9.42e4).epsilon(1e-3));
  CHECK(fd.y == 0.0);
  f.velocity = {0.1, 0.0};
  CHECK(drag_force(f, {0.1, 0.0}, mat) == Vec2{});
  f.velocity = {0.0, 0.3};
  const Vec2 back = drag_force(f, {0.0, 0.0}, mat);
  CHECK(back.y == doctest::Approx(-3e-3 * 1000.0 * std::numbers::pi * 1e6 * 0.09).epsilon(1e-14));

  Floe g = disc(0, 0, 0, 1000.0);
  CHECK(drag_torque(g, 2e-5, mat) == doctest::Approx(9.42e2).epsilon(1e-3));
  g.omega = 2e-5;
  CHECK(drag_torque(g, 2e-5, mat) == doctest::Approx(-3e-3 * 1000.0 * std::numbers::pi * 1e12 * 1e-10));
}

TEST_CASE("free motion is rectilinear") {
  MaterialParams mat;
  IntegratorOptions opt;
  opt.drag = false;
  opt.contacts = false;
  opt.advance_ocean = false;
  auto s = still_ocean_state({disc(0, 49'000.0, 100.0, 800.0), disc(1, 10'000.0, 10'000.0, 900.0)});
  s.field.floes[0].velocity = {0.5, -0.02};
  s.field.floes[0].omega = 1e-3;
  Rng rng = make_stream(1);
  const int n = 400;
  for (int k = 0; k < n; ++k) step(s, mat, opt, InflationNoise{}, rng);
  const double t = n * opt.dt;
  const auto& f = s.field.floes[0];
  CHECK(f.position.x == doctest::Approx(std::fmod(49'000.0 + 0.5 * t, 50'000.0)).epsilon(1e-10));
  CHECK(f.position.y == doctest::Approx(std::fmod(100.0 - 0.02 * t + 50'000.0, 50'000.0)).epsilon(1e-10));
  CHECK(f.angle == doctest::Approx(std::fmod(1e-3 * t, 2.0 * std::numbers::pi)).epsilon(1e-10));
  CHECK(f.velocity == Vec2{0.5, -0.02});
  CHECK(s.field.floes[1].position == Vec2{10'000.0, 10'000.0});
  CHECK(s.time == doctest::Approx(t));
}

TEST_CASE("collision conserves momentum") {
  MaterialParams mat;
  IntegratorOptions opt;
  opt.drag = false;
  opt.advance_ocean = false;
  auto s = still_ocean_state({disc(0, 10'000.0, 10'000.0, 1500.0, 2.0), disc(1, 13'000.0, 10'300.0, 800.0, 0.7)});
  s.field.floes[0].velocity = {0.4, 0.0};
  s.field.floes[1].velocity = {-0.6, 0.1};
  s.field.floes[1].omega = 1e-4;
  const auto p0 = total_momenta(s.field, mat);
  Rng rng = make_stream(2);
  for (int k = 0; k < 2000; ++k) step(s, mat, opt, InflationNoise{}, rng);
  const auto p1 = total_momenta(s.field, mat);
  CHECK((p1.linear - p0.linear).norm() <= 1e-6 * p0.linear.norm());
  // momenta actually exchanged
  CHECK(s.field.floes[0].velocity.x < 0.4);
}

TEST_CASE("state stays in range") {
  MaterialParams mat;
  IntegratorOptions opt;
  FieldGenerator gen;
  SimulationState s;
  s.field = initialize_field(18, Domain{50'000.0}, gen, 4);
  s.ocean = build_mode_set(OceanSpec{});
  Rng rng = make_stream(3);
  draw_stationary(s.ocean, rng);
  for (int k = 0; k < 10'000; ++k) step(s, mat, opt, InflationNoise{}, rng);
  for (const auto& f : s.field.floes) {
    CHECK(f.position.finite());
    CHECK(f.position.x >= 0.0);
    CHECK(f.position.x < 50'000.0);
    CHECK(f.position.y >= 0.0);
    CHECK(f.position.y < 50'000.0);
    CHECK(f.angle >= 0.0);
    CHECK(f.angle < 2.0 * std::numbers::pi);
  }
}

TEST_CASE("sub-stepping converges for soft contacts") {
  MaterialParams mat;
  mat.young_modulus /= 1e6;
  mat.shear_modulus /= 1e6;
  IntegratorOptions on;
  on.drag = false;
  on.advance_ocean = false;
  IntegratorOptions off = on;
  off.substepping = false;
  auto a = still_ocean_state({disc(0, 10'000.0, 10'000.0, 1000.0), disc(1, 12'100.0, 10'000.0, 1000.0)});
  a.field.floes[0].velocity = {0.05, 0.0};
  auto b = a;
  Rng r1 = make_stream(4), r2 = make_stream(4);
  for (int k = 0; k < 1000; ++k) {
    step(a, mat, on, InflationNoise{}, r1);
    step(b, mat, off, InflationNoise{}, r2);
  }
  for (std::size_t i = 0; i < 2; ++i)
    CHECK((a.field.floes[i].position - b.field.floes[i].position).norm() < 1e-3);
}

TEST_CASE("stiff contacts are sub-stepped") {
  MaterialParams mat;
  IntegratorOptions opt;
  opt.drag = false;
  opt.advance_ocean = false;
  auto s = still_ocean_state({disc(0, 10'000.0, 10'000.0, 1000.0), disc(1, 11'990.0, 10'000.0, 1000.0)});
  const int n = required_substeps(s.field, mat, opt);
  CHECK(n > 1);
  Rng rng = make_stream(5);
  CHECK(step(s, mat, opt, InflationNoise{}, rng).substeps == n);
}

TEST_CASE("non-finite states are reported") {
  MaterialParams mat;
  IntegratorOptions opt;
  auto s = still_ocean_state({disc(7, 10'000.0, 10'000.0, 1000.0)});
  s.field.floes[0].velocity = {std::nan(""), 0.0};
  Rng rng = make_stream(6);
  try {
    step(s, mat, opt, InflationNoise{}, rng);
    FAIL("expected NumericalBlowupError");
  } catch (const NumericalBlowupError& e) {
    CHECK(e.floe == 7);
  }
}

TEST_CASE("run bookkeeping") {
  MaterialParams mat;
  IntegratorOptions opt;
  FieldGenerator gen;
  SimulationState s0;
  s0.field = initialize_field(10, Domain{50'000.0}, gen, 9);
  s0.ocean = build_mode_set(OceanSpec{});

  std::vector<std::int64_t> seen;
  auto s = s0;
  Rng rng = make_stream(7);
  const auto steps = run(s, 10 * opt.dt, 3, [&](const SimulationState&, std::int64_t k) { seen.push_back(k); }, mat,
                         opt, InflationNoise{}, rng);
  CHECK(steps == 10);
  CHECK(seen == std::vector<std::int64_t>{0, 3, 6, 9});
  CHECK(s.time == doctest::Approx(10 * opt.dt));

  SUBCASE("nothing to do") {
    auto t = s0;
    int calls = 0;
    CHECK(run(t, t.time, 1, [&](const SimulationState&, std::int64_t) { ++calls; }, mat, opt, InflationNoise{},
              rng) == 0);
    CHECK(calls == 0);
  }
  SUBCASE("deterministic") {
    auto a = s0, b = s0;
    Rng ra = make_stream(8), rb = make_stream(8);
    InflationNoise noise;
    noise.enabled = true;
    noise.force_std.assign(10, Vec2{1e6, 1e6});
    noise.torque_std.assign(10, 1e9);
    run(a, 50 * opt.dt, 1, {}, mat, opt, noise, ra);
    run(b, 50 * opt.dt, 1, {}, mat, opt, noise, rb);
    CHECK(a.field.floes == b.field.floes);
  }
  SUBCASE("split run equals continuous run") {
    auto a = s0, b = s0;
    Rng ra = make_stream(9), rb = make_stream(9);
    run(a, 40 * opt.dt, 1, {}, mat, opt, InflationNoise{}, ra);
    run(b, 15 * opt.dt, 1, {}, mat, opt, InflationNoise{}, rb);
    run(b, 40 * opt.dt, 1, {}, mat, opt, InflationNoise{}, rb);
    CHECK(a.field.floes == b.field.floes);
  }
  CHECK_THROWS_AS(run(s, s.time + opt.dt, 0, {}, mat, opt, InflationNoise{}, rng), ParameterError);
}
