#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "seaice/error.hpp"
#include "seaice/superfloe.hpp"

using namespace seaice;

namespace {

Floe disc(int id, double x, double y, double r, double h) {
  Floe f;
  f.id = id;
  f.radius = r;
  f.thickness = h;
  f.position = {x, y};
  return f;
}

}  // namespace

TEST_CASE("merging two floes") {
  MaterialParams mat;
  const Domain dom{50'000.0};
  Floe a = disc(4, 10'000.0, 10'000.0, 300.0, 1.0);
  Floe b = disc(9, 10'500.0, 10'200.0, 400.0, 2.0);
  a.velocity = {0.1, 0.2};
  b.velocity = {-0.3, 0.05};
  a.omega = 1e-4;
  b.omega = -3e-5;
  a.angle = 1.0;

  const Floe c = merge_pair(a, b, dom, mat);
  const double ma = mass(a, mat), mb = mass(b, mat), mc = ma + mb;
  CHECK(c.radius == doctest::Approx(500.0).epsilon(1e-15));
  CHECK(mass(c, mat) == doctest::Approx(mc).epsilon(1e-14));
  CHECK(c.thickness == doctest::Approx(mc / (mat.ice_density * std::numbers::pi * 500.0 * 500.0)).epsilon(1e-14));
  CHECK(c.position.x == doctest::Approx((ma * 10'000.0 + mb * 10'500.0) / mc).epsilon(1e-14));
  CHECK(c.position.y == doctest::Approx((ma * 10'000.0 + mb * 10'200.0) / mc).epsilon(1e-14));
  CHECK(c.velocity.x == doctest::Approx((ma * a.velocity.x + mb * b.velocity.x) / mc).epsilon(1e-14));
  CHECK(c.velocity.y == doctest::Approx((ma * a.velocity.y + mb * b.velocity.y) / mc).epsilon(1e-14));
  CHECK(inertia(c, mat) * c.omega ==
        doctest::Approx(inertia(a, mat) * a.omega + inertia(b, mat) * b.omega).epsilon(1e-13));
  CHECK(c.id == 4);
  CHECK(c.angle == 0.0);
  CHECK(c.kind == FloeKind::super);

  SUBCASE("symmetric") {
    const Floe d = merge_pair(b, a, dom, mat);
    CHECK(d.radius == doctest::Approx(c.radius).epsilon(1e-15));
    CHECK(d.position.x == doctest::Approx(c.position.x).epsilon(1e-15));
    CHECK(d.velocity.x == doctest::Approx(c.velocity.x).epsilon(1e-15));
    CHECK(d.omega == doctest::Approx(c.omega).epsilon(1e-14));
    CHECK(d.id == 4);
  }
  SUBCASE("identical spinning floes halve the spin") {
    Floe p = disc(0, 1000.0, 1000.0, 200.0, 1.0), q = disc(1, 1300.0, 1000.0, 200.0, 1.0);
    p.omega = q.omega = 2e-4;
    CHECK(merge_pair(p, q, dom, mat).omega == doctest::Approx(1e-4).epsilon(1e-14));
  }
  SUBCASE("across the periodic boundary") {
    Floe p = disc(0, 100.0, 5000.0, 200.0, 1.0), q = disc(1, 49'700.0, 5000.0, 200.0, 1.0);
    const Floe m = merge_pair(p, q, dom, mat);
    const double dx = std::min(m.position.x, dom.side - m.position.x);
    CHECK(std::abs(dx - 100.0) < 1e-9);
    CHECK(m.position.x >= 0.0);
    CHECK(m.position.x < dom.side);
  }
  SUBCASE("literal thickness rule") {
    const Floe l = merge_pair(a, b, dom, mat, ThicknessRule::literal_pi_squared);
    CHECK(l.thickness ==
          doctest::Approx(mc / (mat.ice_density * std::numbers::pi * std::numbers::pi * 500.0 * 500.0)).epsilon(1e-14));
  }
}

TEST_CASE("field reduction") {
  MaterialParams mat;
  FieldGenerator gen;
  const auto field = initialize_field(100, Domain{50'000.0}, gen, 2);
  ReductionConfig cfg{20, 20, std::sqrt(2.0), ThicknessRule::area_consistent};
  const auto red = reduce(field, cfg, mat);
  const auto& rep = red.report;

  CHECK(static_cast<int>(red.field.floes.size()) <= 40);
  for (int i = 0; i < 20; ++i) CHECK(red.field.floes[static_cast<std::size_t>(i)] == field.floes[static_cast<std::size_t>(i)]);

  CHECK(std::abs(rep.mass_residual) <= 1e-12 * rep.before.total_mass);
  CHECK(std::abs(rep.area_residual) <= 1e-12 * rep.before.total_area);
  CHECK(rep.before.count == 100);
  CHECK(rep.after.count == static_cast<int>(red.field.floes.size()));
  CHECK(rep.after.total_mass == doctest::Approx(rep.before.total_mass - rep.deleted_mass).epsilon(1e-12));
  if (rep.deleted_ids.empty()) {
    CHECK(rep.deleted_mass == 0.0);
    CHECK(rep.deleted_area == 0.0);
  }

  std::set<int> accounted(rep.deleted_ids.begin(), rep.deleted_ids.end());
  for (const auto& f : red.field.floes)
    if (f.kind == FloeKind::ordinary) accounted.insert(f.id);
  for (const auto& [id, members] : rep.merge_tree) {
    CHECK(members.size() >= 2);
    accounted.insert(members.begin(), members.end());
  }
  CHECK(accounted.size() == 100);

  SUBCASE("nothing to do") {
    const auto same = reduce(field, ReductionConfig{60, 40, std::sqrt(2.0), ThicknessRule::area_consistent}, mat);
    CHECK(same.field.floes == field.floes);
    CHECK(same.report.deleted_ids.empty());
    CHECK(same.report.deleted_mass == 0.0);
  }
  SUBCASE("infeasible configuration") {
    CHECK_THROWS_AS(reduce(field, ReductionConfig{90, 20, 1.4, ThicknessRule::area_consistent}, mat),
                    ConfigurationError);
    CHECK_THROWS_AS(reduce(field, ReductionConfig{10, 0, 1.4, ThicknessRule::area_consistent}, mat),
                    ConfigurationError);
  }
  SUBCASE("bare truncation") {
    const auto bare = truncate(field, 6);
    REQUIRE(bare.floes.size() == 6);
    CHECK(bare.floes[5] == field.floes[5]);
  }
}

TEST_CASE("momentum ledger with moving floes") {
  MaterialParams mat;
  FieldGenerator gen;
  auto field = initialize_field(60, Domain{50'000.0}, gen, 8);
  Rng rng = make_stream(1);
  for (auto& f : field.floes) {
    f.velocity = {0.2 * standard_normal(rng), 0.2 * standard_normal(rng)};
    f.omega = 1e-4 * standard_normal(rng);
  }
  const auto red = reduce(field, ReductionConfig{10, 10, std::sqrt(2.0), ThicknessRule::area_consistent}, mat);
  const auto& rep = red.report;
  double pscale = 0.0, lscale = 0.0;
  for (const auto& f : field.floes) {
    pscale += mass(f, mat) * f.velocity.norm();
    lscale += inertia(f, mat) * std::abs(f.omega);
  }
  CHECK(rep.momentum_residual.norm() <= 1e-12 * pscale);
  CHECK(std::abs(rep.spin_residual) <= 1e-12 * lscale);
}
