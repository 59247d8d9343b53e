#include "seaice/superfloe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "seaice/contact.hpp"
#include "seaice/error.hpp"

namespace seaice {

FieldStats field_stats(const FloeField& field, const MaterialParams& mat) {
  FieldStats s;
  s.count = static_cast<int>(field.floes.size());
  s.concentration = concentration(field);
  s.extent = extent(field);
  for (const auto& f : field.floes) {
    const double m = mass(f, mat);
    s.total_mass += m;
    s.total_area += std::numbers::pi * f.radius * f.radius;
    s.momentum += f.velocity * m;
    s.spin_momentum += m * f.radius * f.radius * f.omega;
  }
  return s;
}

Floe merge_pair(const Floe& a_in, const Floe& b_in, const Domain& domain, const MaterialParams& mat,
                ThicknessRule rule) {
  // canonical order makes the result independent of argument order
  const bool swap = b_in.id < a_in.id || (b_in.id == a_in.id && b_in.radius > a_in.radius);
  const Floe& a = swap ? b_in : a_in;
  const Floe& b = swap ? a_in : b_in;

  const double ma = mass(a, mat), mb = mass(b, mat);
  const double m = ma + mb;
  Floe s;
  s.id = a.id;
  s.kind = FloeKind::super;
  s.radius = std::sqrt(a.radius * a.radius + b.radius * b.radius);
  const double denom = rule == ThicknessRule::area_consistent ? std::numbers::pi : std::numbers::pi * std::numbers::pi;
  s.thickness = m / (mat.ice_density * denom * s.radius * s.radius);
  // centre of mass in the minimum-image frame of a
  const Vec2 disp = minimum_image_displacement(a.position, b.position, domain);
  s.position = domain.wrap(a.position + disp * (mb / m));
  s.velocity = (a.velocity * ma + b.velocity * mb) / m;
  const double ia = ma * a.radius * a.radius, ib = mb * b.radius * b.radius;
  s.omega = (ia * a.omega + ib * b.omega) / (m * s.radius * s.radius);
  s.angle = 0.0;
  return s;
}

FloeField truncate(const FloeField& field, int large_count) {
  if (large_count < 0 || static_cast<std::size_t>(large_count) > field.floes.size())
    throw ConfigurationError("truncation count out of range");
  FloeField out;
  out.domain = field.domain;
  out.floes.assign(field.floes.begin(), field.floes.begin() + large_count);
  return out;
}

namespace {

bool smaller(const Floe& x, const Floe& y) { return x.radius < y.radius || (x.radius == y.radius && x.id < y.id); }

}  // namespace

Reduction reduce(const FloeField& field, const ReductionConfig& cfg, const MaterialParams& mat) {
  const int total = static_cast<int>(field.floes.size());
  if (cfg.large_count < 0 || cfg.superfloe_count < 1 || cfg.large_count + cfg.superfloe_count > total ||
      !(cfg.isolation_factor > 0.0))
    throw ConfigurationError("reduction needs L0 >= 0, Ls >= 1 and L0 + Ls <= L (L = " + std::to_string(total) + ")");

  std::vector<Floe> sorted = field.floes;
  std::stable_sort(sorted.begin(), sorted.end(), [](const Floe& x, const Floe& y) { return smaller(y, x); });

  Reduction out;
  out.field.domain = field.domain;
  out.field.floes.assign(sorted.begin(), sorted.begin() + cfg.large_count);
  std::vector<Floe> pool(sorted.begin() + cfg.large_count, sorted.end());

  int next_id = 0;
  for (const auto& f : field.floes) next_id = std::max(next_id, f.id + 1);
  std::map<int, std::vector<int>> members;  // current pool id -> originals
  for (const auto& f : pool) members[f.id] = {f.id};

  auto& rep = out.report;
  while (static_cast<int>(pool.size()) > cfg.superfloe_count) {
    const auto small_it = std::min_element(pool.begin(), pool.end(), smaller);
    const std::size_t si = static_cast<std::size_t>(small_it - pool.begin());
    std::size_t ni = si;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < pool.size(); ++k) {
      if (k == si) continue;
      const double d = minimum_image_displacement(pool[si].position, pool[k].position, field.domain).norm();
      if (d < best || (d == best && pool[k].id < pool[ni].id)) {
        best = d;
        ni = k;
      }
    }
    const Floe s = pool[si];
    const Floe nb = pool[ni];
    if (best > cfg.isolation_factor * (s.radius + nb.radius)) {
      const auto& orig = members[s.id];
      rep.deleted_ids.insert(rep.deleted_ids.end(), orig.begin(), orig.end());
      const double m = mass(s, mat);
      rep.deleted_mass += m;
      rep.deleted_area += std::numbers::pi * s.radius * s.radius;
      rep.deleted_momentum += s.velocity * m;
      rep.deleted_spin_momentum += m * s.radius * s.radius * s.omega;
      members.erase(s.id);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(si));
      continue;
    }
    Floe merged = merge_pair(s, nb, field.domain, mat, cfg.thickness_rule);
    merged.id = next_id++;
    auto comp = members[s.id];
    const auto& other = members[nb.id];
    comp.insert(comp.end(), other.begin(), other.end());
    std::sort(comp.begin(), comp.end());
    members.erase(s.id);
    members.erase(nb.id);
    members[merged.id] = std::move(comp);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(std::max(si, ni)));
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(std::min(si, ni)));
    pool.push_back(merged);
  }
  std::stable_sort(pool.begin(), pool.end(), [](const Floe& x, const Floe& y) { return smaller(y, x); });
  for (const auto& f : pool) {
    if (f.kind == FloeKind::super) rep.merge_tree[f.id] = members[f.id];
    out.field.floes.push_back(f);
  }
  std::sort(rep.deleted_ids.begin(), rep.deleted_ids.end());

  const auto base = reduction_report(field, out.field, mat);
  rep.before = base.before;
  rep.after = base.after;
  rep.mass_residual = rep.before.total_mass - rep.after.total_mass - rep.deleted_mass;
  rep.area_residual = rep.before.total_area - rep.after.total_area - rep.deleted_area;
  rep.momentum_residual = rep.before.momentum - rep.after.momentum - rep.deleted_momentum;
  rep.spin_residual = rep.before.spin_momentum - rep.after.spin_momentum - rep.deleted_spin_momentum;
  return out;
}

ReductionReport reduction_report(const FloeField& full, const FloeField& reduced, const MaterialParams& mat) {
  ReductionReport r;
  r.before = field_stats(full, mat);
  r.after = field_stats(reduced, mat);
  return r;
}

}  // namespace seaice
