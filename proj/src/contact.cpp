#include "seaice/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seaice/error.hpp"

namespace seaice {

void BodyLoads::reset(std::size_t n) {
  force.assign(n, Vec2{});
  torque.assign(n, 0.0);
}

namespace {

double wrap_half(double dx, double side) {
  const double half = 0.5 * side;
  if (dx > half || dx <= -half) {
    dx -= side * std::round(dx / side);
    if (dx > half) dx -= side;
    if (dx <= -half) dx += side;
  }
  return dx;
}

}  // namespace

Vec2 minimum_image_displacement(const Vec2& x_l, const Vec2& x_j, const Domain& domain) {
  return {wrap_half(x_j.x - x_l.x, domain.side), wrap_half(x_j.y - x_l.y, domain.side)};
}

double intersection_chord(double distance, double r_a, double r_b) {
  const double lo = std::min(r_a, r_b), hi = std::max(r_a, r_b);
  if (distance >= lo + hi) return 0.0;
  if (distance <= hi - lo) return 2.0 * lo;  // one disc inside the other
  const double prod = (lo + hi - distance) * (distance - hi + lo) * (distance + hi - lo) * (distance + lo + hi);
  const double c = std::sqrt(std::max(prod, 0.0)) / distance;
  return std::clamp(c, 0.0, 2.0 * lo);
}

std::optional<ContactPair> detect_contact(const Floe& a, const Floe& b, const Domain& domain, int l, int j) {
  const Vec2 disp = minimum_image_displacement(a.position, b.position, domain);
  const double d = disp.norm();
  const double overlap = d - (a.radius + b.radius);
  if (!(overlap < 0.0)) return std::nullopt;
  if (d == 0.0) throw DegenerateContactError(a.id, b.id);
  ContactPair p;
  p.l = l;
  p.j = j;
  p.distance = d;
  p.overlap = overlap;
  p.normal = disp / d;
  p.tangent = perp(p.normal);
  p.chord = intersection_chord(d, a.radius, b.radius);
  return p;
}

double contact_stiffness(const ContactPair& pair, const Floe& a, const Floe& b, const MaterialParams& mat) {
  double k = pair.chord * mat.young_modulus;
  if (mat.thickness_scaling) k *= std::min(a.thickness, b.thickness) / mat.reference_thickness;
  return k;
}

Vec2 normal_force(const ContactPair& pair, double stiffness) { return pair.normal * (stiffness * pair.overlap); }

Vec2 normal_force(const ContactPair& pair, const MaterialParams& mat) {
  return normal_force(pair, pair.chord * mat.young_modulus);
}

double tangential_speed(const ContactPair& pair, const Floe& a, const Floe& b) {
  // contact-point velocities: v + omega z x r_vec with r_l = r_l n, r_j = -r_j n
  const Vec2 vl = a.velocity + pair.tangent * (a.omega * a.radius);
  const Vec2 vj = b.velocity - pair.tangent * (b.omega * b.radius);
  return dot(vj - vl, pair.tangent);
}

Vec2 tangential_force(const ContactPair& pair, const Floe& a, const Floe& b, const MaterialParams& mat,
                      const Vec2& f_normal) {
  double shear = pair.chord * mat.shear_modulus;
  if (mat.thickness_scaling) shear *= std::min(a.thickness, b.thickness) / mat.reference_thickness;
  double ft = shear * tangential_speed(pair, a, b);
  const double cap = mat.friction * f_normal.norm();
  if (std::abs(ft) > cap) ft = std::copysign(cap, ft);
  return pair.tangent * ft;
}

Vec2 tangential_force(const ContactPair& pair, const Floe& a, const Floe& b, const MaterialParams& mat) {
  return tangential_force(pair, a, b, mat, normal_force(pair, contact_stiffness(pair, a, b, mat)));
}

double contact_torque(const ContactPair& pair, double radius, const Vec2& f_t) {
  return cross(pair.normal * radius, f_t);
}

PairForce pair_force(const ContactPair& pair, const Floe& a, const Floe& b, const MaterialParams& mat) {
  PairForce pf;
  pf.l = pair.l;
  pf.j = pair.j;
  pf.overlap = pair.overlap;
  pf.stiffness = contact_stiffness(pair, a, b, mat);
  pf.normal_force = normal_force(pair, pf.stiffness);
  pf.tangential_force = tangential_force(pair, a, b, mat, pf.normal_force);
  pf.torque_l = contact_torque(pair, a.radius, pf.tangential_force);
  // floe j: normal -n, force -f_t, so (r_j (-n)) x (-f_t) = r_j n x f_t
  pf.torque_j = contact_torque(pair, b.radius, pf.tangential_force);
  return pf;
}

namespace {

void all_pairs(const FloeField& field, double margin, std::vector<std::pair<int, int>>& out) {
  const auto& fl = field.floes;
  const int n = static_cast<int>(fl.size());
  for (int l = 0; l < n; ++l) {
    for (int j = l + 1; j < n; ++j) {
      const Vec2 disp = minimum_image_displacement(fl[l].position, fl[j].position, field.domain);
      const double reach = fl[l].radius + fl[j].radius + margin;
      if (disp.norm2() < reach * reach) out.emplace_back(l, j);
    }
  }
}

void grid_pairs(const FloeField& field, double margin, std::vector<std::pair<int, int>>& out) {
  const auto& fl = field.floes;
  const int n = static_cast<int>(fl.size());
  double r_max = 0.0;
  for (const auto& f : fl) r_max = std::max(r_max, f.radius);
  const double side = field.domain.side;
  const double width = 2.0 * r_max + margin;
  const int cells = width > 0.0 && side / width < 1e6 ? static_cast<int>(std::floor(side / width)) : 0;
  if (cells < 3) {
    all_pairs(field, margin, out);
    return;
  }
  const double cell = side / cells;
  std::vector<int> head(static_cast<std::size_t>(cells) * cells, -1), next(static_cast<std::size_t>(n), -1);
  std::vector<int> cx(static_cast<std::size_t>(n)), cy(static_cast<std::size_t>(n));
  auto index = [&](double c, int id) {
    if (!std::isfinite(c)) throw NumericalBlowupError(id, std::numeric_limits<double>::quiet_NaN());
    return std::clamp(static_cast<int>(std::floor(std::clamp(c, 0.0, side) / cell)), 0, cells - 1);
  };
  for (int i = n - 1; i >= 0; --i) {
    cx[i] = index(fl[i].position.x, fl[i].id);
    cy[i] = index(fl[i].position.y, fl[i].id);
    auto& h = head[static_cast<std::size_t>(cy[i]) * cells + cx[i]];
    next[i] = h;
    h = i;
  }
  for (int l = 0; l < n; ++l) {
    for (int dy = -1; dy <= 1; ++dy) {
      const int y = (cy[l] + dy + cells) % cells;
      for (int dx = -1; dx <= 1; ++dx) {
        const int x = (cx[l] + dx + cells) % cells;
        for (int j = head[static_cast<std::size_t>(y) * cells + x]; j >= 0; j = next[j]) {
          if (j <= l) continue;
          const Vec2 disp = minimum_image_displacement(fl[l].position, fl[j].position, field.domain);
          const double reach = fl[l].radius + fl[j].radius + margin;
          if (disp.norm2() < reach * reach) out.emplace_back(l, j);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
}

}  // namespace

std::vector<std::pair<int, int>> find_pairs_within(const FloeField& field, double margin, NeighborSearch search) {
  if (!(margin >= 0.0)) throw ParameterError("pair search margin must be >= 0");
  std::vector<std::pair<int, int>> out;
  if (search == NeighborSearch::grid)
    grid_pairs(field, margin, out);
  else
    all_pairs(field, margin, out);
  return out;
}

std::vector<std::pair<int, int>> find_contacts(const FloeField& field, NeighborSearch search) {
  return find_pairs_within(field, 0.0, search);
}

void accumulate_loads(const FloeField& field, const MaterialParams& mat,
                      const std::vector<std::pair<int, int>>& candidates, ContactResult& out) {
  const auto& fl = field.floes;
  out.loads.reset(fl.size());
  out.pairs.clear();
  for (const auto& [l, j] : candidates) {
    const auto pair = detect_contact(fl[l], fl[j], field.domain, l, j);
    if (!pair) continue;
    const PairForce pf = pair_force(*pair, fl[l], fl[j], mat);
    const Vec2 f = pf.normal_force + pf.tangential_force;
    out.loads.force[l] += f;
    out.loads.force[j] -= f;
    out.loads.torque[l] += pf.torque_l;
    out.loads.torque[j] += pf.torque_j;
    out.pairs.push_back(pf);
  }
}

void accumulate_loads(const FloeField& field, const MaterialParams& mat, NeighborSearch search, ContactResult& out) {
  accumulate_loads(field, mat, find_contacts(field, search), out);
}

ContactResult accumulate_loads(const FloeField& field, const MaterialParams& mat, NeighborSearch search) {
  ContactResult r;
  accumulate_loads(field, mat, search, r);
  return r;
}

}  // namespace seaice
