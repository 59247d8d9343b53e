#include "seaice/floe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "seaice/contact.hpp"
#include "seaice/error.hpp"

namespace seaice {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void check_caps(const Caps& caps, const char* what) {
  if (!(caps.lo >= 0.0) || !(caps.hi > caps.lo) || std::isnan(caps.hi))
    throw ParameterError(std::string("invalid ") + what + " caps");
}

}  // namespace

void MaterialParams::validate() const {
  if (!positive_finite(ice_density) || !positive_finite(young_modulus) || !positive_finite(shear_modulus) ||
      !positive_finite(friction) || !positive_finite(ocean_drag) || !positive_finite(water_density) ||
      !positive_finite(reference_thickness))
    throw ParameterError("material parameters must be strictly positive and finite");
}

double Domain::wrap(double c) const {
  if (c >= 0.0 && c < side) return c;
  if (c < 0.0 && c >= -side) {
    const double w = c + side;
    return w >= side ? 0.0 : w;
  }
  if (c >= side && c < 2.0 * side) return c - side;
  double w = std::fmod(c, side);
  if (w < 0.0) w += side;
  // fmod of a tiny negative number can round up to exactly side
  if (w >= side) w = 0.0;
  return w;
}

void validate(const Floe& f, const Domain& d) {
  if (!positive_finite(f.radius)) throw ParameterError("floe " + std::to_string(f.id) + ": radius must be > 0");
  if (!positive_finite(f.thickness)) throw ParameterError("floe " + std::to_string(f.id) + ": thickness must be > 0");
  const auto inside = [&](double c) { return c >= 0.0 && c < d.side; };
  if (!inside(f.position.x) || !inside(f.position.y))
    throw ParameterError("floe " + std::to_string(f.id) + ": position outside domain");
}

double radius_from_uniform(double u, const SizeDistribution& dist) {
  if (!std::isfinite(u) || u < 0.0 || u >= 1.0) throw ParameterError("radius deviate must lie in [0, 1)");
  if (!positive_finite(dist.exponent) || !positive_finite(dist.scale))
    throw ParameterError("size distribution needs a > 0 and kappa > 0");
  return dist.scale * std::pow(1.0 - u, -1.0 / dist.exponent);
}

double sample_radius(double u, const SizeDistribution& dist, const Caps& caps, Rng& rng) {
  check_caps(caps, "radius");
  if (dist.scale > caps.hi) throw ParameterError("radius caps exclude the whole size distribution");
  double r = radius_from_uniform(u, dist);
  while (r < caps.lo || r > caps.hi) r = radius_from_uniform(uniform01(rng), dist);
  return r;
}

namespace {

double gamma_unit(Rng& rng, double shape) {
  if (shape < 1.0) {
    // boost trick: Gamma(k) = Gamma(k + 1) * U^(1/k)
    const double g = gamma_unit(rng, shape + 1.0);
    double u = 0.0;
    do u = uniform01(rng); while (u <= 0.0);
    return g * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0, v = 0.0;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01(rng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

double sample_thickness(Rng& rng, const ThicknessDistribution& dist, const Caps& caps) {
  if (!positive_finite(dist.shape) || !positive_finite(dist.scale))
    throw ParameterError("thickness distribution needs k > 0 and theta > 0");
  if (!(caps.lo >= 0.0) || !(caps.hi > caps.lo)) throw ParameterError("invalid thickness caps");
  for (;;) {
    const double h = dist.scale * gamma_unit(rng, dist.shape);
    if (h >= caps.lo && h <= caps.hi && h > 0.0) return h;
  }
}

double thickness_density(double h, const ThicknessDistribution& dist) {
  if (h <= 0.0) return 0.0;
  const double k = dist.shape, theta = dist.scale;
  return std::exp((k - 1.0) * std::log(h) - h / theta - std::lgamma(k) - k * std::log(theta));
}

double mass(const Floe& f, const MaterialParams& mat) {
  return mat.ice_density * std::numbers::pi * f.radius * f.radius * f.thickness;
}

double inertia(const Floe& f, const MaterialParams& mat) { return mass(f, mat) * f.radius * f.radius; }

std::pair<double, double> derived_properties(const Floe& f, const MaterialParams& mat) {
  if (!positive_finite(f.radius) || !positive_finite(f.thickness))
    throw ParameterError("floe " + std::to_string(f.id) + " violates r > 0, h > 0");
  const double m = mass(f, mat);
  return {m, m * f.radius * f.radius};
}

namespace {

// One Gauss-Seidel pass pushing overlapping pairs apart along the
// minimum-image normal, split in inverse proportion to disc area.
bool relax_once(FloeField& field) {
  auto& fl = field.floes;
  bool any = false;
  for (std::size_t i = 0; i < fl.size(); ++i) {
    for (std::size_t j = i + 1; j < fl.size(); ++j) {
      const Vec2 disp = minimum_image_displacement(fl[i].position, fl[j].position, field.domain);
      const double d = disp.norm();
      const double overlap = fl[i].radius + fl[j].radius - d;
      if (overlap <= 0.0) continue;
      any = true;
      Vec2 n = d > 0.0 ? disp / d : Vec2{1.0, 0.0};
      const double ai = fl[i].radius * fl[i].radius, aj = fl[j].radius * fl[j].radius;
      fl[i].position = field.domain.wrap(fl[i].position - n * (overlap * aj / (ai + aj)));
      fl[j].position = field.domain.wrap(fl[j].position + n * (overlap * ai / (ai + aj)));
    }
  }
  return any;
}

}  // namespace

FloeField initialize_field(int count, const Domain& domain, const FieldGenerator& gen, std::uint64_t seed) {
  if (count < 1) throw ConfigurationError("floe count must be >= 1");
  if (!positive_finite(domain.side)) throw ConfigurationError("domain side must be > 0");
  Rng rng = make_stream(seed, {0xF10E});

  FloeField field;
  field.domain = domain;
  field.floes.resize(static_cast<std::size_t>(count));
  double area = 0.0;
  for (auto& f : field.floes) {
    f.radius = sample_radius(uniform01(rng), gen.size, gen.radius_caps, rng);
    f.thickness = sample_thickness(rng, gen.thickness, gen.thickness_caps);
    area += std::numbers::pi * f.radius * f.radius;
  }
  const double c = area / domain.area();
  if (c > gen.max_concentration)
    throw ConfigurationError("requested floe population covers " + std::to_string(c) +
                             " of the domain, above the feasible limit " + std::to_string(gen.max_concentration));

  std::stable_sort(field.floes.begin(), field.floes.end(),
                   [](const Floe& a, const Floe& b) { return a.radius > b.radius; });
  for (std::size_t i = 0; i < field.floes.size(); ++i) {
    auto& f = field.floes[i];
    f.id = static_cast<int>(i);
    f.position = {uniform01(rng) * domain.side, uniform01(rng) * domain.side};
  }
  if (count > 1) {
    for (int s = 0; s < gen.relax_sweeps; ++s)
      if (!relax_once(field)) break;
  }
  return field;
}

double concentration(const FloeField& field) {
  double area = 0.0;
  for (const auto& f : field.floes) area += std::numbers::pi * f.radius * f.radius;
  return area / field.domain.area();
}

FieldExtent extent(const FloeField& field) {
  if (field.floes.empty()) return {};
  FieldExtent e{std::numeric_limits<double>::infinity(), 0.0, std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& f : field.floes) {
    e.r_min = std::min(e.r_min, f.radius);
    e.r_max = std::max(e.r_max, f.radius);
    e.h_min = std::min(e.h_min, f.thickness);
    e.h_max = std::max(e.h_max, f.thickness);
  }
  return e;
}

}  // namespace seaice
