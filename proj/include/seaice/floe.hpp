#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "seaice/rng.hpp"
#include "seaice/vec2.hpp"

namespace seaice {

enum class FloeKind { ordinary, super };

/// One cylindrical floe. SI units throughout.
struct Floe {
  int id = 0;
  double radius = 0.0;     ///< m
  double thickness = 0.0;  ///< m
  Vec2 position;           ///< m, inside [0, side)^2
  double angle = 0.0;      ///< rad, in [0, 2 pi)
  Vec2 velocity;           ///< m/s
  double omega = 0.0;      ///< rad/s
  FloeKind kind = FloeKind::ordinary;

  friend bool operator==(const Floe&, const Floe&) = default;
};

struct MaterialParams {
  double ice_density = 900.0;       ///< kg/m^3
  double young_modulus = 1.25e8;    ///< Pa
  double shear_modulus = 1.25e8;    ///< Pa
  double friction = 0.2;            ///< Coulomb coefficient
  double ocean_drag = 3e-3;         ///< d_o
  double water_density = 1000.0;    ///< kg/m^3
  /// Scale contact stiffness by min(h_l, h_j) / reference_thickness.
  bool thickness_scaling = false;
  double reference_thickness = 1.0;  ///< m

  void validate() const;
};

/// Power-law size density p(r) = a kappa^a / r^(a+1) for r >= kappa.
struct SizeDistribution {
  double exponent = 1.0;  ///< a
  double scale = 1500.0;  ///< kappa, m
};

/// Gamma thickness density with shape k and scale theta.
struct ThicknessDistribution {
  double shape = 2.0;   ///< k
  double scale = 1.3;   ///< theta, m
};

/// Closed interval [lo, hi] used to cap sampled values by rejection.
struct Caps {
  double lo = 0.0;
  double hi = 0.0;
};

struct Domain {
  double side = 50'000.0;  ///< m; the domain is doubly periodic

  [[nodiscard]] double area() const { return side * side; }
  /// Wrap a coordinate into [0, side).
  [[nodiscard]] double wrap(double c) const;
  [[nodiscard]] Vec2 wrap(const Vec2& p) const { return {wrap(p.x), wrap(p.y)}; }
};

/// Collection of floes plus the periodic domain. By convention the floes are
/// stored with the largest first, so the leading entries are the "large"
/// floes retained by any reduction.
struct FloeField {
  Domain domain;
  std::vector<Floe> floes;
};

void validate(const Floe& f, const Domain& d);

/// Inverse-CDF radius draw for deviate u in [0, 1) without caps.
double radius_from_uniform(double u, const SizeDistribution& dist);

/// Radius draw. Returns kappa (1 - u)^(-1/a) when it lands inside the caps;
/// otherwise fresh deviates are drawn from rng until one does.
double sample_radius(double u, const SizeDistribution& dist, const Caps& caps, Rng& rng);

/// Gamma(k, theta) draw (Marsaglia-Tsang), resampled until inside caps. Pass
/// caps {0, +inf} for an uncapped draw.
double sample_thickness(Rng& rng, const ThicknessDistribution& dist, const Caps& caps);

/// Gamma density used to cross-check the thickness law.
double thickness_density(double h, const ThicknessDistribution& dist);

double mass(const Floe& f, const MaterialParams& mat);
double inertia(const Floe& f, const MaterialParams& mat);
/// (m, I) with m = rho pi r^2 h and I = m r^2.
std::pair<double, double> derived_properties(const Floe& f, const MaterialParams& mat);

struct FieldGenerator {
  SizeDistribution size;
  ThicknessDistribution thickness;
  Caps radius_caps{1000.0, 4000.0};
  Caps thickness_caps{0.1, 3.5};
  int relax_sweeps = 50;
  double max_concentration = 0.85;
};

/// L floes with sampled sizes, uniform positions relaxed by push-apart sweeps,
/// zero velocities. Floes are sorted by descending radius and ids are 0..L-1
/// in that order.
FloeField initialize_field(int count, const Domain& domain, const FieldGenerator& gen, std::uint64_t seed);

/// Sum of floe areas over the domain area.
double concentration(const FloeField& field);

/// Minimal/maximal radius and thickness of a field.
struct FieldExtent {
  double r_min = 0.0, r_max = 0.0, h_min = 0.0, h_max = 0.0;
};
FieldExtent extent(const FloeField& field);

}  // namespace seaice
