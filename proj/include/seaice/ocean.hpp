#pragma once

#include <array>
#include <complex>
#include <vector>

#include "seaice/rng.hpp"
#include "seaice/vec2.hpp"

namespace seaice {

using Complex = std::complex<double>;

enum class ModeClass { gb, gravity_plus, gravity_minus };

const char* to_string(ModeClass c);

/// Parameters of the linear SDE for one class of modes. Rates are per ocean
/// time unit (see OceanState::time_unit).
struct ModeClassParams {
  double damping = 0.5;
  double noise = 0.1;
  Complex forcing{0.0, 0.0};   ///< f0 in f(t) = f0 exp(i nu t)
  double forcing_frequency = 0.0;  ///< nu
};

struct OceanSpec {
  int k_max = 1;
  double rossby = 0.1;
  bool include_gb = true;
  bool include_gravity = true;
  ModeClassParams gb{0.5, 0.1, {0.0, 0.0}, 0.0};
  ModeClassParams gravity{0.5, 0.05, {0.0, 0.0}, 0.0};
  double side = 50'000.0;      ///< m, physical length of one lattice period
  double time_unit = 86'400.0; ///< s per ocean time unit
};

/// One complex Fourier mode of the ocean current.
struct OceanMode {
  int k1 = 0;
  int k2 = 0;
  ModeClass cls = ModeClass::gb;
  double damping = 0.0;   ///< d, 1/time unit
  double phase = 0.0;     ///< phi, rad/time unit
  double noise = 0.0;     ///< sigma, amplitude / sqrt(time unit)
  Complex forcing{0.0, 0.0};
  double forcing_frequency = 0.0;
  Complex amplitude{0.0, 0.0};  ///< m/s
  std::array<Complex, 2> eigenvector{};  ///< unit velocity eigenvector
  /// Index of the mode holding the conjugate amplitude. Equal to the mode's
  /// own index never happens; for a dependent mode `independent` is false
  /// and its amplitude is always conj(amplitude of partner).
  int partner = -1;
  bool independent = true;
};

/// Full lattice of stored modes. Only the independent half is advanced;
/// partners mirror conj(amplitude) so the physical field is real.
struct OceanState {
  std::vector<OceanMode> modes;
  double time = 0.0;        ///< s
  double rossby = 0.1;
  double side = 50'000.0;   ///< m
  double time_unit = 86'400.0;

  [[nodiscard]] int gb_count() const;
  [[nodiscard]] int gravity_count() const;
  /// Set an amplitude and its conjugate partner together.
  void set_amplitude(std::size_t index, Complex value);
  /// Copy conj(amplitude) of every independent mode onto its partner.
  void enforce_symmetry();
  /// Find the mode with wavenumber (k1, k2) and class, or -1.
  [[nodiscard]] int find(int k1, int k2, ModeClass cls) const;
};

/// Gravity-wave frequency Ro^-1 sqrt(1 + Ro^2 |k|^2) (sign per branch).
double gravity_frequency(int k1, int k2, double rossby);

/// Velocity part of the rotating shallow-water eigenvector for (k, class).
std::array<Complex, 2> mode_eigenvector(int k1, int k2, ModeClass cls, double rossby);

/// Mode set on {-K..K}^2: one GB and two gravity modes per nonzero
/// wavenumber, plus the inertial gravity pair at k = 0.
OceanState build_mode_set(const OceanSpec& spec);

/// Sample every independent amplitude from its stationary distribution
/// (mean f/(d - i phi) for constant forcing, variance sigma^2 / (2 d)).
void draw_stationary(OceanState& state, Rng& rng);

/// Largest |phi| * dt (dt converted to ocean time units).
double max_phase_increment(const OceanState& state, double dt_seconds);

/// One Euler-Maruyama step of every independent mode; dt in seconds.
void step_modes(OceanState& state, double dt_seconds, Rng& rng);

/// Real ocean velocity at x (m/s).
Vec2 velocity_at(const OceanState& state, const Vec2& x);
/// Complex sum before taking the real part; imaginary part measures the
/// symmetry residue.
std::array<Complex, 2> velocity_sum(const OceanState& state, const Vec2& x);
/// Vertical vorticity (curl u) at x, 1/s.
double curl_at(const OceanState& state, const Vec2& x);

/// Velocity and curl together, sharing the exponentials.
struct OceanSample {
  Vec2 velocity;
  double curl = 0.0;
};
OceanSample sample_at(const OceanState& state, const Vec2& x);

}  // namespace seaice
