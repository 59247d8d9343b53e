#include "seaice/ocean.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "seaice/error.hpp"

namespace seaice {

const char* to_string(ModeClass c) {
  switch (c) {
    case ModeClass::gb: return "gb";
    case ModeClass::gravity_plus: return "gravity+";
    case ModeClass::gravity_minus: return "gravity-";
  }
  return "?";
}

int OceanState::gb_count() const {
  return static_cast<int>(std::count_if(modes.begin(), modes.end(), [](const OceanMode& m) { return m.cls == ModeClass::gb; }));
}

int OceanState::gravity_count() const { return static_cast<int>(modes.size()) - gb_count(); }

void OceanState::set_amplitude(std::size_t index, Complex value) {
  auto& m = modes.at(index);
  if (m.independent) {
    m.amplitude = value;
    if (m.partner >= 0) modes[static_cast<std::size_t>(m.partner)].amplitude = std::conj(value);
  } else {
    m.amplitude = value;
    modes[static_cast<std::size_t>(m.partner)].amplitude = std::conj(value);
  }
}

void OceanState::enforce_symmetry() {
  for (auto& m : modes)
    if (m.independent && m.partner >= 0) modes[static_cast<std::size_t>(m.partner)].amplitude = std::conj(m.amplitude);
}

int OceanState::find(int k1, int k2, ModeClass cls) const {
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (modes[i].k1 == k1 && modes[i].k2 == k2 && modes[i].cls == cls) return static_cast<int>(i);
  return -1;
}

double gravity_frequency(int k1, int k2, double rossby) {
  const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
  return std::sqrt(1.0 + rossby * rossby * k2sum) / rossby;
}

std::array<Complex, 2> mode_eigenvector(int k1, int k2, ModeClass cls, double rossby) {
  constexpr Complex i{0.0, 1.0};
  const double kk1 = k1, kk2 = k2;
  const double kn = std::hypot(kk1, kk2);
  if (cls == ModeClass::gb) {
    if (kn == 0.0) throw ParameterError("no balanced mode at k = 0");
    return {-i * kk2 / kn, i * kk1 / kn};
  }
  const double sign = cls == ModeClass::gravity_plus ? 1.0 : -1.0;
  if (kn == 0.0) return {Complex{std::numbers::sqrt2 / 2, 0.0}, sign * i * (std::numbers::sqrt2 / 2)};
  // velocity rows of the rotating shallow-water eigenvector for eigenvalue
  // i*phi with Coriolis f = 1/Ro and unit gravity-wave speed
  const double f = 1.0 / rossby;
  const double phi = sign * gravity_frequency(k1, k2, rossby);
  const double norm = kn * std::numbers::sqrt2 * std::abs(phi);
  return {Complex{-phi * kk1, f * kk2} / norm, Complex{-phi * kk2, -f * kk1} / norm};
}

namespace {

bool in_upper_half(int k1, int k2) { return k2 > 0 || (k2 == 0 && k1 > 0); }

}  // namespace

OceanState build_mode_set(const OceanSpec& spec) {
  if (spec.k_max < 0) throw ParameterError("K_max must be >= 0");
  if (!(spec.rossby > 0.0)) throw ParameterError("Rossby number must be > 0");
  if (!(spec.side > 0.0) || !(spec.time_unit > 0.0)) throw ParameterError("ocean side and time unit must be > 0");
  for (const auto* p : {&spec.gb, &spec.gravity})
    if (!(p->damping > 0.0) || !(p->noise >= 0.0)) throw ParameterError("mode damping must be > 0 and noise >= 0");

  OceanState st;
  st.rossby = spec.rossby;
  st.side = spec.side;
  st.time_unit = spec.time_unit;
  const auto add = [&](int k1, int k2, ModeClass cls) {
    OceanMode m;
    m.k1 = k1;
    m.k2 = k2;
    m.cls = cls;
    const auto& p = cls == ModeClass::gb ? spec.gb : spec.gravity;
    m.damping = p.damping;
    m.noise = p.noise;
    m.forcing = p.forcing;
    m.forcing_frequency = p.forcing_frequency;
    if (cls == ModeClass::gb)
      m.phase = 0.0;
    else
      m.phase = (cls == ModeClass::gravity_plus ? 1.0 : -1.0) * gravity_frequency(k1, k2, spec.rossby);
    m.eigenvector = mode_eigenvector(k1, k2, cls, spec.rossby);
    st.modes.push_back(m);
  };
  const int K = spec.k_max;
  for (int k2 = -K; k2 <= K; ++k2) {
    for (int k1 = -K; k1 <= K; ++k1) {
      if (k1 == 0 && k2 == 0) {
        if (spec.include_gravity) {
          add(0, 0, ModeClass::gravity_plus);
          add(0, 0, ModeClass::gravity_minus);
        }
        continue;
      }
      if (spec.include_gb) add(k1, k2, ModeClass::gb);
      if (spec.include_gravity) {
        add(k1, k2, ModeClass::gravity_plus);
        add(k1, k2, ModeClass::gravity_minus);
      }
    }
  }
  // conjugate bookkeeping: (k, gb) <-> (-k, gb); (k, +) <-> (-k, -)
  for (std::size_t i = 0; i < st.modes.size(); ++i) {
    auto& m = st.modes[i];
    ModeClass pc = m.cls;
    if (m.cls == ModeClass::gravity_plus) pc = ModeClass::gravity_minus;
    if (m.cls == ModeClass::gravity_minus) pc = ModeClass::gravity_plus;
    m.partner = st.find(-m.k1, -m.k2, pc);
    if (m.k1 == 0 && m.k2 == 0)
      m.independent = m.cls == ModeClass::gravity_plus;
    else
      m.independent = in_upper_half(m.k1, m.k2);
  }
  return st;
}

void draw_stationary(OceanState& state, Rng& rng) {
  for (auto& m : state.modes) {
    if (!m.independent) continue;
    const Complex mean = m.forcing_frequency == 0.0 ? m.forcing / Complex{m.damping, -m.phase} : Complex{};
    const double sd = m.noise / std::sqrt(2.0 * m.damping);
    const double a = standard_normal(rng), b = standard_normal(rng);
    m.amplitude = mean + sd * Complex{a, b} / std::numbers::sqrt2;
  }
  state.enforce_symmetry();
}

double max_phase_increment(const OceanState& state, double dt_seconds) {
  double worst = 0.0;
  for (const auto& m : state.modes) worst = std::max(worst, std::abs(m.phase));
  return worst * dt_seconds / state.time_unit;
}

void step_modes(OceanState& state, double dt_seconds, Rng& rng) {
  if (!(dt_seconds > 0.0)) throw ParameterError("ocean step needs dt > 0");
  const double dt = dt_seconds / state.time_unit;
  const double t = state.time / state.time_unit;
  const double sq = std::sqrt(dt) / std::numbers::sqrt2;
  for (auto& m : state.modes) {
    if (!m.independent) continue;
    Complex f = m.forcing;
    if (m.forcing_frequency != 0.0) f *= std::polar(1.0, m.forcing_frequency * t);
    const Complex drift = Complex{-m.damping, m.phase} * m.amplitude + f;
    Complex next = m.amplitude + dt * drift;
    if (m.noise > 0.0) {
      const double a = standard_normal(rng), b = standard_normal(rng);
      next += m.noise * sq * Complex{a, b};
    }
    m.amplitude = next;
  }
  state.enforce_symmetry();
  state.time += dt_seconds;
}

namespace {

struct PhaseTable {
  int kmax = 0;
  std::vector<Complex> px, py;  // exp(i theta k), k in -kmax..kmax
  [[nodiscard]] Complex ex(int k) const { return px[static_cast<std::size_t>(k + kmax)]; }
  [[nodiscard]] Complex ey(int k) const { return py[static_cast<std::size_t>(k + kmax)]; }
};

PhaseTable phases(const OceanState& state, const Vec2& x) {
  PhaseTable t;
  for (const auto& m : state.modes) t.kmax = std::max({t.kmax, std::abs(m.k1), std::abs(m.k2)});
  const double w = 2.0 * std::numbers::pi / state.side;
  const std::size_t n = static_cast<std::size_t>(2 * t.kmax + 1);
  t.px.resize(n);
  t.py.resize(n);
  for (int k = -t.kmax; k <= t.kmax; ++k) {
    t.px[static_cast<std::size_t>(k + t.kmax)] = std::polar(1.0, w * k * x.x);
    t.py[static_cast<std::size_t>(k + t.kmax)] = std::polar(1.0, w * k * x.y);
  }
  return t;
}

}  // namespace

std::array<Complex, 2> velocity_sum(const OceanState& state, const Vec2& x) {
  const auto tab = phases(state, x);
  Complex u{}, v{};
  for (const auto& m : state.modes) {
    const Complex a = m.amplitude * tab.ex(m.k1) * tab.ey(m.k2);
    u += a * m.eigenvector[0];
    v += a * m.eigenvector[1];
  }
  return {u, v};
}

Vec2 velocity_at(const OceanState& state, const Vec2& x) {
  const auto s = velocity_sum(state, x);
  return {s[0].real(), s[1].real()};
}

OceanSample sample_at(const OceanState& state, const Vec2& x) {
  const auto tab = phases(state, x);
  const double w = 2.0 * std::numbers::pi / state.side;
  Complex u{}, v{}, c{};
  for (const auto& m : state.modes) {
    const Complex a = m.amplitude * tab.ex(m.k1) * tab.ey(m.k2);
    u += a * m.eigenvector[0];
    v += a * m.eigenvector[1];
    c += a * (static_cast<double>(m.k1) * m.eigenvector[1] - static_cast<double>(m.k2) * m.eigenvector[0]);
  }
  // curl = Re sum i w (k1 r2 - k2 r1) a e
  return {{u.real(), v.real()}, -w * c.imag()};
}

double curl_at(const OceanState& state, const Vec2& x) { return sample_at(state, x).curl; }

}  // namespace seaice
