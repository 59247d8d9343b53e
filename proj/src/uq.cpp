#include "seaice/uq.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "seaice/error.hpp"

namespace seaice {

Momenta total_momenta(const FloeField& field, const MaterialParams& mat, std::size_t first, std::size_t last) {
  Momenta out;
  last = std::min(last, field.floes.size());
  for (std::size_t i = first; i < last; ++i) {
    const auto& f = field.floes[i];
    const double m = mass(f, mat);
    out.linear += f.velocity * m;
    out.angular += m * f.radius * f.radius * f.omega;
  }
  return out;
}

void parallel_members(int n, int threads, const std::function<void(int)>& f) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int m = 0; m < n; ++m) f(m);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::jthread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int m = t; m < n; m += threads) {
        try {
          f(m);
        } catch (...) {
          errors[static_cast<std::size_t>(m)] = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

MomentumSeries ensemble_forecast(const SimulationState& ic, const MaterialParams& mat, const IntegratorOptions& opt,
                                 const InflationNoise& inflation, const EnsembleOptions& ens) {
  if (ens.members < 2) throw ConfigurationError("an ensemble needs at least 2 members");
  if (ens.record_every < 1) throw ConfigurationError("record_every must be >= 1");
  const auto steps = static_cast<std::int64_t>(std::llround(std::max(0.0, ens.t_final - ic.time) / opt.dt));
  const std::size_t records = static_cast<std::size_t>(steps / ens.record_every) + 1;

  MomentumSeries out;
  out.members.assign(static_cast<std::size_t>(ens.members), {});
  parallel_members(ens.members, ens.threads, [&](int m) {
    SimulationState st = ic;
    Rng rng = make_stream(ens.seed, {0xE45E, static_cast<std::uint64_t>(m)});
    auto& rec = out.members[static_cast<std::size_t>(m)];
    rec.reserve(records);
    rec.push_back(total_momenta(st.field, mat, ens.first_floe, ens.last_floe));
    for (std::int64_t k = 1; k <= steps; ++k) {
      try {
        step(st, mat, opt, inflation, rng);
      } catch (const Error& e) {
        throw StepError(Error("member " + std::to_string(m) + ": " + e.what()), st.time);
      }
      if (k % ens.record_every == 0) rec.push_back(total_momenta(st.field, mat, ens.first_floe, ens.last_floe));
    }
  });

  const double n = ens.members;
  for (std::size_t r = 0; r < records; ++r) {
    out.times.push_back(ic.time + static_cast<double>(r * static_cast<std::size_t>(ens.record_every)) * opt.dt);
    Vec2 mean;
    double mean_l = 0.0;
    for (const auto& rec : out.members) {
      mean += rec[r].linear;
      mean_l += rec[r].angular;
    }
    mean /= n;
    mean_l /= n;
    Vec2 var;
    double var_l = 0.0;
    for (const auto& rec : out.members) {
      const Vec2 d = rec[r].linear - mean;
      var += Vec2{d.x * d.x, d.y * d.y};
      var_l += (rec[r].angular - mean_l) * (rec[r].angular - mean_l);
    }
    out.mean_linear.push_back(mean);
    out.std_linear.push_back({std::sqrt(var.x / (n - 1)), std::sqrt(var.y / (n - 1))});
    out.mean_angular.push_back(mean_l);
    out.std_angular.push_back(std::sqrt(var_l / (n - 1)));
  }
  return out;
}

double sample_mean(std::span<const double> x) {
  if (x.empty()) throw InsufficientDataError("mean of an empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_stddev(std::span<const double> x) {
  if (x.size() < 2) throw InsufficientDataError("standard deviation needs at least 2 samples");
  const double m = sample_mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

double excess_kurtosis(std::span<const double> x) {
  if (x.size() < 4) throw InsufficientDataError("kurtosis needs at least 4 samples");
  const double m = sample_mean(x);
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = (v - m) * (v - m);
    m2 += d;
    m4 += d * d;
  }
  const double n = static_cast<double>(x.size());
  m2 /= n;
  m4 /= n;
  if (m2 == 0.0) throw UndefinedStatisticError("kurtosis of a constant sample");
  return m4 / (m2 * m2) - 3.0;
}

double PdfTable::normal_fit(double x) const {
  if (stddev <= 0.0) return 0.0;
  const double z = (x - mean) / stddev;
  return std::exp(-0.5 * z * z) / (stddev * std::sqrt(2.0 * std::numbers::pi));
}

PdfTable empirical_pdf(std::span<const double> samples, int bins) {
  if (samples.size() < 100) throw InsufficientDataError("empirical_pdf needs at least 100 samples");
  if (bins < 1) throw ParameterError("bin count must be >= 1");
  PdfTable t;
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  t.lo = *mn;
  t.hi = *mx;
  t.mean = sample_mean(samples);
  t.stddev = sample_stddev(samples);
  if (t.hi == t.lo) {
    // single degenerate bin of unit width
    t.degenerate = true;
    t.width = 1.0;
    t.centers = {t.lo};
    t.density = {1.0};
    return t;
  }
  t.width = (t.hi - t.lo) / bins;
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (double v : samples) {
    auto b = static_cast<int>((v - t.lo) / t.width);
    b = std::clamp(b, 0, bins - 1);
    counts[static_cast<std::size_t>(b)] += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(samples.size()) * t.width);
  for (int b = 0; b < bins; ++b) {
    t.centers.push_back(t.lo + (b + 0.5) * t.width);
    t.density.push_back(counts[static_cast<std::size_t>(b)] * norm);
  }
  return t;
}

ContactForceSeries contact_force_series(SimulationState& state, int large_count, std::int64_t steps,
                                        const MaterialParams& mat, const IntegratorOptions& opt, Rng& rng) {
  if (large_count < 0 || static_cast<std::size_t>(large_count) > state.field.floes.size())
    throw ConfigurationError("large floe count out of range");
  ContactForceSeries s;
  s.dt = opt.dt;
  s.force.assign(static_cast<std::size_t>(large_count), {});
  s.torque.assign(static_cast<std::size_t>(large_count), {});
  for (auto& v : s.force) v.reserve(static_cast<std::size_t>(steps));
  for (auto& v : s.torque) v.reserve(static_cast<std::size_t>(steps));
  LoadTap tap;
  tap.large_count = large_count;
  const InflationNoise none;
  for (std::int64_t k = 0; k < steps; ++k) {
    step(state, mat, opt, none, rng, &tap);
    s.times.push_back(state.time);
    for (int l = 0; l < large_count; ++l) {
      s.force[static_cast<std::size_t>(l)].push_back(tap.force[static_cast<std::size_t>(l)]);
      s.torque[static_cast<std::size_t>(l)].push_back(tap.torque[static_cast<std::size_t>(l)]);
    }
  }
  return s;
}

}  // namespace seaice
