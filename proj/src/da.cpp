#include "seaice/da.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "seaice/error.hpp"

namespace seaice {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

/// Wrap into (-period/2, period/2].
double wrap_centered(double x, double period) {
  const double half = 0.5 * period;
  x -= period * std::round(x / period);
  if (x > half) x -= period;
  if (x <= -half) x += period;
  return x;
}

/// Wrap into [0, period).
double wrap_positive(double x, double period) {
  double w = std::fmod(x, period);
  if (w < 0.0) w += period;
  if (w >= period) w = 0.0;
  return w;
}

}  // namespace

ObservationRecord observe(const SimulationState& truth, const ObservationConfig& cfg, Rng& rng) {
  if (!(cfg.sigma_x >= 0.0) || !(cfg.sigma_angle >= 0.0)) throw ParameterError("observation noise must be >= 0");
  const auto& fl = truth.field.floes;
  if (cfg.observed_count < 0 || static_cast<std::size_t>(cfg.observed_count) > fl.size())
    throw ConfigurationError("observed floe count exceeds the field");
  ObservationRecord rec;
  rec.time = truth.time;
  rec.sigma_x = cfg.sigma_x;
  rec.sigma_angle = cfg.sigma_angle;
  for (int i = 0; i < cfg.observed_count; ++i) {
    const auto& f = fl[static_cast<std::size_t>(i)];
    const double a = standard_normal(rng), b = standard_normal(rng), c = standard_normal(rng);
    rec.floes.push_back(i);
    rec.position.push_back(truth.field.domain.wrap(f.position + Vec2{a, b} * cfg.sigma_x));
    rec.angle.push_back(wrap_positive(f.angle + c * cfg.sigma_angle, two_pi));
  }
  return rec;
}

InflationNoise InflationCoefficients::noise() const {
  InflationNoise n;
  n.enabled = true;
  n.force_std = force_std;
  n.torque_std = torque_std;
  return n;
}

double lagged_difference_std(std::span<const double> series, int lag) {
  if (lag < 1) throw ParameterError("inflation lag must be >= 1");
  const auto n = static_cast<std::int64_t>(series.size());
  if (n <= lag) throw InsufficientDataError("contact series shorter than the lag");
  const auto count = static_cast<std::size_t>(n - lag);
  if (count < 2) throw InsufficientDataError("need at least two lagged differences");
  std::vector<double> diff(count);
  for (std::size_t j = 0; j < count; ++j) diff[j] = series[j + static_cast<std::size_t>(lag)] - series[j];
  return sample_stddev(diff);
}

InflationCoefficients compute_inflation(const ContactForceSeries& series, int lag) {
  InflationCoefficients c;
  c.lag = lag;
  c.steps = series.force.empty() ? 0 : static_cast<std::int64_t>(series.force.front().size());
  for (std::size_t l = 0; l < series.force.size(); ++l) {
    std::vector<double> fx, fy;
    fx.reserve(series.force[l].size());
    fy.reserve(series.force[l].size());
    for (const auto& f : series.force[l]) {
      fx.push_back(f.x);
      fy.push_back(f.y);
    }
    c.force_std.push_back({lagged_difference_std(fx, lag), lagged_difference_std(fy, lag)});
    c.torque_std.push_back(lagged_difference_std(series.torque[l], lag));
  }
  return c;
}

std::vector<double> StateLayout::periods() const {
  std::vector<double> p(size(), 0.0);
  for (std::size_t i = 0; i < floes; ++i) {
    p[x1(i)] = side;
    p[x2(i)] = side;
    p[angle(i)] = two_pi;
  }
  return p;
}

StateLayout make_layout(const SimulationState& state) {
  StateLayout l;
  l.floes = state.field.floes.size();
  l.side = state.field.domain.side;
  for (std::size_t q = 0; q < state.ocean.modes.size(); ++q)
    if (state.ocean.modes[q].independent) l.modes.push_back(static_cast<int>(q));
  return l;
}

std::vector<double> pack(const SimulationState& state, const StateLayout& layout) {
  if (state.field.floes.size() != layout.floes) throw ConfigurationError("state does not match the layout");
  std::vector<double> v(layout.size());
  for (std::size_t i = 0; i < layout.floes; ++i) {
    const auto& f = state.field.floes[i];
    v[layout.x1(i)] = f.position.x;
    v[layout.x2(i)] = f.position.y;
    v[layout.angle(i)] = f.angle;
    v[layout.v1(i)] = f.velocity.x;
    v[layout.v2(i)] = f.velocity.y;
    v[layout.omega(i)] = f.omega;
  }
  for (std::size_t q = 0; q < layout.modes.size(); ++q) {
    const Complex a = state.ocean.modes.at(static_cast<std::size_t>(layout.modes[q])).amplitude;
    v[layout.mode_re(q)] = a.real();
    v[layout.mode_im(q)] = a.imag();
  }
  return v;
}

void unpack(std::span<const double> vec, const StateLayout& layout, SimulationState& state) {
  if (vec.size() != layout.size() || state.field.floes.size() != layout.floes)
    throw ConfigurationError("state vector does not match the layout");
  const auto& domain = state.field.domain;
  for (std::size_t i = 0; i < layout.floes; ++i) {
    auto& f = state.field.floes[i];
    f.position = domain.wrap(Vec2{vec[layout.x1(i)], vec[layout.x2(i)]});
    f.angle = wrap_positive(vec[layout.angle(i)], two_pi);
    f.velocity = {vec[layout.v1(i)], vec[layout.v2(i)]};
    f.omega = vec[layout.omega(i)];
  }
  for (std::size_t q = 0; q < layout.modes.size(); ++q)
    state.ocean.modes.at(static_cast<std::size_t>(layout.modes[q])).amplitude = {vec[layout.mode_re(q)], vec[layout.mode_im(q)]};
  state.ocean.enforce_symmetry();
}

Moments component_moments(const EnsembleMatrix& ens, std::size_t k, double period) {
  if (ens.members < 2) throw InsufficientDataError("ensemble moments need at least 2 members");
  const double n = static_cast<double>(ens.members);
  const double ref = ens(0, k);
  double sum = 0.0;
  for (std::size_t m = 0; m < ens.members; ++m) sum += period > 0.0 ? wrap_centered(ens(m, k) - ref, period) : ens(m, k);
  const double mean_anom = sum / n;
  double var = 0.0;
  for (std::size_t m = 0; m < ens.members; ++m) {
    const double a = period > 0.0 ? wrap_centered(ens(m, k) - ref, period) - mean_anom : ens(m, k) - mean_anom;
    var += a * a;
  }
  Moments out;
  out.mean = period > 0.0 ? wrap_positive(ref + mean_anom, period) : mean_anom;
  out.spread = std::sqrt(var / (n - 1.0));
  return out;
}

UpdateStats eakf_update(EnsembleMatrix& ens, std::span<const ScalarObservation> obs, std::span<const double> periods) {
  if (ens.members < 2) throw ConfigurationError("EAKF needs at least 2 members");
  if (periods.size() != ens.dim) throw ConfigurationError("period list does not match the state dimension");
  const std::size_t n = ens.members;
  const double nm1 = static_cast<double>(n) - 1.0;
  UpdateStats stats;
  std::vector<double> anom(n), incr(n), comp(n);
  for (const auto& o : obs) {
    if (o.component >= ens.dim) throw ConfigurationError("observed component out of range");
    if (!(o.variance > 0.0)) throw ParameterError("observation variance must be > 0");
    const std::size_t c = o.component;
    const double pc = periods[c];

    // observed-space prior, unwrapped around member 0
    const double ref = ens(0, c);
    double mean = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      anom[m] = pc > 0.0 ? wrap_centered(ens(m, c) - ref, pc) : ens(m, c) - ref;
      mean += anom[m];
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      anom[m] -= mean;
      var += anom[m] * anom[m];
    }
    var /= nm1;
    if (!(var > 0.0)) {
      ++stats.skipped;
      continue;
    }
    // innovation relative to the prior mean, wrapped for circular components
    const double innovation = pc > 0.0 ? wrap_centered(o.value - (ref + mean), pc) : o.value - (ref + mean);
    const double post_var = 1.0 / (1.0 / var + 1.0 / o.variance);
    const double shift = post_var * innovation / o.variance;  // posterior mean minus prior mean
    const double contract = std::sqrt(post_var / var);
    for (std::size_t m = 0; m < n; ++m) incr[m] = shift + (contract - 1.0) * anom[m];

    for (std::size_t k = 0; k < ens.dim; ++k) {
      const double pk = periods[k];
      double cov = 0.0;
      if (k == c) {
        cov = var * nm1;
      } else {
        const double rk = ens(0, k);
        double mk = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
          comp[m] = pk > 0.0 ? wrap_centered(ens(m, k) - rk, pk) : ens(m, k);
          mk += comp[m];
        }
        mk /= static_cast<double>(n);
        for (std::size_t m = 0; m < n; ++m) cov += (comp[m] - mk) * anom[m];
      }
      const double beta = cov / (var * nm1);
      if (beta == 0.0) continue;
      for (std::size_t m = 0; m < n; ++m) {
        double& x = ens(m, k);
        x += beta * incr[m];
        if (pk > 0.0) x = wrap_positive(x, pk);
      }
    }
    ++stats.applied;
  }
  return stats;
}

double rmse(std::span<const double> truth, std::span<const double> estimate) {
  if (truth.size() != estimate.size()) throw ParameterError("rmse needs series of equal length");
  if (truth.size() < 2) throw InsufficientDataError("rmse needs at least 2 points");
  double s = 0.0;
  for (std::size_t j = 0; j < truth.size(); ++j) s += (estimate[j] - truth[j]) * (estimate[j] - truth[j]);
  return std::sqrt(s / static_cast<double>(truth.size()));
}

double pcc(std::span<const double> truth, std::span<const double> estimate) {
  if (truth.size() != estimate.size()) throw ParameterError("pcc needs series of equal length");
  if (truth.size() < 2) throw InsufficientDataError("pcc needs at least 2 points");
  const double mt = sample_mean(truth), me = sample_mean(estimate);
  double num = 0.0, st = 0.0, se = 0.0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    num += (estimate[j] - me) * (truth[j] - mt);
    se += (estimate[j] - me) * (estimate[j] - me);
    st += (truth[j] - mt) * (truth[j] - mt);
  }
  if (st == 0.0 || se == 0.0) throw UndefinedStatisticError("pcc of a constant series");
  return num / (std::sqrt(se) * std::sqrt(st));
}

SkillScore score_series(const std::vector<std::vector<double>>& truth, const std::vector<std::vector<double>>& estimate) {
  if (truth.size() != estimate.size()) throw ParameterError("series lists differ in length");
  SkillScore s;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    s.rmse += rmse(truth[i], estimate[i]);
    ++s.series;
    try {
      s.pcc += pcc(truth[i], estimate[i]);
      ++s.pcc_series;
    } catch (const UndefinedStatisticError&) {
    }
  }
  if (s.series > 0) s.rmse /= s.series;
  s.pcc = s.pcc_series > 0 ? s.pcc / s.pcc_series : std::numeric_limits<double>::quiet_NaN();
  return s;
}

const char* to_string(ForecastModel m) {
  switch (m) {
    case ForecastModel::full: return "full";
    case ForecastModel::bare: return "bare";
    case ForecastModel::inflation: return "inflation";
  }
  return "?";
}

namespace {

void validate(const DaScenario& sc) {
  const int total = static_cast<int>(sc.field.floes.size());
  if (sc.members < 2) throw ConfigurationError("the DA ensemble needs at least 2 members");
  if (sc.cycles < 1) throw ConfigurationError("at least one assimilation cycle is required");
  if (sc.obs_interval_steps < 1) throw ConfigurationError("observation interval must be >= 1 step");
  if (!(sc.sigma_x > 0.0) || !(sc.sigma_angle > 0.0)) throw ConfigurationError("observation noise must be > 0");
  if (sc.large_count < 1 || sc.large_count > total) throw ConfigurationError("large floe count out of range");
  if (sc.model == ForecastModel::inflation && sc.large_count + sc.superfloe_count > total && !sc.inflation)
    throw ConfigurationError("L0 + Ls exceeds the floe count");
}

std::string mode_name(const OceanMode& m) {
  return "mode(" + std::to_string(m.k1) + "," + std::to_string(m.k2) + "," + to_string(m.cls) + ")";
}

}  // namespace

InflationCoefficients superfloe_inflation(const DaScenario& sc) {
  ReductionConfig rc;
  rc.large_count = sc.large_count;
  rc.superfloe_count = sc.superfloe_count;
  SimulationState st;
  const int total = static_cast<int>(sc.field.floes.size());
  st.field = sc.large_count + sc.superfloe_count < total ? reduce(sc.field, rc, sc.material).field : sc.field;
  st.ocean = build_mode_set(sc.truth_ocean);
  Rng rng = make_stream(sc.seed, {0x1F1A});
  draw_stationary(st.ocean, rng);
  const InflationNoise none;
  for (std::int64_t k = 0; k < sc.inflation_spinup; ++k) step(st, sc.material, sc.integrator, none, rng);
  const auto series = contact_force_series(st, sc.large_count, sc.inflation_steps, sc.material, sc.integrator, rng);
  return compute_inflation(series, sc.obs_interval_steps);
}

DaResult assimilate(const DaScenario& sc) {
  validate(sc);
  DaResult out;
  const InflationNoise none;

  SimulationState truth;
  truth.field = sc.field;
  truth.ocean = build_mode_set(sc.truth_ocean);
  Rng truth_rng = make_stream(sc.seed, {0x7207});
  draw_stationary(truth.ocean, truth_rng);
  Rng obs_rng = make_stream(sc.seed, {0x0B5});

  // forecast model
  SimulationState proto;
  proto.field = sc.model == ForecastModel::full ? sc.field : truncate(sc.field, sc.large_count);
  proto.ocean = build_mode_set(sc.forecast_ocean);
  const int observed = static_cast<int>(proto.field.floes.size());
  InflationNoise inflation;
  if (sc.model == ForecastModel::inflation) {
    out.inflation = sc.inflation ? *sc.inflation : superfloe_inflation(sc);
    if (out.inflation->force_std.size() < static_cast<std::size_t>(sc.large_count))
      throw ConfigurationError("inflation coefficients do not cover every large floe");
    inflation = out.inflation->noise();
  }
  const StateLayout layout = make_layout(proto);
  const auto periods = layout.periods();

  std::vector<SimulationState> members(static_cast<std::size_t>(sc.members), proto);
  for (int m = 0; m < sc.members; ++m) {
    Rng r = make_stream(sc.seed, {0x1C, static_cast<std::uint64_t>(m)});
    draw_stationary(members[static_cast<std::size_t>(m)].ocean, r);
  }
  std::vector<Rng> member_rng;
  member_rng.reserve(members.size());
  for (int m = 0; m < sc.members; ++m) member_rng.push_back(make_stream(sc.seed, {0xF0CA, static_cast<std::uint64_t>(m)}));

  // ocean modes of the forecast model matched to the truth
  std::vector<int> truth_mode(layout.modes.size(), -1);
  for (std::size_t q = 0; q < layout.modes.size(); ++q) {
    const auto& fm = proto.ocean.modes[static_cast<std::size_t>(layout.modes[q])];
    truth_mode[q] = truth.ocean.find(fm.k1, fm.k2, fm.cls);
  }

  // series for scoring: velocities of observed floes, forecast GB modes
  std::vector<std::vector<double>> vel_truth(2 * static_cast<std::size_t>(observed)), vel_est(vel_truth.size());
  std::vector<std::vector<double>> ocean_truth, ocean_est;
  std::vector<std::size_t> scored_modes;
  for (std::size_t q = 0; q < layout.modes.size(); ++q)
    if (truth_mode[q] >= 0 && proto.ocean.modes[static_cast<std::size_t>(layout.modes[q])].cls == ModeClass::gb)
      scored_modes.push_back(q);
  ocean_truth.assign(2 * scored_modes.size(), {});
  ocean_est.assign(2 * scored_modes.size(), {});

  ObservationConfig ocfg;
  ocfg.observed_count = observed;
  ocfg.sigma_x = sc.sigma_x;
  ocfg.sigma_angle = sc.sigma_angle;

  EnsembleMatrix ens(members.size(), layout.size());
  for (int cycle = 1; cycle <= sc.cycles; ++cycle) {
    for (int k = 0; k < sc.obs_interval_steps; ++k) step(truth, sc.material, sc.integrator, none, truth_rng);
    parallel_members(sc.members, sc.threads, [&](int m) {
      auto& st = members[static_cast<std::size_t>(m)];
      auto& r = member_rng[static_cast<std::size_t>(m)];
      for (int k = 0; k < sc.obs_interval_steps; ++k) {
        try {
          step(st, sc.material, sc.integrator, inflation, r);
        } catch (const Error& e) {
          throw StepError(Error("member " + std::to_string(m) + ": " + e.what()), st.time);
        }
      }
    });

    const auto rec = observe(truth, ocfg, obs_rng);
    for (std::size_t m = 0; m < members.size(); ++m) {
      const auto v = pack(members[m], layout);
      std::copy(v.begin(), v.end(), ens.data.begin() + static_cast<std::ptrdiff_t>(m * layout.size()));
    }
    std::vector<ScalarObservation> scalars;
    for (std::size_t i = 0; i < rec.floes.size(); ++i) {
      const auto f = static_cast<std::size_t>(rec.floes[i]);
      const double vx = rec.sigma_x * rec.sigma_x, va = rec.sigma_angle * rec.sigma_angle;
      scalars.push_back({layout.x1(f), rec.position[i].x, vx});
      scalars.push_back({layout.x2(f), rec.position[i].y, vx});
      scalars.push_back({layout.angle(f), rec.angle[i], va});
    }
    out.skipped_observations += eakf_update(ens, scalars, periods).skipped;
    for (std::size_t m = 0; m < members.size(); ++m)
      unpack(std::span<const double>(ens.data.data() + m * layout.size(), layout.size()), layout, members[m]);

    // record posterior against truth
    const double t = truth.time;
    auto emit = [&](const std::string& name, double tv, std::size_t k) {
      const auto mo = component_moments(ens, k, periods[k]);
      out.records.push_back({cycle, t, name, tv, mo.mean, mo.spread});
      return mo.mean;
    };
    for (std::size_t i = 0; i < layout.floes; ++i) {
      const auto& tf = truth.field.floes[i];
      const std::string id = "[" + std::to_string(tf.id) + "]";
      emit("x1" + id, tf.position.x, layout.x1(i));
      emit("x2" + id, tf.position.y, layout.x2(i));
      emit("angle" + id, tf.angle, layout.angle(i));
      const double m1 = emit("v1" + id, tf.velocity.x, layout.v1(i));
      const double m2 = emit("v2" + id, tf.velocity.y, layout.v2(i));
      emit("omega" + id, tf.omega, layout.omega(i));
      if (i < static_cast<std::size_t>(observed)) {
        vel_truth[2 * i].push_back(tf.velocity.x);
        vel_est[2 * i].push_back(m1);
        vel_truth[2 * i + 1].push_back(tf.velocity.y);
        vel_est[2 * i + 1].push_back(m2);
      }
    }
    for (std::size_t q = 0; q < layout.modes.size(); ++q) {
      const auto& fm = proto.ocean.modes[static_cast<std::size_t>(layout.modes[q])];
      const Complex ta = truth_mode[q] >= 0 ? truth.ocean.modes[static_cast<std::size_t>(truth_mode[q])].amplitude : Complex{};
      const double re = emit(mode_name(fm) + ".re", ta.real(), layout.mode_re(q));
      const double im = emit(mode_name(fm) + ".im", ta.imag(), layout.mode_im(q));
      const auto pos = std::find(scored_modes.begin(), scored_modes.end(), q);
      if (pos != scored_modes.end()) {
        const auto s = static_cast<std::size_t>(pos - scored_modes.begin());
        ocean_truth[2 * s].push_back(ta.real());
        ocean_est[2 * s].push_back(re);
        ocean_truth[2 * s + 1].push_back(ta.imag());
        ocean_est[2 * s + 1].push_back(im);
      }
    }
  }
  if (sc.cycles >= 2) {
    out.velocity = score_series(vel_truth, vel_est);
    out.ocean = score_series(ocean_truth, ocean_est);
  }
  return out;
}

SkillSummary score_records(const std::vector<DaRecord>& records) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> vel, ocean;
  for (const auto& r : records) {
    const bool is_vel = r.variable.rfind("v1[", 0) == 0 || r.variable.rfind("v2[", 0) == 0;
    const bool is_ocean = r.variable.find(",gb).") != std::string::npos;
    if (!is_vel && !is_ocean) continue;
    auto& slot = (is_vel ? vel : ocean)[r.variable];
    slot.first.push_back(r.truth);
    slot.second.push_back(r.mean);
  }
  if (vel.empty() && ocean.empty()) throw InsufficientDataError("no velocity or ocean mode records to score");
  auto score = [](const auto& groups) {
    std::vector<std::vector<double>> t, e;
    for (const auto& [name, te] : groups) {
      t.push_back(te.first);
      e.push_back(te.second);
    }
    return score_series(t, e);
  };
  return {score(vel), score(ocean)};
}

}  // namespace seaice
