#include "seaice/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "seaice/error.hpp"

namespace seaice {

namespace {

enum class Family { dimensionless, length, time, density, pressure, angle, count, flag, choice };

const std::map<std::string, double>& units_of(Family f) {
  static const std::map<std::string, double> none;
  static const std::map<std::string, double> length{{"m", 1.0}, {"km", 1000.0}};
  static const std::map<std::string, double> time{{"s", 1.0},       {"min", 60.0},    {"h", 3600.0},
                                                  {"hour", 3600.0}, {"hours", 3600.0}, {"d", 86400.0},
                                                  {"day", 86400.0}, {"days", 86400.0}};
  static const std::map<std::string, double> density{{"kg/m3", 1.0}, {"kg/m^3", 1.0}};
  static const std::map<std::string, double> pressure{{"Pa", 1.0}, {"kPa", 1e3}, {"MPa", 1e6}, {"GPa", 1e9}};
  static const std::map<std::string, double> angle{{"rad", 1.0}, {"deg", std::numbers::pi / 180.0}};
  switch (f) {
    case Family::length: return length;
    case Family::time: return time;
    case Family::density: return density;
    case Family::pressure: return pressure;
    case Family::angle: return angle;
    default: return none;
  }
}

const char* si_unit(Family f) {
  switch (f) {
    case Family::length: return "m";
    case Family::time: return "s";
    case Family::density: return "kg/m3";
    case Family::pressure: return "Pa";
    case Family::angle: return "rad";
    default: return "";
  }
}

const char* family_name(Family f) {
  switch (f) {
    case Family::dimensionless: return "number";
    case Family::length: return "length (m, km)";
    case Family::time: return "time (s, min, h, day)";
    case Family::density: return "density (kg/m3)";
    case Family::pressure: return "pressure (Pa, kPa, MPa, GPa)";
    case Family::angle: return "angle (rad, deg)";
    case Family::count: return "integer";
    case Family::flag: return "true/false";
    case Family::choice: return "choice";
  }
  return "";
}

// shortest text that reads back to the same value
std::string format_number(double v) {
  std::array<char, 32> buf{};
  const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), p);
}

double parse_number(const std::string& s, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + s + "'", line);
  }
  if (used != s.size() || !std::isfinite(v)) throw ParseError("not a number: '" + s + "'", line);
  return v;
}

std::int64_t parse_integer(const std::string& s, int line) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw ParseError("not an integer: '" + s + "'", line);
  }
  if (used != s.size()) throw ParseError("not an integer: '" + s + "'", line);
  return v;
}

struct Key {
  std::string name;
  Family family;
  std::string options;  // for choices
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<void(ScenarioConfig&, const std::string& value, const std::string& unit, int line)> set;
};

Key real(std::string name, Family fam, std::function<double&(ScenarioConfig&)> ref) {
  Key k{std::move(name), fam, "", nullptr, nullptr};
  k.get = [ref](const ScenarioConfig& c) { return format_number(ref(const_cast<ScenarioConfig&>(c))); };
  k.set = [ref, fam, n = k.name](ScenarioConfig& c, const std::string& v, const std::string& unit, int line) {
    double factor = 1.0;
    const auto& table = units_of(fam);
    if (!unit.empty()) {
      const auto it = table.find(unit);
      if (it == table.end()) {
        if (table.empty() && unit == "1") {
          factor = 1.0;
        } else {
          throw ParseError("unit '" + unit + "' does not fit " + n + ", expected " + family_name(fam), line);
        }
      } else {
        factor = it->second;
      }
    }
    ref(c) = parse_number(v, line) * factor;
  };
  return k;
}

template <class T>
Key integer(std::string name, std::function<T&(ScenarioConfig&)> ref) {
  Key k{std::move(name), Family::count, "", nullptr, nullptr};
  k.get = [ref](const ScenarioConfig& c) { return std::to_string(ref(const_cast<ScenarioConfig&>(c))); };
  k.set = [ref, n = k.name](ScenarioConfig& c, const std::string& v, const std::string& unit, int line) {
    if (!unit.empty()) throw ParseError(n + " takes no unit", line);
    const auto x = parse_integer(v, line);
    if constexpr (std::is_unsigned_v<T>) {
      if (x < 0) throw ParseError(n + " must be >= 0", line);
    }
    ref(c) = static_cast<T>(x);
  };
  return k;
}

Key flag(std::string name, std::function<bool&(ScenarioConfig&)> ref) {
  Key k{std::move(name), Family::flag, "", nullptr, nullptr};
  k.get = [ref](const ScenarioConfig& c) { return std::string(ref(const_cast<ScenarioConfig&>(c)) ? "true" : "false"); };
  k.set = [ref, n = k.name](ScenarioConfig& c, const std::string& v, const std::string& unit, int line) {
    if (!unit.empty()) throw ParseError(n + " takes no unit", line);
    if (v == "true" || v == "yes" || v == "on" || v == "1")
      ref(c) = true;
    else if (v == "false" || v == "no" || v == "off" || v == "0")
      ref(c) = false;
    else
      throw ParseError(n + " expects true or false", line);
  };
  return k;
}

template <class E>
Key choice(std::string name, std::function<E&(ScenarioConfig&)> ref, std::vector<std::pair<std::string, E>> options) {
  std::string listing;
  for (const auto& [s, _] : options) listing += (listing.empty() ? "" : ", ") + s;
  Key k{std::move(name), Family::choice, listing, nullptr, nullptr};
  k.get = [ref, options](const ScenarioConfig& c) {
    const E v = ref(const_cast<ScenarioConfig&>(c));
    for (const auto& [s, e] : options)
      if (e == v) return s;
    return std::string("?");
  };
  k.set = [ref, options, listing, n = k.name](ScenarioConfig& c, const std::string& v, const std::string& unit, int line) {
    if (!unit.empty()) throw ParseError(n + " takes no unit", line);
    for (const auto& [s, e] : options) {
      if (s == v) {
        ref(c) = e;
        return;
      }
    }
    throw ParseError(n + " must be one of: " + listing, line);
  };
  return k;
}

const std::vector<Key>& keys() {
  using C = ScenarioConfig;
  using F = Family;
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(real("domain.side", F::length, [](C& c) -> double& { return c.domain.side; }));

    k.push_back(real("material.ice_density", F::density, [](C& c) -> double& { return c.material.ice_density; }));
    k.push_back(real("material.water_density", F::density, [](C& c) -> double& { return c.material.water_density; }));
    k.push_back(real("material.young_modulus", F::pressure, [](C& c) -> double& { return c.material.young_modulus; }));
    k.push_back(real("material.shear_modulus", F::pressure, [](C& c) -> double& { return c.material.shear_modulus; }));
    k.push_back(real("material.friction", F::dimensionless, [](C& c) -> double& { return c.material.friction; }));
    k.push_back(real("material.ocean_drag", F::dimensionless, [](C& c) -> double& { return c.material.ocean_drag; }));
    k.push_back(flag("material.thickness_scaling", [](C& c) -> bool& { return c.material.thickness_scaling; }));
    k.push_back(real("material.reference_thickness", F::length,
                     [](C& c) -> double& { return c.material.reference_thickness; }));

    k.push_back(integer<int>("floes.count", [](C& c) -> int& { return c.floe_count; }));
    k.push_back(integer<int>("floes.large", [](C& c) -> int& { return c.reduction.large_count; }));
    k.push_back(integer<int>("floes.superfloes", [](C& c) -> int& { return c.reduction.superfloe_count; }));
    k.push_back(real("floes.isolation_factor", F::dimensionless,
                     [](C& c) -> double& { return c.reduction.isolation_factor; }));
    k.push_back(choice<ThicknessRule>("floes.superfloe_thickness",
                                      [](C& c) -> ThicknessRule& { return c.reduction.thickness_rule; },
                                      {{"area_consistent", ThicknessRule::area_consistent},
                                       {"pi_squared", ThicknessRule::literal_pi_squared}}));
    k.push_back(real("floes.size_exponent", F::dimensionless, [](C& c) -> double& { return c.generator.size.exponent; }));
    k.push_back(real("floes.size_scale", F::length, [](C& c) -> double& { return c.generator.size.scale; }));
    k.push_back(real("floes.radius_min", F::length, [](C& c) -> double& { return c.generator.radius_caps.lo; }));
    k.push_back(real("floes.radius_max", F::length, [](C& c) -> double& { return c.generator.radius_caps.hi; }));
    k.push_back(real("floes.thickness_shape", F::dimensionless,
                     [](C& c) -> double& { return c.generator.thickness.shape; }));
    k.push_back(real("floes.thickness_scale", F::length, [](C& c) -> double& { return c.generator.thickness.scale; }));
    k.push_back(real("floes.thickness_min", F::length, [](C& c) -> double& { return c.generator.thickness_caps.lo; }));
    k.push_back(real("floes.thickness_max", F::length, [](C& c) -> double& { return c.generator.thickness_caps.hi; }));
    k.push_back(integer<int>("floes.relax_sweeps", [](C& c) -> int& { return c.generator.relax_sweeps; }));
    k.push_back(real("floes.max_concentration", F::dimensionless,
                     [](C& c) -> double& { return c.generator.max_concentration; }));

    k.push_back(integer<int>("ocean.k_max", [](C& c) -> int& { return c.ocean.k_max; }));
    k.push_back(real("ocean.rossby", F::dimensionless, [](C& c) -> double& { return c.ocean.rossby; }));
    k.push_back(real("ocean.time_unit", F::time, [](C& c) -> double& { return c.ocean.time_unit; }));
    k.push_back(flag("ocean.gb", [](C& c) -> bool& { return c.ocean.include_gb; }));
    k.push_back(flag("ocean.gravity", [](C& c) -> bool& { return c.ocean.include_gravity; }));
    k.push_back(real("ocean.gb_damping", F::dimensionless, [](C& c) -> double& { return c.ocean.gb.damping; }));
    k.push_back(real("ocean.gb_noise", F::dimensionless, [](C& c) -> double& { return c.ocean.gb.noise; }));
    k.push_back(real("ocean.gb_forcing_re", F::dimensionless,
                     [](C& c) -> double& { return reinterpret_cast<double(&)[2]>(c.ocean.gb.forcing)[0]; }));
    k.push_back(real("ocean.gb_forcing_im", F::dimensionless,
                     [](C& c) -> double& { return reinterpret_cast<double(&)[2]>(c.ocean.gb.forcing)[1]; }));
    k.push_back(real("ocean.gb_forcing_frequency", F::dimensionless,
                     [](C& c) -> double& { return c.ocean.gb.forcing_frequency; }));
    k.push_back(real("ocean.gravity_damping", F::dimensionless, [](C& c) -> double& { return c.ocean.gravity.damping; }));
    k.push_back(real("ocean.gravity_noise", F::dimensionless, [](C& c) -> double& { return c.ocean.gravity.noise; }));
    k.push_back(real("ocean.gravity_forcing_re", F::dimensionless,
                     [](C& c) -> double& { return reinterpret_cast<double(&)[2]>(c.ocean.gravity.forcing)[0]; }));
    k.push_back(real("ocean.gravity_forcing_im", F::dimensionless,
                     [](C& c) -> double& { return reinterpret_cast<double(&)[2]>(c.ocean.gravity.forcing)[1]; }));
    k.push_back(real("ocean.gravity_forcing_frequency", F::dimensionless,
                     [](C& c) -> double& { return c.ocean.gravity.forcing_frequency; }));

    k.push_back(real("time.dt", F::time, [](C& c) -> double& { return c.integrator.dt; }));
    k.push_back(real("time.final", F::time, [](C& c) -> double& { return c.t_final; }));
    k.push_back(integer<int>("time.record_every", [](C& c) -> int& { return c.record_every; }));
    k.push_back(flag("integrator.drag", [](C& c) -> bool& { return c.integrator.drag; }));
    k.push_back(flag("integrator.contacts", [](C& c) -> bool& { return c.integrator.contacts; }));
    k.push_back(flag("integrator.advance_ocean", [](C& c) -> bool& { return c.integrator.advance_ocean; }));
    k.push_back(flag("integrator.substepping", [](C& c) -> bool& { return c.integrator.substepping; }));
    k.push_back(real("integrator.period_margin", F::dimensionless,
                     [](C& c) -> double& { return c.integrator.period_margin; }));
    k.push_back(integer<int>("integrator.max_substeps", [](C& c) -> int& { return c.integrator.max_substeps; }));
    k.push_back(real("integrator.min_skin", F::length, [](C& c) -> double& { return c.integrator.min_skin; }));
    k.push_back(choice<NeighborSearch>("integrator.search", [](C& c) -> NeighborSearch& { return c.integrator.search; },
                                       {{"grid", NeighborSearch::grid}, {"all_pairs", NeighborSearch::all_pairs}}));

    k.push_back(integer<int>("uq.members", [](C& c) -> int& { return c.uq.members; }));
    k.push_back(real("uq.horizon", F::time, [](C& c) -> double& { return c.uq.horizon; }));
    k.push_back(real("uq.burn_in", F::dimensionless, [](C& c) -> double& { return c.uq.burn_in; }));
    k.push_back(integer<int>("uq.bins", [](C& c) -> int& { return c.uq.bins; }));

    k.push_back(integer<int>("da.members", [](C& c) -> int& { return c.da.members; }));
    k.push_back(integer<int>("da.cycles", [](C& c) -> int& { return c.da.cycles; }));
    k.push_back(integer<int>("da.obs_interval_steps", [](C& c) -> int& { return c.da.obs_interval_steps; }));
    k.push_back(real("da.sigma_x", F::length, [](C& c) -> double& { return c.da.sigma_x; }));
    k.push_back(real("da.sigma_angle", F::angle, [](C& c) -> double& { return c.da.sigma_angle; }));
    k.push_back(choice<ForecastModel>("da.forecast", [](C& c) -> ForecastModel& { return c.da.forecast; },
                                      {{"full", ForecastModel::full},
                                       {"bare", ForecastModel::bare},
                                       {"inflation", ForecastModel::inflation}}));
    k.push_back(flag("da.forecast_gravity", [](C& c) -> bool& { return c.da.forecast_gravity; }));
    k.push_back(integer<int>("da.forecast_k_max", [](C& c) -> int& { return c.da.forecast_k_max; }));
    k.push_back(integer<std::int64_t>("da.inflation_steps", [](C& c) -> std::int64_t& { return c.da.inflation_steps; }));
    k.push_back(integer<std::int64_t>("da.inflation_spinup", [](C& c) -> std::int64_t& { return c.da.inflation_spinup; }));

    k.push_back(integer<std::int64_t>("bench.steps", [](C& c) -> std::int64_t& { return c.bench_steps; }));
    k.push_back(integer<std::uint64_t>("seed", [](C& c) -> std::uint64_t& { return c.seed; }));
    k.push_back(integer<int>("threads", [](C& c) -> int& { return c.threads; }));
    return k;
  }();
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void ScenarioConfig::validate() const {
  if (!(domain.side > 0.0)) throw ConfigurationError("domain.side must be > 0");
  const std::pair<const char*, double> material_keys[] = {
      {"material.ice_density", material.ice_density},     {"material.water_density", material.water_density},
      {"material.young_modulus", material.young_modulus}, {"material.shear_modulus", material.shear_modulus},
      {"material.friction", material.friction},           {"material.ocean_drag", material.ocean_drag},
      {"material.reference_thickness", material.reference_thickness}};
  for (const auto& [name, value] : material_keys)
    if (!(value > 0.0) || !std::isfinite(value)) throw ConfigurationError(std::string(name) + " must be > 0");
  if (floe_count < 1) throw ConfigurationError("floes.count must be >= 1");
  if (reduction.large_count < 0) throw ConfigurationError("floes.large must be >= 0");
  if (reduction.superfloe_count < 1) throw ConfigurationError("floes.superfloes must be >= 1");
  if (reduction.large_count + reduction.superfloe_count >= floe_count)
    throw ConfigurationError("floes.large + floes.superfloes must be < floes.count");
  if (!(reduction.isolation_factor > 0.0)) throw ConfigurationError("floes.isolation_factor must be > 0");
  if (!(generator.size.exponent > 0.0) || !(generator.size.scale > 0.0))
    throw ConfigurationError("size distribution parameters must be > 0");
  if (!(generator.thickness.shape > 0.0) || !(generator.thickness.scale > 0.0))
    throw ConfigurationError("thickness distribution parameters must be > 0");
  if (!(generator.radius_caps.lo > 0.0) || !(generator.radius_caps.hi > generator.radius_caps.lo))
    throw ConfigurationError("radius caps must satisfy 0 < min < max");
  if (!(generator.radius_caps.hi > generator.size.scale))
    throw ConfigurationError("floes.radius_max must exceed floes.size_scale");
  if (!(generator.thickness_caps.lo >= 0.0) || !(generator.thickness_caps.hi > generator.thickness_caps.lo))
    throw ConfigurationError("thickness caps must satisfy 0 <= min < max");
  if (generator.relax_sweeps < 0) throw ConfigurationError("floes.relax_sweeps must be >= 0");
  if (ocean.k_max < 0) throw ConfigurationError("ocean.k_max must be >= 0");
  if (!(ocean.rossby > 0.0)) throw ConfigurationError("ocean.rossby must be > 0");
  if (!(ocean.time_unit > 0.0)) throw ConfigurationError("ocean.time_unit must be > 0");
  for (const auto* p : {&ocean.gb, &ocean.gravity}) {
    if (!(p->damping > 0.0)) throw ConfigurationError("ocean damping must be > 0");
    if (!(p->noise >= 0.0)) throw ConfigurationError("ocean noise must be >= 0");
  }
  if (!(integrator.dt > 0.0)) throw ConfigurationError("time.dt must be > 0");
  if (!(t_final >= 0.0)) throw ConfigurationError("time.final must be >= 0");
  if (record_every < 1) throw ConfigurationError("time.record_every must be >= 1");
  if (!(integrator.period_margin > 0.0)) throw ConfigurationError("integrator.period_margin must be > 0");
  if (integrator.max_substeps < 1) throw ConfigurationError("integrator.max_substeps must be >= 1");
  if (!(integrator.min_skin >= 0.0)) throw ConfigurationError("integrator.min_skin must be >= 0");
  if (uq.members < 2) throw ConfigurationError("uq.members must be >= 2");
  if (!(uq.horizon > 0.0)) throw ConfigurationError("uq.horizon must be > 0");
  if (!(uq.burn_in >= 0.0 && uq.burn_in < 1.0)) throw ConfigurationError("uq.burn_in must be in [0, 1)");
  if (uq.bins < 1) throw ConfigurationError("uq.bins must be >= 1");
  if (da.members < 2) throw ConfigurationError("da.members must be >= 2");
  if (da.cycles < 1) throw ConfigurationError("da.cycles must be >= 1");
  if (da.obs_interval_steps < 1) throw ConfigurationError("da.obs_interval_steps must be >= 1");
  if (!(da.sigma_x > 0.0) || !(da.sigma_angle > 0.0)) throw ConfigurationError("observation noise must be > 0");
  if (da.forecast_k_max < -1) throw ConfigurationError("da.forecast_k_max must be >= -1");
  if (da.inflation_steps <= da.obs_interval_steps)
    throw ConfigurationError("da.inflation_steps must exceed da.obs_interval_steps");
  if (da.inflation_spinup < 0) throw ConfigurationError("da.inflation_spinup must be >= 0");
  if (bench_steps < 1) throw ConfigurationError("bench.steps must be >= 1");
  if (threads < 1) throw ConfigurationError("threads must be >= 1");
  const double phase = max_phase_increment(build_mode_set(ocean), integrator.dt);
  if (phase > 0.5)
    throw ConfigurationError("time.dt too large for the fastest ocean mode (phi dt = " + std::to_string(phase) + ")");
}

ParsedConfig parse_config_text(const std::string& text) {
  ParsedConfig out;
  const ScenarioConfig defaults;
  std::map<std::string, const Key*> index;
  for (const auto& k : keys()) index[k.name] = &k;
  std::map<std::string, int> seen;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value [unit]'", line);
    const std::string name = trim(content.substr(0, eq));
    const auto it = index.find(name);
    if (it == index.end()) throw ParseError("unknown key '" + name + "'", line);
    if (seen.count(name)) throw ParseError("duplicate key '" + name + "' (first on line " + std::to_string(seen[name]) + ")", line);
    seen[name] = line;
    std::istringstream rhs(content.substr(eq + 1));
    std::string value, unit, extra;
    rhs >> value >> unit >> extra;
    if (value.empty()) throw ParseError("missing value for '" + name + "'", line);
    if (!extra.empty()) throw ParseError("unexpected text after the unit of '" + name + "'", line);
    it->second->set(out.config, value, unit, line);
  }
  out.config.ocean.side = out.config.domain.side;
  try {
    out.config.validate();
  } catch (const ConfigurationError& e) {
    // report the line of the last key the violated invariant mentions, if any
    int where = 0;
    const std::string msg = e.what();
    for (const auto& [name, l] : seen)
      if (msg.find(name) != std::string::npos) where = std::max(where, l);
    throw ParseError(msg, where);
  }
  for (const auto& k : keys()) {
    const auto a = k.get(defaults), b = k.get(out.config);
    if (a == b) continue;
    const std::string unit = *si_unit(k.family) ? std::string(" ") + si_unit(k.family) : std::string();
    out.deviations.push_back(k.name + " = " + b + unit + " (default " + a + unit + ")");
  }
  return out;
}

ParsedConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path.string(), 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_reference() {
  const ScenarioConfig d;
  std::ostringstream os;
  for (const auto& k : keys()) {
    os << k.name << "  [" << family_name(k.family);
    if (!k.options.empty()) os << ": " << k.options;
    os << "]  default " << k.get(d) << (*si_unit(k.family) ? " " : "") << si_unit(k.family) << "\n";
  }
  return os.str();
}

std::string render_config(const ScenarioConfig& cfg) {
  std::ostringstream os;
  for (const auto& k : keys()) {
    os << k.name << " = " << k.get(cfg);
    if (*si_unit(k.family)) os << " " << si_unit(k.family);
    os << "\n";
  }
  return os.str();
}

DaScenario make_da_scenario(const ScenarioConfig& cfg, const FloeField& field) {
  DaScenario sc;
  sc.field = field;
  sc.truth_ocean = cfg.ocean;
  sc.forecast_ocean = cfg.ocean;
  sc.forecast_ocean.include_gravity = cfg.ocean.include_gravity && cfg.da.forecast_gravity;
  if (cfg.da.forecast_k_max >= 0) sc.forecast_ocean.k_max = cfg.da.forecast_k_max;
  sc.material = cfg.material;
  sc.integrator = cfg.integrator;
  sc.model = cfg.da.forecast;
  sc.large_count = cfg.reduction.large_count;
  sc.superfloe_count = cfg.reduction.superfloe_count;
  sc.members = cfg.da.members;
  sc.cycles = cfg.da.cycles;
  sc.obs_interval_steps = cfg.da.obs_interval_steps;
  sc.sigma_x = cfg.da.sigma_x;
  sc.sigma_angle = cfg.da.sigma_angle;
  sc.inflation_steps = cfg.da.inflation_steps;
  sc.inflation_spinup = cfg.da.inflation_spinup;
  sc.seed = cfg.seed;
  sc.threads = cfg.threads;
  return sc;
}

}  // namespace seaice
