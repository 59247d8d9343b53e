// Command-line driver for floe simulations, reduction, UQ and data assimilation.
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "seaice/config.hpp"
#include "seaice/contact.hpp"
#include "seaice/da.hpp"
#include "seaice/error.hpp"
#include "seaice/io.hpp"
#include "seaice/superfloe.hpp"
#include "seaice/uq.hpp"

namespace fs = std::filesystem;
using namespace seaice;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string output_dir;
  bool oracle = false;
  std::optional<int> obs_interval_steps;
};

/// State shared by every subcommand: the configuration, the output
/// directory and the artifacts written so far.
struct Run {
  ScenarioConfig cfg;
  std::vector<std::string> deviations;
  fs::path out;
  std::vector<fs::path> artifacts;
  std::string command;

  fs::path artifact(const std::string& name) {
    artifacts.push_back(out / name);
    return artifacts.back();
  }
};

Run prepare(const GlobalOptions& g, const std::string& command) {
  Run run;
  run.command = command;
  if (!g.config.empty()) {
    auto parsed = parse_config(g.config);
    run.cfg = parsed.config;
    run.deviations = parsed.deviations;
  }
  auto& cfg = run.cfg;
  if (g.seed) {
    cfg.seed = *g.seed;
    run.deviations.push_back("seed = " + std::to_string(cfg.seed) + " (command line)");
  }
  if (g.threads) {
    cfg.threads = *g.threads;
    run.deviations.push_back("threads = " + std::to_string(cfg.threads) + " (command line)");
  }
  if (g.oracle) {
    cfg.integrator.search = NeighborSearch::all_pairs;
    run.deviations.push_back("integrator.search = all_pairs (command line)");
  }
  if (g.obs_interval_steps) {
    cfg.da.obs_interval_steps = *g.obs_interval_steps;
    run.deviations.push_back("da.obs_interval_steps = " + std::to_string(cfg.da.obs_interval_steps) +
                             " (command line)");
  }
  cfg.ocean.side = cfg.domain.side;
  cfg.validate();

  std::string dir = g.output_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("SEAICE_OUTPUT_DIR")) dir = env;
  }
  run.out = dir.empty() ? fs::path("out") : fs::path(dir);
  fs::create_directories(run.out);
  for (const auto& d : run.deviations) std::clog << "config: " << d << "\n";
  return run;
}

void finish(Run& run) {
  io::verify_artifacts(run.artifacts);
  io::Manifest m;
  m.command = run.command;
  m.config_text = render_config(run.cfg);
  m.seed = run.cfg.seed;
  m.threads = run.cfg.threads;
  m.deviations = run.deviations;
  m.artifacts = run.artifacts;
  const auto path = run.out / "manifest.json";
  io::write_manifest(path, m);
  io::verify_artifacts({path});
  for (const auto& a : run.artifacts) std::clog << "wrote " << a.string() << "\n";
}

FloeField initial_field(const ScenarioConfig& cfg, const std::string& field_path) {
  if (!field_path.empty()) return io::read_field_json(field_path);
  return initialize_field(cfg.floe_count, cfg.domain, cfg.generator, cfg.seed);
}

SimulationState initial_state(const ScenarioConfig& cfg, FloeField field, Rng& rng) {
  SimulationState st;
  st.field = std::move(field);
  auto spec = cfg.ocean;
  spec.side = st.field.domain.side;
  st.ocean = build_mode_set(spec);
  draw_stationary(st.ocean, rng);
  return st;
}

std::string rng_text(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- subcommands ------------------------------------------------------------

void cmd_init(Run& run, const std::string& field_path) {
  const auto field = initial_field(run.cfg, field_path);
  io::write_field_json(run.artifact("field.json"), field);
  io::write_field_csv(run.artifact("field.csv"), field);
  std::cout << field.floes.size() << " floes, concentration " << concentration(field) << "\n";
}

void cmd_simulate(Run& run, const std::string& field_path, const std::string& restart, bool reduced) {
  const auto& cfg = run.cfg;
  SimulationState st;
  Rng rng = make_stream(cfg.seed, {0x7207});
  std::int64_t step0 = 0;
  if (!restart.empty()) {
    auto ck = io::read_checkpoint(restart);
    st = std::move(ck.state);
    step0 = ck.step;
    if (!ck.rng_state.empty()) {
      std::istringstream is(ck.rng_state);
      is >> rng;
      if (!is) throw IoError("checkpoint has an unreadable random stream state");
    }
  } else {
    auto field = initial_field(cfg, field_path);
    if (reduced) field = reduce(field, cfg.reduction, cfg.material).field;
    st = initial_state(cfg, std::move(field), rng);
  }

  io::TrajectoryWriter traj(run.artifact("trajectory.csv"));
  const auto modes_path = run.artifact("ocean_modes.csv");
  std::ofstream modes(modes_path);
  if (!modes) throw IoError("cannot open " + modes_path.string());
  modes << "t_s,k1,k2,class,re_m_s,im_m_s\n";
  auto sink = [&](const SimulationState& s, std::int64_t) {
    traj.write(s);
    for (const auto& m : s.ocean.modes) {
      if (!m.independent) continue;
      modes << io::number(s.time) << ',' << m.k1 << ',' << m.k2 << ',' << to_string(m.cls) << ','
            << io::number(m.amplitude.real()) << ',' << io::number(m.amplitude.imag()) << '\n';
    }
  };
  const InflationNoise none;
  const auto t0 = std::chrono::steady_clock::now();
  const auto steps = seaice::run(st, cfg.t_final, cfg.record_every, sink, cfg.material, cfg.integrator, none, rng);
  modes.flush();
  if (!modes) throw IoError("write failed for " + modes_path.string());

  io::write_ocean_json(run.artifact("ocean_final.json"), st.ocean);
  io::write_ocean_grid_csv(run.artifact("ocean_grid.csv"), st.ocean, 64);
  io::write_field_json(run.artifact("field_final.json"), st.field);
  io::write_contact_log_csv(run.artifact("contacts_final.csv"), st.field, cfg.material, cfg.integrator.search);
  io::write_checkpoint(run.artifact("checkpoint.bin"), {st, rng_text(rng), step0 + steps});
  std::cout << steps << " steps to t = " << st.time << " s in " << seconds_since(t0) << " s\n";
}

void cmd_reduce(Run& run, const std::string& field_path) {
  const auto& cfg = run.cfg;
  const auto field = initial_field(cfg, field_path);
  const auto red = reduce(field, cfg.reduction, cfg.material);
  io::write_field_json(run.artifact("reduced_field.json"), red.field);
  io::write_reduction_json(run.artifact("reduction.json"), red.report, cfg.reduction.large_count,
                           cfg.reduction.superfloe_count);
  const auto row = io::reduction_table_row(red.report, cfg.reduction.large_count, cfg.reduction.superfloe_count);
  const auto table_path = run.artifact("reduction_table.txt");
  std::ofstream table(table_path);
  table << "L & L0 & L_new & concentration & radius range & thickness range\n" << row << "\n";
  table.flush();
  if (!table) throw IoError("write failed for " + table_path.string());
  std::cout << row << "\n";
}

/// Samples of the largest floe and of the large-floe momenta collected along
/// one long trajectory after the burn-in.
struct LongRunSamples {
  std::vector<double> v1, omega, p1, angular, f_omega;
  std::vector<std::vector<double>> p1_floe;  ///< m v1 of each large floe
};

LongRunSamples long_run(SimulationState st, const ScenarioConfig& cfg, int large_count, Rng& rng) {
  const auto steps = static_cast<std::int64_t>(std::llround(cfg.t_final / cfg.integrator.dt));
  const auto burn = static_cast<std::int64_t>(std::llround(cfg.uq.burn_in * static_cast<double>(steps)));
  LoadTap tap;
  tap.large_count = std::min<int>(large_count, static_cast<int>(st.field.floes.size()));
  const InflationNoise none;
  LongRunSamples s;
  s.p1_floe.resize(static_cast<std::size_t>(tap.large_count));
  for (std::int64_t k = 0; k < steps; ++k) {
    step(st, cfg.material, cfg.integrator, none, rng, k >= burn ? &tap : nullptr);
    if (k < burn) continue;
    const auto& big = st.field.floes.front();
    s.v1.push_back(big.velocity.x);
    s.omega.push_back(big.omega);
    const auto mom = total_momenta(st.field, cfg.material, 0, static_cast<std::size_t>(tap.large_count));
    s.p1.push_back(mom.linear.x);
    s.angular.push_back(mom.angular);
    s.f_omega.push_back(tap.torque.empty() ? 0.0 : tap.torque.front());
    for (std::size_t l = 0; l < s.p1_floe.size(); ++l) {
      const auto& f = st.field.floes[l];
      s.p1_floe[l].push_back(mass(f, cfg.material) * f.velocity.x);
    }
  }
  if (s.v1.size() < 4) throw InsufficientDataError("the long run leaves fewer than 4 samples after burn-in");
  return s;
}

void cmd_uq(Run& run, const std::string& field_path) {
  const auto& cfg = run.cfg;
  const auto field = initial_field(cfg, field_path);
  const int large = cfg.reduction.large_count;
  Rng ic_rng = make_stream(cfg.seed, {0x7207});
  const auto full = initial_state(cfg, field, ic_rng);
  auto superfloe = full;
  superfloe.field = reduce(field, cfg.reduction, cfg.material).field;
  auto bare = full;
  bare.field = truncate(field, large);

  struct System {
    const char* name;
    const SimulationState* state;
  };
  const System systems[] = {{"full", &full}, {"superfloe", &superfloe}, {"bare", &bare}};

  EnsembleOptions eo;
  eo.members = cfg.uq.members;
  eo.t_final = cfg.uq.horizon;
  eo.record_every = cfg.record_every;
  eo.seed = cfg.seed;
  eo.threads = cfg.threads;
  const InflationNoise none;
  json summary = json::object();
  for (const auto& sys : systems) {
    const auto series = ensemble_forecast(*sys.state, cfg.material, cfg.integrator, none, eo);
    io::write_momentum_csv(run.artifact(std::string("momentum_") + sys.name + ".csv"), series);
    if (sys.state != &bare) {
      EnsembleOptions small = eo;
      small.first_floe = static_cast<std::size_t>(large);
      const auto rest = ensemble_forecast(*sys.state, cfg.material, cfg.integrator, none, small);
      io::write_momentum_csv(run.artifact(std::string("momentum_small_") + sys.name + ".csv"), rest);
    }
    summary[sys.name]["final_momentum_std"] = series.std_linear.back().norm();
    summary[sys.name]["floes"] = sys.state->field.floes.size();
  }

  for (const auto& sys : systems) {
    Rng rng = make_stream(cfg.seed, {0x10C6});
    const auto s = long_run(*sys.state, cfg, large, rng);
    const std::pair<const char*, const std::vector<double>*> vars[] = {
        {"v1", &s.v1}, {"omega", &s.omega}, {"p1", &s.p1}, {"angular", &s.angular}, {"f_omega", &s.f_omega}};
    for (const auto& [var, data] : vars) {
      if (sys.state == &bare && std::string(var) == "f_omega") continue;
      const auto pdf = empirical_pdf(*data, cfg.uq.bins);
      io::write_pdf_csv(run.artifact(std::string("pdf_") + sys.name + "_" + var + ".csv"), pdf);
      try {
        summary[sys.name]["excess_kurtosis"][var] = excess_kurtosis(*data);
      } catch (const UndefinedStatisticError&) {
        summary[sys.name]["excess_kurtosis"][var] = nullptr;
      }
    }
    for (std::size_t l = 0; l < s.p1_floe.size(); ++l) {
      const auto pdf = empirical_pdf(s.p1_floe[l], cfg.uq.bins);
      io::write_pdf_csv(run.artifact(std::string("pdf_") + sys.name + "_p1_floe" + std::to_string(l) + ".csv"), pdf);
    }
  }
  const auto path = run.artifact("uq_summary.json");
  std::ofstream out(path);
  out << summary.dump(2) << "\n";
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
  std::cout << summary.dump(2) << "\n";
}

void cmd_inflate(Run& run, const std::string& field_path) {
  const auto& cfg = run.cfg;
  const auto sc = make_da_scenario(cfg, initial_field(cfg, field_path));
  const auto coeff = superfloe_inflation(sc);
  io::write_inflation_json(run.artifact("inflation.json"), coeff);
  for (std::size_t l = 0; l < coeff.force_std.size(); ++l)
    std::cout << "floe " << l << ": force std " << coeff.force_std[l].x << ", " << coeff.force_std[l].y
              << " N, torque std " << coeff.torque_std[l] << " N m\n";
}

void cmd_assimilate(Run& run, const std::string& field_path, const std::string& inflation_path) {
  const auto& cfg = run.cfg;
  auto sc = make_da_scenario(cfg, initial_field(cfg, field_path));
  if (!inflation_path.empty()) sc.inflation = io::read_inflation_json(inflation_path);
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = assimilate(sc);
  io::write_da_csv(run.artifact("da.csv"), result.records);
  io::write_skill_json(run.artifact("skill.json"), result.velocity, result.ocean, result.skipped_observations);
  if (result.inflation && inflation_path.empty()) io::write_inflation_json(run.artifact("inflation.json"), *result.inflation);
  std::cout << to_string(sc.model) << ": ocean RMSE " << result.ocean.rmse << " PCC " << result.ocean.pcc
            << ", velocity RMSE " << result.velocity.rmse << " PCC " << result.velocity.pcc << " ("
            << seconds_since(t0) << " s)\n";
}

void cmd_score(Run& run, const std::string& records, const std::string& truth, const std::string& estimate) {
  std::vector<DaRecord> rows;
  if (!records.empty()) {
    rows = io::read_da_csv(records);
  } else {
    if (truth.empty() || estimate.empty()) throw ConfigurationError("score needs --records or both --truth and --estimate");
    const auto t = io::read_da_csv(truth);
    const auto e = io::read_da_csv(estimate);
    if (t.size() != e.size()) throw IoError("truth and estimate files have different row counts");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i].variable != e[i].variable || t[i].cycle != e[i].cycle)
        throw IoError("row " + std::to_string(i + 2) + " does not match between truth and estimate");
      auto r = t[i];
      r.mean = e[i].mean;
      rows.push_back(r);
    }
  }
  const auto s = score_records(rows);
  io::write_skill_json(run.artifact("score.json"), s.velocity, s.ocean, 0);
  std::cout << "velocity RMSE " << s.velocity.rmse << " PCC " << s.velocity.pcc << "\n"
            << "ocean    RMSE " << s.ocean.rmse << " PCC " << s.ocean.pcc << "\n";
}

void cmd_bench(Run& run, const std::string& field_path) {
  const auto& cfg = run.cfg;
  const auto field = initial_field(cfg, field_path);
  Rng ic_rng = make_stream(cfg.seed, {0x7207});
  const auto full = initial_state(cfg, field, ic_rng);
  auto reduced = full;
  reduced.field = reduce(field, cfg.reduction, cfg.material).field;
  const InflationNoise none;
  const auto path = run.artifact("bench.csv");
  std::ofstream out(path);
  out << "system,floes,steps,wall_s,per_step_s\n";
  std::cout << "system      floes   steps   wall (s)\n";
  const std::pair<const char*, const SimulationState*> systems[] = {{"full", &full}, {"reduced", &reduced}};
  for (const auto& [name, proto] : systems) {
    auto st = *proto;
    Rng rng = make_stream(cfg.seed, {0xBE7C});
    const auto t0 = std::chrono::steady_clock::now();
    for (std::int64_t k = 0; k < cfg.bench_steps; ++k) step(st, cfg.material, cfg.integrator, none, rng);
    const double wall = seconds_since(t0);
    out << name << ',' << st.field.floes.size() << ',' << cfg.bench_steps << ',' << io::number(wall) << ','
        << io::number(wall / static_cast<double>(cfg.bench_steps)) << '\n';
    std::cout << std::left << std::setw(12) << name << std::setw(8) << st.field.floes.size() << std::setw(8)
              << cfg.bench_steps << wall << "\n";
  }
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

int report_error(const std::string& kind, const std::string& message, const std::string& command) {
  json err{{"error", {{"kind", kind}, {"message", message}, {"command", command}}}};
  std::cerr << err.dump() << "\n";
  return kind == "internal" ? 3 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-element sea ice floe model with superfloe reduction and ensemble data assimilation"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config, "Scenario configuration file (key = value unit)")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Override the master seed");
  app.add_option("--threads", g.threads, "Worker threads for ensembles")->check(CLI::PositiveNumber);
  app.add_option("--output-dir", g.output_dir, "Output directory (default: $SEAICE_OUTPUT_DIR or ./out)");
  app.add_flag("--oracle", g.oracle, "Use the all-pairs contact search");
  app.add_option("--obs-interval-steps", g.obs_interval_steps, "Steps between observations")
      ->check(CLI::PositiveNumber);

  std::string field_path, restart, inflation_path, records, truth, estimate;
  bool reduced = false;

  auto* init = app.add_subcommand("init", "Generate the initial floe field");
  auto* simulate = app.add_subcommand("simulate", "Integrate the floe model and write the trajectory");
  auto* red = app.add_subcommand("reduce", "Replace small floes by superfloes and report the statistics");
  auto* uq = app.add_subcommand("uq", "Ensemble spread and long-run statistics of full, superfloe and bare systems");
  auto* inflate = app.add_subcommand("inflate", "Derive noise inflation coefficients from the superfloe model");
  auto* da = app.add_subcommand("assimilate", "Twin data assimilation experiment");
  auto* score = app.add_subcommand("score", "RMSE and PCC of posterior means against truth");
  auto* bench = app.add_subcommand("bench", "Wall-clock cost of the full and the reduced system");
  auto* reference = app.add_subcommand("reference", "Print every configuration key with its unit and default");

  for (auto* sub : {init, simulate, red, uq, inflate, da, bench})
    sub->add_option("--field", field_path, "Start from this field JSON instead of generating one")
        ->check(CLI::ExistingFile);
  simulate->add_option("--restart", restart, "Continue from a checkpoint")->check(CLI::ExistingFile);
  simulate->add_flag("--reduced", reduced, "Simulate the superfloe-reduced field");
  da->add_option("--inflation", inflation_path, "Reuse inflation coefficients from this JSON")
      ->check(CLI::ExistingFile);
  score->add_option("--records", records, "DA output CSV (truth against posterior mean)")->check(CLI::ExistingFile);
  score->add_option("--truth", truth, "Reference CSV (truth or value column)")->check(CLI::ExistingFile);
  score->add_option("--estimate", estimate, "Estimate CSV (mean or value column)")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    if (reference->parsed()) {
      std::cout << config_reference();
      return 0;
    }
    Run run = prepare(g, command);
    if (init->parsed()) cmd_init(run, field_path);
    if (simulate->parsed()) cmd_simulate(run, field_path, restart, reduced);
    if (red->parsed()) cmd_reduce(run, field_path);
    if (uq->parsed()) cmd_uq(run, field_path);
    if (inflate->parsed()) cmd_inflate(run, field_path);
    if (da->parsed()) cmd_assimilate(run, field_path, inflation_path);
    if (score->parsed()) cmd_score(run, records, truth, estimate);
    if (bench->parsed()) cmd_bench(run, field_path);
    finish(run);
  } catch (const Error& e) {
    return report_error(e.kind(), e.what(), command);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), command);
  }
  return 0;
}
