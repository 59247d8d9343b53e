#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "seaice/da.hpp"
#include "seaice/integrator.hpp"
#include "seaice/superfloe.hpp"
#include "seaice/uq.hpp"

namespace seaice::io {

/// Shortest decimal text that parses back to the same double.
std::string number(double v);

void write_field_json(const std::filesystem::path& path, const FloeField& field);
FloeField read_field_json(const std::filesystem::path& path);
void write_field_csv(const std::filesystem::path& path, const FloeField& field);

/// Appends one row per floe for every snapshot it is given.
class TrajectoryWriter {
public:
  explicit TrajectoryWriter(const std::filesystem::path& path);
  void write(const SimulationState& state);
  [[nodiscard]] std::int64_t rows() const { return rows_; }

private:
  std::ofstream out_;
  std::filesystem::path path_;
  std::int64_t rows_ = 0;
};

/// Mode amplitudes and their dynamics parameters.
void write_ocean_json(const std::filesystem::path& path, const OceanState& ocean);
/// Velocity and curl on an n x n grid covering the periodic domain.
void write_ocean_grid_csv(const std::filesystem::path& path, const OceanState& ocean, int n = 64);

/// Restart data: the full state plus the random stream and step counter.
struct Checkpoint {
  SimulationState state;
  std::string rng_state;  ///< textual engine state, empty when unused
  std::int64_t step = 0;
};

/// Binary little-endian checkpoint. Layout:
///   "SEAICECK" | u32 version | i64 step | f64 time
///   f64 side | u32 floe count | per floe: i32 id, u8 kind, f64 radius,
///     thickness, x1, x2, angle, v1, v2, omega
///   f64 ocean time, rossby, side, time unit | u32 mode count | per mode:
///     i32 k1, k2, u8 class, f64 damping, phase, noise, forcing re, im,
///     forcing frequency, amplitude re, im, 4 x (eigenvector re, im),
///     i32 partner, u8 independent
///   u32 length | engine state text
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Per-pair contact log of one state.
void write_contact_log_csv(const std::filesystem::path& path, const FloeField& field, const MaterialParams& mat,
                           NeighborSearch search);

void write_reduction_json(const std::filesystem::path& path, const ReductionReport& report, int large_count,
                          int superfloe_count);
/// One line of the reduction summary table:
/// L & L0 & L_new & concentration & r range & h range (before -> after).
std::string reduction_table_row(const ReductionReport& report, int large_count, int superfloe_count);

void write_inflation_json(const std::filesystem::path& path, const InflationCoefficients& c);
InflationCoefficients read_inflation_json(const std::filesystem::path& path);

void write_pdf_csv(const std::filesystem::path& path, const PdfTable& pdf);
void write_momentum_csv(const std::filesystem::path& path, const MomentumSeries& series);
void write_contact_series_csv(const std::filesystem::path& path, const ContactForceSeries& series);

void write_da_csv(const std::filesystem::path& path, const std::vector<DaRecord>& records);
/// Reads DA output, or a plain series file with cycle, variable and value
/// columns (truth and mean both set to the value).
std::vector<DaRecord> read_da_csv(const std::filesystem::path& path);
void write_skill_json(const std::filesystem::path& path, const SkillScore& velocity, const SkillScore& ocean,
                      int skipped_observations);

/// Run manifest: everything needed to reproduce the outputs.
struct Manifest {
  std::string command;
  std::string config_text;  ///< canonical rendering of the configuration
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<std::string> deviations;
  std::vector<std::filesystem::path> artifacts;
};

/// 64-bit FNV-1a of a string, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);
std::string library_version();
void write_manifest(const std::filesystem::path& path, const Manifest& m);

/// Throw IoError unless every path exists and is non-empty.
void verify_artifacts(const std::vector<std::filesystem::path>& paths);

}  // namespace seaice::io
