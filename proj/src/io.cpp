#include "seaice/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "seaice/contact.hpp"
#include "seaice/error.hpp"
#include "seaice/ocean.hpp"

namespace seaice::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
  finish(out, path);
}

json floe_json(const Floe& f) {
  return {{"id", f.id},
          {"kind", f.kind == FloeKind::super ? "super" : "ordinary"},
          {"radius_m", f.radius},
          {"thickness_m", f.thickness},
          {"x1_m", f.position.x},
          {"x2_m", f.position.y},
          {"angle_rad", f.angle},
          {"v1_m_s", f.velocity.x},
          {"v2_m_s", f.velocity.y},
          {"omega_rad_s", f.omega}};
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double to_double(const std::string& s, const fs::path& path, int line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end)
    throw IoError(path.string() + ":" + std::to_string(line) + ": not a number '" + s + "'");
  return v;
}

// little-endian primitives
template <class T>
void put(std::ostream& out, T v) {
  std::array<unsigned char, sizeof(T)> b{};
  std::memcpy(b.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  out.write(reinterpret_cast<const char*>(b.data()), sizeof(T));
}

template <class T>
T get(std::istream& in, const fs::path& path) {
  std::array<unsigned char, sizeof(T)> b{};
  in.read(reinterpret_cast<char*>(b.data()), sizeof(T));
  if (!in) throw IoError(path.string() + ": truncated checkpoint");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  T v;
  std::memcpy(&v, b.data(), sizeof(T));
  return v;
}

constexpr char kMagic[8] = {'S', 'E', 'A', 'I', 'C', 'E', 'C', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace

std::string number(double v) {
  std::array<char, 32> buf{};
  const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), p);
}

void write_field_json(const fs::path& path, const FloeField& field) {
  json floes = json::array();
  for (const auto& f : field.floes) floes.push_back(floe_json(f));
  write_json(path, {{"domain_side_m", field.domain.side}, {"floes", floes}});
}

FloeField read_field_json(const fs::path& path) {
  const json j = read_json(path);
  FloeField field;
  try {
    field.domain.side = j.at("domain_side_m").get<double>();
    for (const auto& e : j.at("floes")) {
      Floe f;
      f.id = e.at("id").get<int>();
      f.kind = e.value("kind", std::string("ordinary")) == "super" ? FloeKind::super : FloeKind::ordinary;
      f.radius = e.at("radius_m").get<double>();
      f.thickness = e.at("thickness_m").get<double>();
      f.position = {e.at("x1_m").get<double>(), e.at("x2_m").get<double>()};
      f.angle = e.value("angle_rad", 0.0);
      f.velocity = {e.value("v1_m_s", 0.0), e.value("v2_m_s", 0.0)};
      f.omega = e.value("omega_rad_s", 0.0);
      field.floes.push_back(f);
    }
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  for (const auto& f : field.floes) {
    try {
      validate(f, field.domain);
    } catch (const Error& e) {
      throw IoError(path.string() + ": floe " + std::to_string(f.id) + ": " + e.what());
    }
  }
  return field;
}

void write_field_csv(const fs::path& path, const FloeField& field) {
  auto out = open_out(path);
  out << "id,kind,radius_m,thickness_m,x1_m,x2_m,angle_rad,v1_m_s,v2_m_s,omega_rad_s\n";
  for (const auto& f : field.floes) {
    out << f.id << ',' << (f.kind == FloeKind::super ? "super" : "ordinary") << ',' << number(f.radius) << ','
        << number(f.thickness) << ',' << number(f.position.x) << ',' << number(f.position.y) << ','
        << number(f.angle) << ',' << number(f.velocity.x) << ',' << number(f.velocity.y) << ',' << number(f.omega)
        << '\n';
  }
  finish(out, path);
}

TrajectoryWriter::TrajectoryWriter(const fs::path& path) : out_(open_out(path)), path_(path) {
  out_ << "t_s,id,x1_m,x2_m,angle_rad,v1_m_s,v2_m_s,omega_rad_s\n";
}

void TrajectoryWriter::write(const SimulationState& s) {
  const std::string t = number(s.time);
  for (const auto& f : s.field.floes) {
    out_ << t << ',' << f.id << ',' << number(f.position.x) << ',' << number(f.position.y) << ',' << number(f.angle)
         << ',' << number(f.velocity.x) << ',' << number(f.velocity.y) << ',' << number(f.omega) << '\n';
    ++rows_;
  }
  if (!out_) throw IoError("write failed for " + path_.string());
}

void write_ocean_json(const fs::path& path, const OceanState& ocean) {
  json modes = json::array();
  for (const auto& m : ocean.modes) {
    modes.push_back({{"k1", m.k1},
                     {"k2", m.k2},
                     {"class", to_string(m.cls)},
                     {"independent", m.independent},
                     {"amplitude_re_m_s", m.amplitude.real()},
                     {"amplitude_im_m_s", m.amplitude.imag()},
                     {"damping", m.damping},
                     {"phase", m.phase},
                     {"noise", m.noise}});
  }
  write_json(path, {{"time_s", ocean.time},
                    {"rossby", ocean.rossby},
                    {"side_m", ocean.side},
                    {"time_unit_s", ocean.time_unit},
                    {"gb_modes", ocean.gb_count()},
                    {"gravity_modes", ocean.gravity_count()},
                    {"modes", modes}});
}

void write_ocean_grid_csv(const fs::path& path, const OceanState& ocean, int n) {
  if (n < 1) throw ParameterError("grid size must be >= 1");
  auto out = open_out(path);
  out << "x1_m,x2_m,u1_m_s,u2_m_s,curl_1_s\n";
  const double h = ocean.side / n;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const Vec2 x{(b + 0.5) * h, (a + 0.5) * h};
      const auto s = sample_at(ocean, x);
      out << number(x.x) << ',' << number(x.y) << ',' << number(s.velocity.x) << ',' << number(s.velocity.y) << ','
          << number(s.curl) << '\n';
    }
  }
  finish(out, path);
}

void write_checkpoint(const fs::path& path, const Checkpoint& ck) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::int64_t>(out, ck.step);
  put<double>(out, ck.state.time);
  const auto& field = ck.state.field;
  put<double>(out, field.domain.side);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(field.floes.size()));
  for (const auto& f : field.floes) {
    put<std::int32_t>(out, f.id);
    put<std::uint8_t>(out, f.kind == FloeKind::super ? 1 : 0);
    for (double v : {f.radius, f.thickness, f.position.x, f.position.y, f.angle, f.velocity.x, f.velocity.y, f.omega})
      put<double>(out, v);
  }
  const auto& oc = ck.state.ocean;
  for (double v : {oc.time, oc.rossby, oc.side, oc.time_unit}) put<double>(out, v);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(oc.modes.size()));
  for (const auto& m : oc.modes) {
    put<std::int32_t>(out, m.k1);
    put<std::int32_t>(out, m.k2);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(m.cls));
    for (double v : {m.damping, m.phase, m.noise, m.forcing.real(), m.forcing.imag(), m.forcing_frequency,
                     m.amplitude.real(), m.amplitude.imag()})
      put<double>(out, v);
    for (const auto& e : m.eigenvector) {
      put<double>(out, e.real());
      put<double>(out, e.imag());
    }
    put<std::int32_t>(out, m.partner);
    put<std::uint8_t>(out, m.independent ? 1 : 0);
  }
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ck.rng_state.size()));
  out.write(ck.rng_state.data(), static_cast<std::streamsize>(ck.rng_state.size()));
  finish(out, path);
}

Checkpoint read_checkpoint(const fs::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw IoError(path.string() + ": not a checkpoint");
  const auto version = get<std::uint32_t>(in, path);
  if (version != kCheckpointVersion)
    throw IoError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
  Checkpoint ck;
  ck.step = get<std::int64_t>(in, path);
  ck.state.time = get<double>(in, path);
  auto& field = ck.state.field;
  field.domain.side = get<double>(in, path);
  const auto n = get<std::uint32_t>(in, path);
  field.floes.resize(n);
  for (auto& f : field.floes) {
    f.id = get<std::int32_t>(in, path);
    f.kind = get<std::uint8_t>(in, path) ? FloeKind::super : FloeKind::ordinary;
    f.radius = get<double>(in, path);
    f.thickness = get<double>(in, path);
    f.position.x = get<double>(in, path);
    f.position.y = get<double>(in, path);
    f.angle = get<double>(in, path);
    f.velocity.x = get<double>(in, path);
    f.velocity.y = get<double>(in, path);
    f.omega = get<double>(in, path);
  }
  auto& oc = ck.state.ocean;
  oc.time = get<double>(in, path);
  oc.rossby = get<double>(in, path);
  oc.side = get<double>(in, path);
  oc.time_unit = get<double>(in, path);
  const auto modes = get<std::uint32_t>(in, path);
  oc.modes.resize(modes);
  for (auto& m : oc.modes) {
    m.k1 = get<std::int32_t>(in, path);
    m.k2 = get<std::int32_t>(in, path);
    const auto cls = get<std::uint8_t>(in, path);
    if (cls > 2) throw IoError(path.string() + ": bad mode class");
    m.cls = static_cast<ModeClass>(cls);
    m.damping = get<double>(in, path);
    m.phase = get<double>(in, path);
    m.noise = get<double>(in, path);
    const double fr = get<double>(in, path);
    const double fi = get<double>(in, path);
    m.forcing = {fr, fi};
    m.forcing_frequency = get<double>(in, path);
    const double ar = get<double>(in, path);
    const double ai = get<double>(in, path);
    m.amplitude = {ar, ai};
    for (auto& e : m.eigenvector) {
      const double er = get<double>(in, path);
      const double ei = get<double>(in, path);
      e = {er, ei};
    }
    m.partner = get<std::int32_t>(in, path);
    m.independent = get<std::uint8_t>(in, path) != 0;
    if (m.partner < -1 || m.partner >= static_cast<int>(modes)) throw IoError(path.string() + ": bad mode partner");
  }
  const auto len = get<std::uint32_t>(in, path);
  ck.rng_state.resize(len);
  in.read(ck.rng_state.data(), len);
  if (!in) throw IoError(path.string() + ": truncated checkpoint");
  return ck;
}

void write_contact_log_csv(const fs::path& path, const FloeField& field, const MaterialParams& mat,
                           NeighborSearch search) {
  const auto result = accumulate_loads(field, mat, search);
  auto out = open_out(path);
  out << "l_id,j_id,overlap_m,stiffness_n_m,fn1_n,fn2_n,ft1_n,ft2_n,torque_l_nm,torque_j_nm\n";
  for (const auto& p : result.pairs) {
    out << field.floes[static_cast<std::size_t>(p.l)].id << ',' << field.floes[static_cast<std::size_t>(p.j)].id << ','
        << number(p.overlap) << ',' << number(p.stiffness) << ',' << number(p.normal_force.x) << ','
        << number(p.normal_force.y) << ',' << number(p.tangential_force.x) << ',' << number(p.tangential_force.y)
        << ',' << number(p.torque_l) << ',' << number(p.torque_j) << '\n';
  }
  finish(out, path);
}

namespace {

json stats_json(const FieldStats& s) {
  return {{"count", s.count},
          {"concentration", s.concentration},
          {"r_min_m", s.extent.r_min},
          {"r_max_m", s.extent.r_max},
          {"h_min_m", s.extent.h_min},
          {"h_max_m", s.extent.h_max},
          {"total_mass_kg", s.total_mass},
          {"total_area_m2", s.total_area},
          {"momentum_kg_m_s", {s.momentum.x, s.momentum.y}},
          {"spin_momentum_kg_m2_s", s.spin_momentum}};
}

}  // namespace

void write_reduction_json(const fs::path& path, const ReductionReport& r, int large_count, int superfloe_count) {
  json tree = json::object();
  for (const auto& [id, members] : r.merge_tree) tree[std::to_string(id)] = members;
  write_json(path, {{"large_count", large_count},
                    {"superfloe_count", superfloe_count},
                    {"before", stats_json(r.before)},
                    {"after", stats_json(r.after)},
                    {"deleted_ids", r.deleted_ids},
                    {"merge_tree", tree},
                    {"deleted",
                     {{"mass_kg", r.deleted_mass},
                      {"area_m2", r.deleted_area},
                      {"momentum_kg_m_s", {r.deleted_momentum.x, r.deleted_momentum.y}},
                      {"spin_momentum_kg_m2_s", r.deleted_spin_momentum}}},
                    {"residual",
                     {{"mass_kg", r.mass_residual},
                      {"area_m2", r.area_residual},
                      {"momentum_kg_m_s", {r.momentum_residual.x, r.momentum_residual.y}},
                      {"spin_momentum_kg_m2_s", r.spin_residual}}}});
}

std::string reduction_table_row(const ReductionReport& r, int large_count, int superfloe_count) {
  std::ostringstream os;
  os << std::fixed;
  os << r.before.count << " & " << large_count << " & " << large_count + superfloe_count << " & "
     << std::setprecision(3) << r.before.concentration << " -> " << r.after.concentration << " & "
     << std::setprecision(0) << "[" << r.before.extent.r_min << ", " << r.before.extent.r_max << "] -> ["
     << r.after.extent.r_min << ", " << r.after.extent.r_max << "] m & " << std::setprecision(2) << "["
     << r.before.extent.h_min << ", " << r.before.extent.h_max << "] -> [" << r.after.extent.h_min << ", "
     << r.after.extent.h_max << "] m";
  return os.str();
}

void write_inflation_json(const fs::path& path, const InflationCoefficients& c) {
  json floes = json::array();
  for (std::size_t i = 0; i < c.force_std.size(); ++i) {
    floes.push_back({{"index", i},
                     {"force_std_n", {c.force_std[i].x, c.force_std[i].y}},
                     {"torque_std_nm", i < c.torque_std.size() ? c.torque_std[i] : 0.0}});
  }
  write_json(path, {{"steps", c.steps}, {"lag_steps", c.lag}, {"floes", floes}});
}

InflationCoefficients read_inflation_json(const fs::path& path) {
  const json j = read_json(path);
  InflationCoefficients c;
  try {
    c.steps = j.at("steps").get<std::int64_t>();
    c.lag = j.at("lag_steps").get<int>();
    for (const auto& e : j.at("floes")) {
      const auto& f = e.at("force_std_n");
      c.force_std.push_back({f.at(0).get<double>(), f.at(1).get<double>()});
      c.torque_std.push_back(e.at("torque_std_nm").get<double>());
    }
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  for (std::size_t i = 0; i < c.force_std.size(); ++i) {
    if (!(c.force_std[i].x >= 0.0) || !(c.force_std[i].y >= 0.0) || !(c.torque_std[i] >= 0.0))
      throw IoError(path.string() + ": negative or non-finite noise amplitude");
  }
  return c;
}

void write_pdf_csv(const fs::path& path, const PdfTable& pdf) {
  auto out = open_out(path);
  out << "value,density,normal_fit\n";
  for (std::size_t b = 0; b < pdf.centers.size(); ++b)
    out << number(pdf.centers[b]) << ',' << number(pdf.density[b]) << ',' << number(pdf.normal_fit(pdf.centers[b]))
        << '\n';
  finish(out, path);
}

void write_momentum_csv(const fs::path& path, const MomentumSeries& s) {
  auto out = open_out(path);
  out << "t_s,mean_p1_kg_m_s,std_p1_kg_m_s,mean_p2_kg_m_s,std_p2_kg_m_s,mean_angular_kg_m2_s,std_angular_kg_m2_s\n";
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    out << number(s.times[k]) << ',' << number(s.mean_linear[k].x) << ',' << number(s.std_linear[k].x) << ','
        << number(s.mean_linear[k].y) << ',' << number(s.std_linear[k].y) << ',' << number(s.mean_angular[k]) << ','
        << number(s.std_angular[k]) << '\n';
  }
  finish(out, path);
}

void write_contact_series_csv(const fs::path& path, const ContactForceSeries& s) {
  auto out = open_out(path);
  out << "t_s,floe,f1_n,f2_n,torque_nm\n";
  for (std::size_t l = 0; l < s.force.size(); ++l) {
    for (std::size_t k = 0; k < s.force[l].size(); ++k) {
      out << number(k < s.times.size() ? s.times[k] : static_cast<double>(k) * s.dt) << ',' << l << ','
          << number(s.force[l][k].x) << ',' << number(s.force[l][k].y) << ',' << number(s.torque[l][k]) << '\n';
    }
  }
  finish(out, path);
}

void write_da_csv(const fs::path& path, const std::vector<DaRecord>& records) {
  auto out = open_out(path);
  out << "cycle,t_s,variable,truth,mean,spread\n";
  for (const auto& r : records) {
    out << r.cycle << ',' << number(r.time) << ',' << quote(r.variable) << ',' << number(r.truth) << ','
        << number(r.mean) << ',' << number(r.spread) << '\n';
  }
  finish(out, path);
}

std::vector<DaRecord> read_da_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  const auto header = split_csv(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  const bool single = col.count("value") && !col.count("truth") && !col.count("mean");
  for (const char* name : {"cycle", "variable"})
    if (!col.count(name)) throw IoError(path.string() + ": missing column '" + name + "'");
  if (!single && (!col.count("truth") || !col.count("mean")))
    throw IoError(path.string() + ": needs truth and mean columns, or a value column");
  std::vector<DaRecord> out;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    if (f.size() != header.size()) throw IoError(path.string() + ":" + std::to_string(n) + ": wrong field count");
    DaRecord r;
    r.cycle = static_cast<int>(to_double(f[col["cycle"]], path, n));
    if (col.count("t_s")) r.time = to_double(f[col["t_s"]], path, n);
    r.variable = f[col["variable"]];
    r.truth = to_double(f[col[single ? "value" : "truth"]], path, n);
    r.mean = single ? r.truth : to_double(f[col["mean"]], path, n);
    if (col.count("spread")) r.spread = to_double(f[col["spread"]], path, n);
    out.push_back(std::move(r));
  }
  return out;
}

void write_skill_json(const fs::path& path, const SkillScore& velocity, const SkillScore& ocean,
                      int skipped_observations) {
  auto score = [](const SkillScore& s) {
    return json{{"rmse", s.rmse}, {"pcc", s.pcc}, {"series", s.series}, {"pcc_series", s.pcc_series}};
  };
  write_json(path, {{"floe_velocity", score(velocity)},
                    {"ocean_gb_modes", score(ocean)},
                    {"skipped_observations", skipped_observations}});
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string library_version() {
  std::string v = "seaice 1.0.0";
#if defined(__clang__)
  v += " clang " __clang_version__;
#elif defined(__GNUC__)
  v += " gcc " __VERSION__;
#endif
  return v;
}

void write_manifest(const fs::path& path, const Manifest& m) {
  json artifacts = json::array();
  for (const auto& a : m.artifacts) {
    std::error_code ec;
    const auto size = fs::file_size(a, ec);
    artifacts.push_back({{"path", a.filename().string()}, {"bytes", ec ? 0 : size}});
  }
  write_json(path, {{"command", m.command},
                    {"config_hash", fnv1a_hex(m.config_text)},
                    {"config", m.config_text},
                    {"seed", m.seed},
                    {"threads", m.threads},
                    {"deviations", m.deviations},
                    {"version", library_version()},
                    {"artifacts", artifacts}});
}

void verify_artifacts(const std::vector<fs::path>& paths) {
  for (const auto& p : paths) {
    std::error_code ec;
    const auto size = fs::file_size(p, ec);
    if (ec || size == 0) throw IoError("artifact missing or empty: " + p.string());
  }
}

}  // namespace seaice::io
