//========================================================================================
// kerrshell: run configuration, CSV and JSON artifacts, state checkpoints and the
// profile / perturbation input files used by the command-line front end
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#include "kerrshell/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"
#include "kerrshell/errors.hpp"

namespace kerrshell::io {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string unquote(const std::string& v, const std::string& key) {
  if (v.size() < 2 || v.front() != '"' || v.back() != '"') return v;
  std::string out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] == '\\') {
      if (i + 2 >= v.size()) throw Error(ErrorCode::InvalidInput, "config: dangling escape in " + key);
      ++i;
    }
    out += v[i];
  }
  return out;
}

double parse_double(const std::string& v, const std::string& key) {
  std::string t = trim(v);
  if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
  double x = 0.0;
  auto r = std::from_chars(t.data(), t.data() + t.size(), x);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size())
    throw Error(ErrorCode::InvalidInput, "config: " + key + " = '" + v + "' is not a number");
  return x;
}

template <class I>
I parse_int(const std::string& v, const std::string& key) {
  std::string t = trim(v);
  I x = 0;
  auto r = std::from_chars(t.data(), t.data() + t.size(), x);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size())
    throw Error(ErrorCode::InvalidInput, "config: " + key + " = '" + v + "' is not an integer");
  return x;
}

//! key = value pairs of a text file, with '#' comments.
std::vector<std::pair<std::string, std::string>> key_values(const std::string& text, const std::string& what) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::InvalidInput, what + ": line " + std::to_string(n) + " has no '='");
    out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return out;
}

std::vector<double> numbers(const std::string& v, const std::string& key) {
  std::istringstream in(v);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_double(tok, key));
  return out;
}

}  // namespace

//--------------------------------------------------------------------------------------
// Run configuration
//--------------------------------------------------------------------------------------

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::pair<int, int> parse_grid(const std::string& s) {
  auto x = s.find_first_of("xX");
  if (x == std::string::npos) throw Error(ErrorCode::InvalidInput, "grid '" + s + "' is not of the form NxM");
  int n = parse_int<int>(s.substr(0, x), "grid"), m = parse_int<int>(s.substr(x + 1), "grid");
  if (n < 6 || m < 6) throw Error(ErrorCode::InvalidInput, "grid '" + s + "' needs at least 6 x 6 nodes");
  return {n, m};
}

std::string RunConfig::grid_string() const { return std::to_string(grid_nrho) + "x" + std::to_string(grid_nz); }

std::string RunConfig::normalized() const {
  std::map<std::string, std::string> kv{
      {"angmom", format_double(angmom)},
      {"carter", format_double(carter)},
      {"command", quote(command)},
      {"delta", format_double(delta)},
      {"energy", format_double(energy)},
      {"grid", quote(grid_string())},
      {"mass", format_double(mass)},
      {"out", quote(out)},
      {"perturbation", quote(perturbation)},
      {"profile", quote(profile)},
      {"r0", format_double(r0)},
      {"seed", std::to_string(seed)},
      {"sign", std::to_string(sign)},
      {"span", format_double(span)},
      {"spin", format_double(spin)},
      {"sweeps", std::to_string(sweeps)},
      {"theta0", format_double(theta0)},
      {"tol", format_double(tol)},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig c;
  for (const auto& [k, raw] : key_values(text, "config")) {
    std::string v = unquote(raw, k);
    if (k == "angmom") c.angmom = parse_double(v, k);
    else if (k == "carter") c.carter = parse_double(v, k);
    else if (k == "command") c.command = v;
    else if (k == "delta") c.delta = parse_double(v, k);
    else if (k == "energy") c.energy = parse_double(v, k);
    else if (k == "grid") std::tie(c.grid_nrho, c.grid_nz) = parse_grid(v);
    else if (k == "mass") c.mass = parse_double(v, k);
    else if (k == "out") c.out = v;
    else if (k == "perturbation") c.perturbation = v;
    else if (k == "profile") c.profile = v;
    else if (k == "r0") c.r0 = parse_double(v, k);
    else if (k == "seed") c.seed = parse_int<std::uint64_t>(v, k);
    else if (k == "sign") c.sign = parse_int<int>(v, k);
    else if (k == "span") c.span = parse_double(v, k);
    else if (k == "spin") c.spin = parse_double(v, k);
    else if (k == "sweeps") c.sweeps = parse_int<int>(v, k);
    else if (k == "theta0") c.theta0 = parse_double(v, k);
    else if (k == "tol") c.tol = parse_double(v, k);
    else throw Error(ErrorCode::InvalidInput, "config: unknown key '" + k + "'");
  }
  return c;
}

std::string RunConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(normalized())));
  return buf;
}

//--------------------------------------------------------------------------------------
// Artifacts
//--------------------------------------------------------------------------------------

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void Table::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  add_row(cells);
}

void Table::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns.size())
    throw Error(ErrorCode::InvalidInput, "Table: row has " + std::to_string(cells.size()) + " cells for " +
                                             std::to_string(columns.size()) + " columns");
  rows.push_back(cells);
}

std::string Table::to_csv() const {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\r\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + csv_cell(columns[i]);
  out += "\r\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_cell(r[i]);
    out += "\r\n";
  }
  return out;
}

void Table::write(const std::string& path) const { write_file(path, to_csv()); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::InvalidInput, "cannot create directory " + dir + ": " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  out << text;
}

void write_manifest(const std::string& dir, const RunConfig& cfg, const std::vector<std::string>& files,
                    const std::string& extra_json) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["command"] = cfg.command;
  j["config_hash"] = cfg.hash();
  j["config"] = cfg.normalized();
  j["units"] = "geometric, M = 1 (lengths and times in units of M)";
  j["tolerances"] = {{"tol", cfg.tol}};
  j["files"] = files;
  nlohmann::ordered_json extra = nlohmann::ordered_json::parse(extra_json);
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  write_file(dir + "/manifest.json", j.dump(2) + "\n");
}

//--------------------------------------------------------------------------------------
// Inputs and checkpoints
//--------------------------------------------------------------------------------------

BoundRect read_profile_rect(const std::string& path) {
  BoundRect b{std::nan(""), std::nan(""), std::nan(""), std::nan("")};
  for (const auto& [k, v] : key_values(read_file(path), "profile " + path)) {
    if (k == "eps1") b.eps1 = parse_double(v, k);
    else if (k == "eps2") b.eps2 = parse_double(v, k);
    else if (k == "ell1") b.ell1 = parse_double(v, k);
    else if (k == "ell2") b.ell2 = parse_double(v, k);
    else if (k == "shape") {
      if (unquote(v, k) != "default") throw Error(ErrorCode::InvalidInput, "profile: only shape = default is supported");
    } else
      throw Error(ErrorCode::InvalidInput, "profile: unknown key '" + k + "'");
  }
  if (!(b.eps1 < b.eps2) || !(b.ell1 < b.ell2))
    throw Error(ErrorCode::InvalidInput, "profile " + path + ": needs eps1 < eps2 and ell1 < ell2");
  return b;
}

MetricPerturbation read_perturbation(const std::string& path) {
  MetricPerturbation h;
  auto add = [](MetricPerturbation::Field& f, MetricPerturbation::Field g) {
    if (!f) {
      f = std::move(g);
      return;
    }
    f = [a = f, b = std::move(g)](double r, double z) {
      auto u = a(r, z), v = b(r, z);
      return std::array<double, 3>{u[0] + v[0], u[1] + v[1], u[2] + v[2]};
    };
  };
  for (const auto& [k, v] : key_values(read_file(path), "perturbation " + path)) {
    std::vector<double> x = numbers(v, k);
    if (k == "box") {
      if (x.size() != 4) throw Error(ErrorCode::InvalidInput, "perturbation: box needs rho_lo rho_hi z_lo z_hi");
      h.rho_lo = x[0];
      h.rho_hi = x[1];
      h.z_lo = x[2];
      h.z_hi = x[3];
      continue;
    }
    if (x.size() != 4) throw Error(ErrorCode::InvalidInput, "perturbation: " + k + " needs c rho0 z0 width");
    if (!(x[3] > 0.0)) throw Error(ErrorCode::InvalidInput, "perturbation: bump width must be positive");
    if (x[0] == 0.0) continue;
    MetricPerturbation::Field f = bump_field(x[0], x[1], x[2], x[3]);
    if (k == "theta") add(h.theta, f);
    else if (k == "sigma") add(h.sigma, f);
    else if (k == "X") add(h.X, f);
    else throw Error(ErrorCode::InvalidInput, "perturbation: unknown field '" + k + "'");
  }
  return h;
}

Table state_table(const RenormalizedState& s) {
  Table t;
  const GridSpec& g = s.grid;
  t.comments = {"kerrshell renormalised state",
                "grid = " + std::to_string(g.nrho) + " " + std::to_string(g.nz) + " " + format_double(g.rho_lo) + " " +
                    format_double(g.rho_hi) + " " + format_double(g.z_lo) + " " + format_double(g.z_hi),
                "delta = " + format_double(s.delta), "sweep = " + std::to_string(s.sweep),
                "res_X = " + format_double(s.norms.res_X), "res_Y = " + format_double(s.norms.res_Y),
                "path_residual = " + format_double(s.norms.path_residual)};
  t.columns = {"rho", "z"};
  for (const auto& n : RenormalizedState::field_names()) t.columns.push_back(n);
  for (int j = 0; j < g.nz; ++j)
    for (int i = 0; i < g.nrho; ++i) {
      std::vector<double> row{g.rho(i), g.z(j)};
      for (const auto& n : RenormalizedState::field_names()) row.push_back(s.field(n)(i, j));
      t.add_row(row);
    }
  return t;
}

RenormalizedState read_state(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  GridSpec g;
  bool have_grid = false;
  double delta = 0.0;
  int sweep = 0;
  std::vector<std::string> cols;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string t = trim(line.substr(1));
      auto eq = t.find('=');
      if (eq == std::string::npos) continue;
      std::string k = trim(t.substr(0, eq)), v = trim(t.substr(eq + 1));
      if (k == "grid") {
        std::vector<double> x = numbers(v, k);
        if (x.size() != 6) throw Error(ErrorCode::InvalidInput, "state: malformed grid line");
        g.nrho = static_cast<int>(x[0]);
        g.nz = static_cast<int>(x[1]);
        g.rho_lo = x[2];
        g.rho_hi = x[3];
        g.z_lo = x[4];
        g.z_hi = x[5];
        have_grid = true;
      } else if (k == "delta") {
        delta = parse_double(v, k);
      } else if (k == "sweep") {
        sweep = parse_int<int>(v, k);
      }
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    if (cols.empty()) {
      cols = cells;
      continue;
    }
    if (cells.size() != cols.size()) throw Error(ErrorCode::InvalidInput, "state: ragged row in " + path);
    std::vector<double> r;
    for (const auto& x : cells) r.push_back(parse_double(x, "state"));
    rows.push_back(std::move(r));
  }
  if (!have_grid) throw Error(ErrorCode::InvalidInput, "state: " + path + " has no grid line");
  if (rows.size() != static_cast<std::size_t>(g.nrho) * g.nz)
    throw Error(ErrorCode::InvalidInput, "state: row count does not match the grid in " + path);
  RenormalizedState s = RenormalizedState::zero(g);
  s.delta = delta;
  s.sweep = sweep;
  for (const auto& n : RenormalizedState::field_names()) {
    auto it = std::find(cols.begin(), cols.end(), n);
    if (it == cols.end()) throw Error(ErrorCode::InvalidInput, "state: missing column " + n);
    std::size_t c = static_cast<std::size_t>(it - cols.begin());
    AxiScalarField& f = s.field(n);
    for (std::size_t k = 0; k < rows.size(); ++k) f.v[k] = rows[k][c];
  }
  return s;
}

Table matter_table(const MatterFields& mf) {
  Table t;
  const GridSpec& g = mf.grid;
  t.comments = {"kerrshell matter fields",
                "grid = " + std::to_string(g.nrho) + " " + std::to_string(g.nz) + " " + format_double(g.rho_lo) + " " +
                    format_double(g.rho_hi) + " " + format_double(g.z_lo) + " " + format_double(g.z_hi),
                "delta = " + format_double(mf.delta), "max_quadrature_error = " + format_double(mf.max_error)};
  t.columns = {"rho", "z"};
  for (const auto& n : MatterFields::names()) t.columns.push_back(n);
  for (int j = 0; j < g.nz; ++j)
    for (int i = 0; i < g.nrho; ++i) {
      std::size_t k = static_cast<std::size_t>(j) * g.nrho + i;
      std::vector<double> row{g.rho(i), g.z(j)};
      for (const auto& n : MatterFields::names()) row.push_back(mf.field(n)[k]);
      t.add_row(row);
    }
  return t;
}

}  // namespace kerrshell::io
