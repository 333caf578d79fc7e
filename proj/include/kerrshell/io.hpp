//========================================================================================
// kerrshell: run configuration, CSV and JSON artifacts, state checkpoints and the
// profile / perturbation input files used by the command-line front end
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#ifndef KERRSHELL_IO_HPP_
#define KERRSHELL_IO_HPP_

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "kerrshell/field_solver.hpp"
#include "kerrshell/zvc_analysis.hpp"

namespace kerrshell::io {

inline constexpr const char* kVersion = "0.1.0";

//--------------------------------------------------------------------------------------
// Run configuration
//--------------------------------------------------------------------------------------

//! Every option the subcommands understand. Unset optional values are NaN or empty.
struct RunConfig {
  std::string command;
  double mass = 1.0;
  double spin = 0.0;
  double energy = std::numeric_limits<double>::quiet_NaN();
  double angmom = std::numeric_limits<double>::quiet_NaN();
  double carter = std::numeric_limits<double>::quiet_NaN();
  double delta = 0.0;
  std::string profile;
  std::string perturbation;
  std::string out = "out";
  double tol = 1e-10;
  int grid_nrho = 48, grid_nz = 96;
  std::uint64_t seed = 1;
  double r0 = std::numeric_limits<double>::quiet_NaN();
  double theta0 = std::numeric_limits<double>::quiet_NaN();
  int sign = 1;
  double span = 2000.0;
  int sweeps = 8;

  //! Sorted "key = value" lines with round-trip precision; strings are quoted.
  std::string normalized() const;
  //! Inverse of normalized(). Accepts '#' comments and blank lines; unknown keys and
  //! malformed values throw InvalidInput.
  static RunConfig from_text(const std::string& text);
  //! FNV-1a 64-bit hash of normalized(), as 16 hex digits.
  std::string hash() const;
  std::string grid_string() const;
};

//! "NxM" -> (N, M). Throws InvalidInput.
std::pair<int, int> parse_grid(const std::string& s);

std::uint64_t fnv1a64(const std::string& s);
//! Shortest decimal string that reads back to the same double.
std::string format_double(double x);

//--------------------------------------------------------------------------------------
// Artifacts
//--------------------------------------------------------------------------------------

//! Column-oriented numeric table written as CSV with '#'-prefixed comment lines.
struct Table {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<double>& values);
  void add_row(const std::vector<std::string>& cells);
  std::string to_csv() const;
  void write(const std::string& path) const;
};

//! RFC-4180 quoting of one cell when needed.
std::string csv_cell(const std::string& s);

//! manifest.json in `dir`: version, command, config (normalised and hashed),
//! tolerances, the files written and command-specific `extra` fields (a JSON object).
void write_manifest(const std::string& dir, const RunConfig& cfg, const std::vector<std::string>& files,
                    const std::string& extra_json = "{}");

void ensure_dir(const std::string& dir);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

//--------------------------------------------------------------------------------------
// Inputs and checkpoints
//--------------------------------------------------------------------------------------

//! Profile file: key = value lines with eps1, eps2, ell1, ell2 (the support rectangle)
//! and optionally shape = default.
BoundRect read_profile_rect(const std::string& path);

//! Perturbation file: lines "theta = c rho0 z0 width", "sigma = ..." and "X = ..." adding
//! smooth bumps to that field. Bumps with c = 0 are dropped, so a file with only zero
//! amplitudes gives the zero perturbation.
MetricPerturbation read_perturbation(const std::string& path);

//! Checkpoint CSV with one row per node (rho, z and every renormalised field) and the
//! grid, delta and sweep count in comment lines.
Table state_table(const RenormalizedState& s);
RenormalizedState read_state(const std::string& path);

Table matter_table(const MatterFields& mf);

}  // namespace kerrshell::io

#endif  // KERRSHELL_IO_HPP_
