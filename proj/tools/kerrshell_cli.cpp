//========================================================================================
// kerrshell: command-line front end writing CSV tables, curves, fields, trajectories and
// state checkpoints with a JSON manifest per run
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "kerrshell/errors.hpp"
#include "kerrshell/field_solver.hpp"
#include "kerrshell/geodesic_flow.hpp"
#include "kerrshell/io.hpp"
#include "kerrshell/orbit_families.hpp"
#include "kerrshell/vlasov_matter.hpp"
#include "kerrshell/zvc_analysis.hpp"

using namespace kerrshell;
using io::RunConfig;
using json = nlohmann::ordered_json;

namespace {

// Shell rectangle used when no profile file is given (d = 0.5 direct branch).
constexpr BoundRect kDefaultRect{0.965, 0.975, 3.7, 3.9};

KerrParams params(const RunConfig& c) { return KerrParams::make(c.mass, c.spin).unit(); }

double need(double x, const char* flag) {
  if (std::isnan(x)) throw Error(ErrorCode::InvalidInput, std::string("missing required option ") + flag);
  return x;
}

std::string out_path(const RunConfig& c, const std::string& name) { return c.out + "/" + name; }

//--------------------------------------------------------------------------------------
// Subcommands
//--------------------------------------------------------------------------------------

int cmd_special_orbits(const RunConfig& c) {
  KerrParams p = params(c);
  io::Table t;
  t.comments = {"kerrshell special orbits, d = " + io::format_double(p.d()), "units: M = 1"};
  t.columns = {"branch", "r_ph", "r_ms", "r_mb", "eps_min", "ell_min"};
  for (Branch b : {Branch::Direct, Branch::Retrograde}) {
    IscoData ms = isco(b, p);
    t.add_row(std::vector<std::string>{branch_name(b), io::format_double(photon_radius(b, p)),
                                       io::format_double(ms.r_ms), io::format_double(marginally_bound_radius(b, p)),
                                       io::format_double(ms.eps_min), io::format_double(ms.ell_min)});
  }
  io::ensure_dir(c.out);
  t.write(out_path(c, "special_orbits.csv"));
  io::write_manifest(c.out, c, {"special_orbits.csv"});
  std::cout << t.to_csv();
  return 0;
}

int cmd_zvc(const RunConfig& c) {
  KerrParams p = params(c);
  double eps = need(c.energy, "--energy"), ell = need(c.angmom, "--angmom");
  ZeroVelocityCurve curve = trace_zvc(eps, ell, p);
  bool perturbed = false;
  double displacement = 0.0;
  if (!c.perturbation.empty()) {
    MetricPerturbation h = io::read_perturbation(c.perturbation);
    if (!h.is_zero()) {
      curve = trace_zvc_perturbed(curve, h, p, {}, &displacement);
      perturbed = true;
    }
  }
  io::ensure_dir(c.out);
  std::vector<std::string> files;
  json comps = json::array();
  bool trapped = false;
  for (std::size_t k = 0; k < curve.components.size(); ++k) {
    const CurveComponent& cc = curve.components[k];
    io::Table t;
    t.comments = {std::string("component ") + std::to_string(k) + ": " + component_tag_name(cc.tag),
                  std::string("closed = ") + (cc.closed ? "true" : "false")};
    t.columns = {"rho", "z"};
    for (const auto& w : cc.points) t.add_row(std::vector<double>{w.rho, w.z});
    std::string name = "zvc_component_" + std::to_string(k) + ".csv";
    t.write(out_path(c, name));
    files.push_back(name);
    trapped = trapped || (cc.tag == ComponentTag::Trapped && cc.closed);
    comps.push_back({{"tag", component_tag_name(cc.tag)},
                     {"closed", cc.closed},
                     {"points", cc.points.size()},
                     {"file", name}});
  }
  json topo = {{"eps", eps},
               {"ell", ell},
               {"d", p.d()},
               {"component_count", curve.components.size()},
               {"trapped", trapped},
               {"perturbed", perturbed},
               {"max_displacement", displacement},
               {"max_residual", curve.max_residual},
               {"components", comps}};
  io::write_file(out_path(c, "zvc.json"), topo.dump(2) + "\n");
  files.push_back("zvc.json");
  io::write_manifest(c.out, c, files, json{{"component_count", curve.components.size()}, {"trapped", trapped}}.dump());
  std::cout << topo.dump(2) << "\n";
  return 0;
}

struct StartData {
  ConservedSet cs;
  BLPoint at;
};

StartData start_data(const RunConfig& c) {
  StartData s;
  s.cs = ConservedSet{need(c.energy, "--energy"), need(c.angmom, "--angmom"), need(c.carter, "--carter")};
  s.at = BLPoint{need(c.r0, "--r0"), std::isnan(c.theta0) ? 0.5 * std::numbers::pi : c.theta0};
  if (c.sign < -1 || c.sign > 1) throw Error(ErrorCode::InvalidInput, "--sign must be -1, 0 or 1");
  return s;
}

int cmd_classify(const RunConfig& c) {
  KerrParams p = params(c);
  StartData s = start_data(c);
  OrbitClass oc = classify_orbit(s.cs, s.at, c.sign, p);
  io::ensure_dir(c.out);
  io::write_manifest(c.out, c, {},
                     json{{"class", orbit_class_name(oc)}, {"expected_fate", fate_name(expected_fate(oc))}}.dump());
  std::cout << orbit_class_name(oc) << "\n";
  return 0;
}

int cmd_integrate(const RunConfig& c) {
  KerrParams p = params(c);
  StartData s = start_data(c);
  OrbitClass oc = classify_orbit(s.cs, s.at, c.sign, p);
  PhaseState s0 = make_state(s.cs, s.at, c.sign, 1, p);
  IntegrateOptions opt;
  opt.rtol = c.tol;
  opt.atol = 1e-2 * c.tol;
  Trajectory tr = integrate(s0, c.span, p, opt);
  OrbitClass f = fate(tr);
  io::Table t;
  t.comments = {"kerrshell trajectory (Boyer-Lindquist chart, proper time)",
                "eps = " + io::format_double(s.cs.eps),
                "ell = " + io::format_double(s.cs.ell),
                "q = " + io::format_double(s.cs.q),
                "d = " + io::format_double(p.d()),
                std::string("termination = ") + termination_name(tr.reason),
                "drift_q = " + io::format_double(tr.drift.q),
                "drift_H_rel = " + io::format_double(tr.drift.H_rel),
                std::string("class = ") + orbit_class_name(oc),
                std::string("fate = ") + orbit_class_name(f)};
  t.columns = {"tau", "mino", "r", "theta", "v_r", "v_theta"};
  for (const auto& x : tr.samples) t.add_row(std::vector<double>{x.tau, x.mino, x.x1, x.x2, x.v1, x.v2});
  io::ensure_dir(c.out);
  t.write(out_path(c, "trajectory.csv"));
  io::write_manifest(c.out, c, {"trajectory.csv"},
                     json{{"class", orbit_class_name(oc)},
                          {"fate", orbit_class_name(f)},
                          {"termination", termination_name(tr.reason)},
                          {"drift_q", tr.drift.q},
                          {"drift_H_rel", tr.drift.H_rel},
                          {"samples", tr.samples.size()}}
                         .dump());
  std::cout << "class " << orbit_class_name(oc) << "\nfate " << orbit_class_name(f) << "\n";
  return 0;
}

struct ShellSetup {
  BoundRect rect;
  ProfilePhi profile;
  CutoffPsi psi;
  ShellBox box;
};

ShellSetup shell_setup(const RunConfig& c, const KerrParams& p) {
  BoundRect rect = c.profile.empty() ? kDefaultRect : io::read_profile_rect(c.profile);
  ProfilePhi prof = default_profile(rect, c.delta);
  return ShellSetup{rect, prof, make_cutoff(prof, p), shell_support(rect, p)};
}

int cmd_matter(const RunConfig& c) {
  KerrParams p = params(c);
  ShellSetup S = shell_setup(c, p);
  std::optional<MetricPerturbation> h;
  if (!c.perturbation.empty()) {
    MetricPerturbation hp = io::read_perturbation(c.perturbation);
    if (!hp.is_zero()) h = hp;
  }
  GridSpec g = shell_grid(S.box, c.grid_nrho, c.grid_nz);
  MatterOptions mo;
  mo.rel_tol = std::max(c.tol, 1e-12);
  MatterFields mf = matter_fields(g, p, S.profile, S.psi, h ? &*h : nullptr, nullptr, mo);
  bool all_zero = true;
  for (const auto& n : MatterFields::names())
    for (double v : mf.field(n)) all_zero = all_zero && v == 0.0;
  io::ensure_dir(c.out);
  io::matter_table(mf).write(out_path(c, "matter.csv"));
  json extra{{"all_zero", all_zero},
             {"shell_box", {S.box.rho_min, S.box.rho_max, S.box.z_min, S.box.z_max}},
             {"max_quadrature_error", mf.max_error}};
  if (all_zero) extra["note"] = c.delta == 0.0 ? "delta = 0: all fields vanish identically" : "all fields vanish";
  io::write_manifest(c.out, c, {"matter.csv"}, extra.dump());
  std::cout << "matter fields on " << g.nrho << "x" << g.nz << (all_zero ? " (all zero)" : "") << "\n";
  return 0;
}

int cmd_picard(const RunConfig& c) {
  KerrParams p = params(c);
  ShellSetup S = shell_setup(c, p);
  if (c.sweeps < 1) throw Error(ErrorCode::InvalidInput, "--sweeps must be at least 1");
  GridSpec g = field_grid(S.box, c.grid_nrho, c.grid_nz);
  FieldSolver fs(g, p, S.profile, S.psi);
  io::ensure_dir(c.out);
  RenormalizedState s = RenormalizedState::zero(g);
  io::Table norms;
  norms.comments = {"kerrshell Picard sweep norms", "delta = " + io::format_double(c.delta)};
  norms.columns = {"sweep",          "res_X", "res_Y", "closedness", "closedness_outer", "path_residual",
                   "path_residual_rel", "path_residual_outer_rel", "state_norm"};
  std::vector<std::string> files;
  double res1 = 0.0;
  int converged = 0;
  for (int k = 1; k <= c.sweeps; ++k) {
    s = fs.sweep(s);
    const SweepNorms& n = s.norms;
    norms.add_row(std::vector<double>{static_cast<double>(k), n.res_X, n.res_Y, n.closedness, n.closedness_outer,
                                      n.path_residual, n.path_residual_rel, n.path_residual_outer_rel, n.state_norm});
    char name[32];
    std::snprintf(name, sizeof name, "state_%03d.csv", k);
    io::state_table(s).write(out_path(c, name));
    files.push_back(name);
    if (n.diverged) {
      norms.write(out_path(c, "sweeps.csv"));
      throw Error(ErrorCode::Divergence, "state norm " + io::format_double(n.state_norm) + " left the ball");
    }
    double res = std::max(n.res_X, n.res_Y);
    if (k == 1) res1 = res;
    if (res == 0.0 || res <= c.tol * res1) {
      converged = k;
      break;
    }
  }
  norms.write(out_path(c, "sweeps.csv"));
  files.push_back("sweeps.csv");
  io::write_manifest(c.out, c, files,
                     json{{"converged_after", converged},
                          {"sweeps_run", s.sweep},
                          {"grid", {g.nrho, g.nz, g.rho_hi, g.z_lo, g.z_hi}},
                          {"final_state_norm", s.norms.state_norm},
                          {"final_path_residual", s.norms.path_residual}}
                         .dump());
  std::cout << norms.to_csv();
  if (converged) std::cout << "converged after " << converged << " sweep" << (converged == 1 ? "" : "s") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kerrshell: Kerr geodesics, zero-velocity curves, Vlasov shells and renormalised fields"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig flags;
  std::string grid, config;
  app.add_option("--config", config, "key = value file; flags on the command line win");
  auto* o_mass = app.add_option("--mass", flags.mass, "black-hole mass M");
  auto* o_spin = app.add_option("--spin", flags.spin, "spin a (|a| < M)");
  auto* o_energy = app.add_option("--energy", flags.energy, "orbit energy eps");
  auto* o_angmom = app.add_option("--angmom", flags.angmom, "axial angular momentum ell_z");
  auto* o_carter = app.add_option("--carter", flags.carter, "Carter constant q");
  auto* o_delta = app.add_option("--delta", flags.delta, "matter amplitude delta");
  auto* o_profile = app.add_option("--profile", flags.profile, "profile rectangle file");
  auto* o_pert = app.add_option("--perturbation", flags.perturbation, "metric perturbation file");
  auto* o_out = app.add_option("--out", flags.out, "output directory");
  auto* o_tol = app.add_option("--tol", flags.tol, "tolerance");
  auto* o_grid = app.add_option("--grid", grid, "grid resolution NxM");
  auto* o_seed = app.add_option("--seed", flags.seed, "seed for randomised sampling");
  auto* o_r0 = app.add_option("--r0", flags.r0, "start radius (classify, integrate)");
  auto* o_theta0 = app.add_option("--theta0", flags.theta0, "start polar angle (default pi/2)");
  auto* o_sign = app.add_option("--sign", flags.sign, "sign of v_r at the start (-1, 0, 1)");
  auto* o_span = app.add_option("--span", flags.span, "proper-time span (integrate)");
  auto* o_sweeps = app.add_option("--sweeps", flags.sweeps, "maximum number of sweeps (picard)");

  app.add_subcommand("special-orbits", "photon, marginally stable and marginally bound orbits");
  app.add_subcommand("zvc", "zero-velocity curves for (energy, angmom)");
  app.add_subcommand("classify", "orbit class of (energy, angmom, carter) through r0");
  app.add_subcommand("integrate", "geodesic trajectory and numerical fate");
  app.add_subcommand("matter", "stress components and source terms of the shell");
  app.add_subcommand("picard", "Picard sweeps of the renormalised field equations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    RunConfig c = config.empty() ? RunConfig{} : RunConfig::from_text(io::read_file(config));
    auto set = [](CLI::Option* o, auto& dst, const auto& src) {
      if (o->count() > 0) dst = src;
    };
    set(o_mass, c.mass, flags.mass);
    set(o_spin, c.spin, flags.spin);
    set(o_energy, c.energy, flags.energy);
    set(o_angmom, c.angmom, flags.angmom);
    set(o_carter, c.carter, flags.carter);
    set(o_delta, c.delta, flags.delta);
    set(o_profile, c.profile, flags.profile);
    set(o_pert, c.perturbation, flags.perturbation);
    set(o_out, c.out, flags.out);
    set(o_tol, c.tol, flags.tol);
    set(o_seed, c.seed, flags.seed);
    set(o_r0, c.r0, flags.r0);
    set(o_theta0, c.theta0, flags.theta0);
    set(o_sign, c.sign, flags.sign);
    set(o_span, c.span, flags.span);
    set(o_sweeps, c.sweeps, flags.sweeps);
    if (o_grid->count() > 0) std::tie(c.grid_nrho, c.grid_nz) = io::parse_grid(grid);
    c.command = app.get_subcommands().front()->get_name();

    if (c.command == "special-orbits") return cmd_special_orbits(c);
    if (c.command == "zvc") return cmd_zvc(c);
    if (c.command == "classify") return cmd_classify(c);
    if (c.command == "integrate") return cmd_integrate(c);
    if (c.command == "matter") return cmd_matter(c);
    if (c.command == "picard") return cmd_picard(c);
    return 2;
  } catch (const Error& e) {
    std::cerr << "kerrshell: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "kerrshell: " << e.what() << "\n";
    return 1;
  }
}
