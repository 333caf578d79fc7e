//========================================================================================
// kerrshell: acceptance run, one PASS/FAIL line per criterion with the measured values
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kerrshell/field_solver.hpp"
#include "kerrshell/geodesic_flow.hpp"
#include "kerrshell/orbit_families.hpp"
#include "kerrshell/vlasov_matter.hpp"
#include "kerrshell/zvc_analysis.hpp"

using namespace kerrshell;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  //! Adds one named check to the detail text and folds it into the verdict.
  void check(bool ok, const std::string& what) {
    if (!detail.str().empty()) detail << "; ";
    detail << what << (ok ? "" : " [fail]");
    pass = pass && ok;
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

GridSpec make_grid(int nrho, int nz, double rho_hi, double z_lo, double z_hi) {
  GridSpec g;
  g.nrho = nrho;
  g.nz = nz;
  g.rho_lo = 0.0;
  g.rho_hi = rho_hi;
  g.z_lo = z_lo;
  g.z_hi = z_hi;
  return g;
}

//! Stationary point of f near x0: Brent bracket, then the root of a fourth-order
//! central difference of f.
template <class F>
double stationary_point(F&& f, double a, double b, bool maximum) {
  auto g = [&](double x) { return maximum ? -f(x) : f(x); };
  double x0 = num::minimize(g, a, b, 52).first;
  const double h = 1e-3;
  auto df = [&](double x) { return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h); };
  return num::find_root(df, x0 - 0.05, x0 + 0.05);
}

//--------------------------------------------------------------------------------------
// 1. special orbits at a = 0
//--------------------------------------------------------------------------------------
Outcome special_orbits() {
  auto t0 = Clock::now();
  Outcome o;
  KerrParams p = KerrParams::make(1.0, 0.0);
  const double r_ph = 3.0, r_mb = 4.0, r_ms = 6.0, e_min = std::sqrt(8.0 / 9.0), l_min = std::sqrt(12.0);
  double lib = 0.0, numeric = 0.0;
  for (Branch b : {Branch::Direct, Branch::Retrograde}) {
    IscoData is = isco(b, p);
    lib = std::max({lib, std::fabs(photon_radius(b, p) - r_ph), std::fabs(marginally_bound_radius(b, p) - r_mb),
                    std::fabs(is.r_ms - r_ms), std::fabs(is.eps_min - e_min), std::fabs(std::fabs(is.ell_min) - l_min)});
    auto Phi = [&](double r) { return circular_curves(r, b, p).first; };
    auto absPsi = [&](double r) { return std::fabs(circular_curves(r, b, p).second); };
    double rm = stationary_point(Phi, 3.5, 20.0, false);
    double rl = stationary_point(absPsi, 3.5, 20.0, false);
    double rb = num::find_root([&](double r) { return Phi(r) - 1.0; }, 3.2, rm);
    numeric = std::max({numeric, std::fabs(rm - r_ms), std::fabs(Phi(rm) - e_min), std::fabs(rl - r_ms),
                        std::fabs(absPsi(rl) - l_min), std::fabs(rb - r_mb)});
  }
  // light ring: maximum of the null potential (1 - 2/r) / r^2
  double rp = stationary_point([](double r) { return (1.0 - 2.0 / r) / (r * r); }, 2.2, 10.0, true);
  numeric = std::max(numeric, std::fabs(rp - r_ph));
  double secs = seconds_since(t0);
  o.check(lib <= 1e-8, "closed forms max err " + fmt(lib));
  o.check(numeric <= 1e-8, "Brent minimisation of Phi, |Psi| and light ring max err " + fmt(numeric));
  o.check(secs < 1.0, "runtime " + fmt(secs) + " s");
  return o;
}

//--------------------------------------------------------------------------------------
// 2. retrograde shell floor and d0
//--------------------------------------------------------------------------------------
Outcome shell_floor() {
  Outcome o;
  std::vector<double> ds;
  for (int k = 1; k <= 9; ++k) ds.push_back(0.1 * k);
  ds.push_back(0.99);
  double prev_r = 0.0, prev_rho = 0.0;
  bool mono_r = true, mono_rho = true;
  double r99 = 0.0, rho99 = 0.0;
  for (double d : ds) {
    KerrParams p = KerrParams::make(1.0, d);
    double r = marginally_bound_radius(Branch::Retrograde, p);
    double rho = marginally_bound_rho(Branch::Retrograde, p);
    mono_r = mono_r && r > prev_r;
    mono_rho = mono_rho && rho > prev_rho;
    prev_r = r;
    prev_rho = rho;
    r99 = r;
    rho99 = rho;
  }
  double rho_lim = marginally_bound_rho(Branch::Retrograde, KerrParams::make(1.0, 1.0 - 1e-9));
  double d0 = ergosphere_touch_spin();
  double d0_err = std::fabs(d0 - 2.0 * (std::sqrt(2.0) - 1.0));
  o.check(mono_r && mono_rho, "r_mb-(d) and rho_mb-(d) increasing on {0.1..0.9, 0.99}");
  o.check(std::fabs(r99 - 4.83) <= 0.01, "r_mb-(0.99) = " + fmt(r99) + " vs 4.83 +/- 0.01");
  o.check(std::fabs(rho99 - 4.83) <= 0.01, "rho_mb-(0.99) = " + fmt(rho99) + " vs 4.83 +/- 0.01");
  o.check(std::fabs(rho_lim - (2.0 + 2.0 * std::sqrt(2.0))) <= 1e-3,
          "rho_mb-(1 - 1e-9) = " + fmt(rho_lim) + " -> 2 + 2 sqrt 2");
  o.check(d0_err <= 1e-8, "d0 err " + fmt(d0_err));
  return o;
}

//--------------------------------------------------------------------------------------
// 3. separability of the stationary part of the inverse metric
//--------------------------------------------------------------------------------------
Outcome separability() {
  Outcome o;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int n = 0; n < 10000; ++n) {
    double d = -0.99 + 1.98 * U(rng);
    KerrParams p = KerrParams::make(1.0, d);
    double r = p.r_plus() + std::pow(10.0, -2.0 + 4.0 * U(rng));
    double th = 1e-3 + (M_PI - 2e-3) * U(rng);
    ConservedSet cs{2.0 * U(rng), -10.0 + 20.0 * U(rng), 10.0 * U(rng)};
    // -J~ = 1 + g^{tt} eps^2 - 2 g^{t phi} eps ell + g^{phi phi} ell^2 from the BL metric
    MetricComponents m = metric_bl(p, {r, th});
    double s2 = m.sigma * m.sigma;
    double a1 = m.X * cs.eps * cs.eps, a2 = 2.0 * m.W * cs.eps * cs.ell, a3 = m.V * cs.ell * cs.ell;
    double lhs = 1.0 + (-a1 - a2 + a3) / s2;
    double c = std::cos(th), s = std::sin(th);
    double S2 = kerr::Sigma2(d, r, c), D = kerr::Delta(d, r);
    double tR = radial_poly(r, cs, p).R / D, tT = angular_poly(c, cs, p) / (s * s);
    double rhs = -(tR + tT) / S2;
    double scale = std::max({1.0, (std::fabs(a1) + std::fabs(a2) + std::fabs(a3)) / s2, (std::fabs(tR) + std::fabs(tT)) / S2});
    worst = std::max(worst, std::fabs(lhs - rhs) / scale);
  }
  o.check(worst <= 1e-10, "10^4 points, max relative err " + fmt(worst));
  return o;
}

//--------------------------------------------------------------------------------------
// 4. root tables vs companion matrix
//--------------------------------------------------------------------------------------
int companion_count(const ConservedSet& cs, const KerrParams& p) {
  int n = 0;
  for (double x : num::companion_real_roots(radial_coeffs(cs, p)))
    if (x > p.r_plus()) ++n;
  return n;
}

Outcome root_tables() {
  auto t0 = Clock::now();
  Outcome o;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double margin = 1e-6;
  struct Sample {
    ConservedSet cs;
    double d;
    RootSet rs;
  };
  std::map<std::string, std::vector<Sample>> buckets;
  for (int n = 0; n < 20000; ++n) {
    double d = -0.95 + 1.9 * U(rng);
    KerrParams p = KerrParams::make(1.0, d);
    double e = 0.85 + 0.4 * U(rng), l = -8.0 + 16.0 * U(rng);
    double u = U(rng);
    double q = u < 0.25 ? 0.0 : (u < 0.35 ? -2.0 * U(rng) : 20.0 * U(rng));
    ConservedSet cs{e, l, q};
    if (std::fabs(e - 1.0) < margin || std::fabs(e - isco(Branch::Direct, p).eps_min) < margin ||
        std::fabs(e - isco(Branch::Retrograde, p).eps_min) < margin)
      continue;
    bool near = false;
    for (const auto& c : qbar_critical(e, l, p)) near = near || std::fabs(q - c.second) < margin;
    if (near) continue;
    RootSet rs = radial_roots(cs, p);
    if (rs.rcase.table == 0) continue;
    auto& b = buckets[rs.rcase.label];
    if (b.size() < 500) b.push_back({cs, d, rs});
  }
  // round robin over the case buckets
  std::vector<Sample> picked;
  for (std::size_t k = 0; picked.size() < 500; ++k) {
    bool any = false;
    for (auto& [label, v] : buckets)
      if (k < v.size() && picked.size() < 500) {
        picked.push_back(v[k]);
        any = true;
      }
    if (!any) break;
  }
  int mism_companion = 0, mism_table = 0;
  std::map<int, int> per_table;
  for (const auto& s : picked) {
    KerrParams p = KerrParams::make(1.0, s.d);
    mism_companion += s.rs.count() != companion_count(s.cs, p);
    mism_table += s.rs.rcase.expected_count != companion_count(s.cs, p);
    per_table[s.rs.rcase.table]++;
  }
  double secs = seconds_since(t0);
  std::string strata = std::to_string(buckets.size()) + " cases (";
  for (auto& [t, c] : per_table) strata += "T" + std::to_string(t) + ":" + std::to_string(c) + " ";
  strata.back() = ')';
  o.check(picked.size() == 500, std::to_string(picked.size()) + " samples over " + strata);
  o.check(mism_table == 0, "table count vs companion mismatches " + std::to_string(mism_table));
  o.check(mism_companion == 0, "bracketed roots vs companion mismatches " + std::to_string(mism_companion));
  o.check(secs < 10.0, "runtime " + fmt(secs) + " s");
  return o;
}

//--------------------------------------------------------------------------------------
// 5. ZVC topology
//--------------------------------------------------------------------------------------
std::vector<WeylPoint> mirrored(const std::vector<WeylPoint>& v) {
  std::vector<WeylPoint> out;
  for (const auto& q : v) out.push_back({q.rho, -q.z});
  return out;
}

Outcome zvc_topology() {
  Outcome o;
  KerrParams p = KerrParams::make(1.0, 0.5);
  ZeroVelocityCurve zc = trace_zvc(0.98, 4.0, p);
  const CurveComponent* tr = zc.find(ComponentTag::Trapped);
  o.check(zc.components.size() == 2, std::to_string(zc.components.size()) + " components");
  o.check(tr && tr->closed, "inner (trapped) component closed");
  double hd = 0.0;
  for (const auto& c : zc.components) hd = std::max(hd, hausdorff(c.points, mirrored(c.points)));
  o.check(hd <= 1e-6, "z-mirror Hausdorff " + fmt(hd));
  RootSet rs = radial_roots({0.98, 4.0, 0.0}, p, false);
  std::vector<double> eq;
  for (const auto& c : zc.components)
    for (const auto& q : c.points)
      if (q.z == 0.0) eq.push_back(q.rho);
  std::sort(eq.begin(), eq.end());
  double err = eq.size() == rs.roots.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < eq.size() && i < rs.roots.size(); ++i)
    err = std::max(err, std::fabs(eq[i] - std::sqrt(kerr::Delta(0.5, rs.roots[i].r))));
  o.check(err <= 1e-8, std::to_string(eq.size()) + " equatorial points, max err vs sqrt(Delta(r_i)) " + fmt(err));
  return o;
}

//--------------------------------------------------------------------------------------
// 6. classification vs integration
//--------------------------------------------------------------------------------------
struct FateSample {
  ConservedSet cs;
  double d, r0, th0;
  int sign_r, sign_th;
};

//! Random point of the polar band T(cos theta) >= 0, kept 1e-3 away from its edges.
double random_theta(const ConservedSet& cs, const KerrParams& p, double u) {
  double y = theta_turning_y(cs, p);
  double thmin = y >= 1.0 ? 0.0 : std::acos(std::sqrt(y));
  double lo = thmin + 1e-3, hi = M_PI - thmin - 1e-3;
  return lo + (hi - lo) * u;
}

Outcome classify_vs_fate() {
  auto t0 = Clock::now();
  Outcome o;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double margin = 1e-3;
  std::map<Fate, std::vector<FateSample>> pools;
  const std::size_t per_class = 70;
  for (int n = 0; n < 200000 && (pools[Fate::Trapped].size() < per_class || pools[Fate::Plunging].size() < per_class ||
                                 pools[Fate::Escaped].size() < per_class);
       ++n) {
    double d = -0.9 + 1.8 * U(rng);
    KerrParams p = KerrParams::make(1.0, d);
    int kind = n % 3;
    ConservedSet cs;
    if (kind == 0) cs = {0.93 + 0.05 * U(rng), (U(rng) < 0.5 ? -1 : 1) * (3.0 + 1.5 * U(rng)), 4.0 * U(rng)};
    else if (kind == 1) cs = {0.9 + 0.3 * U(rng), -4.0 + 8.0 * U(rng), 4.0 * U(rng)};
    else cs = {1.05 + 0.25 * U(rng), (U(rng) < 0.5 ? -1 : 1) * (5.0 + 3.0 * U(rng)), 5.0 * U(rng)};
    RootSet rs = radial_roots(cs, p, false);
    if (rs.has_multiple()) continue;
    bool close = false;
    for (std::size_t i = 0; i + 1 < rs.roots.size(); ++i) close = close || rs.roots[i + 1].r - rs.roots[i].r < margin;
    if (close || (!rs.roots.empty() && rs.roots[0].r - p.r_plus() < margin)) continue;
    // allowed radial intervals (R >= 0) with margins, limited to r <= 25
    std::vector<double> edges{p.r_plus() + 1e-2};
    for (const auto& r : rs.roots) edges.push_back(r.r);
    edges.push_back(25.0);
    std::vector<std::pair<double, double>> allowed;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      double a = edges[i] + margin, b = edges[i + 1] - margin;
      if (b > a && b <= 25.0 && radial_poly(0.5 * (a + b), cs, p).R > 0.0) allowed.push_back({a, b});
    }
    if (allowed.empty()) continue;
    auto iv = allowed[static_cast<std::size_t>(U(rng) * allowed.size()) % allowed.size()];
    FateSample s{cs, d, iv.first + (iv.second - iv.first) * U(rng), 0.0, U(rng) < 0.5 ? -1 : 1, U(rng) < 0.5 ? -1 : 1};
    s.th0 = random_theta(cs, p, U(rng));
    if (angular_poly(std::cos(s.th0), cs, p) <= 0.0) continue;
    OrbitClass c;
    try {
      c = classify_orbit(cs, {s.r0, s.th0}, s.sign_r, p);
    } catch (const Error&) {
      continue;
    }
    Fate f = expected_fate(c);
    if (f == Fate::Indeterminate) continue;
    // trapped samples need two radial oscillations inside tau = 1e3
    if (f == Fate::Trapped && rs.roots.back().r > 20.0) continue;
    if (pools[f].size() < per_class) pools[f].push_back(s);
  }
  int total = 0, agree = 0;
  double drift = 0.0, drift_abs = 0.0, tau_max = 0.0;
  std::map<Fate, int> counts;
  for (auto& [f, v] : pools)
    for (const auto& s : v) {
      KerrParams p = KerrParams::make(1.0, s.d);
      OrbitClass c = classify_orbit(s.cs, {s.r0, s.th0}, s.sign_r, p);
      PhaseState st = make_state(s.cs, {s.r0, s.th0}, s.sign_r, s.sign_th, p);
      IntegrateOptions opt;
      opt.escape_radius = 60.0;
      opt.rtol = 1e-12;
      opt.atol = 1e-14;
      opt.record = false;
      Trajectory t = integrate(st, 1e3, p, opt);
      OrbitClass nf = fate(t);
      ++total;
      ++counts[f];
      agree += expected_fate(nf) == expected_fate(c);
      drift = std::max({drift, t.drift.q, t.drift.H_rel});
      drift_abs = std::max(drift_abs, t.drift.H);
      tau_max = std::max(tau_max, t.final_state.tau);
    }
  double secs = seconds_since(t0);
  o.check(total >= 200 && counts.size() == 3,
          std::to_string(total) + " samples (trapped " + std::to_string(counts[Fate::Trapped]) + ", plunging " +
              std::to_string(counts[Fate::Plunging]) + ", escaping " + std::to_string(counts[Fate::Escaped]) + ")");
  o.check(agree == total, "agreement " + std::to_string(agree) + "/" + std::to_string(total));
  o.check(tau_max <= 1e3, "max tau " + fmt(tau_max));
  o.check(drift <= 1e-9, "max relative drift of q and H " + fmt(drift) + " (max |2H + 1| " + fmt(drift_abs) + ")");
  o.check(secs < 300.0, "runtime " + fmt(secs) + " s");
  return o;
}

//--------------------------------------------------------------------------------------
// 7. Mino-time periods
//--------------------------------------------------------------------------------------
Outcome mino_periods() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int done = 0;
  double worst = 0.0;
  while (done < 20) {
    double d = -0.9 + 1.8 * U(rng);
    KerrParams p = KerrParams::make(1.0, d);
    ConservedSet cs{0.93 + 0.05 * U(rng), (U(rng) < 0.5 ? -1 : 1) * (3.0 + 1.5 * U(rng)), 0.5 + 3.5 * U(rng)};
    RootSet rs = radial_roots(cs, p, false);
    if (rs.roots.size() != 3 || rs.has_multiple()) continue;
    double r1 = rs.roots[1].r, r2 = rs.roots[2].r;
    if (r2 - r1 < 1e-2 || r1 - rs.roots[0].r < 1e-2) continue;
    OrbitPeriods per;
    try {
      per = periods(cs, p);
    } catch (const Error&) {
      continue;
    }
    IntegrateOptions opt;
    opt.time = TimeParam::Mino;
    opt.record = false;
    Trajectory t = integrate(make_state(cs, {0.5 * (r1 + r2), M_PI / 2}, 1, 1, p), 8 * std::max(per.T_r, per.T_theta), p, opt);
    double er = std::fabs(measured_period(t.radial_turns) / per.T_r - 1.0);
    double et = std::fabs(measured_period(t.polar_turns) / per.T_theta - 1.0);
    worst = std::max({worst, er, et});
    if (!std::isfinite(er) || !std::isfinite(et)) worst = INFINITY;
    ++done;
  }
  o.check(worst <= 1e-4, "20 trapped samples, max relative err of T_r, T_theta " + fmt(worst));
  return o;
}

//--------------------------------------------------------------------------------------
// 8. perturbed ZVC
//--------------------------------------------------------------------------------------
Outcome perturbed_zvc() {
  Outcome o;
  KerrParams p = KerrParams::make(1.0, 0.5);
  ZeroVelocityCurve zc = trace_zvc(0.98, 4.0, p);
  MetricPerturbation zero;
  double disp = -1.0;
  ZeroVelocityCurve same = trace_zvc_perturbed(zc, zero, p, {}, &disp);
  double err = 0.0;
  for (std::size_t k = 0; k < zc.components.size(); ++k)
    for (std::size_t i = 0; i < zc.components[k].points.size(); ++i)
      err = std::max({err, std::fabs(same.components[k].points[i].rho - zc.components[k].points[i].rho),
                      std::fabs(same.components[k].points[i].z - zc.components[k].points[i].z)});
  o.check(err <= 1e-10, "h = 0 vertex err " + fmt(err));
  std::vector<double> ds;
  bool closed = true;
  for (double c : {1e-4, 1e-3}) {
    MetricPerturbation h;
    h.X = bump_field(c, 8.0, 0.0, 3.0);
    ZeroVelocityCurve pc = trace_zvc_perturbed(zc, h, p, {}, &disp);
    const CurveComponent* t = pc.find(ComponentTag::Trapped);
    closed = closed && t && t->closed && polygon_is_simple(t->points);
    ds.push_back(disp);
  }
  double slope = std::log(ds[1] / ds[0]) / std::log(10.0);
  o.check(std::fabs(slope - 1.0) <= 0.1, "X bump displacement " + fmt(ds[0]) + ", " + fmt(ds[1]) + ", exponent " + fmt(slope));
  o.check(closed, "trapped component closed and simple");
  return o;
}

//--------------------------------------------------------------------------------------
// 9. matter
//--------------------------------------------------------------------------------------
Outcome matter_suite() {
  Outcome o;
  const BoundRect rect{0.965, 0.975, 3.7, 3.9};
  KerrParams p = KerrParams::make(1.0, 0.5);
  ProfilePhi prof = default_profile(rect, 1e-3);
  CutoffPsi psi = make_cutoff(prof, p);
  ShellBox box = shell_support(rect, p);
  GridSpec g = shell_grid(box, 40, 40);
  MatterFields zero = matter_fields(g, p, prof.at(0.0), psi);
  bool all_zero = true;
  for (const auto& name : MatterFields::names())
    for (double v : zero.field(name)) all_zero = all_zero && v == 0.0;
  o.check(all_zero, "delta = 0 gives identically zero T and F1..F4");

  MatterFields f = matter_fields(g, p, prof, psi);
  double hr = g.drho(), hz = g.dz();
  int nonzero = 0, outside = 0;
  for (int j = 0; j < g.nz; ++j)
    for (int i = 0; i < g.nrho; ++i) {
      std::size_t k = static_cast<std::size_t>(j) * g.nrho + i;
      bool any = false;
      for (const auto& name : MatterFields::names()) any = any || f.field(name)[k] != 0.0;
      if (!any) continue;
      ++nonzero;
      outside += g.rho(i) < box.rho_min - hr || g.rho(i) > box.rho_max + hr || std::fabs(g.z(j)) > box.z_max + hz;
    }
  o.check(nonzero > 0 && outside == 0, std::to_string(nonzero) + " nonzero nodes, " + std::to_string(outside) +
                                           " outside the shell box + 1 cell");
  o.check(f.T_rhorho == f.T_zz, "T_rhorho == T_zz bitwise");

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    double rho = 0.3 + 15 * U(rng), z = 12 * (U(rng) - 0.5);
    PointMetric m = point_metric(rho, z, p);
    MomentumDomain md = momentum_domain(m);
    double E = md.E_min * (1.0 + 3.0 * U(rng));
    double L = md.L_tilde(E) * (2.0 * U(rng) - 1.0);
    double eps = E + rho * m.omega() * L, ell = rho * L;
    double scale = std::fabs(m.X * eps * eps) + std::fabs(2 * m.W * ell * eps) + std::fabs(m.V * ell * ell) +
                   m.sigma * m.sigma * (1.0 + md.X_sigma2 * E * E);
    worst = std::max(worst, std::fabs(trace_integrand_residual(m, E, L)) / scale);
  }
  o.check(worst <= 1e-10, "integrand trace identity max relative err " + fmt(worst));
  return o;
}

//--------------------------------------------------------------------------------------
// 10. field solver
//--------------------------------------------------------------------------------------
template <class T>
T bump(const T& rho, const T& z, double c, double r0, double z0, double w, int k) {
  T dr = (rho - r0) / w, dz = (z - z0) / w;
  T q = 1.0 - (dr * dr + dz * dz);
  if (!(q > 0.0)) return T(0.0);
  T out = T(c);
  for (int i = 0; i < k; ++i) out = out * q;
  return out;
}

Outcome field_solver_suite() {
  Outcome o;
  {
    GridSpec g = make_grid(128, 128, 6.0, -3.0, 3.0);
    auto H = AxiScalarField::sample(g, [](double r, double z) { return bump(r, z, 1.0, 3.0, 0.0, 2.5, 3); });
    AxiScalarField lap = laplacian_r4(green_poisson_r4(H));
    double err = 0.0;
    for (int j = 1; j < g.nz - 1; ++j)
      for (int i = 1; i < g.nrho - 1; ++i) err = std::max(err, std::fabs(lap(i, j) - H(i, j)));
    o.check(err / H.max_abs() <= 1e-3, "Green 128^2 relative residual " + fmt(err / H.max_abs()));
  }
  {
    using D1 = Dual<double>;
    GridSpec g = make_grid(241, 241, 12.0, -6.0, 6.0);
    auto gfun = [](auto r, auto z) { return bump(r, z, 1.0, 6.0, 1.0, 3.0, 6); };
    OneFormField H(g);
    for (int j = 0; j < g.nz; ++j)
      for (int i = 0; i < g.nrho; ++i) {
        H.rho(i, j) = gfun(D1(g.rho(i), 1.0), D1(g.z(j), 0.0)).d;
        H.z(i, j) = gfun(D1(g.rho(i), 0.0), D1(g.z(j), 1.0)).d;
      }
    ThetaResult th = integrate_theta(H);
    double err = 0.0;
    for (int j = 0; j < g.nz; ++j)
      for (int i = 0; i < g.nrho; ++i) err = std::max(err, std::fabs(th.theta(i, j) - gfun(g.rho(i), g.z(j))));
    o.check(err <= 1e-7, "theta manufactured err " + fmt(err));
  }
  KerrParams p = KerrParams::make(1.0, 0.5);
  const BoundRect rect{0.965, 0.975, 3.7, 3.9};
  ShellBox box = shell_support(rect, p);
  GridSpec g = field_grid(box, 48, 96);
  auto solver = [&](double delta) {
    ProfilePhi prof = default_profile(rect, delta);
    return std::make_unique<FieldSolver>(g, p, prof, make_cutoff(prof, p));
  };
  {
    auto fs = solver(1e-4);
    auto s = RenormalizedState::zero(g);
    for (int k = 0; k < 6; ++k) s = fs->sweep(s);
    o.check(s.norms.path_residual <= 1e-5, "lambda path residual at delta = 1e-4: " + fmt(s.norms.path_residual) +
                                               " (relative " + fmt(s.norms.path_residual_rel) + ", outer relative " +
                                               fmt(s.norms.path_residual_outer_rel) + ")");
  }
  {
    auto fs = solver(0.0);
    auto s = RenormalizedState::zero(g);
    s = fs->sweep(s);
    o.check(s.norm() == 0.0 && s.norms.res_X == 0.0 && s.norms.res_Y == 0.0, "delta = 0 fixed point, state norm " + fmt(s.norm()));
  }
  {
    std::vector<double> deltas{1e-5, 2e-5, 4e-5}, norms;
    for (double delta : deltas) {
      auto fs = solver(delta);
      auto s = RenormalizedState::zero(g);
      for (int k = 0; k < 4; ++k) s = fs->sweep(s);
      norms.push_back(s.norm());
    }
    double e1 = std::log(norms[1] / norms[0]) / std::log(2.0), e2 = std::log(norms[2] / norms[1]) / std::log(2.0);
    o.check(std::fabs(e1 - 1.0) <= 0.1 && std::fabs(e2 - 1.0) <= 0.1,
            "state-norm exponents " + fmt(e1) + ", " + fmt(e2));
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"special-orbit constants at a = 0", special_orbits},
      {"retrograde shell floor and d0", shell_floor},
      {"separability identity", separability},
      {"root tables vs companion matrix", root_tables},
      {"ZVC topology (0.98, 4, d = 0.5)", zvc_topology},
      {"classification vs integration", classify_vs_fate},
      {"Mino-time periods vs integrator", mino_periods},
      {"perturbed ZVC stability", perturbed_zvc},
      {"matter suite", matter_suite},
      {"field-solver linear suite", field_solver_suite},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].name, o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
