//========================================================================================
// kerrshell: radial/angular quartics, their roots, circular and spherical orbits and
// the partition of the (eps, ell_z) parameter plane
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#include "kerrshell/orbit_families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kerrshell {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sign_d(double d) { return d < 0.0 ? -1.0 : 1.0; }
//! +1 for the direct branch, -1 for the retrograde branch (the +/- of the closed forms).
double branch_sign(Branch b) { return b == Branch::Direct ? 1.0 : -1.0; }

}  // namespace

const char* branch_name(Branch b) { return b == Branch::Direct ? "direct" : "retrograde"; }

Branch branch_of(double d, double ell) { return d * ell >= 0.0 ? Branch::Direct : Branch::Retrograde; }

RadialPoly radial_poly(double r, const ConservedSet& cs, const KerrParams& p) {
  double d = p.d();
  double P = cs.eps * (r * r + d * d) - d * cs.ell;
  double dP = 2.0 * cs.eps * r, d2P = 2.0 * cs.eps;
  double D = r * r - 2.0 * r + d * d, dD = 2.0 * r - 2.0, d2D = 2.0;
  double K = cs.ell - d * cs.eps;
  double G = r * r + K * K + cs.q, dG = 2.0 * r, d2G = 2.0;
  RadialPoly out;
  out.R = P * P - D * G;
  out.dR = 2.0 * P * dP - dD * G - D * dG;
  out.d2R = 2.0 * dP * dP + 2.0 * P * d2P - d2D * G - 2.0 * dD * dG - D * d2G;
  return out;
}

num::Poly radial_coeffs(const ConservedSet& cs, const KerrParams& p) {
  double d = p.d(), e = cs.eps, l = cs.ell, q = cs.q;
  double K = l - d * e;
  return num::Poly({-d * d * q, 2.0 * (K * K + q), d * d * (e * e - 1.0) - l * l - q, 2.0, e * e - 1.0});
}

double angular_poly(double Y, const ConservedSet& cs, const KerrParams& p) {
  double d = p.d();
  double A = d * d * (1.0 - cs.eps * cs.eps);
  double Y2 = Y * Y;
  return cs.q - (cs.q + A + cs.ell * cs.ell) * Y2 + A * Y2 * Y2;
}

double theta_turning_y(const ConservedSet& cs, const KerrParams& p) {
  double d = p.d();
  double A = d * d * (1.0 - cs.eps * cs.eps);
  double B = cs.q + A + cs.ell * cs.ell;
  if (cs.q == 0.0) return 0.0;
  double disc = std::max(0.0, B * B - 4.0 * A * cs.q);
  double den = B + std::sqrt(disc);
  if (!(den > 0.0)) return 1.0;
  return std::min(1.0, 2.0 * cs.q / den);
}

std::vector<double> theta_turning_all(const ConservedSet& cs, const KerrParams& p) {
  double d = p.d();
  double A = d * d * (1.0 - cs.eps * cs.eps);
  double B = cs.q + A + cs.ell * cs.ell;
  std::vector<double> out;
  if (A == 0.0) {
    if (B != 0.0) out.push_back(cs.q / B);
  } else {
    double disc = B * B - 4.0 * A * cs.q;
    if (disc < 0.0) return out;
    double sq = std::sqrt(disc);
    double t = 0.5 * (B + (B >= 0 ? sq : -sq));
    if (t != 0.0) {
      out.push_back(cs.q / t);
      out.push_back(t / A);
    } else {
      out.push_back(0.0);
    }
  }
  std::vector<double> in;
  for (double y : out)
    if (y >= 0.0 && y <= 1.0) in.push_back(y);
  std::sort(in.begin(), in.end());
  return in;
}

double qbar(double r, double eps, double ell, const KerrParams& p) {
  double d = p.d();
  double P = eps * (r * r + d * d) - d * ell;
  double D = r * r - 2.0 * r + d * d;
  double K = ell - d * eps;
  return P * P / D - r * r - K * K;
}

double carter_q(double theta, double v_theta, double eps, double ell, const KerrParams& p) {
  double d = p.d();
  double c = std::cos(theta), s = std::sin(theta);
  return v_theta * v_theta + c * c * (d * d * (1.0 - eps * eps) + ell * ell / (s * s));
}

int RootSet::count() const {
  int n = 0;
  for (const auto& r : roots) n += r.multiplicity;
  return n;
}

bool RootSet::has_multiple() const {
  for (const auto& r : roots)
    if (r.multiplicity > 1) return true;
  return false;
}

RootSet radial_roots(const ConservedSet& cs, const KerrParams& p, bool with_case) {
  RootSet out;
  num::Poly R = radial_coeffs(cs, p);
  double rH = 1.0 + std::sqrt(1.0 - p.d() * p.d());
  double hi = std::max(num::cauchy_bound(R), 2.0 * rH) * 1.01;
  for (const auto& r : num::real_roots(R, rH, hi)) out.roots.push_back({r.x, r.multiplicity});
  if (with_case) out.rcase = root_case(cs, p);
  return out;
}

std::vector<std::pair<double, double>> qbar_critical(double eps, double ell, const KerrParams& p) {
  // qbar' = (R0' Delta - R0 Delta') / Delta^2, numerator is a quintic
  num::Poly R0 = radial_coeffs({eps, ell, 0.0}, p);
  double d = p.d();
  num::Poly D({d * d, -2.0, 1.0});
  num::Poly N = R0.derivative() * D - R0 * D.derivative();
  double rH = 1.0 + std::sqrt(1.0 - d * d);
  double hi = std::max(num::cauchy_bound(N), 2.0 * rH) * 1.01;
  std::vector<std::pair<double, double>> out;
  for (const auto& r : num::real_roots(N, rH, hi)) out.push_back({r.x, qbar(r.x, eps, ell, p)});
  return out;
}

namespace {

//! Number of solutions of qbar(r) = q in (r_H, inf), from the critical structure.
int count_from_structure(double eps, double q, const std::vector<std::pair<double, double>>& crit) {
  // qbar -> +inf at r_H, -> -inf (eps < 1) or +inf (eps > 1) at infinity; at eps = 1,
  // qbar ~ 2r -> +inf as well.
  std::vector<double> vals{std::numeric_limits<double>::infinity()};
  for (const auto& c : crit) vals.push_back(c.second);
  vals.push_back(eps < 1.0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity());
  int n = 0;
  for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
    double lo = std::min(vals[i], vals[i + 1]), hi = std::max(vals[i], vals[i + 1]);
    if (q > lo && q < hi) ++n;
  }
  for (std::size_t i = 1; i + 1 < vals.size(); ++i)
    if (q == vals[i]) n += 2;
  return n;
}

}  // namespace

RootCase root_case(const ConservedSet& cs_in, const KerrParams& p_in) {
  // Reduce to d >= 0 with the symmetry (d, ell) -> (-d, -ell).
  double sd = sign_d(p_in.d());
  KerrParams p{1.0, std::fabs(p_in.d())};
  ConservedSet cs{cs_in.eps, sd * cs_in.ell, cs_in.q};
  double e = cs.eps, l = cs.ell, q = cs.q;
  auto crit = qbar_critical(e, l, p);
  RootCase rc;
  rc.expected_count = count_from_structure(e, q, crit);
  double emp = isco(Branch::Direct, p).eps_min;
  double emm = isco(Branch::Retrograde, p).eps_min;
  auto set = [&](int t, int c, int n, const char* label) {
    rc.table = t;
    rc.column = c;
    rc.expected_count = n;
    rc.label = label;
  };
  auto untabulated = [&](const char* label) {
    rc.table = 0;
    rc.column = 0;
    rc.label = label;
  };
  // local minimum / maximum critical values (sorted by r: min comes first for eps < 1)
  auto local_min = [&]() { return crit.size() >= 2 ? crit[0].second : kNaN; };
  auto local_max = [&]() { return crit.size() >= 2 ? crit[1].second : (crit.size() == 1 ? crit[0].second : kNaN); };

  if (q == 0.0) {
    if (e < emp) {
      set(3, 1, 1, "q=0, eps<eps_min+: one root");
    } else if (e >= 1.0) {
      auto bp = angular_momentum_bounds(e, Branch::Direct, p);
      auto bm = angular_momentum_bounds(e, Branch::Retrograde, p);
      if (l > bm.ell_lb && l < bp.ell_lb) set(3, 2, 0, "q=0, eps>=1, ell_lb-<ell<ell_lb+: no roots");
      else set(3, 3, 2, "q=0, eps>=1, ell outside (ell_lb-, ell_lb+): two roots");
    } else if (e <= emm) {
      auto bp = angular_momentum_bounds(e, Branch::Direct, p);
      if (l >= bp.ell_lb && l <= bp.ell_ub) set(4, 4, 3, "q=0, eps_min+<eps<eps_min-, ell in [ell_lb+, ell_ub+]: three roots");
      else if (l < bp.ell_lb) set(4, 3, 1, "q=0, eps_min+<eps<eps_min-, ell<ell_lb+: one root");
      else untabulated("q=0, eps_min+<eps<eps_min-, ell>ell_ub+");
    } else {
      auto bp = angular_momentum_bounds(e, Branch::Direct, p);
      auto bm = angular_momentum_bounds(e, Branch::Retrograde, p);
      if (l > bm.ell_lb && l < bp.ell_lb) set(3, 4, 1, "q=0, eps_min-<eps<1, ell_lb-<ell<ell_lb+: one root");
      else if ((l >= bp.ell_lb && l <= bp.ell_ub) || (l >= bm.ell_ub && l <= bm.ell_lb))
        set(3, 5, 3, "q=0, eps_min-<eps<1, ell in a bound band: three roots");
      else untabulated("q=0, eps_min-<eps<1, ell beyond ell_ub");
    }
    return rc;
  }
  if (e >= 1.0) {
    auto bp = angular_momentum_bounds(e, Branch::Direct, p);
    auto bm = angular_momentum_bounds(e, Branch::Retrograde, p);
    if (l > bm.ell_lb && l < bp.ell_lb) {
      double qmin = std::numeric_limits<double>::infinity();
      for (const auto& c : crit) qmin = std::min(qmin, c.second);
      if (q >= qmin) set(2, 1, 2, "eps>=1, ell_lb-<ell<ell_lb+, q>=qbar_min: two roots");
      else set(2, 2, 0, "eps>=1, ell_lb-<ell<ell_lb+, q<qbar_min: no roots");
    } else {
      if (q >= 0.0) set(2, 3, 2, "eps>=1, ell outside (ell_lb-, ell_lb+), q>=0: two roots");
      else {
        // The table's "no roots" means no orbit: T < 0 on [-1, 1] here. R itself keeps two
        // roots while q > min qbar, so the count comes from the qbar structure.
        int n = rc.expected_count;
        set(2, 4, n, "eps>=1, ell outside (ell_lb-, ell_lb+), q<0: no orbit (T < 0)");
      }
    }
    return rc;
  }
  if (q < 0.0) {
    untabulated("eps<1, q<0: no timelike orbit");
    return rc;
  }
  if (e < emp) {
    set(1, 1, 1, "0<eps<eps_min+: one root");
    return rc;
  }
  if (e <= emm) {
    auto bp = angular_momentum_bounds(e, Branch::Direct, p);
    if (l >= bp.ell_lb && l <= bp.ell_ub) {
      if (q <= local_max()) set(1, 6, 3, "eps_min+<=eps<=eps_min-, ell in [ell_lb+, ell_ub+], q<=q~+: three roots");
      else set(1, 7, 1, "eps_min+<=eps<=eps_min-, ell in [ell_lb+, ell_ub+], q>q~+: one root");
    } else if (l < bp.ell_lb) {
      if (crit.size() >= 2 && local_min() >= 0.0) {
        if (q < local_min()) set(1, 3, 1, "ell~_min<=ell<=ell_lb+, q<q_s1: one root");
        else if (q <= local_max()) set(1, 4, 3, "ell~_min<=ell<=ell_lb+, q_s1<=q<=q_s2: three roots");
        else set(1, 5, 1, "ell~_min<=ell<=ell_lb+, q>q_s2: one root");
      } else {
        set(1, 2, 1, "eps_min+<=eps<=eps_min-, ell<ell~_min: one root");
      }
    } else {
      untabulated("eps_min+<=eps<=eps_min-, ell>ell_ub+");
    }
    return rc;
  }
  auto bp = angular_momentum_bounds(e, Branch::Direct, p);
  auto bm = angular_momentum_bounds(e, Branch::Retrograde, p);
  if (l >= bm.ell_lb && l <= bp.ell_lb) {
    if (crit.size() >= 2 && q >= local_min() && q <= local_max())
      set(5, 2, 3, "eps_min-<eps<1, ell_lb-<=ell<=ell_lb+, q~1<=q<=q~2: three roots");
    else if (crit.size() >= 2 && q > local_max())
      set(5, 3, 1, "eps_min-<eps<1, ell_lb-<=ell<=ell_lb+, q>q~2: one root");
    else
      set(5, 1, 1, "eps_min-<eps<1, ell_lb-<=ell<=ell_lb+, q<q~1: one root");
  } else if ((l >= bp.ell_lb && l <= bp.ell_ub) || (l >= bm.ell_ub && l <= bm.ell_lb)) {
    if (q <= local_max()) set(5, 4, 3, "eps_min-<eps<1, ell in a bound band, q<=q~: three roots");
    else set(5, 5, 1, "eps_min-<eps<1, ell in a bound band, q>q~: one root");
  } else {
    untabulated("eps_min-<eps<1, ell beyond ell_ub");
  }
  return rc;
}

//--------------------------------------------------------------------------------------
// Circular orbits
//--------------------------------------------------------------------------------------
std::pair<double, double> circular_curves(double r, Branch b, const KerrParams& p) {
  double dd = std::fabs(p.d()), s = branch_sign(b);
  double sr = std::sqrt(r);
  double den2 = r * sr - 3.0 * sr + 2.0 * s * dd;
  if (!(den2 > 0.0) || !(r > photon_radius(b, p)))
    throw Error(ErrorCode::InvalidInput, "circular_curves: r must exceed the photon radius");
  double den = std::pow(r, 0.75) * std::sqrt(den2);
  double Phi = (r * sr - 2.0 * sr + s * dd) / den;
  double Psi = s * (r * r - 2.0 * s * dd * sr + dd * dd) / den;
  return {Phi, sign_d(p.d()) * Psi};
}

CircularOrbitData circular_orbit(double r, Branch b, const KerrParams& p) {
  auto [e, l] = circular_curves(r, b, p);
  return {r, b, e, l};
}

double photon_radius(Branch b, const KerrParams& p) {
  double dd = std::fabs(p.d());
  return 2.0 * (1.0 + std::cos((2.0 / 3.0) * std::acos(-branch_sign(b) * dd)));
}

IscoData isco(Branch b, const KerrParams& p) {
  double dd = std::fabs(p.d()), s = branch_sign(b);
  double Z1 = 1.0 + std::cbrt(1.0 - dd * dd) * (std::cbrt(1.0 + dd) + std::cbrt(1.0 - dd));
  double Z2 = std::sqrt(3.0 * dd * dd + Z1 * Z1);
  double r = 3.0 + Z2 - s * std::sqrt((3.0 - Z1) * (3.0 + Z1 + 2.0 * Z2));
  auto [e, l] = circular_curves(r, b, p);
  return {r, e, l};
}

double marginally_bound_radius(Branch b, const KerrParams& p) {
  double dd = std::fabs(p.d()), s = branch_sign(b);
  return 2.0 - s * dd + 2.0 * std::sqrt(1.0 - s * dd);
}

double marginally_bound_rho(Branch b, const KerrParams& p) {
  double r = marginally_bound_radius(b, p), d = p.d();
  return std::sqrt(r * r - 2.0 * r + d * d);
}

double r_max_of_eps(double eps, Branch b, const KerrParams& p) {
  IscoData is = isco(b, p);
  if (!(eps > is.eps_min)) throw Error(ErrorCode::NoCircularOrbit, "eps below eps_min of the branch");
  double rph = photon_radius(b, p);
  double lo = rph * (1.0 + 1e-13) + 1e-13;
  auto f = [&](double r) { return circular_curves(r, b, p).first - eps; };
  double flo = f(lo);
  if (!(flo > 0.0)) throw Error(ErrorCode::InvalidInput, "r_max_of_eps: energy too large");
  return num::find_root(f, lo, is.r_ms, flo, f(is.r_ms));
}

double r_min_of_eps(double eps, Branch b, const KerrParams& p) {
  IscoData is = isco(b, p);
  if (!(eps > is.eps_min)) throw Error(ErrorCode::NoCircularOrbit, "eps below eps_min of the branch");
  if (!(eps < 1.0)) throw Error(ErrorCode::NoCircularOrbit, "no stable circular orbit for eps >= 1");
  auto f = [&](double r) { return circular_curves(r, b, p).first - eps; };
  double hi = 2.0 * is.r_ms;
  while (f(hi) < 0.0) hi *= 2.0;
  return num::find_root(f, is.r_ms, hi, f(is.r_ms), f(hi));
}

AngularMomentumBounds angular_momentum_bounds(double eps, Branch b, const KerrParams& p) {
  AngularMomentumBounds out;
  out.ell_lb = circular_curves(r_max_of_eps(eps, b, p), b, p).second;
  out.ell_ub = eps < 1.0 ? circular_curves(r_min_of_eps(eps, b, p), b, p).second : kNaN;
  return out;
}

double eps_s(double ell, Branch b, const KerrParams& p) {
  IscoData is = isco(b, p);
  if (!(std::fabs(ell) > std::fabs(is.ell_min)) || ell * is.ell_min < 0.0)
    throw Error(ErrorCode::NoCircularOrbit, "eps_s: |ell| must exceed |ell_min| on the branch");
  double rph = photon_radius(b, p);
  double lo = rph * (1.0 + 1e-13) + 1e-13;
  auto f = [&](double r) { return std::fabs(circular_curves(r, b, p).second) - std::fabs(ell); };
  double r = num::find_root(f, lo, is.r_ms, f(lo), f(is.r_ms));
  return circular_curves(r, b, p).first;
}

double eps_m(double ell, Branch b, const KerrParams& p) {
  IscoData is = isco(b, p);
  if (!(std::fabs(ell) > std::fabs(is.ell_min)) || ell * is.ell_min < 0.0)
    throw Error(ErrorCode::NoCircularOrbit, "eps_m: |ell| must exceed |ell_min| on the branch");
  auto f = [&](double r) { return std::fabs(circular_curves(r, b, p).second) - std::fabs(ell); };
  double hi = 2.0 * is.r_ms;
  while (f(hi) < 0.0) hi *= 2.0;
  double r = num::find_root(f, is.r_ms, hi, f(is.r_ms), f(hi));
  return circular_curves(r, b, p).first;
}

//--------------------------------------------------------------------------------------
// Spherical orbits
//--------------------------------------------------------------------------------------
SphericalOrbitData spherical_branch(double r, double eps, const KerrParams& p, bool minus_branch) {
  double d = p.d();
  if (d == 0.0) throw Error(ErrorCode::InvalidInput, "spherical_branch: degenerate for d = 0");
  double rH = 1.0 + std::sqrt(1.0 - d * d);
  if (!(r > rH)) throw Error(ErrorCode::InvalidInput, "spherical_branch: r must exceed r_H");
  // Double root of R = Delta (qbar - q): qbar'(r) = 0 is quadratic in P = eps(r^2+d^2) - d ell:
  // (r - 1) P^2 - 2 eps r Delta P + r Delta^2 = 0.
  double D = r * r - 2.0 * r + d * d;
  double disc = eps * eps * r * r - r * (r - 1.0);
  if (disc < 0.0) throw Error(ErrorCode::NoSphericalOrbit, "spherical_branch: eps^2 < (r-1)/r");
  double sq = std::sqrt(disc);
  // The minus branch is the root that stays finite as d -> 0.
  double P = D * (eps * r + (minus_branch ? sq : -sq)) / (r - 1.0);
  double ell = (eps * (r * r + d * d) - P) / d;
  double q = qbar(r, eps, ell, p);
  SphericalOrbitData s{r, eps, ell, ell / eps, q / (eps * eps), q};
  // round-off floor for the q = 0 (circular) end of the branch
  double qtol = 1e-10 * (r * r + ell * ell + 1.0);
  if (q < -qtol) throw Error(ErrorCode::NoSphericalOrbit, "eta_c < 0");
  if (q < 0.0) s.q = s.eta = 0.0;
  return s;
}

std::vector<SphericalOrbitData> spherical_solve(double eps, double ell, const KerrParams& p) {
  std::vector<SphericalOrbitData> out;
  for (const auto& [r, q] : qbar_critical(eps, ell, p))
    if (q >= 0.0) out.push_back({r, eps, ell, ell / eps, q / (eps * eps), q});
  return out;
}

//--------------------------------------------------------------------------------------
// Regions and classification
//--------------------------------------------------------------------------------------
const char* region_name(ParameterRegion r) {
  switch (r) {
    case ParameterRegion::ABoundPlus: return "ABoundPlus";
    case ParameterRegion::ABoundMinus: return "ABoundMinus";
    case ParameterRegion::AScatteredPlus: return "AScatteredPlus";
    case ParameterRegion::AScatteredMinus: return "AScatteredMinus";
    case ParameterRegion::ACirc: return "ACirc";
    case ParameterRegion::AAbsBound: return "AAbsBound";
    case ParameterRegion::AAbsUnbound: return "AAbsUnbound";
    case ParameterRegion::Inadmissible: return "Inadmissible";
  }
  return "?";
}

RegionResult classify_region(double eps, double ell_in, const KerrParams& p_in, double tol) {
  double sd = sign_d(p_in.d());
  KerrParams p{1.0, std::fabs(p_in.d())};
  double ell = sd * ell_in;
  double d = p.d();
  double rH = 1.0 + std::sqrt(1.0 - d * d);
  Branch b = branch_of(d, ell);
  if (b == Branch::Direct ? !(eps > 0.0) : !(eps > d * ell / (2.0 * rH)))
    return {ParameterRegion::Inadmissible, false};
  IscoData is = isco(b, p);
  bool plus = b == Branch::Direct;
  auto absorbed = [&]() {
    return RegionResult{eps < 1.0 ? ParameterRegion::AAbsBound : ParameterRegion::AAbsUnbound, false};
  };
  if (std::fabs(eps - is.eps_min) <= tol && std::fabs(ell - is.ell_min) <= tol)
    return {ParameterRegion::ACirc, true};
  if (!(eps > is.eps_min + tol)) {
    if (eps > is.eps_min - tol) return {absorbed().region, true};
    return absorbed();
  }
  // |ell| comparisons on the branch side
  double a = std::fabs(ell);
  auto bounds = angular_momentum_bounds(eps, b, p);
  double lb = std::fabs(bounds.ell_lb);
  if (eps < 1.0) {
    double ub = std::fabs(bounds.ell_ub);
    if (std::fabs(a - lb) <= tol || std::fabs(a - ub) <= tol) return {ParameterRegion::ACirc, true};
    if (a > lb && a < ub) {
      RegionResult rr{plus ? ParameterRegion::ABoundPlus : ParameterRegion::ABoundMinus, false};
      rr.boundary = std::fabs(eps - 1.0) <= tol;
      return rr;
    }
    return absorbed();
  }
  if (std::fabs(a - lb) <= tol) return {ParameterRegion::ACirc, true};
  RegionResult rr = a > lb ? RegionResult{plus ? ParameterRegion::AScatteredPlus : ParameterRegion::AScatteredMinus, false}
                           : absorbed();
  rr.boundary = rr.boundary || std::fabs(eps - 1.0) <= tol;
  return rr;
}

const char* orbit_class_name(OrbitClass c) {
  switch (c) {
    case OrbitClass::Trapped: return "trapped";
    case OrbitClass::Plunging: return "plunging";
    case OrbitClass::PlungingFromInfinity: return "plunging-from-infinity";
    case OrbitClass::Scattered: return "scattered";
    case OrbitClass::Escaping: return "escaping";
    case OrbitClass::Spherical: return "spherical";
    case OrbitClass::Circular: return "circular";
    case OrbitClass::AsymptoticToCircular: return "asymptotic-to-circular";
    case OrbitClass::Indeterminate: return "indeterminate";
  }
  return "?";
}

const char* fate_name(Fate f) {
  switch (f) {
    case Fate::Trapped: return "trapped";
    case Fate::Plunging: return "plunging";
    case Fate::Escaped: return "escaped";
    case Fate::Indeterminate: return "indeterminate";
  }
  return "?";
}

Fate expected_fate(OrbitClass c) {
  switch (c) {
    case OrbitClass::Trapped:
    case OrbitClass::Spherical:
    case OrbitClass::Circular: return Fate::Trapped;
    case OrbitClass::Plunging:
    case OrbitClass::PlungingFromInfinity: return Fate::Plunging;
    case OrbitClass::Scattered:
    case OrbitClass::Escaping: return Fate::Escaped;
    default: return Fate::Indeterminate;
  }
}

OrbitClass classify_orbit(const ConservedSet& cs, BLPoint start, int sign_vr, const KerrParams& p, double margin) {
  double d = p.d();
  double rH = 1.0 + std::sqrt(1.0 - d * d);
  double r0 = start.r;
  if (!(r0 > rH)) throw Error(ErrorCode::InvalidInput, "classify_orbit: start inside the horizon");
  num::Poly Rp = radial_coeffs(cs, p);
  double R0 = Rp(r0);
  if (R0 < -1e-9 * Rp.magnitude(r0)) throw Error(ErrorCode::InvalidInput, "classify_orbit: R(r0) < 0");
  double T0 = angular_poly(std::cos(start.theta), cs, p);
  if (T0 < -1e-9 * (std::fabs(cs.q) + cs.ell * cs.ell + 1.0))
    throw Error(ErrorCode::InvalidInput, "classify_orbit: T(cos theta0) < 0");
  RootSet rs = radial_roots(cs, p, false);
  enum Kind { Horizon, Simple, Double, Infinity };
  const RadialRoot* at = nullptr;
  for (const auto& rr : rs.roots)
    if (std::fabs(rr.r - r0) <= margin * std::max(1.0, r0)) at = &rr;
  int dir = sign_vr;
  double probe = r0;
  if (at) {
    if (at->multiplicity >= 2) return cs.q == 0.0 ? OrbitClass::Circular : OrbitClass::Spherical;
    // simple turning point: motion proceeds into the side where R > 0
    double dR = radial_poly(at->r, cs, p).dR;
    dir = dR > 0 ? 1 : -1;
    probe = at->r + dir * 2.0 * margin * std::max(1.0, r0);
  }
  Kind lo = Horizon, hi = Infinity;
  for (const auto& rr : rs.roots) {
    if (rr.r < probe) lo = rr.multiplicity >= 2 ? Double : Simple;
  }
  for (auto it = rs.roots.rbegin(); it != rs.roots.rend(); ++it) {
    if (it->r > probe) hi = it->multiplicity >= 2 ? Double : Simple;
  }
  if (lo == Horizon && hi == Infinity) {
    if (dir < 0) return OrbitClass::PlungingFromInfinity;
    if (dir > 0) return OrbitClass::Escaping;
    return OrbitClass::Indeterminate;
  }
  if (lo == Horizon && hi == Simple) return OrbitClass::Plunging;
  if (lo == Horizon && hi == Double) return dir < 0 ? OrbitClass::Plunging : OrbitClass::AsymptoticToCircular;
  if (lo == Simple && hi == Simple) return OrbitClass::Trapped;
  if (lo == Simple && hi == Infinity) return OrbitClass::Scattered;
  if (lo == Double && hi == Infinity) return dir > 0 ? OrbitClass::Scattered : OrbitClass::AsymptoticToCircular;
  return OrbitClass::AsymptoticToCircular;
}

}  // namespace kerrshell
