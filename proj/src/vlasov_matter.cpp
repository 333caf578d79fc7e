//========================================================================================
// kerrshell: distribution-function ansatz, momentum domain, stress-energy components and
// the source terms F_1..F_4 of the reduced field equations
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#include "kerrshell/vlasov_matter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace kerrshell {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

//--------------------------------------------------------------------------------------
// Profile and cut-off
//--------------------------------------------------------------------------------------

bool ProfilePhi::in_support(double eps, double ell) const {
  for (const auto& r : support)
    if (eps >= r.eps1 && eps <= r.eps2 && ell >= r.ell1 && ell <= r.ell2) return true;
  return false;
}

double ProfilePhi::operator()(double eps, double ell) const {
  if (!value || !in_support(eps, ell)) return 0.0;
  return value(eps, ell, delta);
}

ProfilePhi ProfilePhi::at(double new_delta) const {
  ProfilePhi out = *this;
  out.delta = new_delta;
  return out;
}

ProfilePhi default_profile(const BoundRect& b, double delta) {
  if (!(delta >= 0.0)) throw Error(ErrorCode::InvalidInput, "default_profile: delta must be >= 0");
  auto shape = [b](double e, double l) {
    double u = (b.eps2 - e) * (e - b.eps1), v = (b.ell2 - l) * (l - b.ell1);
    return u * u * v * v;
  };
  ProfilePhi p;
  p.support = {b};
  p.delta = delta;
  p.name = "default";
  p.value = [shape](double e, double l, double dl) { return dl * shape(e, l); };
  p.d_delta = [shape](double e, double l, double) { return shape(e, l); };
  p.d_eps = [b](double e, double l, double dl) {
    double u = (b.eps2 - e) * (e - b.eps1), v = (b.ell2 - l) * (l - b.ell1);
    return dl * 2.0 * u * (b.eps2 + b.eps1 - 2.0 * e) * v * v;
  };
  p.d_ell = [b](double e, double l, double dl) {
    double u = (b.eps2 - e) * (e - b.eps1), v = (b.ell2 - l) * (l - b.ell1);
    return dl * u * u * 2.0 * v * (b.ell2 + b.ell1 - 2.0 * l);
  };
  return p;
}

double smooth_cutoff(double s, double eta) {
  if (s >= 0.0) return 1.0;
  if (s < -eta) return 0.0;
  double t = (s + eta) / eta;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

CutoffPsi::CutoffPsi(const std::vector<BoundRect>& support, const KerrParams& p, double eta, int table)
    : p_(p), eta_(eta) {
  if (!(eta > 0.0)) throw Error(ErrorCode::InvalidInput, "CutoffPsi: eta must be positive");
  table = std::max(table, 2);
  rho1_min_ = kInf;
  rho1_max_ = 0.0;
  for (const auto& b : support) {
    Table t;
    t.rect = b;
    t.n = table;
    t.r1.resize(static_cast<std::size_t>(table * table));
    for (int i = 0; i < table; ++i)
      for (int j = 0; j < table; ++j) {
        double e = b.eps1 + (b.eps2 - b.eps1) * i / (table - 1), l = b.ell1 + (b.ell2 - b.ell1) * j / (table - 1);
        RootSet rs = radial_roots({e, l, 0.0}, p, false);
        if (rs.roots.size() != 3 || rs.has_multiple())
          throw Error(ErrorCode::InvalidInput, "CutoffPsi: support rectangle leaves A_bound");
        double r1 = rs.roots[1].r;
        t.r1[i * table + j] = r1;
        double rho1 = std::sqrt(kerr::Delta(p.d(), r1));
        rho1_min_ = std::min(rho1_min_, rho1);
        rho1_max_ = std::max(rho1_max_, rho1);
      }
    tables_.push_back(std::move(t));
  }
}

double CutoffPsi::rho1(double eps, double ell) const {
  ConservedSet cs{eps, ell, 0.0};
  for (const auto& t : tables_) {
    const BoundRect& b = t.rect;
    if (eps < b.eps1 || eps > b.eps2 || ell < b.ell1 || ell > b.ell2) continue;
    double x = (eps - b.eps1) / (b.eps2 - b.eps1) * (t.n - 1), y = (ell - b.ell1) / (b.ell2 - b.ell1) * (t.n - 1);
    int i = std::min(static_cast<int>(x), t.n - 2), j = std::min(static_cast<int>(y), t.n - 2);
    double fx = x - i, fy = y - j;
    auto at = [&](int a, int c) { return t.r1[a * t.n + c]; };
    double r = (1 - fx) * (1 - fy) * at(i, j) + fx * (1 - fy) * at(i + 1, j) + (1 - fx) * fy * at(i, j + 1) +
               fx * fy * at(i + 1, j + 1);
    for (int it = 0; it < 8; ++it) {
      RadialPoly rp = radial_poly(r, cs, p_);
      double dr = rp.R / rp.dR;
      r -= dr;
      if (std::fabs(dr) <= 1e-15 * r) break;
    }
    return std::sqrt(kerr::Delta(p_.d(), r));
  }
  RootSet rs = radial_roots(cs, p_, false);
  if (rs.roots.size() != 3) throw Error(ErrorCode::InvalidInput, "CutoffPsi: (eps, ell) outside A_bound");
  return std::sqrt(kerr::Delta(p_.d(), rs.roots[1].r));
}

double CutoffPsi::operator()(double rho, double eps, double ell) const {
  if (rho >= rho1_max_) return 1.0;
  if (rho < rho1_min_ - eta_) return 0.0;
  return smooth_cutoff(rho - rho1(eps, ell), eta_);
}

CutoffPsi make_cutoff(const ProfilePhi& profile, const KerrParams& p) {
  if (profile.support.empty()) throw Error(ErrorCode::InvalidInput, "make_cutoff: profile has no support");
  double eta = kInf;
  for (const auto& b : profile.support) eta = std::min(eta, shell_support(b, p).eta);
  return CutoffPsi(profile.support, p, eta);
}

//--------------------------------------------------------------------------------------
// Pointwise metric and momentum domain
//--------------------------------------------------------------------------------------

PointMetric point_metric(double rho, double z, const KerrParams& p, const MetricPerturbation* h, double lambda0) {
  if (!(rho > 0.0)) throw Error(ErrorCode::ChartBoundary, "point_metric: rho = 0");
  kerr::Metric<double> k = kerr::metric_weyl(p.d(), rho, z);
  PointMetric m{rho, z, k.V, k.W, k.X, k.sigma, k.e2lambda};
  if (h && !h->is_zero()) {
    double th = h->theta ? h->theta(rho, z)[0] : 0.0;
    double so = h->sigma ? h->sigma(rho, z)[0] : 0.0;
    double xo = h->X ? h->X(rho, z)[0] : 0.0;
    m.X = k.X * (1.0 + xo);
    m.sigma = rho * (1.0 + so);
    m.W = m.X * (k.W / k.X + th);
    m.V = (m.sigma * m.sigma - m.W * m.W) / m.X;
  }
  if (lambda0 != 0.0) m.e2lambda = k.e2lambda * std::exp(2.0 * lambda0);
  return m;
}

double MomentumDomain::L_tilde(double E) const {
  // -1 + (X / sigma^2) E^2 written around E_min so the boundary value is exactly 0
  double s = X_sigma2 * (E - E_min) * (E + E_min);
  return s > 0.0 ? sqrtX_rho * std::sqrt(s) : 0.0;
}

double MomentumDomain::E_tilde(double L) const { return E_min * std::sqrt(1.0 + L * L / (sqrtX_rho * sqrtX_rho)); }

bool MomentumDomain::contains(double E, double L) const { return E >= E_min && std::fabs(L) <= L_tilde(E); }

MomentumDomain momentum_domain(const PointMetric& m) {
  return {m.sigma / std::sqrt(m.X), std::sqrt(m.X) / m.rho, m.X / (m.sigma * m.sigma)};
}

MomentumDomain momentum_domain(double rho, double z, const KerrParams& p, const MetricPerturbation* h) {
  if (rho > 0.0) return momentum_domain(point_metric(rho, z, p, h));
  double XA = axis_factor(p, {0.0, z});
  double so = h && h->sigma ? h->sigma(0.0, z)[0] : 0.0;
  double xo = h && h->X ? h->X(0.0, z)[0] : 0.0;
  double sx = std::sqrt(XA * (1.0 + xo));
  return {(1.0 + so) / sx, sx, XA * (1.0 + xo) / ((1.0 + so) * (1.0 + so))};
}

namespace {

double E_ell(const PointMetric& m, double ell) { return m.omega() * ell + (m.sigma / m.X) * std::sqrt(ell * ell + m.X); }

}  // namespace

std::vector<double> ell_at_energy(const PointMetric& m, double c) {
  double w = m.omega();
  double a = m.sigma * m.sigma / (m.X * m.X) - w * w, b = 2.0 * c * w, c0 = m.sigma * m.sigma / m.X - c * c;
  std::vector<double> cand;
  if (std::fabs(a) < 1e-300) {
    if (b != 0.0) cand.push_back(-c0 / b);
  } else {
    double disc = b * b - 4.0 * a * c0;
    if (disc >= 0.0) {
      double sq = std::sqrt(disc);
      double qq = -0.5 * (b + std::copysign(sq, b));
      if (qq != 0.0) {
        cand.push_back(qq / a);
        cand.push_back(c0 / qq);
      } else {
        cand.push_back(0.0);
      }
    }
  }
  std::vector<double> out;
  for (double l : cand)
    if (c - w * l >= 0.0 && std::fabs(E_ell(m, l) - c) <= 1e-9 * std::max(1.0, std::fabs(c))) out.push_back(l);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SupportIntersection support_intersection(const PointMetric& m, const ProfilePhi& profile, const CutoffPsi& psi) {
  SupportIntersection out;
  if (!(m.rho > 0.0)) return out;
  if (psi.eta() > 0.0 && m.rho < psi.rho1_min() - psi.eta()) return out;
  for (std::size_t k = 0; k < profile.support.size(); ++k) {
    const BoundRect& b = profile.support[k];
    std::vector<double> cuts{b.ell1, b.ell2};
    std::vector<double> kinks;
    for (double l : ell_at_energy(m, b.eps2))
      if (l > b.ell1 && l < b.ell2) cuts.push_back(l);
    for (double l : ell_at_energy(m, b.eps1))
      if (l > b.ell1 && l < b.ell2) {
        cuts.push_back(l);
        kinks.push_back(l);
      }
    std::sort(cuts.begin(), cuts.end());
    SupportPiece cur{static_cast<int>(k), 0.0, 0.0, {}};
    bool open = false;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      double lo = cuts[i], hi = cuts[i + 1];
      if (hi <= lo) continue;
      bool live = E_ell(m, 0.5 * (lo + hi)) < b.eps2;
      if (live && !open) {
        cur = {static_cast<int>(k), lo, hi, {}};
        open = true;
      } else if (live) {
        cur.breaks.push_back(lo);
        cur.ell_hi = hi;
      } else if (open) {
        out.pieces.push_back(cur);
        open = false;
      }
    }
    if (open) out.pieces.push_back(cur);
  }
  return out;
}

double trace_integrand_residual(const PointMetric& m, double E, double L) {
  double w = m.omega();
  double eps = E + m.rho * w * L, ell = m.rho * L;
  double J = -1.0 + (m.X * eps * eps + 2.0 * m.W * eps * ell - m.V * ell * ell) / (m.sigma * m.sigma);
  double lhs = -m.X * eps * eps - 2.0 * m.W * ell * eps + m.V * ell * ell + m.sigma * m.sigma * J;
  return lhs + m.sigma * m.sigma;
}

//--------------------------------------------------------------------------------------
// Stress-energy and source terms
//--------------------------------------------------------------------------------------

namespace {

constexpr std::size_t kMoments = 9;
using Moments = std::array<double, kMoments>;

//! Integrands in (eps, ell), without the weight Phi Psi:
//! eps^2, ell eps, ell^2, J, 1, ell E, L~^2 - L^2, printed F_4 bracket, X + 2 ell^2.
Moments moments(const PointMetric& m, const MomentumDomain& md, double eps, double ell) {
  double w = m.omega();
  double E = eps - w * ell, L = ell / m.rho;
  double J = -1.0 + (m.X * eps * eps + 2.0 * m.W * eps * ell - m.V * ell * ell) / (m.sigma * m.sigma);
  double Lt = md.L_tilde(E);
  double r2 = m.rho * m.rho;
  double f4 = m.X * m.X * E * E / (r2 * m.sigma * m.sigma) + (1.0 - m.X / r2) * (1.0 + r2 * L * L / m.X);
  return {eps * eps, ell * eps, ell * ell, J, 1.0, ell * E, Lt * Lt - L * L, f4, m.X + 2.0 * ell * ell};
}

}  // namespace

SourceTerms source_from_stress(const StressComponents& T, const PointMetric& m) {
  SourceTerms F;
  double w = m.omega();
  F.F1 = m.e2lambda * (-2.0 * T.T_phiphi + T.trace * m.X);
  F.F2 = T.T_phiphi * m.W - T.T_tphi * m.X;
  F.F3 = T.T_tt + 2.0 * w * T.T_tphi + w * w * T.T_phiphi - m.sigma * m.sigma * T.T_phiphi / (m.X * m.X) +
         m.sigma * m.sigma * T.trace / m.X;
  F.F4 = 2.0 * m.e2lambda * (T.trace - T.T_rhorho / m.e2lambda - T.T_phiphi / m.X);
  return F;
}

MatterPoint matter_at(const PointMetric& m, const ProfilePhi& profile, const CutoffPsi& psi, const MatterOptions& opt) {
  MatterPoint out;
  SupportIntersection si = support_intersection(m, profile, psi);
  if (si.empty()) return out;
  MomentumDomain md = momentum_domain(m);
  Moments I{};
  double err = 0.0;
  for (const auto& pc : si.pieces) {
    const BoundRect& b = profile.support[pc.rect];
    auto inner = [&](double ell) -> Moments {
      double lo = std::max(b.eps1, E_ell(m, ell));
      if (!(lo < b.eps2)) return Moments{};
      auto f = [&](double eps) -> Moments {
        Moments g{};
        double wgt = profile(eps, ell);
        if (wgt == 0.0) return g;
        wgt *= psi.eta() > 0.0 ? psi(m.rho, eps, ell) : 1.0;
        if (wgt == 0.0) return g;
        g = moments(m, md, eps, ell);
        for (double& x : g) x *= wgt;
        return g;
      };
      return num::integrate_vec<kMoments>(f, lo, b.eps2, 0.1 * opt.rel_tol, 0.1 * opt.abs_tol);
    };
    std::vector<double> nodes{pc.ell_lo};
    nodes.insert(nodes.end(), pc.breaks.begin(), pc.breaks.end());
    nodes.push_back(pc.ell_hi);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      double e = 0.0;
      Moments v = num::integrate_vec<kMoments>(inner, nodes[i], nodes[i + 1], opt.rel_tol, opt.abs_tol, &e);
      for (std::size_t j = 0; j < kMoments; ++j) I[j] += v[j];
      err += e;
    }
  }
  // dE dL = d eps d ell / rho
  for (double& x : I) x /= m.rho;
  double c = 2.0 * M_PI * m.rho / m.sigma;
  StressComponents& T = out.T;
  T.T_tt = c * I[0];
  T.T_tphi = -c * I[1];
  T.T_phiphi = c * I[2];
  T.T_rhorho = 0.5 * c * m.e2lambda * I[3];
  T.T_zz = T.T_rhorho;
  T.trace_direct = -c * I[4];
  T.trace = (-m.X * T.T_tt + 2.0 * m.W * T.T_tphi + m.V * T.T_phiphi) / (m.sigma * m.sigma) +
            2.0 * T.T_rhorho / m.e2lambda;
  T.error = c * std::max(1.0, m.e2lambda) * err / m.rho;
  out.F = source_from_stress(T, m);
  out.F.F1_printed = -m.e2lambda * c * I[8];
  out.F.F2_printed = c * m.X * I[5];
  out.F.F3_printed = 2.0 * M_PI * m.rho * m.rho * m.rho * m.sigma / (m.X * m.X) * I[6];
  out.F.F4_printed = -2.0 * m.e2lambda * c * I[7];
  return out;
}

MatterPoint matter_at(double rho, double z, const KerrParams& p, const ProfilePhi& profile, const CutoffPsi& psi,
                      const MetricPerturbation* h, double lambda0, const MatterOptions& opt) {
  if (!(rho > 0.0)) return {};
  return matter_at(point_metric(rho, z, p, h, lambda0), profile, psi, opt);
}

StressComponents stress_by_momentum_domain(const PointMetric& m, const ProfilePhi& profile, const CutoffPsi& psi,
                                           double rel_tol) {
  StressComponents T;
  if (!(m.rho > 0.0)) return T;
  MomentumDomain md = momentum_domain(m);
  double w = m.omega();
  using V5 = std::array<double, 5>;
  V5 I{};
  double err = 0.0;
  for (const auto& b : profile.support) {
    // E range of the rectangle, eps = E + rho omega L and ell = rho L
    double E_lo = kInf, E_hi = -kInf;
    for (double e : {b.eps1, b.eps2})
      for (double l : {b.ell1, b.ell2}) {
        E_lo = std::min(E_lo, e - w * l);
        E_hi = std::max(E_hi, e - w * l);
      }
    E_lo = std::max(E_lo, md.E_min);
    if (!(E_lo < E_hi)) continue;
    auto inner = [&](double E) -> V5 {
      double Lt = md.L_tilde(E);
      if (!(Lt > 0.0)) return V5{};
      double lo = std::max(-Lt, b.ell1 / m.rho), hi = std::min(Lt, b.ell2 / m.rho);
      double rw = m.rho * w;
      if (rw != 0.0) {
        double a1 = (b.eps1 - E) / rw, a2 = (b.eps2 - E) / rw;
        lo = std::max(lo, std::min(a1, a2));
        hi = std::min(hi, std::max(a1, a2));
      } else if (E < b.eps1 || E > b.eps2) {
        return V5{};
      }
      if (!(lo < hi)) return V5{};
      auto f = [&](double u) -> V5 {
        double L = Lt * std::sin(u);
        double eps = E + rw * L, ell = m.rho * L;
        double wgt = profile(eps, ell);
        if (wgt == 0.0) return V5{};
        wgt *= (psi.eta() > 0.0 ? psi(m.rho, eps, ell) : 1.0) * Lt * std::cos(u);
        double J = -1.0 + (m.X * eps * eps + 2.0 * m.W * eps * ell - m.V * ell * ell) / (m.sigma * m.sigma);
        return {wgt * eps * eps, wgt * ell * eps, wgt * ell * ell, wgt * J, wgt};
      };
      return num::integrate_vec<5>(f, std::asin(lo / Lt), std::asin(hi / Lt), 0.1 * rel_tol, 0.0, nullptr, 18);
    };
    double e = 0.0;
    V5 v = num::integrate_vec<5>(inner, E_lo, E_hi, rel_tol, 0.0, &e, 18);
    for (std::size_t j = 0; j < 5; ++j) I[j] += v[j];
    err += e;
  }
  double c = 2.0 * M_PI * m.rho / m.sigma;
  T.T_tt = c * I[0];
  T.T_tphi = -c * I[1];
  T.T_phiphi = c * I[2];
  T.T_rhorho = 0.5 * c * m.e2lambda * I[3];
  T.T_zz = T.T_rhorho;
  T.trace_direct = -c * I[4];
  T.trace = (-m.X * T.T_tt + 2.0 * m.W * T.T_tphi + m.V * T.T_phiphi) / (m.sigma * m.sigma) +
            2.0 * T.T_rhorho / m.e2lambda;
  T.error = c * err;
  return T;
}

//--------------------------------------------------------------------------------------
// Gridded fields
//--------------------------------------------------------------------------------------

GridSpec shell_grid(const ShellBox& box, int nrho, int nz, int margin) {
  if (nrho < 2 * margin + 2 || nz < 2 * margin + 2) throw Error(ErrorCode::InvalidInput, "shell_grid: grid too small");
  GridSpec g;
  g.nrho = nrho;
  g.nz = nz;
  double hr = (box.rho_max - box.rho_min) / (nrho - 1 - 2 * margin);
  double hz = (box.z_max - box.z_min) / (nz - 1 - 2 * margin);
  g.rho_lo = box.rho_min - margin * hr;
  g.rho_hi = box.rho_max + margin * hr;
  g.z_lo = box.z_min - margin * hz;
  g.z_hi = box.z_max + margin * hz;
  if (!(g.rho_lo > 0.0)) throw Error(ErrorCode::InvalidInput, "shell_grid: margin reaches the axis");
  return g;
}

const std::vector<std::string>& MatterFields::names() {
  static const std::vector<std::string> n{"T_tt", "T_tphi", "T_phiphi", "T_rhorho", "T_zz", "F1", "F2", "F3", "F4"};
  return n;
}

const std::vector<double>& MatterFields::field(const std::string& name) const {
  const std::vector<double>* all[] = {&T_tt, &T_tphi, &T_phiphi, &T_rhorho, &T_zz, &F1, &F2, &F3, &F4};
  const auto& n = names();
  for (std::size_t i = 0; i < n.size(); ++i)
    if (n[i] == name) return *all[i];
  throw Error(ErrorCode::InvalidInput, "MatterFields: unknown field " + name);
}

MatterFields matter_fields(const GridSpec& grid, const KerrParams& p, const ProfilePhi& profile, const CutoffPsi& psi,
                           const MetricPerturbation* h, const std::vector<double>* lambda0, const MatterOptions& opt,
                           int threads) {
  MatterFields out;
  out.grid = grid;
  out.delta = profile.delta;
  std::size_t n = static_cast<std::size_t>(grid.nrho) * grid.nz;
  if (lambda0 && lambda0->size() != n) throw Error(ErrorCode::InvalidInput, "matter_fields: lambda0 size mismatch");
  for (auto* v : {&out.T_tt, &out.T_tphi, &out.T_phiphi, &out.T_rhorho, &out.T_zz, &out.F1, &out.F2, &out.F3, &out.F4})
    v->assign(n, 0.0);
  std::vector<double> row_err(grid.nz, 0.0);
  auto work = [&](int j0, int stride) {
    for (int j = j0; j < grid.nz; j += stride) {
      for (int i = 0; i < grid.nrho; ++i) {
        double rho = grid.rho(i), z = grid.z(j);
        if (!(rho > 0.0)) continue;
        std::size_t k = static_cast<std::size_t>(j) * grid.nrho + i;
        MatterPoint mp = matter_at(rho, z, p, profile, psi, h, lambda0 ? (*lambda0)[k] : 0.0, opt);
        out.T_tt[k] = mp.T.T_tt;
        out.T_tphi[k] = mp.T.T_tphi;
        out.T_phiphi[k] = mp.T.T_phiphi;
        out.T_rhorho[k] = mp.T.T_rhorho;
        out.T_zz[k] = mp.T.T_zz;
        out.F1[k] = mp.F.F1;
        out.F2[k] = mp.F.F2;
        out.F3[k] = mp.F.F3;
        out.F4[k] = mp.F.F4;
        row_err[j] = std::max(row_err[j], mp.T.error);
      }
    }
  };
  int nt = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  nt = std::min(nt, grid.nz);
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(work, t, nt);
  work(0, nt);
  for (auto& th : pool) th.join();
  out.max_error = *std::max_element(row_err.begin(), row_err.end());
  return out;
}

}  // namespace kerrshell
