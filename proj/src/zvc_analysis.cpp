//========================================================================================
// kerrshell: effective potential, zero-velocity curves and the trapped-shell box
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#include "kerrshell/zvc_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kerrshell/dual.hpp"

namespace kerrshell {

namespace {

using D1 = Dual<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();

double lift(const std::array<double, 3>& f, double, double) { return f[0]; }
D1 lift(const std::array<double, 3>& f, const D1& rho, const D1& z) { return {f[0], f[1] * rho.d + f[2] * z.d}; }

std::array<double, 3> eval(const MetricPerturbation::Field& f, double rho, double z) {
  if (!f) return {0.0, 0.0, 0.0};
  return f(rho, z);
}

template <class T>
T potential(double d, const T& rho, const T& z, double ell, const MetricPerturbation* h) {
  using std::sqrt;
  kerr::Metric<T> m = kerr::metric_weyl(d, rho, z);
  if (!h || h->is_zero()) return -(m.W / m.X) * ell + (m.sigma / m.X) * sqrt(ell * ell + m.X);
  double rv = value_of(rho), zv = value_of(z);
  T th = lift(eval(h->theta, rv, zv), rho, z);
  T so = lift(eval(h->sigma, rv, zv), rho, z);
  T xo = lift(eval(h->X, rv, zv), rho, z);
  T X = m.X * (1.0 + xo);
  return -(m.W / m.X + th) * ell + (rho / m.X) * ((1.0 + so) / (1.0 + xo)) * sqrt(ell * ell + X);
}

}  // namespace

double MetricPerturbation::norm(int n) const {
  if (is_zero()) return 0.0;
  double best = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double rho = rho_lo + (rho_hi - rho_lo) * (i + 0.5) / n;
      double z = z_lo + (z_hi - z_lo) * (j + 0.5) / n;
      for (const Field* f : {&theta, &sigma, &X}) {
        auto v = eval(*f, rho, z);
        for (double x : v) best = std::max(best, std::fabs(x));
      }
    }
  return best;
}

double MetricPerturbation::min_one_plus(int n) const {
  double best = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double rho = rho_lo + (rho_hi - rho_lo) * (i + 0.5) / n;
      double z = z_lo + (z_hi - z_lo) * (j + 0.5) / n;
      best = std::min({best, 1.0 + eval(X, rho, z)[0], 1.0 + eval(sigma, rho, z)[0]});
    }
  return best;
}

MetricPerturbation::Field bump_field(double c, double rho0, double z0, double width) {
  return [=](double rho, double z) -> std::array<double, 3> {
    double dr = (rho - rho0) / width, dz = (z - z0) / width;
    double s2 = dr * dr + dz * dz;
    if (s2 >= 1.0) return {0.0, 0.0, 0.0};
    double u = 1.0 - s2;
    double v = c * u * u * u;
    double dv = -6.0 * c * u * u / width;  // d v / d(dr) = dv * dr
    return {v, dv * dr, dv * dz};
  };
}

double effective_potential(double rho, double z, double ell, const KerrParams& p, const MetricPerturbation* h) {
  if (!(rho > 0.0)) throw Error(ErrorCode::ChartBoundary, "effective_potential: rho = 0");
  return potential<double>(p.d(), rho, z, ell, h);
}

PotentialValue effective_potential_grad(double rho, double z, double ell, const KerrParams& p,
                                        const MetricPerturbation* h) {
  if (!(rho > 0.0)) throw Error(ErrorCode::ChartBoundary, "effective_potential: rho = 0");
  D1 a = potential<D1>(p.d(), seed(rho, true), seed(z, false), ell, h);
  D1 b = potential<D1>(p.d(), seed(rho, false), seed(z, true), ell, h);
  return {a.v, a.d, b.d};
}

double turning_point_residual(double rho, double z, const ConservedSet& cs, const KerrParams& p) {
  kerr::Metric<double> m = kerr::metric_weyl(p.d(), rho, z);
  return -1.0 + (m.X * cs.eps * cs.eps + 2.0 * m.W * cs.eps * cs.ell - m.V * cs.ell * cs.ell) / (m.sigma * m.sigma);
}

const char* component_tag_name(ComponentTag t) {
  switch (t) {
    case ComponentTag::Trapped: return "trapped";
    case ComponentTag::Absorbed: return "absorbed";
    case ComponentTag::Scattered: return "scattered";
    case ComponentTag::SelfIntersecting: return "self-intersecting";
    case ComponentTag::OffEquatorPair: return "off-equator-pair";
  }
  return "?";
}

bool ZeroVelocityCurve::trapped() const { return find(ComponentTag::Trapped) != nullptr; }

const CurveComponent* ZeroVelocityCurve::find(ComponentTag t) const {
  for (const auto& c : components)
    if (c.tag == t) return &c;
  return nullptr;
}

namespace {

enum class Knot { Horizon, Root, Infinity };

struct Interval {
  double a, b;
  Knot ka, kb;
};

//! cos^2 theta on the curve qbar(r) = g(theta); exact 0 at equatorial roots.
double curve_y(double r, double eps, double ell, const KerrParams& p) {
  double q = qbar(r, eps, ell, p);
  if (q <= 0.0) return 0.0;
  return std::clamp(theta_turning_y({eps, ell, q}, p), 0.0, 1.0);
}

WeylPoint curve_point(double r, double y, bool upper, double d) {
  double D = std::max(kerr::Delta(d, r), 0.0);
  double c = std::sqrt(y) * (upper ? 1.0 : -1.0);
  return {std::sqrt(D) * std::sqrt(1.0 - y), (r - 1.0) * c};
}

double dist(WeylPoint a, WeylPoint b) { return std::hypot(a.rho - b.rho, a.z - b.z); }

//! Radii sampling an interval, clustered at the ends and refined by Weyl arc length.
std::vector<double> sample_interval(const Interval& iv, double eps, double ell, const KerrParams& p,
                                    const TraceOptions& opt) {
  double d = p.d();
  int N = std::max(8, opt.base_points);
  std::vector<double> rs;
  for (int k = 0; k <= N; ++k) {
    double r = iv.a + (iv.b - iv.a) * 0.5 * (1.0 - std::cos(M_PI * k / N));
    rs.push_back(r);
  }
  if (iv.ka == Knot::Horizon) rs.erase(rs.begin());  // the pole is appended separately
  auto pt = [&](double r, bool at_root) { return curve_point(r, at_root ? 0.0 : curve_y(r, eps, ell, p), true, d); };
  for (int pass = 0; pass < opt.max_refine; ++pass) {
    std::vector<double> out{rs.front()};
    bool changed = false;
    for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
      bool ra = (i == 0 && iv.ka == Knot::Root), rb = (i + 2 == rs.size() && iv.kb == Knot::Root);
      if (dist(pt(rs[i], ra), pt(rs[i + 1], rb)) > opt.max_segment) {
        out.push_back(0.5 * (rs[i] + rs[i + 1]));
        changed = true;
      }
      out.push_back(rs[i + 1]);
    }
    rs.swap(out);
    if (!changed) break;
  }
  return rs;
}

struct Branchpath {
  std::vector<WeylPoint> upper, lower;  //!< ascending r
};

Branchpath interval_path(const Interval& iv, double eps, double ell, const KerrParams& p, const TraceOptions& opt) {
  double d = p.d();
  Branchpath bp;
  std::vector<double> rs = sample_interval(iv, eps, ell, p, opt);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    bool at_root = (i == 0 && iv.ka == Knot::Root) || (i + 1 == rs.size() && iv.kb == Knot::Root);
    double y = at_root ? 0.0 : curve_y(rs[i], eps, ell, p);
    bp.upper.push_back(curve_point(rs[i], y, true, d));
    bp.lower.push_back(curve_point(rs[i], y, false, d));
  }
  return bp;
}

}  // namespace

ZeroVelocityCurve trace_zvc(double eps, double ell, const KerrParams& p, const TraceOptions& opt) {
  double d = p.d();
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidInput, "trace_zvc: eps must be positive");
  double A = d * d * (1.0 - eps * eps);
  double rH = 1.0 + std::sqrt(1.0 - d * d);
  double beta = std::sqrt(1.0 - d * d);
  ZeroVelocityCurve zc;
  zc.eps = eps;
  zc.ell = ell;
  zc.vertex_tol = opt.vertex_tol;

  RootSet rs = radial_roots({eps, ell, 0.0}, p, false);
  if (A < 0.0 && ell * ell < -A && !rs.roots.empty())
    throw Error(ErrorCode::Indeterminate, "trace_zvc: non-monotone polar potential with radial roots");

  // knots r_H < roots < inf and the sign of qbar on each gap
  std::vector<double> knots{rH};
  std::vector<int> mult{0};
  for (const auto& r : rs.roots) {
    knots.push_back(r.r);
    mult.push_back(r.multiplicity);
    if (r.multiplicity >= 2) zc.singular_points.push_back({std::sqrt(kerr::Delta(d, r.r)), 0.0});
  }
  std::vector<Interval> allowed;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    bool last = i + 1 == knots.size();
    double a = knots[i], b = last ? std::max(opt.r_truncate, 2.0 * a) : knots[i + 1];
    double probe = last ? std::max(2.0 * a, a + 10.0) : 0.5 * (a + b);
    if (i == 0 && !last) probe = a + 0.5 * (b - a);
    if (qbar(probe, eps, ell, p) > 0.0)
      allowed.push_back({a, b, i == 0 ? Knot::Horizon : Knot::Root, last ? Knot::Infinity : Knot::Root});
  }
  // isolated allowed points: even roots with forbidden gaps on both sides
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (mult[i] % 2 != 0) continue;
    bool left = false, right = false;
    for (const auto& iv : allowed) {
      if (iv.b == knots[i]) left = true;
      if (iv.a == knots[i]) right = true;
    }
    if (!left && !right) {
      CurveComponent c{ComponentTag::Trapped, true, {{std::sqrt(kerr::Delta(d, knots[i])), 0.0}}, {}};
      zc.components.push_back(c);
    }
  }
  // chain intervals that touch at a double root
  std::vector<std::vector<Interval>> chains;
  for (const auto& iv : allowed) {
    if (!chains.empty() && chains.back().back().b == iv.a && iv.ka == Knot::Root) chains.back().push_back(iv);
    else chains.push_back({iv});
  }
  for (const auto& ch : chains) {
    Knot left = ch.front().ka, right = ch.back().kb;
    std::vector<WeylPoint> up, lo;
    for (std::size_t k = 0; k < ch.size(); ++k) {
      Branchpath bp = interval_path(ch[k], eps, ell, p, opt);
      std::size_t skip = (k > 0) ? 1 : 0;  // shared double-root vertex
      up.insert(up.end(), bp.upper.begin() + skip, bp.upper.end());
      lo.insert(lo.end(), bp.lower.begin() + skip, bp.lower.end());
    }
    if (left == Knot::Horizon) {
      up.insert(up.begin(), WeylPoint{0.0, beta});
      lo.insert(lo.begin(), WeylPoint{0.0, -beta});
    }
    CurveComponent c;
    if (left == Knot::Horizon && right == Knot::Infinity) {
      // no equatorial crossing: one curve in each hemisphere
      zc.components.push_back({ch.size() > 1 ? ComponentTag::SelfIntersecting : ComponentTag::OffEquatorPair, false, up, {}});
      zc.components.push_back({ch.size() > 1 ? ComponentTag::SelfIntersecting : ComponentTag::OffEquatorPair, false, lo, {}});
      continue;
    }
    if (left == Knot::Root && right == Knot::Root) {
      c.closed = true;
      c.points = up;
      for (std::size_t i = lo.size() - 1; i-- > 1;) c.points.push_back(lo[i]);
      c.tag = ch.size() > 1 ? ComponentTag::SelfIntersecting : ComponentTag::Trapped;
    } else if (left == Knot::Root) {
      // scattered: in from the far end on the upper curve, back out on the lower one
      c.points.assign(up.rbegin(), up.rend());
      c.points.insert(c.points.end(), lo.begin() + 1, lo.end());
      c.tag = ch.size() > 1 ? ComponentTag::SelfIntersecting : ComponentTag::Scattered;
    } else {
      // absorbed: pole to the equatorial root and back to the other pole
      c.points = up;
      for (std::size_t i = lo.size() - 1; i-- > 0;) c.points.push_back(lo[i]);
      c.tag = ch.size() > 1 ? ComponentTag::SelfIntersecting : ComponentTag::Absorbed;
    }
    zc.components.push_back(std::move(c));
  }
  // order: absorbed-type (innermost) first
  std::stable_sort(zc.components.begin(), zc.components.end(), [](const CurveComponent& a, const CurveComponent& b) {
    double ra = kInf, rb = kInf;
    for (auto& q : a.points) ra = std::min(ra, q.rho + std::fabs(q.z) * 1e-9);
    for (auto& q : b.points) rb = std::min(rb, q.rho + std::fabs(q.z) * 1e-9);
    return ra < rb;
  });
  for (const auto& c : zc.components)
    for (const auto& q : c.points)
      if (q.rho > 0.0) zc.max_residual = std::max(zc.max_residual, std::fabs(effective_potential(q.rho, q.z, ell, p) - eps));
  return zc;
}

ZeroVelocityCurve trace_zvc_perturbed(const ZeroVelocityCurve& kc, const MetricPerturbation& h, const KerrParams& p,
                                      const PerturbOptions& opt, double* max_displacement) {
  double hn = h.norm();
  if (!(hn < opt.delta0)) throw Error(ErrorCode::InvalidInput, "trace_zvc_perturbed: |h| >= delta0");
  if (!(h.min_one_plus() > 0.0)) throw Error(ErrorCode::InvalidInput, "trace_zvc_perturbed: 1 + X or 1 + sigma <= 0");
  ZeroVelocityCurve out = kc;
  out.max_residual = 0.0;
  double disp = 0.0;
  double zmax = 0.0, rho_at_zmax = 0.0;
  if (const CurveComponent* t = kc.find(ComponentTag::Trapped))
    for (const auto& q : t->points)
      if (q.z > zmax) {
        zmax = q.z;
        rho_at_zmax = q.rho;
      }
  double zbar = opt.z_bar_frac * zmax;
  for (auto& c : out.components) {
    c.region.assign(c.points.size(), 0);
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      WeylPoint& q = c.points[i];
      if (c.tag == ComponentTag::Trapped) {
        c.region[i] = q.z > zbar ? 1 : (q.z < -zbar ? 2 : (q.rho < rho_at_zmax ? 3 : 4));
      } else if (c.tag == ComponentTag::Scattered) {
        c.region[i] = 4;
      }
      if (!(q.rho > 0.0)) continue;
      PotentialValue g = effective_potential_grad(q.rho, q.z, kc.ell, p);
      double gn = std::hypot(g.E_rho, g.E_z);
      if (!(gn > 1e-12)) throw Error(ErrorCode::NoConvergence, "trace_zvc_perturbed: singular Kerr vertex");
      double nr = g.E_rho / gn, nz = g.E_z / gn;
      double t = 0.0;
      bool ok = false;
      for (int it = 0; it < opt.max_iter; ++it) {
        double rho = q.rho + t * nr, z = q.z + t * nz;
        if (!(rho > 0.0)) break;
        PotentialValue e = effective_potential_grad(rho, z, kc.ell, p, &h);
        double res = e.E - kc.eps;
        if (std::fabs(res) <= opt.tol) {
          ok = true;
          break;
        }
        double slope = e.E_rho * nr + e.E_z * nz;
        if (slope == 0.0) break;
        double step = std::clamp(-res / slope, -0.5 * opt.delta0, 0.5 * opt.delta0);
        t += step;
        if (std::fabs(step) <= 1e-14 * (1.0 + std::hypot(q.rho, q.z))) {
          ok = true;  // at the round-off floor of E near the poles
          break;
        }
        if (std::fabs(t) > opt.delta0) break;
      }
      if (!ok)
        throw Error(ErrorCode::NoConvergence, "trace_zvc_perturbed: Newton failed within delta0 at rho = " +
                                                  std::to_string(q.rho) + ", z = " + std::to_string(q.z));
      q = {q.rho + t * nr, q.z + t * nz};
      disp = std::max(disp, std::fabs(t));
      out.max_residual = std::max(out.max_residual, std::fabs(effective_potential(q.rho, q.z, kc.ell, p, &h) - kc.eps));
    }
  }
  if (max_displacement) *max_displacement = disp;
  return out;
}

namespace {

//! Radius on the branch where |Psi(r)| = |ell|, in (lo, hi).
double psi_radius(double ell, Branch b, const KerrParams& p, double lo, double hi) {
  auto f = [&](double r) { return std::fabs(circular_curves(r, b, p).second) - std::fabs(ell); };
  return num::find_root(f, lo, hi);
}

}  // namespace

std::vector<CriticalPoint> critical_points(double ell, const KerrParams& p) {
  double d = p.d();
  Branch b = branch_of(d, ell);
  IscoData is = isco(b, p);
  std::vector<CriticalPoint> out;
  if (std::fabs(ell) < std::fabs(is.ell_min)) return out;
  if (std::fabs(ell) == std::fabs(is.ell_min)) {
    out.push_back({std::sqrt(kerr::Delta(d, is.r_ms)), 0.0, CriticalKind::Saddle, b});
    return out;
  }
  double rph = photon_radius(b, p);
  double lo = rph * (1.0 + 1e-13) + 1e-13;
  double rs = psi_radius(ell, b, p, lo, is.r_ms);
  double hi = 2.0 * is.r_ms;
  while (std::fabs(circular_curves(hi, b, p).second) < std::fabs(ell)) hi *= 2.0;
  double rm = psi_radius(ell, b, p, is.r_ms, hi);
  out.push_back({std::sqrt(kerr::Delta(d, rs)), 0.0, CriticalKind::Saddle, b});
  out.push_back({std::sqrt(kerr::Delta(d, rm)), 0.0, CriticalKind::Minimum, b});
  return out;
}

TrappedExtent trapped_extent(double eps, double ell, const KerrParams& p) {
  double d = p.d();
  RootSet rs = radial_roots({eps, ell, 0.0}, p, false);
  if (rs.roots.size() != 3 || rs.has_multiple())
    throw Error(ErrorCode::InvalidInput, "trapped_extent: (eps, ell) is not in A_bound");
  double r0 = rs.roots[0].r, r1 = rs.roots[1].r, r2 = rs.roots[2].r;
  double rH = 1.0 + std::sqrt(1.0 - d * d);
  TrappedExtent te;
  auto rho_abs = [&](double r) { return -curve_point(r, curve_y(r, eps, ell, p), true, d).rho; };
  auto m = num::scan_minimize(rho_abs, rH + 1e-9 * (r0 - rH), r0, 64);
  te.rho0_max = std::max(-m.second, std::sqrt(kerr::Delta(d, r0)));
  te.rho1 = std::sqrt(kerr::Delta(d, r1));
  te.rho2 = std::sqrt(kerr::Delta(d, r2));
  auto zneg = [&](double r) { return -curve_point(r, curve_y(r, eps, ell, p), true, d).z; };
  auto mz = num::scan_minimize(zneg, r1, r2, 64);
  te.z_max = -mz.second;
  te.rho_at_zmax = curve_point(mz.first, curve_y(mz.first, eps, ell, p), true, d).rho;
  return te;
}

ShellBox shell_support(const BoundRect& b, const KerrParams& p, const MetricPerturbation* h, int grid) {
  if (!(b.eps1 < b.eps2) || !(b.ell1 < b.ell2)) throw Error(ErrorCode::InvalidInput, "shell_support: empty rectangle");
  grid = std::max(grid, 2);
  ParameterRegion want = ParameterRegion::Inadmissible;
  struct Sample {
    double eps, ell;
    TrappedExtent te;
  };
  auto extent = [&](double e, double l) {
    RegionResult rr = classify_region(e, l, p);
    if (rr.region != ParameterRegion::ABoundPlus && rr.region != ParameterRegion::ABoundMinus)
      throw Error(ErrorCode::InvalidInput, "shell_support: rectangle leaks outside A_bound");
    if (want == ParameterRegion::Inadmissible) want = rr.region;
    if (rr.region != want) throw Error(ErrorCode::InvalidInput, "shell_support: rectangle straddles both branches");
    TrappedExtent te = trapped_extent(e, l, p);
    if (h && !h->is_zero()) {
      ZeroVelocityCurve kc = trace_zvc(e, l, p);
      ZeroVelocityCurve pc = trace_zvc_perturbed(kc, *h, p);
      TrappedExtent tp{0.0, kInf, 0.0, 0.0, 0.0};
      for (const auto& c : pc.components)
        for (const auto& q : c.points) {
          if (c.tag == ComponentTag::Trapped) {
            tp.rho1 = std::min(tp.rho1, q.rho);
            tp.rho2 = std::max(tp.rho2, q.rho);
            tp.z_max = std::max(tp.z_max, std::fabs(q.z));
          } else if (c.tag == ComponentTag::Absorbed) {
            tp.rho0_max = std::max(tp.rho0_max, q.rho);
          }
        }
      te = tp;
    }
    return te;
  };
  auto scan = [&](double e1, double e2, double l1, double l2) {
    std::vector<Sample> s;
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) {
        double e = e1 + (e2 - e1) * i / (grid - 1), l = l1 + (l2 - l1) * j / (grid - 1);
        s.push_back({e, l, extent(e, l)});
      }
    return s;
  };
  std::vector<Sample> s = scan(b.eps1, b.eps2, b.ell1, b.ell2);
  ShellBox box{kInf, 0.0, 0.0, 0.0, 0.0, kInf, 0.0, Branch::Direct};
  double gap = kInf;
  auto absorb = [&](const std::vector<Sample>& ss) {
    for (const auto& x : ss) {
      box.rho_min = std::min(box.rho_min, x.te.rho1);
      box.rho_max = std::max(box.rho_max, x.te.rho2);
      box.z_max = std::max(box.z_max, x.te.z_max);
      box.rho0_max = std::max(box.rho0_max, x.te.rho0_max);
      gap = std::min(gap, x.te.rho1 - x.te.rho0_max);
    }
  };
  absorb(s);
  // local refinement around the extremal grid samples
  double de = (b.eps2 - b.eps1) / (grid - 1), dl = (b.ell2 - b.ell1) / (grid - 1);
  auto refine_at = [&](auto key) {
    auto it = std::min_element(s.begin(), s.end(), [&](const Sample& x, const Sample& y) { return key(x) < key(y); });
    absorb(scan(std::max(b.eps1, it->eps - de), std::min(b.eps2, it->eps + de), std::max(b.ell1, it->ell - dl),
                std::min(b.ell2, it->ell + dl)));
  };
  refine_at([](const Sample& x) { return x.te.rho1; });
  refine_at([](const Sample& x) { return -x.te.rho2; });
  refine_at([](const Sample& x) { return -x.te.z_max; });
  refine_at([](const Sample& x) { return x.te.rho1 - x.te.rho0_max; });
  box.z_min = -box.z_max;
  box.eta = 0.5 * gap;
  box.branch = want == ParameterRegion::ABoundPlus ? Branch::Direct : Branch::Retrograde;
  box.rho_mb = marginally_bound_rho(box.branch, p);
  if (!(box.eta > 0.0)) throw Error(ErrorCode::InvalidInput, "shell_support: trapped and absorbed curves touch");
  return box;
}

double ergosphere_touch_spin() {
  auto f = [](double d) {
    KerrParams p = KerrParams::make(1.0, d);
    return marginally_bound_rho(Branch::Direct, p) - d;
  };
  return num::find_root(f, 0.1, 0.999);
}

double hausdorff(const std::vector<WeylPoint>& a, const std::vector<WeylPoint>& b) {
  auto one = [](const std::vector<WeylPoint>& x, const std::vector<WeylPoint>& y) {
    double worst = 0.0;
    for (const auto& p : x) {
      double best = kInf;
      for (const auto& q : y) best = std::min(best, dist(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one(a, b), one(b, a));
}

bool polygon_is_simple(const std::vector<WeylPoint>& pts) {
  std::size_t n = pts.size();
  auto orient = [](WeylPoint a, WeylPoint b, WeylPoint c) {
    double v = (b.rho - a.rho) * (c.z - a.z) - (b.z - a.z) * (c.rho - a.rho);
    return (v > 0) - (v < 0);
  };
  for (std::size_t i = 0; i < n; ++i) {
    WeylPoint a = pts[i], b = pts[(i + 1) % n];
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j + 1 == n) continue;  // adjacent through the closing edge
      WeylPoint c = pts[j], e = pts[(j + 1) % n];
      if (orient(a, b, c) * orient(a, b, e) < 0 && orient(c, e, a) * orient(c, e, b) < 0) return false;
    }
  }
  return true;
}

}  // namespace kerrshell
