//========================================================================================
// kerrshell: Hamiltonian geodesic flow, periods and orbit fate
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#include "kerrshell/geodesic_flow.hpp"

#include <cmath>

#include "kerrshell/dual.hpp"

namespace kerrshell {

namespace {

using D1 = Dual<double>;

//! BL Hamiltonian with the potential U = R/Delta + T/sin^2 written through q.
template <class T>
T hamiltonian_bl(double d, const T& r, const T& th, double vr, double vth, double eps, double ell, double q) {
  using std::cos;
  using std::sin;
  T c = cos(th), s = sin(th);
  T D = kerr::Delta(d, r);
  T S2 = kerr::Sigma2(d, r, c);
  T P = eps * (r * r + d * d) - d * ell;
  double K = ell - d * eps;
  T R = P * P - D * (r * r + K * K + q);
  double A = d * d * (1.0 - eps * eps);
  T c2 = c * c;
  T Tc = q - (q + A + ell * ell) * c2 + A * c2 * c2;
  T U = R / D + Tc / (s * s);
  return (D * (vr * vr) + vth * vth - U) / (2.0 * S2) - 0.5;
}

//! Weyl Hamiltonian (1/2) e^{-2 lambda} |v|^2 - (1/2)(X eps^2 + 2 W eps ell - V ell^2) / sigma^2.
template <class T>
T hamiltonian_weyl(double d, const T& rho, const T& z, double vrho, double vz, double eps, double ell) {
  kerr::Metric<T> m = kerr::metric_weyl(d, rho, z);
  T budget = (m.X * (eps * eps) + 2.0 * eps * ell * m.W - m.V * (ell * ell)) / (m.sigma * m.sigma);
  return 0.5 * (vrho * vrho + vz * vz) / m.e2lambda - 0.5 * budget;
}

//! Sum of the magnitudes of the terms of 2H + 1, the scale of the relative H drift. Near
//! the horizon the BL terms grow like 1 / Delta and cancel.
double hamiltonian_scale(const PhaseState& s, double d) {
  if (s.chart == Chart::BL) {
    double r = s.x1, c = std::cos(s.x2), sn = std::sin(s.x2);
    double D = kerr::Delta(d, r), S2 = kerr::Sigma2(d, r, c);
    double P = s.eps * (r * r + d * d) - d * s.ell, K = s.ell - d * s.eps;
    double A = d * d * (1.0 - s.eps * s.eps);
    double tR = (P * P + D * (r * r + K * K)) / D;
    double tT = (s.ell * s.ell * c * c + std::fabs(A) * c * c * sn * sn) / (sn * sn);
    return 1.0 + (D * s.v1 * s.v1 + s.v2 * s.v2 + tR + tT) / S2;
  }
  kerr::Metric<double> m = kerr::metric_weyl(d, s.x1, s.x2);
  double b = std::fabs(m.X) * s.eps * s.eps + std::fabs(2.0 * s.eps * s.ell * m.W) + std::fabs(m.V) * s.ell * s.ell;
  return 1.0 + (s.v1 * s.v1 + s.v2 * s.v2) / m.e2lambda + b / (m.sigma * m.sigma);
}

double carter_of_bl(const PhaseState& s, double d) {
  double c = std::cos(s.x2), sn = std::sin(s.x2);
  return s.v2 * s.v2 + c * c * (d * d * (1.0 - s.eps * s.eps) + s.ell * s.ell / (sn * sn));
}

double sigma2_at(const PhaseState& s, double d) {
  if (s.chart == Chart::BL) return kerr::Sigma2(d, s.x1, std::cos(s.x2));
  double r, c, sn;
  kerr::weyl_to_rcs(d, s.x1, s.x2, r, c, sn);
  return kerr::Sigma2(d, r, c);
}

double radius_of(const PhaseState& s, double d) {
  if (s.chart == Chart::BL) return s.x1;
  double r, c, sn;
  kerr::weyl_to_rcs(d, s.x1, s.x2, r, c, sn);
  return r;
}

//! Jacobian d(rho, z)/d(r, theta).
void weyl_jacobian(double d, double r, double th, double& rr, double& rt, double& zr, double& zt) {
  double D = kerr::Delta(d, r), sq = std::sqrt(D);
  double c = std::cos(th), s = std::sin(th);
  rr = (r - 1.0) * s / sq;
  rt = sq * c;
  zr = c;
  zt = -(r - 1.0) * s;
}

}  // namespace

double hamiltonian(const PhaseState& s, const KerrParams& p) {
  double d = p.d();
  if (s.chart == Chart::BL) return hamiltonian_bl<double>(d, s.x1, s.x2, s.v1, s.v2, s.eps, s.ell, 0.0);
  return hamiltonian_weyl<double>(d, s.x1, s.x2, s.v1, s.v2, s.eps, s.ell);
}

ConservedReport conserved_from_state(const PhaseState& s, const KerrParams& p) {
  PhaseState b = s.chart == Chart::BL ? s : to_bl(s, p);
  return {{b.eps, b.ell, carter_of_bl(b, p.d())}, hamiltonian(s, p)};
}

PhaseState make_state(const ConservedSet& cs, BLPoint at, int sign_vr, int sign_vtheta, const KerrParams& p) {
  double d = p.d();
  if (!(at.r > p.r_plus() / p.M)) throw Error(ErrorCode::InvalidInput, "make_state: r must exceed r_plus");
  num::Poly Rp = radial_coeffs(cs, p);
  double R = Rp(at.r);
  double c = std::cos(at.theta), s = std::sin(at.theta);
  double T = angular_poly(c, cs, p);
  double Rtol = 1e-12 * Rp.magnitude(at.r);
  double Ttol = 1e-12 * (std::fabs(cs.q) + cs.ell * cs.ell + 1.0);
  if (R < -Rtol) throw Error(ErrorCode::InvalidInput, "make_state: R(r) < 0 (forbidden radius)");
  if (T < -Ttol) throw Error(ErrorCode::InvalidInput, "make_state: T(cos theta) < 0 (forbidden angle)");
  double D = kerr::Delta(d, at.r);
  PhaseState st;
  st.chart = Chart::BL;
  st.x1 = at.r;
  st.x2 = at.theta;
  st.v1 = (sign_vr > 0 ? 1.0 : (sign_vr < 0 ? -1.0 : 0.0)) * std::sqrt(std::max(R, 0.0)) / D;
  st.v2 = (sign_vtheta > 0 ? 1.0 : (sign_vtheta < 0 ? -1.0 : 0.0)) * std::sqrt(std::max(T, 0.0)) / s;
  st.eps = cs.eps;
  st.ell = cs.ell;
  return st;
}

PhaseState normalize_momentum(PhaseState s, const KerrParams& p) {
  double d = p.d();
  double kin, budget;
  if (s.chart == Chart::BL) {
    double D = kerr::Delta(d, s.x1);
    kin = D * s.v1 * s.v1 + s.v2 * s.v2;
    // U = 2 Sigma^2 (H + 1/2) evaluated at zero in-plane momentum
    budget = -2.0 * kerr::Sigma2(d, s.x1, std::cos(s.x2)) *
             (hamiltonian_bl<double>(d, s.x1, s.x2, 0.0, 0.0, s.eps, s.ell, 0.0) + 0.5);
  } else {
    kerr::Metric<double> m = kerr::metric_weyl(d, s.x1, s.x2);
    kin = (s.v1 * s.v1 + s.v2 * s.v2) / m.e2lambda;
    budget = -2.0 * (hamiltonian_weyl<double>(d, s.x1, s.x2, 0.0, 0.0, s.eps, s.ell) + 0.5);
  }
  if (budget < 0.0) throw Error(ErrorCode::InvalidInput, "normalize_momentum: point not allowed for (eps, ell)");
  if (kin == 0.0) {
    if (budget > 1e-14) throw Error(ErrorCode::InvalidInput, "normalize_momentum: zero in-plane momentum off the ZVC");
    return s;
  }
  double k = std::sqrt(budget / kin);
  s.v1 *= k;
  s.v2 *= k;
  return s;
}

PhaseState to_weyl(const PhaseState& s, const KerrParams& p) {
  if (s.chart == Chart::Weyl) return s;
  double d = p.d();
  double rr, rt, zr, zt;
  weyl_jacobian(d, s.x1, s.x2, rr, rt, zr, zt);
  // (v_r, v_theta) = J^T (v_rho, v_z)
  double det = rr * zt - rt * zr;
  PhaseState w = s;
  w.chart = Chart::Weyl;
  w.x1 = std::sqrt(kerr::Delta(d, s.x1)) * std::sin(s.x2);
  w.x2 = (s.x1 - 1.0) * std::cos(s.x2);
  w.v1 = (zt * s.v1 - zr * s.v2) / det;
  w.v2 = (-rt * s.v1 + rr * s.v2) / det;
  return w;
}

PhaseState to_bl(const PhaseState& s, const KerrParams& p) {
  if (s.chart == Chart::BL) return s;
  double d = p.d();
  double r, c, sn;
  kerr::weyl_to_rcs(d, s.x1, s.x2, r, c, sn);
  PhaseState b = s;
  b.chart = Chart::BL;
  b.x1 = r;
  b.x2 = std::atan2(sn, c);
  double rr, rt, zr, zt;
  weyl_jacobian(d, b.x1, b.x2, rr, rt, zr, zt);
  b.v1 = rr * s.v1 + zr * s.v2;
  b.v2 = rt * s.v1 + zt * s.v2;
  return b;
}

std::array<double, 4> hamilton_rhs_bl(const PhaseState& s, double q, const KerrParams& p) {
  double d = p.d();
  double r = s.x1, th = s.x2;
  double D = kerr::Delta(d, r), S2 = kerr::Sigma2(d, r, std::cos(th));
  D1 Hr = hamiltonian_bl<D1>(d, seed(r, true), seed(th, false), s.v1, s.v2, s.eps, s.ell, q);
  D1 Ht = hamiltonian_bl<D1>(d, seed(r, false), seed(th, true), s.v1, s.v2, s.eps, s.ell, q);
  return {D * s.v1 / S2, s.v2 / S2, -Hr.d, -Ht.d};
}

std::array<double, 4> hamilton_rhs_weyl(const PhaseState& s, const KerrParams& p) {
  double d = p.d();
  kerr::Metric<double> m = kerr::metric_weyl(d, s.x1, s.x2);
  D1 Hr = hamiltonian_weyl<D1>(d, seed(s.x1, true), seed(s.x2, false), s.v1, s.v2, s.eps, s.ell);
  D1 Hz = hamiltonian_weyl<D1>(d, seed(s.x1, false), seed(s.x2, true), s.v1, s.v2, s.eps, s.ell);
  return {s.v1 / m.e2lambda, s.v2 / m.e2lambda, -Hr.d, -Hz.d};
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::HorizonReached: return "horizon-reached";
    case Termination::Escaped: return "escaped";
    case Termination::SpanExhausted: return "span-exhausted";
    case Termination::StepFailure: return "step-failure";
  }
  return "?";
}

Trajectory integrate(const PhaseState& s0, double span, const KerrParams& p, const IntegrateOptions& opt) {
  double d = p.d();
  bool mino = opt.time == TimeParam::Mino;
  if (mino && s0.chart != Chart::BL) throw Error(ErrorCode::InvalidInput, "integrate: Mino time needs the BL chart");
  if (!(span > 0.0)) throw Error(ErrorCode::InvalidInput, "integrate: span must be positive");
  double r_plus = 1.0 + std::sqrt(1.0 - d * d);
  ConservedReport c0 = conserved_from_state(s0, p);
  double q0 = c0.cs.q;
  Chart chart = s0.chart;

  auto unpack = [&](const std::array<double, 5>& y, double t) {
    PhaseState s = s0;
    s.x1 = y[0];
    s.x2 = y[1];
    s.v1 = y[2];
    s.v2 = y[3];
    if (mino) {
      s.mino = s0.mino + t;
      s.tau = s0.tau + y[4];
    } else {
      s.tau = s0.tau + t;
      s.mino = s0.mino + y[4];
    }
    return s;
  };
  auto rhs = [&](double, const std::array<double, 5>& y, std::array<double, 5>& dy) {
    PhaseState s = s0;
    s.x1 = y[0];
    s.x2 = y[1];
    s.v1 = y[2];
    s.v2 = y[3];
    std::array<double, 4> f = chart == Chart::BL ? hamilton_rhs_bl(s, q0, p) : hamilton_rhs_weyl(s, p);
    double S2 = sigma2_at(s, d);
    double scale = mino ? S2 : 1.0;
    for (int i = 0; i < 4; ++i) dy[i] = scale * f[i];
    dy[4] = mino ? S2 : 1.0 / S2;
  };

  num::Dopri5Options dopt;
  dopt.rtol = opt.rtol;
  dopt.atol = opt.atol;
  dopt.max_steps = opt.max_steps;
  num::Dopri5<5> ode(rhs, dopt);
  ode.reset(0.0, {s0.x1, s0.x2, s0.v1, s0.v2, 0.0});

  Trajectory tr;
  auto observe = [&](const PhaseState& s) {
    ConservedReport c = conserved_from_state(s, p);
    tr.drift.q = std::max(tr.drift.q, std::fabs(c.cs.q - q0) / std::max(1.0, std::fabs(q0)));
    tr.drift.H = std::max(tr.drift.H, std::fabs(2.0 * c.H + 1.0));
    tr.drift.H_rel = std::max(tr.drift.H_rel, std::fabs(2.0 * c.H + 1.0) / hamiltonian_scale(s, d));
    double r = radius_of(s, d);
    tr.r_min = std::min(tr.r_min, r);
    tr.r_max = std::max(tr.r_max, r);
    double th = s.chart == Chart::BL ? s.x2 : to_bl(s, p).x2;
    tr.theta_min = std::min(tr.theta_min, th);
    tr.theta_max = std::max(tr.theta_max, th);
  };
  observe(s0);
  if (opt.record) tr.samples.push_back(s0);

  auto locate = [&](int comp, double ta, double tb) {
    auto g = [&](double t) { return ode.dense(t)[comp]; };
    return num::find_root(g, ta, tb);
  };

  std::array<double, 5> yprev = ode.y();
  tr.reason = Termination::SpanExhausted;
  try {
    while (ode.t() < span) {
      ode.step(span);
      ++tr.steps;
      const auto& y = ode.y();
      bool finite = true;
      for (double v : y) finite = finite && std::isfinite(v);
      if (!finite || (chart == Chart::Weyl && !(y[0] > 0.0))) {
        PhaseState last = unpack(yprev, ode.t_prev());
        if (radius_of(last, d) < r_plus + 1e-3) {
          tr.reason = Termination::HorizonReached;
        } else {
          tr.reason = Termination::StepFailure;
          tr.message = "non-finite state";
        }
        tr.final_state = last;
        tr.samples.push_back(last);
        return tr;
      }
      PhaseState s = unpack(y, ode.t());
      if (chart == Chart::BL) {
        for (int comp : {2, 3}) {
          double a = yprev[comp], b = y[comp];
          if (a != 0.0 && b != 0.0 && (a < 0.0) != (b < 0.0)) {
            double te = locate(comp, ode.t_prev(), ode.t());
            TurnEvent ev{te, ode.dense(te)[comp - 2], b > 0.0 ? 1 : -1};
            (comp == 2 ? tr.radial_turns : tr.polar_turns).push_back(ev);
            if (comp == 3) {
              tr.theta_min = std::min(tr.theta_min, ev.x);
              tr.theta_max = std::max(tr.theta_max, ev.x);
            } else {
              tr.r_min = std::min(tr.r_min, ev.x);
              tr.r_max = std::max(tr.r_max, ev.x);
            }
          }
        }
      }
      double r = radius_of(s, d);
      if (r < r_plus + opt.horizon_margin) {
        tr.reason = Termination::HorizonReached;
      } else {
        observe(s);
        if (r > opt.escape_radius) tr.reason = Termination::Escaped;
      }
      if (opt.record && (tr.steps % std::max<std::size_t>(1, opt.record_stride) == 0 ||
                         tr.reason != Termination::SpanExhausted))
        tr.samples.push_back(s);
      tr.final_state = s;
      if (tr.reason != Termination::SpanExhausted) return tr;
      yprev = y;
    }
  } catch (const Error& e) {
    tr.reason = Termination::StepFailure;
    tr.message = e.what();
    tr.final_state = unpack(ode.y(), ode.t());
    return tr;
  }
  if (opt.record && (tr.samples.empty() || tr.samples.back().tau != tr.final_state.tau))
    tr.samples.push_back(tr.final_state);
  return tr;
}

namespace {

//! Quotient of p by (x - r), remainder dropped.
num::Poly deflate(const num::Poly& p, double r) {
  std::size_t n = p.c.size();
  std::vector<double> q(n - 1);
  double acc = p.c[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) {
    q[k] = acc;
    acc = p.c[k] + acc * r;
  }
  return num::Poly(q);
}

double polish(const num::Poly& P, double x) {
  num::Poly dP = P.derivative();
  for (int i = 0; i < 4; ++i) {
    double f = P(x), g = dP(x);
    if (g == 0.0) break;
    double nx = x - f / g;
    if (!(std::fabs(nx - x) < 1e-6 * std::max(1.0, std::fabs(x)))) break;
    x = nx;
  }
  return x;
}

}  // namespace

OrbitPeriods periods(const ConservedSet& cs, const KerrParams& p) {
  RootSet rs = radial_roots(cs, p, false);
  num::Poly R = radial_coeffs(cs, p);
  // the trapped interval: the last pair of consecutive roots with R > 0 between them
  int k = -1;
  for (std::size_t i = 0; i + 1 < rs.roots.size(); ++i) {
    double mid = 0.5 * (rs.roots[i].r + rs.roots[i + 1].r);
    if (R(mid) > 0.0) k = static_cast<int>(i);
  }
  if (rs.has_multiple()) {
    for (const auto& rr : rs.roots)
      if (rr.multiplicity > 1) throw Error(ErrorCode::MarginalOrbit, "marginal orbit, period diverges");
  }
  if (k < 0) throw Error(ErrorCode::InvalidInput, "periods: no bounded radial interval");
  double r1 = polish(R, rs.roots[k].r), r2 = polish(R, rs.roots[k + 1].r);
  num::Poly Qd = deflate(deflate(R, r1), r2);
  double mid = 0.5 * (r1 + r2), half = 0.5 * (r2 - r1);
  auto fr = [&](double phi) {
    double r = mid - half * std::cos(phi);
    return 1.0 / std::sqrt(-Qd(r));
  };
  OrbitPeriods out;
  num::QuadResult qr = num::integrate(fr, 0.0, M_PI, 1e-13);
  out.T_r = 2.0 * qr.value;
  out.err_r = 2.0 * qr.error;

  double d = p.d();
  double A = d * d * (1.0 - cs.eps * cs.eps);
  double B = cs.q + A + cs.ell * cs.ell;
  double sq = std::sqrt(std::max(0.0, B * B - 4.0 * A * cs.q));
  double cp = 0.5 * (B + sq);
  double ym = cp > 0.0 ? cs.q / cp : 0.0;
  if (!(cp > 0.0) || ym > 1.0) throw Error(ErrorCode::InvalidInput, "periods: polar motion reaches the axis");
  auto ft = [&](double psi) {
    double sp = std::sin(psi);
    return 1.0 / std::sqrt(cp - A * ym * sp * sp);
  };
  num::QuadResult qt = num::integrate(ft, 0.0, 0.5 * M_PI, 1e-13);
  out.T_theta = 4.0 * qt.value;
  out.err_theta = 4.0 * qt.error;
  return out;
}

double measured_period(const std::vector<TurnEvent>& turns) {
  std::vector<double> t;
  for (const auto& e : turns)
    if (e.direction < 0) t.push_back(e.time);
  if (t.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return (t.back() - t.front()) / static_cast<double>(t.size() - 1);
}

OrbitClass fate(const Trajectory& t, const FateOptions& opt) {
  switch (t.reason) {
    case Termination::HorizonReached: return OrbitClass::Plunging;
    case Termination::Escaped: return OrbitClass::Scattered;
    case Termination::StepFailure: return OrbitClass::Indeterminate;
    case Termination::SpanExhausted: break;
  }
  std::size_t osc = t.radial_turns.size() / 2;
  bool inside = t.r_min >= opt.r_lo && t.r_max <= opt.r_hi;
  if (osc >= opt.min_radial_oscillations && inside) return OrbitClass::Trapped;
  return OrbitClass::Indeterminate;
}

}  // namespace kerrshell
