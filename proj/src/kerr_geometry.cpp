//========================================================================================
// kerrshell: Kerr background in Boyer-Lindquist and Weyl coordinates
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#include "kerrshell/kerr_geometry.hpp"

#include <string>

namespace kerrshell {

KerrParams KerrParams::make(double M, double a) {
  if (!(M > 0.0) || !std::isfinite(M))
    throw Error(ErrorCode::InvalidInput, "mass must be positive, got " + std::to_string(M));
  if (!std::isfinite(a) || std::fabs(a) >= M)
    throw Error(ErrorCode::InvalidInput, "extremal/super-extremal unsupported (|a| >= M)");
  return KerrParams{M, a};
}

std::pair<double, double> horizon_radii(const KerrParams& p) {
  (void)KerrParams::make(p.M, p.a);
  return {p.r_minus(), p.r_plus()};
}

WeylPoint bl_to_weyl(const KerrParams& p, BLPoint q) {
  if (!(q.r > p.r_plus())) throw Error(ErrorCode::InvalidInput, "bl_to_weyl: r must exceed r_plus");
  double D = q.r * q.r - 2.0 * p.M * q.r + p.a * p.a;
  return {std::sqrt(D) * std::sin(q.theta), (q.r - p.M) * std::cos(q.theta)};
}

BLPoint weyl_to_bl(const KerrParams& p, WeylPoint w) {
  if (!(w.rho > 0.0)) throw Error(ErrorCode::ChartBoundary, "weyl_to_bl: rho = 0 is the axis/horizon");
  double r, c, s;
  kerr::weyl_to_rcs(p.d(), w.rho / p.M, w.z / p.M, r, c, s);
  return {r * p.M, std::atan2(s, c)};
}

namespace {
MetricComponents scale(const kerr::Metric<double>& m, double M) {
  return {m.V, m.W * M, m.X * M * M, m.e2lambda, m.sigma * M};
}
}  // namespace

MetricComponents metric_bl(const KerrParams& p, BLPoint q) {
  if (!(q.r > p.r_plus())) throw Error(ErrorCode::InvalidInput, "metric_bl: r must exceed r_plus");
  double r = q.r / p.M;
  return scale(kerr::metric_rcs(p.d(), r, std::cos(q.theta), std::sin(q.theta)), p.M);
}

MetricComponents metric_weyl(const KerrParams& p, WeylPoint w) {
  if (!(w.rho > 0.0)) throw Error(ErrorCode::ChartBoundary, "metric_weyl: rho = 0");
  return scale(kerr::metric_weyl(p.d(), w.rho / p.M, w.z / p.M), p.M);
}

double ergosphere_radius(const KerrParams& p, double theta) {
  double c = std::cos(theta);
  return p.M + std::sqrt(p.M * p.M - p.a * p.a * c * c);
}

WeylPoint ergosphere_weyl(const KerrParams& p, double theta) {
  double r = ergosphere_radius(p, theta);
  double D = r * r - 2.0 * p.M * r + p.a * p.a;
  return {std::sqrt(std::max(D, 0.0)) * std::sin(theta), (r - p.M) * std::cos(theta)};
}

double axis_factor(const KerrParams& p, WeylPoint w) {
  double d = p.d();
  double rho = w.rho / p.M, z = w.z / p.M;
  double beta = std::sqrt(1.0 - d * d);
  double Rp = std::sqrt(rho * rho + (z - beta) * (z - beta));
  double Rm = std::sqrt(rho * rho + (z + beta) * (z + beta));
  double rm1 = 0.5 * (Rp + Rm);
  double r = 1.0 + rm1;
  double c = (Rm - Rp) / (2.0 * beta);
  double D = (rm1 - beta) * (rm1 + beta);
  if (!(D > 0.0)) throw Error(ErrorCode::ChartBoundary, "axis_factor: horizon or pole");
  // X = s^2 Pi / Sigma^2 and s^2 = rho^2 / Delta, so X / rho^2 = Pi / (Delta Sigma^2)
  double s2 = rho * rho / D;
  double S2 = r * r + d * d * c * c;
  double r2d2 = r * r + d * d;
  double Pi = r2d2 * r2d2 - d * d * s2 * D;
  return Pi / (D * S2);
}

WeylPoint pole_chart_to_weyl(const KerrParams& p, double s, double chi, bool north) {
  double beta = p.beta();
  return {s * chi, 0.5 * (chi * chi - s * s) + (north ? beta : -beta)};
}

std::pair<double, double> weyl_to_pole_chart(const KerrParams& p, WeylPoint w, bool north) {
  double zeta = w.z - (north ? p.beta() : -p.beta());
  // s^2 and chi^2 are the roots of x^2 + 2 zeta x - rho^2 = 0 (parabolic coordinates)
  double R = std::sqrt(w.rho * w.rho + zeta * zeta);
  double chi = std::sqrt(std::max(0.0, R + zeta));
  double s = std::sqrt(std::max(0.0, R - zeta));
  return {s, chi};
}

}  // namespace kerrshell
