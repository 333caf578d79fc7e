//========================================================================================
// kerrshell: Kerr background in Boyer-Lindquist and Weyl coordinates
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#ifndef KERRSHELL_KERR_GEOMETRY_HPP_
#define KERRSHELL_KERR_GEOMETRY_HPP_

#include <cmath>
#include <utility>

#include "kerrshell/dual.hpp"
#include "kerrshell/errors.hpp"

namespace kerrshell {

//! Black-hole parameters in geometric units. Only the sub-extremal range 0 < |a| < M
//! is accepted by make(); a = 0 (Schwarzschild) is accepted for testing as well.
struct KerrParams {
  double M = 1.0;
  double a = 0.0;

  //! Validated construction. Throws InvalidInput for M <= 0 or |a| >= M.
  static KerrParams make(double M, double a);
  //! Normalised copy with M = 1 (the library works in these units internally).
  KerrParams unit() const { return KerrParams{1.0, a / M}; }

  double d() const { return a / M; }
  double beta() const { return std::sqrt(M * M - a * a); }
  double r_plus() const { return M + beta(); }
  double r_minus() const { return M - beta(); }
};

//! Point (r, theta) of the domain of outer communication.
struct BLPoint {
  double r = 0.0;
  double theta = 0.0;
};

//! Point (rho, z) of the Weyl half-plane. rho = 0 is the axis (|z| > beta), the
//! horizon (|z| < beta) or a pole (|z| = beta).
struct WeylPoint {
  double rho = 0.0;
  double z = 0.0;
};

//! Metric g = -V dt^2 + 2W dt dphi + X dphi^2 + e^{2 lambda}(drho^2 + dz^2), sigma^2 = XV + W^2.
struct MetricComponents {
  double V = 0.0;
  double W = 0.0;
  double X = 0.0;
  double e2lambda = 0.0;
  double sigma = 0.0;
  double omega() const { return -W / X; }
};

std::pair<double, double> horizon_radii(const KerrParams& p);
WeylPoint bl_to_weyl(const KerrParams& p, BLPoint q);
BLPoint weyl_to_bl(const KerrParams& p, WeylPoint w);
MetricComponents metric_bl(const KerrParams& p, BLPoint q);
MetricComponents metric_weyl(const KerrParams& p, WeylPoint w);
//! Outer boundary of the ergoregion, r = M + sqrt(M^2 - a^2 cos^2 theta).
double ergosphere_radius(const KerrParams& p, double theta);
WeylPoint ergosphere_weyl(const KerrParams& p, double theta);
//! Smooth axis factor X_A = X / rho^2 (finite and positive on the axis |z| > beta).
double axis_factor(const KerrParams& p, WeylPoint w);

//! Near-pole charts rho = s chi, z = (chi^2 - s^2)/2 +/- beta (north: +).
WeylPoint pole_chart_to_weyl(const KerrParams& p, double s, double chi, bool north);
std::pair<double, double> weyl_to_pole_chart(const KerrParams& p, WeylPoint w, bool north);

//----------------------------------------------------------------------------------------
// Templated kernels in M = 1 units. T is double or a (nested) Dual.
//----------------------------------------------------------------------------------------
namespace kerr {

template <class T> T Delta(double d, const T& r) { return r * r - 2.0 * r + d * d; }
template <class T> T Sigma2(double d, const T& r, const T& c) { return r * r + d * d * (c * c); }
template <class T> T Pi(double d, const T& r, const T& s) {
  T r2d2 = r * r + d * d;
  return r2d2 * r2d2 - d * d * (s * s) * Delta(d, r);
}

template <class T>
struct Metric {
  T V, W, X, e2lambda, sigma;
};

//! Metric functions at (r, cos theta, sin theta).
template <class T>
Metric<T> metric_rcs(double d, const T& r, const T& c, const T& s) {
  using std::sqrt;
  T S2 = Sigma2(d, r, c);
  T D = Delta(d, r);
  T s2 = s * s;
  Metric<T> m;
  m.V = 1.0 - 2.0 * r / S2;
  m.W = -2.0 * d * r * s2 / S2;
  m.X = s2 * Pi(d, r, s) / S2;
  T rm1 = r - 1.0;
  m.e2lambda = S2 / (rm1 * rm1 * s2 + c * c * D);
  m.sigma = sqrt(D) * s;
  return m;
}

//! Inverse Weyl map: (rho, z) -> (r, cos theta, sin theta), via the distances to the poles.
template <class T>
void weyl_to_rcs(double d, const T& rho, const T& z, T& r, T& c, T& s) {
  using std::sqrt;
  double beta = std::sqrt(1.0 - d * d);
  T Rp = sqrt(rho * rho + (z - beta) * (z - beta));
  T Rm = sqrt(rho * rho + (z + beta) * (z + beta));
  T rm1 = 0.5 * (Rp + Rm);
  r = 1.0 + rm1;
  c = (Rm - Rp) / (2.0 * beta);
  // sin theta = rho / sqrt(Delta) with Delta = (r-1)^2 - beta^2 = (rm1 - beta)(rm1 + beta)
  T D = (rm1 - beta) * (rm1 + beta);
  s = rho / sqrt(D);
}

template <class T>
Metric<T> metric_weyl(double d, const T& rho, const T& z) {
  T r, c, s;
  weyl_to_rcs(d, rho, z, r, c, s);
  Metric<T> m = metric_rcs(d, r, c, s);
  m.sigma = rho;  // exact for Kerr
  return m;
}

}  // namespace kerr
}  // namespace kerrshell

#endif  // KERRSHELL_KERR_GEOMETRY_HPP_
