//========================================================================================
// kerrshell: effective potential in the Weyl half-plane, zero-velocity curves, critical
// points, the trapped-shell box and the perturbed curve solve
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#ifndef KERRSHELL_ZVC_ANALYSIS_HPP_
#define KERRSHELL_ZVC_ANALYSIS_HPP_

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "kerrshell/orbit_families.hpp"

// M = 1 units. (rho, z) are Weyl coordinates of the quotient half-plane.

namespace kerrshell {

//! Smooth renormalised fields (Theta, sigma, X) with first derivatives. Each callable
//! returns {value, d/drho, d/dz}. Empty callables mean the zero field.
struct MetricPerturbation {
  using Field = std::function<std::array<double, 3>(double rho, double z)>;
  Field theta;
  Field sigma;
  Field X;
  //! Box on which the sup norm is sampled.
  double rho_lo = 0.0, rho_hi = 20.0, z_lo = -20.0, z_hi = 20.0;

  bool is_zero() const { return !theta && !sigma && !X; }
  //! Sup of |values| and |first derivatives| over an n x n sample of the box.
  double norm(int n = 64) const;
  //! Smallest 1 + X and 1 + sigma over the same sample (both must stay positive).
  double min_one_plus(int n = 64) const;
};

//! Smooth compactly supported bump c * (1 - s^2)^3 with s = |x - x0| / w, as a field.
MetricPerturbation::Field bump_field(double c, double rho0, double z0, double width);

struct PotentialValue {
  double E;
  double E_rho;
  double E_z;
};

//! E(rho, z) = -(W/X) ell + (sigma/X) sqrt(ell^2 + X), perturbed through X = X_K (1 + X'),
//! sigma = rho (1 + sigma'), W/X = W_K/X_K + Theta' when h is given.
double effective_potential(double rho, double z, double ell, const KerrParams& p,
                           const MetricPerturbation* h = nullptr);
PotentialValue effective_potential_grad(double rho, double z, double ell, const KerrParams& p,
                                        const MetricPerturbation* h = nullptr);
//! J = -1 + (X eps^2 + 2 W eps ell - V ell^2) / sigma^2 (Kerr).
double turning_point_residual(double rho, double z, const ConservedSet& cs, const KerrParams& p);

enum class ComponentTag { Trapped, Absorbed, Scattered, SelfIntersecting, OffEquatorPair };
const char* component_tag_name(ComponentTag t);

//! Region of the five-region cover of the half-plane a perturbed vertex belongs to
//! (0 = absorbed neighbourhood, 1/2 = upper/lower caps, 3/4 = inner/outer sides).
struct CurveComponent {
  ComponentTag tag;
  bool closed = false;
  std::vector<WeylPoint> points;
  std::vector<int> region;  //!< filled by trace_zvc_perturbed only
};

struct ZeroVelocityCurve {
  double eps = 0.0, ell = 0.0;
  std::vector<CurveComponent> components;
  std::vector<WeylPoint> singular_points;  //!< double/triple equatorial roots
  double vertex_tol = 1e-10;
  double max_residual = 0.0;  //!< max |E - eps| over vertices with rho > 0
  bool trapped() const;
  const CurveComponent* find(ComponentTag t) const;
};

struct TraceOptions {
  int base_points = 256;       //!< per r-interval before refinement
  double max_segment = 0.02;   //!< refine segments longer than this (Weyl length)
  int max_refine = 8;
  double r_truncate = 50.0;    //!< outer radius for unbounded components
  double vertex_tol = 1e-10;
};

//! Kerr zero-velocity curve assembled from the curve theta(r) of qbar(r) = g(theta).
ZeroVelocityCurve trace_zvc(double eps, double ell, const KerrParams& p, const TraceOptions& opt = {});

struct PerturbOptions {
  double delta0 = 0.05;  //!< ball radius; Newton steps are clamped at delta0 / 2
  double tol = 1e-13;
  int max_iter = 40;
  double z_bar_frac = 0.5;  //!< cap threshold as a fraction of z_max
};
//! Perturbed curve: Newton along the Kerr normal from every Kerr vertex (rho > 0).
//! Requires h.norm() < delta0. Throws NoConvergence when Newton fails.
ZeroVelocityCurve trace_zvc_perturbed(const ZeroVelocityCurve& kerr_curve, const MetricPerturbation& h,
                                      const KerrParams& p, const PerturbOptions& opt = {},
                                      double* max_displacement = nullptr);

enum class CriticalKind { Saddle, Minimum };
struct CriticalPoint {
  double rho;
  double z;
  CriticalKind kind;
  Branch branch;
};
//! Equatorial critical points of E for the given ell (empty below |ell_min|).
std::vector<CriticalPoint> critical_points(double ell, const KerrParams& p);

//! Product rectangle [eps1, eps2] x [ell1, ell2] inside A_bound.
struct BoundRect {
  double eps1, eps2, ell1, ell2;
};

struct ShellBox {
  double rho_min, rho_max, z_min, z_max;
  double rho0_max;  //!< largest rho of the absorbed components
  double eta;       //!< half the smallest gap rho_1 - rho_0 over the rectangle
  double rho_mb;    //!< rho^{mb} of the rectangle's branch
  Branch branch;
};
//! Shell box over the rectangle by grid search plus local refinement.
//! Throws InvalidInput when the rectangle leaves A_bound.
ShellBox shell_support(const BoundRect& b, const KerrParams& p, const MetricPerturbation* h = nullptr,
                       int grid = 9);

//! Gap quantities of one (eps, ell) pair on the Kerr background.
struct TrappedExtent {
  double rho0_max;  //!< outermost rho of the absorbed component
  double rho1, rho2;
  double z_max;
  double rho_at_zmax;
};
TrappedExtent trapped_extent(double eps, double ell, const KerrParams& p);

//! Spin at which the direct marginally bound shell floor reaches the ergosphere.
double ergosphere_touch_spin();

//! Hausdorff distance between two vertex sets.
double hausdorff(const std::vector<WeylPoint>& a, const std::vector<WeylPoint>& b);
//! True when the closed polygon has no crossing edges.
bool polygon_is_simple(const std::vector<WeylPoint>& pts);

}  // namespace kerrshell

#endif  // KERRSHELL_ZVC_ANALYSIS_HPP_
