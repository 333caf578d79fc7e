//========================================================================================
// kerrshell: distribution-function ansatz, momentum domain, stress-energy components and
// the source terms F_1..F_4 of the reduced field equations
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#ifndef KERRSHELL_VLASOV_MATTER_HPP_
#define KERRSHELL_VLASOV_MATTER_HPP_

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "kerrshell/zvc_analysis.hpp"

// M = 1 units. Fields live on the Weyl half-plane (rho, z).

namespace kerrshell {

//--------------------------------------------------------------------------------------
// Profile and cut-off
//--------------------------------------------------------------------------------------

//! Profile Phi(eps, ell; delta) supported on a union of rectangles inside A_bound.
//! The callables are only evaluated inside the support rectangles.
struct ProfilePhi {
  using Fn = std::function<double(double eps, double ell, double delta)>;
  Fn value;
  Fn d_eps;    //!< optional
  Fn d_ell;    //!< optional
  Fn d_delta;  //!< optional
  std::vector<BoundRect> support;
  double delta = 0.0;
  std::string name = "custom";

  bool in_support(double eps, double ell) const;
  double operator()(double eps, double ell) const;
  //! Same profile at another delta.
  ProfilePhi at(double new_delta) const;
};

//! delta (eps2 - eps)^2 (eps - eps1)^2 (ell2 - ell)^2 (ell - ell1)^2 on the rectangle.
ProfilePhi default_profile(const BoundRect& rect, double delta);

//! Quintic smoothstep: 0 for s < -eta, 1 for s >= 0.
double smooth_cutoff(double s, double eta);

//! Psi_eta(rho, eps, ell) = chi_eta(rho - rho_1(eps, ell)) with rho_1 from the Kerr
//! trapped extent. rho_1 is tabulated on each support rectangle and polished by Newton
//! on R(r; eps, ell, q = 0) at every call.
class CutoffPsi {
 public:
  CutoffPsi() = default;
  CutoffPsi(const std::vector<BoundRect>& support, const KerrParams& p, double eta, int table = 17);
  double eta() const { return eta_; }
  double rho1(double eps, double ell) const;
  double operator()(double rho, double eps, double ell) const;
  //! Smallest and largest rho_1 over the tabulated rectangles.
  double rho1_min() const { return rho1_min_; }
  double rho1_max() const { return rho1_max_; }

 private:
  struct Table {
    BoundRect rect;
    int n = 0;
    std::vector<double> r1;  //!< BL radius of the middle root, row-major n x n
  };
  KerrParams p_{1.0, 0.0};
  double eta_ = 0.0;
  double rho1_min_ = 0.0, rho1_max_ = 0.0;
  std::vector<Table> tables_;
};

//! Cut-off with eta taken as the smallest shell-box eta over the support rectangles.
CutoffPsi make_cutoff(const ProfilePhi& profile, const KerrParams& p);

//--------------------------------------------------------------------------------------
// Pointwise metric and momentum domain
//--------------------------------------------------------------------------------------

//! Metric functions at a point, Kerr or perturbed through (Theta', sigma', X') and lambda'.
struct PointMetric {
  double rho, z;
  double V, W, X, sigma, e2lambda;
  double omega() const { return -W / X; }
};

//! Perturbed metric: X = X_K (1 + X'), sigma = rho (1 + sigma'), W/X = W_K/X_K + Theta',
//! lambda = lambda_K + lambda', V = (sigma^2 - W^2) / X. Requires rho > 0.
PointMetric point_metric(double rho, double z, const KerrParams& p, const MetricPerturbation* h = nullptr,
                         double lambda0 = 0.0);

//! D(rho, z) = {E >= sigma/sqrt(X), |L| <= L~(E)}.
struct MomentumDomain {
  double E_min;     //!< sigma / sqrt(X)
  double sqrtX_rho; //!< sqrt(X) / rho (the axis factor sqrt(X_A) on rho = 0)
  double X_sigma2;  //!< X / sigma^2
  double L_tilde(double E) const;
  double E_tilde(double L) const;
  bool contains(double E, double L) const;
};

MomentumDomain momentum_domain(const PointMetric& m);
//! On the axis the smooth extension X = rho^2 X_A is used (Kerr or perturbed).
MomentumDomain momentum_domain(double rho, double z, const KerrParams& p, const MetricPerturbation* h = nullptr);

//! ell interval of one support rectangle met by D(rho, z); eps runs over
//! [max(eps1, E_ell(rho, z)), eps2] for every ell in the piece.
struct SupportPiece {
  int rect;
  double ell_lo, ell_hi;
  std::vector<double> breaks;  //!< ell values where E_ell = eps1 (integrand kinks)
};

struct SupportIntersection {
  std::vector<SupportPiece> pieces;
  bool empty() const { return pieces.empty(); }
};

//! Intersection of D(rho, z) with supp Phi and supp Psi. Empty on rho = 0 and wherever
//! the cut-off vanishes identically.
SupportIntersection support_intersection(const PointMetric& m, const ProfilePhi& profile, const CutoffPsi& psi);

//! ell values with E_ell(rho, z) = c (zero, one or two).
std::vector<double> ell_at_energy(const PointMetric& m, double c);

//! The integrand identity -X eps^2 - 2 W ell eps + V ell^2 + sigma^2 J = -sigma^2, returned
//! as the residual (lhs + sigma^2) for E, L at the point.
double trace_integrand_residual(const PointMetric& m, double E, double L);

//--------------------------------------------------------------------------------------
// Stress-energy and source terms
//--------------------------------------------------------------------------------------

struct StressComponents {
  double T_tt = 0.0, T_tphi = 0.0, T_phiphi = 0.0, T_rhorho = 0.0, T_zz = 0.0;
  double trace = 0.0;         //!< g^{ab} T_ab from the components
  double trace_direct = 0.0;  //!< -(2 pi rho / sigma) int Phi Psi dE dL
  double error = 0.0;         //!< quadrature error estimate (max over moments)
};

struct SourceTerms {
  double F1 = 0.0, F2 = 0.0, F3 = 0.0, F4 = 0.0;
  //! The closed forms as printed, kept for comparison with the defining combinations.
  double F1_printed = 0.0, F2_printed = 0.0, F3_printed = 0.0, F4_printed = 0.0;
};

struct MatterPoint {
  StressComponents T;
  SourceTerms F;
};

struct MatterOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
};

MatterPoint matter_at(const PointMetric& m, const ProfilePhi& profile, const CutoffPsi& psi,
                      const MatterOptions& opt = {});
MatterPoint matter_at(double rho, double z, const KerrParams& p, const ProfilePhi& profile, const CutoffPsi& psi,
                      const MetricPerturbation* h = nullptr, double lambda0 = 0.0, const MatterOptions& opt = {});

//! Defining combinations of the source terms in terms of the stress components.
SourceTerms source_from_stress(const StressComponents& T, const PointMetric& m);

//! Independent cross-check: the stress components by quadrature over D(rho, z) in the
//! (E, L) variables, with L = L~(E) sin(u) removing the square-root endpoint.
StressComponents stress_by_momentum_domain(const PointMetric& m, const ProfilePhi& profile, const CutoffPsi& psi,
                                           double rel_tol = 1e-9);

//--------------------------------------------------------------------------------------
// Gridded fields
//--------------------------------------------------------------------------------------

//! Uniform Weyl grid; values are row-major with rho fastest: v[j * nrho + i].
struct GridSpec {
  int nrho = 128, nz = 128;
  double rho_lo = 0.0, rho_hi = 1.0, z_lo = -1.0, z_hi = 1.0;
  double drho() const { return (rho_hi - rho_lo) / (nrho - 1); }
  double dz() const { return (z_hi - z_lo) / (nz - 1); }
  double rho(int i) const { return rho_lo + drho() * i; }
  double z(int j) const { return z_lo + dz() * j; }
};

//! Grid over the shell box with a margin of `margin` cells (z symmetric).
GridSpec shell_grid(const ShellBox& box, int nrho, int nz, int margin = 2);

struct MatterFields {
  GridSpec grid;
  double delta = 0.0;
  std::vector<double> T_tt, T_tphi, T_phiphi, T_rhorho, T_zz, F1, F2, F3, F4;
  double max_error = 0.0;
  static const std::vector<std::string>& names();
  const std::vector<double>& field(const std::string& name) const;
};

//! Evaluates every grid point (in parallel over rows). h and lambda0 may be null.
MatterFields matter_fields(const GridSpec& grid, const KerrParams& p, const ProfilePhi& profile, const CutoffPsi& psi,
                           const MetricPerturbation* h = nullptr, const std::vector<double>* lambda0 = nullptr,
                           const MatterOptions& opt = {}, int threads = 0);

}  // namespace kerrshell

#endif  // KERRSHELL_VLASOV_MATTER_HPP_
