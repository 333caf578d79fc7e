//========================================================================================
// kerrshell: renormalised field quantities on the Weyl half-plane, the R^4 Green
// potential, line integrals for B, Theta and lambda, the (X, Y) residual and a damped
// Picard sweep at small delta
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#ifndef KERRSHELL_FIELD_SOLVER_HPP_
#define KERRSHELL_FIELD_SOLVER_HPP_

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "kerrshell/dual.hpp"
#include "kerrshell/vlasov_matter.hpp"

// M = 1 units. All fields are sampled on a uniform GridSpec with rho_lo = 0 (the axis and
// horizon segment) and values stored at v[j * nrho + i].

namespace kerrshell {

//--------------------------------------------------------------------------------------
// Fields
//--------------------------------------------------------------------------------------

//! Scalar samples on a (rho, z) grid with bilinear interpolation. `decay` is the
//! exponent k of the declared decay class |f| = O(r^-k) at infinity.
struct AxiScalarField {
  GridSpec grid;
  std::vector<double> v;
  double decay = 0.0;

  AxiScalarField() = default;
  explicit AxiScalarField(const GridSpec& g, double decay_exponent = 0.0);
  static AxiScalarField sample(const GridSpec& g, const std::function<double(double, double)>& f,
                               double decay_exponent = 0.0);

  double& operator()(int i, int j) { return v[static_cast<size_t>(j) * grid.nrho + i]; }
  double operator()(int i, int j) const { return v[static_cast<size_t>(j) * grid.nrho + i]; }
  //! Bilinear interpolation. Throws ChartBoundary outside the grid box.
  double at(double rho, double z) const;
  //! Sample through a pole chart (s, chi) of the given Kerr background.
  double at_pole_chart(const KerrParams& p, double s, double chi, bool north) const;
  double max_abs() const;
};

//! One-form c_rho d rho + c_z d z. For B the rho component is never populated
//! (gauge B_rho = 0) and B_z vanishes on the axis.
struct OneFormField {
  AxiScalarField rho, z;
  OneFormField() = default;
  explicit OneFormField(const GridSpec& g) : rho(g), z(g) {}
};

//--------------------------------------------------------------------------------------
// Linear solves
//--------------------------------------------------------------------------------------

//! Inverse of the axisymmetric R^4 Laplacian d_rr + (2/rho) d_r + d_zz as a quadrature
//! operator. H is read as its bilinear interpolant; the angular integral is done in
//! closed form and the logarithmic singularity by graded subdivision. Weights use the
//! z-translation invariance of the kernel.
class GreenR4 {
 public:
  explicit GreenR4(const GridSpec& g);
  //! Throws InvalidInput when H is nonzero on the outer boundary ring.
  AxiScalarField apply(const AxiScalarField& H) const;
  const GridSpec& grid() const { return g_; }

 private:
  GridSpec g_;
  std::vector<double> w_;  //!< [(i * nrho + i') * nz + k], k = |j - j'|
};

AxiScalarField green_poisson_r4(const AxiScalarField& H);
//! Five-point R^4 Laplacian on interior nodes (zero on the boundary ring and axis).
AxiScalarField laplacian_r4(const AxiScalarField& f);

//! Cumulative integral F_k = int_{x_0}^{x_k} f with sixth-order local Lagrange weights.
//! Intervals whose two end samples are both exactly zero contribute nothing, so the
//! result stays exactly zero ahead of a compact support.
std::vector<double> cumulative_integral(const std::vector<double>& f, double h);

//! B_z(rho, z) = int_0^rho H(t, z) dt.
OneFormField integrate_B(const AxiScalarField& H);

//! The "outer" diagnostics only use nodes with rho >= kOuterRadius. This keeps them
//! away from the poles, where the grid does not resolve the one-form near the axis.
constexpr double kOuterRadius = 4.0;

struct ThetaResult {
  AxiScalarField theta;
  double closedness = 0.0;        //!< max |d_z H_rho - d_rho H_z| / max |dH|
  double closedness_outer = 0.0;  //!< the same over nodes with rho >= kOuterRadius
};
//! Theta(rho, z) = -int_rho^inf H_rho with the tail beyond the grid taken from the rho^-3
//! decay class. Throws NoConvergence when closedness exceeds closed_tol.
ThetaResult integrate_theta(const OneFormField& H, double closed_tol = 1e-2);

//--------------------------------------------------------------------------------------
// Kerr background and the lambda one-form
//--------------------------------------------------------------------------------------

//! Kerr data entering the renormalised equations at one point with rho > 0:
//! grad log X_K, a_K = grad Y_K / X_K and rho / X_K.
template <class T>
struct KerrBackground {
  T XK, l_rho, l_z, a_rho, a_z, rho_over_XK, e2lambda;
};

//! grad Y_K follows from (W/X)_rho = -(rho / X^2) d_z Y and (W/X)_z = (rho / X^2) d_rho Y.
template <class T>
KerrBackground<T> kerr_background(double d, const T& rho, const T& z) {
  using D = Dual<T>;
  kerr::Metric<D> mr = kerr::metric_weyl(d, D(rho, T(1.0)), D(z, T(0.0)));
  kerr::Metric<D> mz = kerr::metric_weyl(d, D(rho, T(0.0)), D(z, T(1.0)));
  D wr = mr.W / mr.X, wz = mz.W / mz.X;
  KerrBackground<T> b;
  b.XK = mr.X.v;
  b.l_rho = mr.X.d / b.XK;
  b.l_z = mz.X.d / b.XK;
  T x_rho = b.XK / rho;
  b.a_rho = x_rho * wz.d;
  b.a_z = -(x_rho * wr.d);
  b.rho_over_XK = rho / b.XK;
  b.e2lambda = mr.e2lambda.v;
  return b;
}

//! Pointwise data for the alpha one-form: sigma with first and second derivatives,
//! X with first derivatives and the twist theta.
struct AlphaInputs {
  double sigma, s_rho, s_z, s_rhorho, s_zz, s_rhoz;
  double X, X_rho, X_z;
  double th_rho, th_z;
};
//! alpha with d lambda = alpha - 1/2 d log X (valid where |d sigma| > 0 and T_rhorho = T_zz,
//! T_rhoz = 0, which holds for the Vlasov matter).
std::array<double, 2> alpha(const AlphaInputs& in);

//! Perturbation data at a node for alpha - alpha_K without cancellation: s = sigma' and
//! its derivatives, m = grad log(1 + X'), u = theta / X - a_K, and the Kerr background.
struct AlphaDelta {
  double rho;
  double s, s_rho, s_z, s_rhorho, s_zz, s_rhoz;
  double m_rho, m_z, u_rho, u_z;
  double l_rho, l_z, a_rho, a_z;
};
std::array<double, 2> alpha_minus_kerr(const AlphaDelta& in);

//--------------------------------------------------------------------------------------
// State, residual and sweep
//--------------------------------------------------------------------------------------

struct SweepNorms {
  double res_X = 0.0, res_Y = 0.0;  //!< interior max |residual| before the (X, Y) step
  double closedness = 0.0;          //!< theta one-form closedness (relative)
  double path_residual = 0.0;       //!< max |lambda_A - lambda_B|
  double path_residual_rel = 0.0;   //!< the same divided by max |lambda'|
  double closedness_outer = 0.0;    //!< closedness over rho >= kOuterRadius
  double path_residual_outer_rel = 0.0;  //!< relative path residual over rho >= kOuterRadius
  double state_norm = 0.0;          //!< max over all fields after the sweep
  bool diverged = false;
};

//! (sigma', B, X', Y', Theta', lambda') on one grid with Y = Y_K + X_K Y'.
struct RenormalizedState {
  GridSpec grid;
  AxiScalarField sigma0, X0, Y0, Theta0, lambda0;
  OneFormField B;
  double delta = 0.0;
  int sweep = 0;
  SweepNorms norms;

  static RenormalizedState zero(const GridSpec& g);
  static const std::vector<std::string>& field_names();
  const AxiScalarField& field(const std::string& name) const;
  AxiScalarField& field(const std::string& name);
  double norm() const;
  //! Bilinear views of (Theta', sigma', X') for the matter and ZVC modules.
  MetricPerturbation perturbation() const;
};

//! Residuals of the X equation (divided by X) and of the twist equation in divergence
//! form, scaled by X_K / rho. Both are written as differences from the Kerr background,
//! so the zero state with no matter gives exactly zero. Boundary rows: Dirichlet on the
//! outer ring, regularity on rho = 0 (X' even extension, Y' = 0).
struct XYResidual {
  AxiScalarField X, Y;
  double norm_X = 0.0, norm_Y = 0.0;  //!< interior max
};
XYResidual residual_XY(const RenormalizedState& s, const KerrParams& p, const AxiScalarField* F1 = nullptr);

struct LambdaResult {
  AxiScalarField lambda0;  //!< from the rho-rays path
  double path_residual = 0.0;
  double path_residual_rel = 0.0;
  //! Relative path residual over rho >= kOuterRadius, where both integration rectangles
  //! stay clear of the horizon and poles.
  double path_residual_outer_rel = 0.0;
  double min_grad_sigma = 0.0;
};
//! lambda' from alpha - alpha_K - 1/2 d log(1 + X'), zero at the far corner (rho_hi, z_lo).
//! Path A runs along rho = rho_hi in z and then inward along rho; path B runs inward
//! along z = z_lo and then in z. Throws InvalidInput when |d sigma| < 1/2 somewhere.
LambdaResult integrate_lambda(const RenormalizedState& s, const KerrParams& p);

//! The one-form H_Theta with d Theta' = H_Theta for the current (sigma', X', Y', B).
OneFormField theta_source(const RenormalizedState& s, const KerrParams& p);

enum class Preconditioner {
  KerrLinearized,  //!< discrete linearisation of residual_XY at Kerr (sparse LU)
  FlatLaplacian    //!< flat R^3 Laplacian with the same boundary rows
};

struct SweepOptions {
  double damping = 0.5;
  double ball = 1e-2;  //!< divergence is flagged when the state norm exceeds 2 * ball
  Preconditioner preconditioner = Preconditioner::KerrLinearized;
  MatterOptions matter{};
};

//! Owns everything that depends only on (grid, Kerr parameters, profile): background
//! samples, the Green operator and the factorised preconditioner.
class FieldSolver {
 public:
  FieldSolver(const GridSpec& g, const KerrParams& p, const ProfilePhi& profile, const CutoffPsi& psi,
              const SweepOptions& opt = {});
  ~FieldSolver();
  FieldSolver(const FieldSolver&) = delete;
  FieldSolver& operator=(const FieldSolver&) = delete;

  const GridSpec& grid() const { return g_; }
  const ProfilePhi& profile() const { return profile_; }
  //! One sweep in the order sigma', B, (X', Y'), Theta', lambda'.
  RenormalizedState sweep(const RenormalizedState& s) const;
  //! Matter fields for the given state.
  MatterFields matter(const RenormalizedState& s) const;

 private:
  struct Linear;
  GridSpec g_;
  KerrParams p_;
  ProfilePhi profile_;
  CutoffPsi psi_;
  SweepOptions opt_;
  GreenR4 green_;
  std::unique_ptr<Linear> lin_;
};

//! Grid for the sweep: rho in [0, R], z in [-R, R] with R = scale * max(rho_max, |z|) of the
//! shell box.
GridSpec field_grid(const ShellBox& box, int nrho, int nz, double scale = 2.0);

}  // namespace kerrshell

#endif  // KERRSHELL_FIELD_SOLVER_HPP_
