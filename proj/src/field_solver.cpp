//========================================================================================
// kerrshell: renormalised field quantities on the Weyl half-plane, the R^4 Green
// potential, line integrals for B, Theta and lambda, the (X, Y) residual and a damped
// Picard sweep at small delta
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#include "kerrshell/field_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "kerrshell/errors.hpp"

namespace kerrshell {

namespace {

constexpr double kPi = std::numbers::pi;

void require_axis_grid(const GridSpec& g, const char* who) {
  if (g.nrho < 6 || g.nz < 6) throw Error(ErrorCode::InvalidInput, std::string(who) + ": grid needs at least 6 x 6 nodes");
  if (g.rho_lo != 0.0) throw Error(ErrorCode::InvalidInput, std::string(who) + ": grid must start on the axis");
  if (!(g.rho_hi > 0.0) || !(g.z_hi > g.z_lo)) throw Error(ErrorCode::InvalidInput, std::string(who) + ": empty grid box");
}

bool same_grid(const GridSpec& a, const GridSpec& b) {
  return a.nrho == b.nrho && a.nz == b.nz && a.rho_lo == b.rho_lo && a.rho_hi == b.rho_hi && a.z_lo == b.z_lo &&
         a.z_hi == b.z_hi;
}

//! Gauss-Legendre rule with N points mapped to [0, 1].
template <unsigned N>
struct UnitRule {
  std::array<double, N> x{}, w{};
  UnitRule() {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& a = G::abscissa();
    const auto& wt = G::weights();
    unsigned k = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) {
        x[k] = 0.5;
        w[k++] = 0.5 * wt[i];
      } else {
        x[k] = 0.5 * (1.0 - a[i]);
        w[k++] = 0.5 * wt[i];
        x[k] = 0.5 * (1.0 + a[i]);
        w[k++] = 0.5 * wt[i];
      }
    }
  }
};

// Field-derivative stencils. On i = 0 the fields are even in rho; the outer edges use
// one-sided second-order differences.
struct Stencil {
  const GridSpec& g;
  double hr, hz;
  explicit Stencil(const GridSpec& grid) : g(grid), hr(grid.drho()), hz(grid.dz()) {}
  static double at(const std::vector<double>& f, const GridSpec& g, int i, int j) {
    return f[static_cast<size_t>(j) * g.nrho + i];
  }
  double r(const std::vector<double>& f, int i, int j) const {
    if (i == 0) return 0.0;
    if (i == g.nrho - 1) return (3.0 * at(f, g, i, j) - 4.0 * at(f, g, i - 1, j) + at(f, g, i - 2, j)) / (2.0 * hr);
    return (at(f, g, i + 1, j) - at(f, g, i - 1, j)) / (2.0 * hr);
  }
  double z(const std::vector<double>& f, int i, int j) const {
    if (j == 0) return (-3.0 * at(f, g, i, 0) + 4.0 * at(f, g, i, 1) - at(f, g, i, 2)) / (2.0 * hz);
    if (j == g.nz - 1) return (3.0 * at(f, g, i, j) - 4.0 * at(f, g, i, j - 1) + at(f, g, i, j - 2)) / (2.0 * hz);
    return (at(f, g, i, j + 1) - at(f, g, i, j - 1)) / (2.0 * hz);
  }
  double rr(const std::vector<double>& f, int i, int j) const {
    if (i == 0) return 2.0 * (at(f, g, 1, j) - at(f, g, 0, j)) / (hr * hr);
    if (i == g.nrho - 1)
      return (2.0 * at(f, g, i, j) - 5.0 * at(f, g, i - 1, j) + 4.0 * at(f, g, i - 2, j) - at(f, g, i - 3, j)) /
             (hr * hr);
    return (at(f, g, i + 1, j) - 2.0 * at(f, g, i, j) + at(f, g, i - 1, j)) / (hr * hr);
  }
  double zz(const std::vector<double>& f, int i, int j) const {
    if (j == 0) return (2.0 * at(f, g, i, 0) - 5.0 * at(f, g, i, 1) + 4.0 * at(f, g, i, 2) - at(f, g, i, 3)) / (hz * hz);
    if (j == g.nz - 1)
      return (2.0 * at(f, g, i, j) - 5.0 * at(f, g, i, j - 1) + 4.0 * at(f, g, i, j - 2) - at(f, g, i, j - 3)) /
             (hz * hz);
    return (at(f, g, i, j + 1) - 2.0 * at(f, g, i, j) + at(f, g, i, j - 1)) / (hz * hz);
  }
  double rz(const std::vector<double>& f, int i, int j) const {
    if (i == 0) return 0.0;
    if (i == g.nrho - 1) return (3.0 * z(f, i, j) - 4.0 * z(f, i - 1, j) + z(f, i - 2, j)) / (2.0 * hr);
    return (z(f, i + 1, j) - z(f, i - 1, j)) / (2.0 * hr);
  }
};

// Kerr background on nodes and on the faces used by the flux-form residual.
struct Background {
  GridSpec g;
  std::vector<KerrBackground<double>> node;    //!< i >= 1
  std::vector<KerrBackground<double>> face_r;  //!< between (i, j) and (i + 1, j), index j * (nrho - 1) + i
  std::vector<KerrBackground<double>> face_z;  //!< between (i, j) and (i, j + 1), index j * nrho + i, i >= 1

  Background(const GridSpec& grid, const KerrParams& p) : g(grid) {
    int n = g.nrho, m = g.nz;
    double d = p.d(), hr = g.drho(), hz = g.dz();
    node.assign(static_cast<size_t>(n) * m, {});
    face_r.assign(static_cast<size_t>(n - 1) * m, {});
    face_z.assign(static_cast<size_t>(n) * (m - 1), {});
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < n; ++i) {
        if (i >= 1) node[static_cast<size_t>(j) * n + i] = kerr_background(d, g.rho(i), g.z(j));
        if (i + 1 < n) face_r[static_cast<size_t>(j) * (n - 1) + i] = kerr_background(d, g.rho(i) + 0.5 * hr, g.z(j));
        if (i >= 1 && j + 1 < m) face_z[static_cast<size_t>(j) * n + i] = kerr_background(d, g.rho(i), g.z(j) + 0.5 * hz);
      }
  }
};

bool boundary_row(const GridSpec& g, int i, int j) { return i == 0 || i == g.nrho - 1 || j == 0 || j == g.nz - 1; }

// Residual of the (X', Y') system as differences from Kerr; see residual_XY.
void residual_core(const Background& bg, const std::vector<double>& X0, const std::vector<double>& Y0,
                   const std::vector<double>& s0, const std::vector<double>& Bz, const std::vector<double>* F1,
                   std::vector<double>& RX, std::vector<double>& RY) {
  const GridSpec& g = bg.g;
  int n = g.nrho, m = g.nz;
  double hr = g.drho(), hz = g.dz();
  size_t N = static_cast<size_t>(n) * m;
  RX.assign(N, 0.0);
  RY.assign(N, 0.0);
  std::vector<double> u(N), ls(N);
  for (size_t k = 0; k < N; ++k) {
    u[k] = std::log1p(X0[k]);
    ls[k] = std::log1p(s0[k]);
  }
  auto K = [n](int i, int j) { return static_cast<size_t>(j) * n + i; };
  // rho-face flux of V and z-face flux of V
  auto V_rho = [&](int i, int j) {  // face between i and i + 1
    const auto& b = bg.face_r[static_cast<size_t>(j) * (n - 1) + i];
    size_t a = K(i, j), c = K(i + 1, j);
    double Xf = 0.5 * (X0[a] + X0[c]), sf = 0.5 * (s0[a] + s0[c]), Yf = 0.5 * (Y0[a] + Y0[c]);
    double gr = (Y0[c] - Y0[a]) / hr + Yf * b.l_rho;
    double opx = 1.0 + Xf;
    double cf = (sf - 2.0 * Xf - Xf * Xf) / (opx * opx);
    return b.rho_over_XK * ((b.a_rho + gr) * cf + gr);
  };
  auto V_z = [&](int i, int j) {  // face between j and j + 1
    const auto& b = bg.face_z[static_cast<size_t>(j) * n + i];
    size_t a = K(i, j), c = K(i, j + 1);
    double Xf = 0.5 * (X0[a] + X0[c]), sf = 0.5 * (s0[a] + s0[c]), Yf = 0.5 * (Y0[a] + Y0[c]);
    double Bf = 0.5 * (Bz[a] + Bz[c]);
    double rho = g.rho(i);
    double gz = (Y0[c] - Y0[a]) / hz + Yf * b.l_z + Bf * b.rho_over_XK / rho;
    double opx = 1.0 + Xf;
    double cf = (sf - 2.0 * Xf - Xf * Xf) / (opx * opx);
    return b.rho_over_XK * ((b.a_z + gz) * cf + gz);
  };
  for (int j = 1; j < m - 1; ++j)
    for (int i = 1; i < n - 1; ++i) {
      size_t k = K(i, j);
      const auto& b = bg.node[k];
      double rho = g.rho(i);
      // X equation: Delta_sigma log(1 + X') + dlog(1 + s').dlog X_K + (|theta/X|^2 - |a_K|^2) - F1 / X
      double sc = rho * (1.0 + s0[k]);
      double se = (rho + 0.5 * hr) * (1.0 + 0.5 * (s0[k] + s0[K(i + 1, j)]));
      double sw = (rho - 0.5 * hr) * (1.0 + 0.5 * (s0[k] + s0[K(i - 1, j)]));
      double sn = rho * (1.0 + 0.5 * (s0[k] + s0[K(i, j + 1)]));
      double ss = rho * (1.0 + 0.5 * (s0[k] + s0[K(i, j - 1)]));
      double lap = (se * (u[K(i + 1, j)] - u[k]) - sw * (u[k] - u[K(i - 1, j)])) / (hr * hr) +
                   (sn * (u[K(i, j + 1)] - u[k]) - ss * (u[k] - u[K(i, j - 1)])) / (hz * hz);
      lap /= sc;
      double lsr = (ls[K(i + 1, j)] - ls[K(i - 1, j)]) / (2.0 * hr);
      double lsz = (ls[K(i, j + 1)] - ls[K(i, j - 1)]) / (2.0 * hz);
      double Yr = (Y0[K(i + 1, j)] - Y0[K(i - 1, j)]) / (2.0 * hr);
      double Yz = (Y0[K(i, j + 1)] - Y0[K(i, j - 1)]) / (2.0 * hz);
      double gr = Yr + Y0[k] * b.l_rho;
      double gz = Yz + Y0[k] * b.l_z + Bz[k] * b.rho_over_XK / rho;
      double opx = 1.0 + X0[k];
      double ur = (gr - X0[k] * b.a_rho) / opx, uz = (gz - X0[k] * b.a_z) / opx;
      double rx = lap + lsr * b.l_rho + lsz * b.l_z + ur * (2.0 * b.a_rho + ur) + uz * (2.0 * b.a_z + uz);
      if (F1) rx -= (*F1)[k] / (b.XK * opx);
      RX[k] = rx;
      // twist equation: (X_K / rho) div(sigma X^-2 theta - rho X_K^-2 theta_K)
      double div = (V_rho(i, j) - V_rho(i - 1, j)) / hr + (V_z(i, j) - V_z(i, j - 1)) / hz;
      RY[k] = div / b.rho_over_XK;
    }
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) {
      if (!boundary_row(g, i, j)) continue;
      size_t k = K(i, j);
      if (i == 0 && j > 0 && j < m - 1) {
        RX[k] = X0[k] - (4.0 * X0[K(1, j)] - X0[K(2, j)]) / 3.0;
        RY[k] = Y0[k];
      } else {
        RX[k] = X0[k];
        RY[k] = Y0[k];
      }
    }
}

double interior_max(const GridSpec& g, const std::vector<double>& f) {
  double mx = 0.0;
  for (int j = 1; j < g.nz - 1; ++j)
    for (int i = 1; i < g.nrho - 1; ++i) mx = std::max(mx, std::fabs(f[static_cast<size_t>(j) * g.nrho + i]));
  return mx;
}

// V = sigma X^-2 theta - rho X_K^-2 theta_K at nodes with i >= 1 (central differences).
std::array<double, 2> V_node(const Background& bg, const Stencil& st, const RenormalizedState& s, int i, int j) {
  const GridSpec& g = bg.g;
  size_t k = static_cast<size_t>(j) * g.nrho + i;
  const auto& b = bg.node[k];
  double rho = g.rho(i);
  double X0 = s.X0.v[k], Y0 = s.Y0.v[k], s0 = s.sigma0.v[k];
  double gr = st.r(s.Y0.v, i, j) + Y0 * b.l_rho;
  double gz = st.z(s.Y0.v, i, j) + Y0 * b.l_z + s.B.z.v[k] * b.rho_over_XK / rho;
  double opx = 1.0 + X0;
  double cf = (s0 - 2.0 * X0 - X0 * X0) / (opx * opx);
  return {b.rho_over_XK * ((b.a_rho + gr) * cf + gr), b.rho_over_XK * ((b.a_z + gz) * cf + gz)};
}

OneFormField theta_source_bg(const Background& bg, const RenormalizedState& s) {
  const GridSpec& g = bg.g;
  Stencil st(g);
  OneFormField H(g);
  H.rho.decay = 3.0;
  H.z.decay = 3.0;
  for (int j = 0; j < g.nz; ++j) {
    for (int i = 1; i < g.nrho; ++i) {
      auto V = V_node(bg, st, s, i, j);
      H.rho(i, j) = -V[1];
      H.z(i, j) = V[0];
    }
    H.rho(0, j) = 0.0;
    H.z(0, j) = 3.0 * H.z(1, j) - 3.0 * H.z(2, j) + H.z(3, j);
  }
  return H;
}

LambdaResult integrate_lambda_bg(const Background& bg, const RenormalizedState& s) {
  const GridSpec& g = bg.g;
  Stencil st(g);
  int n = g.nrho, m = g.nz;
  size_t N = static_cast<size_t>(n) * m;
  std::vector<double> lx(N);
  for (size_t k = 0; k < N; ++k) lx[k] = std::log1p(s.X0.v[k]);
  std::vector<double> gr(N, 0.0), gz(N, 0.0);
  LambdaResult out;
  out.min_grad_sigma = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j)
    for (int i = 1; i < n; ++i) {
      size_t k = static_cast<size_t>(j) * n + i;
      const auto& b = bg.node[k];
      double rho = g.rho(i);
      AlphaDelta a;
      a.rho = rho;
      a.s = s.sigma0.v[k];
      a.s_rho = st.r(s.sigma0.v, i, j);
      a.s_z = st.z(s.sigma0.v, i, j);
      a.s_rhorho = st.rr(s.sigma0.v, i, j);
      a.s_zz = st.zz(s.sigma0.v, i, j);
      a.s_rhoz = st.rz(s.sigma0.v, i, j);
      a.m_rho = st.r(lx, i, j);
      a.m_z = st.z(lx, i, j);
      double X0 = s.X0.v[k], Y0 = s.Y0.v[k];
      double gyr = st.r(s.Y0.v, i, j) + Y0 * b.l_rho;
      double gyz = st.z(s.Y0.v, i, j) + Y0 * b.l_z + s.B.z.v[k] * b.rho_over_XK / rho;
      a.u_rho = (gyr - X0 * b.a_rho) / (1.0 + X0);
      a.u_z = (gyz - X0 * b.a_z) / (1.0 + X0);
      a.l_rho = b.l_rho;
      a.l_z = b.l_z;
      a.a_rho = b.a_rho;
      a.a_z = b.a_z;
      double er = a.s + rho * a.s_rho, ez = rho * a.s_z;
      out.min_grad_sigma = std::min(out.min_grad_sigma, std::hypot(1.0 + er, ez));
      auto da = alpha_minus_kerr(a);
      gr[k] = da[0] - 0.5 * a.m_rho;
      gz[k] = da[1] - 0.5 * a.m_z;
    }
  if (out.min_grad_sigma < 0.5)
    throw Error(ErrorCode::InvalidInput, "integrate_lambda: |d sigma| = " + std::to_string(out.min_grad_sigma) +
                                             " is too close to zero");
  for (int j = 0; j < m; ++j) {
    size_t k0 = static_cast<size_t>(j) * n;
    gr[k0] = 0.0;
    gz[k0] = 3.0 * gz[k0 + 1] - 3.0 * gz[k0 + 2] + gz[k0 + 3];
  }
  double hr = g.drho(), hz = g.dz();
  auto row = [&](const std::vector<double>& f, int j) {
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) r[i] = f[static_cast<size_t>(j) * n + i];
    return r;
  };
  auto col = [&](const std::vector<double>& f, int i) {
    std::vector<double> c(m);
    for (int j = 0; j < m; ++j) c[j] = f[static_cast<size_t>(j) * n + i];
    return c;
  };
  // path A: up the outer column, then inward along rho
  AxiScalarField A(g, 0.0), B(g, 0.0);
  std::vector<double> edge = cumulative_integral(col(gz, n - 1), hz);
  for (int j = 0; j < m; ++j) {
    std::vector<double> F = cumulative_integral(row(gr, j), hr);
    for (int i = 0; i < n; ++i) A(i, j) = edge[j] - (F[n - 1] - F[i]);
  }
  // path B: inward along the bottom row, then up in z
  std::vector<double> F0 = cumulative_integral(row(gr, 0), hr);
  for (int i = 0; i < n; ++i) {
    std::vector<double> G = cumulative_integral(col(gz, i), hz);
    double base = -(F0[n - 1] - F0[i]);
    for (int j = 0; j < m; ++j) B(i, j) = base + G[j];
  }
  double mx = 0.0, res = 0.0, res_outer = 0.0;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) {
      size_t k = static_cast<size_t>(j) * n + i;
      double e = std::fabs(A.v[k] - B.v[k]);
      mx = std::max(mx, std::fabs(A.v[k]));
      res = std::max(res, e);
      if (g.rho(i) >= kOuterRadius) res_outer = std::max(res_outer, e);
    }
  out.lambda0 = std::move(A);
  out.path_residual = res;
  out.path_residual_rel = mx > 0.0 ? res / mx : 0.0;
  out.path_residual_outer_rel = mx > 0.0 ? res_outer / mx : 0.0;
  return out;
}

}  // namespace

//--------------------------------------------------------------------------------------
// AxiScalarField
//--------------------------------------------------------------------------------------

AxiScalarField::AxiScalarField(const GridSpec& g, double decay_exponent)
    : grid(g), v(static_cast<size_t>(g.nrho) * g.nz, 0.0), decay(decay_exponent) {}

AxiScalarField AxiScalarField::sample(const GridSpec& g, const std::function<double(double, double)>& f,
                                      double decay_exponent) {
  AxiScalarField out(g, decay_exponent);
  for (int j = 0; j < g.nz; ++j)
    for (int i = 0; i < g.nrho; ++i) out(i, j) = f(g.rho(i), g.z(j));
  return out;
}

double AxiScalarField::at(double rho, double z) const {
  const GridSpec& g = grid;
  double x = (rho - g.rho_lo) / g.drho(), y = (z - g.z_lo) / g.dz();
  constexpr double slack = 1e-9;
  if (x < -slack || y < -slack || x > g.nrho - 1 + slack || y > g.nz - 1 + slack)
    throw Error(ErrorCode::ChartBoundary, "AxiScalarField: point outside the grid box");
  x = std::clamp(x, 0.0, g.nrho - 1.0);
  y = std::clamp(y, 0.0, g.nz - 1.0);
  int i = std::min(static_cast<int>(x), g.nrho - 2), j = std::min(static_cast<int>(y), g.nz - 2);
  double tx = x - i, ty = y - j;
  return (1.0 - tx) * (1.0 - ty) * (*this)(i, j) + tx * (1.0 - ty) * (*this)(i + 1, j) +
         (1.0 - tx) * ty * (*this)(i, j + 1) + tx * ty * (*this)(i + 1, j + 1);
}

double AxiScalarField::at_pole_chart(const KerrParams& p, double s, double chi, bool north) const {
  WeylPoint w = pole_chart_to_weyl(p, s, chi, north);
  return at(w.rho, w.z);
}

double AxiScalarField::max_abs() const {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

//--------------------------------------------------------------------------------------
// Green potential
//--------------------------------------------------------------------------------------

GreenR4::GreenR4(const GridSpec& g) : g_(g) {
  require_axis_grid(g, "GreenR4");
  const int n = g.nrho, m = g.nz;
  const double hr = g.drho(), hz = g.dz();
  w_.assign(static_cast<size_t>(n) * n * m, 0.0);
  static const UnitRule<4> far;
  static const UnitRule<8> near;
  // Kernel for sigma(rho) = int int G(rho, rho', dz) H(rho', z') drho' dz' after the
  // S^2 integral: G = -(rho' / 4 pi rho) log(((rho + rho')^2 + dz^2) / ((rho - rho')^2 + dz^2)).
  auto kernel = [](double rho, double rp, double dz) {
    double dm = (rho - rp) * (rho - rp) + dz * dz;
    if (rho == 0.0) return -rp * rp / (kPi * (rp * rp + dz * dz));
    if (dm == 0.0) return 0.0;  // measure zero; only reached on a corner node of the graded rule
    return -(rp / (4.0 * kPi * rho)) * std::log1p(4.0 * rho * rp / dm);
  };
  std::vector<double> acc;  // per target: [i' * m + corner offset] accumulated on Delta >= 0 cells
  for (int i = 0; i < n; ++i) {
    double rho = g.rho(i);
    // L[c][mm] bottom-corner and T[c][mm] top-corner contributions, each split into the two
    // rho corners: index ((c * 2 + side) * m + mm)
    std::vector<double> bottom(static_cast<size_t>(n) * m, 0.0), top(static_cast<size_t>(n) * m, 0.0);
    auto add = [&](int c, int mm, double x0, double x1, double y0, double y1, const auto& rule) {
      // integrate over [x0, x1] x [y0, y1] inside cell (c, mm) with bilinear corner weights
      double cx0 = c * hr, cy0 = mm * hz;
      double b00 = 0, b10 = 0, b01 = 0, b11 = 0;
      double jx = x1 - x0, jy = y1 - y0;
      for (std::size_t a = 0; a < rule.x.size(); ++a) {
        double rp = x0 + jx * rule.x[a];
        double tr = (rp - cx0) / hr;
        for (std::size_t b = 0; b < rule.x.size(); ++b) {
          double dz = y0 + jy * rule.x[b];
          double tz = (dz - cy0) / hz;
          double wv = rule.w[a] * rule.w[b] * jx * jy * kernel(rho, rp, dz);
          b00 += wv * (1.0 - tr) * (1.0 - tz);
          b10 += wv * tr * (1.0 - tz);
          b01 += wv * (1.0 - tr) * tz;
          b11 += wv * tr * tz;
        }
      }
      bottom[static_cast<size_t>(c) * m + mm] += b00;
      bottom[static_cast<size_t>(c + 1) * m + mm] += b10;
      top[static_cast<size_t>(c) * m + mm] += b01;
      top[static_cast<size_t>(c + 1) * m + mm] += b11;
    };
    for (int c = 0; c < n - 1; ++c)
      for (int mm = 0; mm < m - 1; ++mm) {
        double x0 = c * hr, x1 = x0 + hr, y0 = mm * hz, y1 = y0 + hz;
        bool singular = mm == 0 && (c == i || c == i - 1);
        if (singular) {
          // graded subdivision towards the corner (rho, 0)
          double sx = (c == i) ? x0 : x1;
          double ax = x0, bx = x1, ay = y0, by = y1;
          for (int level = 0; level < 18; ++level) {
            double mx = 0.5 * (ax + bx), my = 0.5 * (ay + by);
            bool left = sx == ax;
            double cx0 = left ? ax : mx, cx1 = left ? mx : bx;  // corner quadrant in x
            double ox0 = left ? mx : ax, ox1 = left ? bx : mx;  // other half in x
            add(c, mm, ox0, ox1, ay, my, near);
            add(c, mm, ax, bx, my, by, near);
            ax = cx0;
            bx = cx1;
            by = my;
          }
          add(c, mm, ax, bx, ay, by, near);
        } else if (std::abs(c - i) <= 3 && mm <= 3) {
          add(c, mm, x0, x1, y0, y1, near);
        } else {
          add(c, mm, x0, x1, y0, y1, far);
        }
      }
    for (int ip = 0; ip < n; ++ip) {
      double* w = &w_[(static_cast<size_t>(i) * n + ip) * m];
      w[0] = 2.0 * bottom[static_cast<size_t>(ip) * m + 0];
      for (int k = 1; k < m; ++k) {
        double lo = top[static_cast<size_t>(ip) * m + (k - 1)];
        double hi = k < m - 1 ? bottom[static_cast<size_t>(ip) * m + k] : 0.0;
        w[k] = lo + hi;
      }
    }
  }
}

AxiScalarField GreenR4::apply(const AxiScalarField& H) const {
  if (!same_grid(H.grid, g_)) throw Error(ErrorCode::InvalidInput, "GreenR4: source on a different grid");
  const int n = g_.nrho, m = g_.nz;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i)
      if ((i == n - 1 || j == 0 || j == m - 1) && H(i, j) != 0.0)
        throw Error(ErrorCode::InvalidInput, "green_poisson_r4: source support leaks off the grid");
  AxiScalarField out(g_, 2.0);
  struct Src {
    int i, j;
    double h;
  };
  std::vector<Src> src;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i)
      if (H(i, j) != 0.0) src.push_back({i, j, H(i, j)});
  if (src.empty()) return out;
  for (int i = 0; i < n; ++i) {
    const double* wi = &w_[static_cast<size_t>(i) * n * m];
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (const Src& q : src) s += wi[static_cast<size_t>(q.i) * m + std::abs(j - q.j)] * q.h;
      out(i, j) = s;
    }
  }
  return out;
}

AxiScalarField green_poisson_r4(const AxiScalarField& H) { return GreenR4(H.grid).apply(H); }

AxiScalarField laplacian_r4(const AxiScalarField& f) {
  const GridSpec& g = f.grid;
  AxiScalarField out(g, 0.0);
  double hr = g.drho(), hz = g.dz();
  for (int j = 1; j < g.nz - 1; ++j)
    for (int i = 1; i < g.nrho - 1; ++i) {
      double rho = g.rho(i);
      out(i, j) = (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) / (hr * hr) +
                  (f(i + 1, j) - f(i - 1, j)) / (rho * hr) + (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) / (hz * hz);
    }
  return out;
}

//--------------------------------------------------------------------------------------
// Line integrals
//--------------------------------------------------------------------------------------

std::vector<double> cumulative_integral(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size());
  std::vector<double> F(f.size(), 0.0);
  if (n < 2) return F;
  if (n < 6) {
    for (int k = 0; k + 1 < n; ++k) F[k + 1] = F[k] + 0.5 * h * (f[k] + f[k + 1]);
    return F;
  }
  // weights[o][q]: integral over [o, o + 1] of the Lagrange basis on nodes 0..5
  static const std::array<std::array<double, 6>, 5> weights = [] {
    std::array<std::array<double, 6>, 5> w{};
    static const UnitRule<3> gl;
    for (int o = 0; o < 5; ++o)
      for (int q = 0; q < 6; ++q) {
        double s = 0.0;
        for (std::size_t a = 0; a < gl.x.size(); ++a) {
          double x = o + gl.x[a], l = 1.0;
          for (int r = 0; r < 6; ++r)
            if (r != q) l *= (x - r) / static_cast<double>(q - r);
          s += gl.w[a] * l;
        }
        w[o][q] = s;
      }
    return w;
  }();
  for (int k = 0; k + 1 < n; ++k) {
    double inc = 0.0;
    if (f[k] != 0.0 || f[k + 1] != 0.0) {
      int s = std::clamp(k - 2, 0, n - 6);
      const auto& w = weights[k - s];
      for (int q = 0; q < 6; ++q) inc += w[q] * f[s + q];
      inc *= h;
    }
    F[k + 1] = F[k] + inc;
  }
  return F;
}

OneFormField integrate_B(const AxiScalarField& H) {
  const GridSpec& g = H.grid;
  require_axis_grid(g, "integrate_B");
  OneFormField B(g);
  std::vector<double> row(g.nrho);
  for (int j = 0; j < g.nz; ++j) {
    for (int i = 0; i < g.nrho; ++i) row[i] = H(i, j);
    std::vector<double> F = cumulative_integral(row, g.drho());
    for (int i = 0; i < g.nrho; ++i) B.z(i, j) = F[i];
  }
  return B;
}

ThetaResult integrate_theta(const OneFormField& H, double closed_tol) {
  const GridSpec& g = H.rho.grid;
  if (!same_grid(g, H.z.grid)) throw Error(ErrorCode::InvalidInput, "integrate_theta: components on different grids");
  if (g.nrho < 6 || g.nz < 6) throw Error(ErrorCode::InvalidInput, "integrate_theta: grid needs at least 6 x 6 nodes");
  ThetaResult out;
  Stencil st(g);
  double curl = 0.0, curl_outer = 0.0, dmax = 0.0;
  for (int j = 1; j < g.nz - 1; ++j)
    for (int i = 1; i < g.nrho - 1; ++i) {
      double a = st.z(H.rho.v, i, j), b = st.r(H.z.v, i, j);
      curl = std::max(curl, std::fabs(a - b));
      if (g.rho(i) >= kOuterRadius) curl_outer = std::max(curl_outer, std::fabs(a - b));
      dmax = std::max({dmax, std::fabs(a), std::fabs(b), std::fabs(st.r(H.rho.v, i, j)), std::fabs(st.z(H.z.v, i, j))});
    }
  out.closedness = dmax > 0.0 ? curl / dmax : 0.0;
  out.closedness_outer = dmax > 0.0 ? curl_outer / dmax : 0.0;
  if (out.closedness > closed_tol)
    throw Error(ErrorCode::NoConvergence,
                "integrate_theta: H is not closed (relative curl " + std::to_string(out.closedness) + ")");
  out.theta = AxiScalarField(g, 2.0);
  std::vector<double> row(g.nrho);
  const int n = g.nrho;
  for (int j = 0; j < g.nz; ++j) {
    for (int i = 0; i < n; ++i) row[i] = H.rho(i, j);
    std::vector<double> F = cumulative_integral(row, g.drho());
    double tail = 0.5 * row[n - 1] * g.rho(n - 1);  // int_R^inf c t^-3 with c = H(R) R^3
    for (int i = 0; i < n; ++i) out.theta(i, j) = -(F[n - 1] - F[i] + tail);
  }
  return out;
}

//--------------------------------------------------------------------------------------
// alpha
//--------------------------------------------------------------------------------------

std::array<double, 2> alpha(const AlphaInputs& in) {
  double X2 = in.X * in.X;
  double Q1 = (in.X_rho * in.X_rho - in.X_z * in.X_z + in.th_rho * in.th_rho - in.th_z * in.th_z) / X2;
  double Q2 = (in.X_rho * in.X_z + in.th_rho * in.th_z) / X2;
  double D = in.s_rho * in.s_rho + in.s_z * in.s_z;
  double lap_diff = in.s_rhorho - in.s_zz;
  double ar = 0.5 * in.s_rho * lap_diff + in.s_z * in.s_rhoz + in.sigma * (0.25 * in.s_rho * Q1 + 0.5 * in.s_z * Q2);
  double az = in.s_rho * in.s_rhoz - 0.5 * in.s_z * lap_diff + in.sigma * (-0.25 * in.s_z * Q1 + 0.5 * in.s_rho * Q2);
  return {ar / D, az / D};
}

std::array<double, 2> alpha_minus_kerr(const AlphaDelta& in) {
  double rho = in.rho, s = in.s;
  double er = s + rho * in.s_rho, ez = rho * in.s_z;
  double sig = rho * (1.0 + s), sr = 1.0 + er, sz = ez;
  double srr = 2.0 * in.s_rho + rho * in.s_rhorho, szz = rho * in.s_zz, srz = in.s_z + rho * in.s_rhoz;
  double Q1K = in.l_rho * in.l_rho - in.l_z * in.l_z + in.a_rho * in.a_rho - in.a_z * in.a_z;
  double Q2K = in.l_rho * in.l_z + in.a_rho * in.a_z;
  double dQ1 = in.m_rho * (2.0 * in.l_rho + in.m_rho) - in.m_z * (2.0 * in.l_z + in.m_z) +
               in.u_rho * (2.0 * in.a_rho + in.u_rho) - in.u_z * (2.0 * in.a_z + in.u_z);
  double dQ2 = in.l_rho * in.m_z + in.m_rho * in.l_z + in.m_rho * in.m_z + in.a_rho * in.u_z + in.u_rho * in.a_z +
               in.u_rho * in.u_z;
  double Dm1 = er * (2.0 + er) + ez * ez;
  double D = 1.0 + Dm1;
  double ssr_m_rho = rho * (s + er + s * er);  // sigma sigma_rho - rho
  double lap_diff = srr - szz;
  double dNr = 0.5 * sr * lap_diff + sz * srz + 0.25 * (sig * sr * dQ1 + ssr_m_rho * Q1K) + 0.5 * sig * sz * (Q2K + dQ2);
  double dNz = sr * srz - 0.5 * sz * lap_diff - 0.25 * sig * sz * (Q1K + dQ1) + 0.5 * (sig * sr * dQ2 + ssr_m_rho * Q2K);
  double NKr = 0.25 * rho * Q1K, NKz = 0.5 * rho * Q2K;
  return {(dNr - NKr * Dm1) / D, (dNz - NKz * Dm1) / D};
}

//--------------------------------------------------------------------------------------
// State
//--------------------------------------------------------------------------------------

RenormalizedState RenormalizedState::zero(const GridSpec& g) {
  require_axis_grid(g, "RenormalizedState");
  RenormalizedState s;
  s.grid = g;
  s.sigma0 = AxiScalarField(g, 2.0);
  s.X0 = AxiScalarField(g, 1.0);
  s.Y0 = AxiScalarField(g, 1.0);
  s.Theta0 = AxiScalarField(g, 2.0);
  s.lambda0 = AxiScalarField(g, 1.0);
  s.B = OneFormField(g);
  return s;
}

const std::vector<std::string>& RenormalizedState::field_names() {
  static const std::vector<std::string> n{"sigma0", "B_z", "X0", "Y0", "Theta0", "lambda0"};
  return n;
}

const AxiScalarField& RenormalizedState::field(const std::string& name) const {
  return const_cast<RenormalizedState*>(this)->field(name);
}

AxiScalarField& RenormalizedState::field(const std::string& name) {
  if (name == "sigma0") return sigma0;
  if (name == "B_z") return B.z;
  if (name == "X0") return X0;
  if (name == "Y0") return Y0;
  if (name == "Theta0") return Theta0;
  if (name == "lambda0") return lambda0;
  throw Error(ErrorCode::InvalidInput, "RenormalizedState: unknown field " + name);
}

double RenormalizedState::norm() const {
  double m = 0.0;
  for (const auto& n : field_names()) m = std::max(m, field(n).max_abs());
  return m;
}

MetricPerturbation RenormalizedState::perturbation() const {
  MetricPerturbation h;
  auto view = [](const AxiScalarField& f) -> MetricPerturbation::Field {
    if (f.max_abs() == 0.0) return {};
    auto fp = std::make_shared<AxiScalarField>(f);
    return [fp](double rho, double z) {
      const GridSpec& g = fp->grid;
      double hr = g.drho(), hz = g.dz();
      double v = fp->at(rho, z);
      double r0 = std::max(g.rho_lo, rho - 0.5 * hr), r1 = std::min(g.rho_hi, rho + 0.5 * hr);
      double z0 = std::max(g.z_lo, z - 0.5 * hz), z1 = std::min(g.z_hi, z + 0.5 * hz);
      return std::array<double, 3>{v, (fp->at(r1, z) - fp->at(r0, z)) / (r1 - r0),
                                   (fp->at(rho, z1) - fp->at(rho, z0)) / (z1 - z0)};
    };
  };
  h.theta = view(Theta0);
  h.sigma = view(sigma0);
  h.X = view(X0);
  h.rho_lo = grid.rho_lo;
  h.rho_hi = grid.rho_hi;
  h.z_lo = grid.z_lo;
  h.z_hi = grid.z_hi;
  return h;
}

XYResidual residual_XY(const RenormalizedState& s, const KerrParams& p, const AxiScalarField* F1) {
  require_axis_grid(s.grid, "residual_XY");
  Background bg(s.grid, p);
  XYResidual r;
  r.X = AxiScalarField(s.grid);
  r.Y = AxiScalarField(s.grid);
  residual_core(bg, s.X0.v, s.Y0.v, s.sigma0.v, s.B.z.v, F1 ? &F1->v : nullptr, r.X.v, r.Y.v);
  r.norm_X = interior_max(s.grid, r.X.v);
  r.norm_Y = interior_max(s.grid, r.Y.v);
  return r;
}

LambdaResult integrate_lambda(const RenormalizedState& s, const KerrParams& p) {
  require_axis_grid(s.grid, "integrate_lambda");
  return integrate_lambda_bg(Background(s.grid, p), s);
}

OneFormField theta_source(const RenormalizedState& s, const KerrParams& p) {
  require_axis_grid(s.grid, "theta_source");
  return theta_source_bg(Background(s.grid, p), s);
}

//--------------------------------------------------------------------------------------
// Sweep
//--------------------------------------------------------------------------------------

struct FieldSolver::Linear {
  Background bg;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  Linear(const GridSpec& g, const KerrParams& p) : bg(g, p) {}
};

FieldSolver::FieldSolver(const GridSpec& g, const KerrParams& p, const ProfilePhi& profile, const CutoffPsi& psi,
                         const SweepOptions& opt)
    : g_(g), p_(p), profile_(profile), psi_(psi), opt_(opt), green_(g) {
  if (!(opt.damping > 0.0 && opt.damping <= 1.0))
    throw Error(ErrorCode::InvalidInput, "FieldSolver: damping must lie in (0, 1]");
  lin_ = std::make_unique<Linear>(g, p);
  const int n = g.nrho, m = g.nz;
  const size_t N = static_cast<size_t>(n) * m;
  std::vector<Eigen::Triplet<double>> trip;
  auto K = [n](int i, int j) { return static_cast<size_t>(j) * n + i; };
  if (opt.preconditioner == Preconditioner::KerrLinearized) {
    // Columns by probing: nodes of one colour are three cells apart, so every residual
    // row sees at most one perturbed node of that colour. The residual is written without
    // cancellation against Kerr, so a tiny probe gives the linearisation to round-off.
    constexpr double probe = 1e-30;
    std::vector<double> zero(N, 0.0), RX, RY;
    for (int field = 0; field < 2; ++field)
      for (int ci = 0; ci < 3; ++ci)
        for (int cj = 0; cj < 3; ++cj) {
          std::vector<double> P(N, 0.0);
          for (int j = cj; j < m; j += 3)
            for (int i = ci; i < n; i += 3) P[K(i, j)] = probe;
          if (field == 0)
            residual_core(lin_->bg, P, zero, zero, zero, nullptr, RX, RY);
          else
            residual_core(lin_->bg, zero, P, zero, zero, nullptr, RX, RY);
          for (int j = 0; j < m; ++j)
            for (int i = 0; i < n; ++i) {
              size_t k = K(i, j);
              if (RX[k] == 0.0 && RY[k] == 0.0) continue;
              // the perturbed node of this colour within the row's stencil
              int pi = -1, pj = -1;
              for (int dj = -1; dj <= 1 && pi < 0; ++dj)
                for (int di = -1; di <= 2 && pi < 0; ++di) {
                  int a = i + di, b = j + dj;
                  if (a < 0 || a >= n || b < 0 || b >= m) continue;
                  if (a % 3 == ci && b % 3 == cj && (di <= 1 || i == 0)) {
                    pi = a;
                    pj = b;
                  }
                }
              if (pi < 0) continue;
              int col = static_cast<int>(field * N + K(pi, pj));
              if (RX[k] != 0.0) trip.emplace_back(static_cast<int>(k), col, RX[k] / probe);
              if (RY[k] != 0.0) trip.emplace_back(static_cast<int>(N + k), col, RY[k] / probe);
            }
        }
  } else {
    const double hr = g.drho(), hz = g.dz();
    for (int field = 0; field < 2; ++field) {
      int off = static_cast<int>(field * N);
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) {
          int r = off + static_cast<int>(K(i, j));
          if (boundary_row(g, i, j)) {
            trip.emplace_back(r, r, 1.0);
            if (i == 0 && j > 0 && j < m - 1 && field == 0) {
              trip.emplace_back(r, off + static_cast<int>(K(1, j)), -4.0 / 3.0);
              trip.emplace_back(r, off + static_cast<int>(K(2, j)), 1.0 / 3.0);
            }
            continue;
          }
          double rho = g.rho(i);
          trip.emplace_back(r, r, -2.0 / (hr * hr) - 2.0 / (hz * hz));
          trip.emplace_back(r, off + static_cast<int>(K(i + 1, j)), 1.0 / (hr * hr) + 0.5 / (rho * hr));
          trip.emplace_back(r, off + static_cast<int>(K(i - 1, j)), 1.0 / (hr * hr) - 0.5 / (rho * hr));
          trip.emplace_back(r, off + static_cast<int>(K(i, j + 1)), 1.0 / (hz * hz));
          trip.emplace_back(r, off + static_cast<int>(K(i, j - 1)), 1.0 / (hz * hz));
        }
    }
  }
  Eigen::SparseMatrix<double> J(static_cast<int>(2 * N), static_cast<int>(2 * N));
  J.setFromTriplets(trip.begin(), trip.end());
  J.makeCompressed();
  lin_->lu.compute(J);
  if (lin_->lu.info() != Eigen::Success)
    throw Error(ErrorCode::NoConvergence, "FieldSolver: factorisation of the (X, Y) operator failed");
}

FieldSolver::~FieldSolver() = default;

MatterFields FieldSolver::matter(const RenormalizedState& s) const {
  if (!same_grid(s.grid, g_)) throw Error(ErrorCode::InvalidInput, "FieldSolver: state on a different grid");
  MetricPerturbation h = s.perturbation();
  bool zero_h = h.is_zero();
  bool zero_l = s.lambda0.max_abs() == 0.0;
  return matter_fields(g_, p_, profile_, psi_, zero_h ? nullptr : &h, zero_l ? nullptr : &s.lambda0.v, opt_.matter);
}

RenormalizedState FieldSolver::sweep(const RenormalizedState& s) const {
  MatterFields mf = matter(s);
  const int n = g_.nrho, m = g_.nz;
  const size_t N = static_cast<size_t>(n) * m;
  const Background& bg = lin_->bg;
  RenormalizedState out = s;
  out.delta = profile_.delta;
  out.sweep = s.sweep + 1;
  // sigma': Delta_R4 sigma' = X e^{2 lambda} F3 / (rho sigma)
  AxiScalarField Hs(g_), HB(g_), F1(g_);
  for (int j = 0; j < m; ++j)
    for (int i = 1; i < n; ++i) {
      size_t k = static_cast<size_t>(j) * n + i;
      if (mf.F1[k] == 0.0 && mf.F2[k] == 0.0 && mf.F3[k] == 0.0) continue;
      const auto& b = bg.node[k];
      double rho = g_.rho(i);
      double X = b.XK * (1.0 + s.X0.v[k]), sig = rho * (1.0 + s.sigma0.v[k]);
      double e2l = b.e2lambda * std::exp(2.0 * s.lambda0.v[k]);
      Hs.v[k] = X * e2l * mf.F3[k] / (rho * sig);
      // With theta = dY + B and the W equation in the orientation used here, the lambda
      // one-form is closed only for dB = -2 e^{2 lambda} F2 / sigma d rho ^ d z.
      HB.v[k] = -2.0 * e2l * mf.F2[k] / sig;
      F1.v[k] = mf.F1[k];
    }
  out.sigma0 = green_.apply(Hs);
  out.B = integrate_B(HB);
  // (X', Y'): one damped step against the residual with the factorised linear part
  std::vector<double> RX, RY;
  residual_core(bg, out.X0.v, out.Y0.v, out.sigma0.v, out.B.z.v, &F1.v, RX, RY);
  SweepNorms norms;
  norms.res_X = interior_max(g_, RX);
  norms.res_Y = interior_max(g_, RY);
  Eigen::VectorXd R(static_cast<Eigen::Index>(2 * N));
  for (size_t k = 0; k < N; ++k) {
    R[static_cast<Eigen::Index>(k)] = RX[k];
    R[static_cast<Eigen::Index>(N + k)] = RY[k];
  }
  if (R.lpNorm<Eigen::Infinity>() > 0.0) {
    Eigen::VectorXd du = lin_->lu.solve(R);
    for (size_t k = 0; k < N; ++k) {
      out.X0.v[k] -= opt_.damping * du[static_cast<Eigen::Index>(k)];
      out.Y0.v[k] -= opt_.damping * du[static_cast<Eigen::Index>(N + k)];
    }
  }
  ThetaResult th = integrate_theta(theta_source_bg(bg, out), std::numeric_limits<double>::infinity());
  out.Theta0 = std::move(th.theta);
  norms.closedness = th.closedness;
  norms.closedness_outer = th.closedness_outer;
  LambdaResult lam = integrate_lambda_bg(bg, out);
  out.lambda0 = std::move(lam.lambda0);
  norms.path_residual = lam.path_residual;
  norms.path_residual_rel = lam.path_residual_rel;
  norms.path_residual_outer_rel = lam.path_residual_outer_rel;
  norms.state_norm = out.norm();
  norms.diverged = !(norms.state_norm <= 2.0 * opt_.ball);
  out.norms = norms;
  return out;
}

GridSpec field_grid(const ShellBox& box, int nrho, int nz, double scale) {
  if (!(scale > 1.0)) throw Error(ErrorCode::InvalidInput, "field_grid: scale must exceed 1");
  double R = scale * std::max(box.rho_max, std::max(std::fabs(box.z_min), std::fabs(box.z_max)));
  GridSpec g;
  g.nrho = nrho;
  g.nz = nz;
  g.rho_lo = 0.0;
  g.rho_hi = R;
  g.z_lo = -R;
  g.z_hi = R;
  require_axis_grid(g, "field_grid");
  return g;
}

}  // namespace kerrshell
