//========================================================================================
// kerrshell: numerical building blocks (bracketed roots, minimisation, quadrature,
// polynomial real roots, embedded Runge-Kutta with dense output)
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#ifndef KERRSHELL_NUMERICS_HPP_
#define KERRSHELL_NUMERICS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "kerrshell/errors.hpp"

namespace kerrshell {
namespace num {

constexpr double kPi = 3.14159265358979323846;

//! Root of f on [a, b] given a sign change. Converges to a few ulps.
template <class F>
double find_root(F&& f, double a, double b, double fa, double fb) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0))
    throw Error(ErrorCode::NoConvergence, "find_root: interval does not bracket a root");
  std::uintmax_t iters = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(52);
  auto res = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
  return 0.5 * (res.first + res.second);
}

template <class F>
double find_root(F&& f, double a, double b) {
  return find_root(f, a, b, f(a), f(b));
}

//! Local minimiser of f on [a, b] (Brent). Returns (x, f(x)).
template <class F>
std::pair<double, double> minimize(F&& f, double a, double b, int bits = 40) {
  std::uintmax_t iters = 200;
  return boost::math::tools::brent_find_minima(f, a, b, bits, iters);
}

//! Global minimiser on [a, b]: coarse scan followed by Brent on the best cell.
template <class F>
std::pair<double, double> scan_minimize(F&& f, double a, double b, int n = 64, int bits = 40) {
  double best_x = a, best_f = f(a);
  std::vector<double> xs(n + 1), fs(n + 1);
  for (int i = 0; i <= n; ++i) {
    xs[i] = a + (b - a) * i / n;
    fs[i] = f(xs[i]);
    if (fs[i] < best_f) { best_f = fs[i]; best_x = xs[i]; }
  }
  int k = 0;
  for (int i = 0; i <= n; ++i) if (xs[i] == best_x) k = i;
  double lo = xs[std::max(0, k - 1)], hi = xs[std::min(n, k + 1)];
  auto r = minimize(f, lo, hi, bits);
  if (r.second < best_f) return r;
  return {best_x, best_f};
}

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

//! Adaptive Gauss-Kronrod (31 points) on [a, b] to relative tolerance.
template <class F>
QuadResult integrate(F&& f, double a, double b, double rel_tol = 1e-10, unsigned max_depth = 18) {
  QuadResult out;
  if (a == b) return out;
  double err = 0.0;
  out.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, rel_tol, &err);
  out.error = err;
  return out;
}

//! Adaptive G7-K15 for array-valued integrands. Subintervals are bisected until the
//! max-norm Kronrod-Gauss difference is below rel_tol times the max-norm of the running
//! L1 totals (or abs_tol). Returns the integral and writes the error estimate.
template <std::size_t K, class F>
std::array<double, K> integrate_vec(F&& f, double a, double b, double rel_tol, double abs_tol, double* error = nullptr,
                                    unsigned max_depth = 14) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  using Vec = std::array<double, K>;
  struct Piece {
    Vec k, l1;
    double err;
  };
  auto rule = [&](double lo, double hi) {
    double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const auto& x = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = G::weights();
    Vec kr{}, ga{}, l1{};
    Vec f0 = f(c);
    for (std::size_t j = 0; j < K; ++j) {
      kr[j] = wk[0] * f0[j];
      ga[j] = wg[0] * f0[j];
      l1[j] = wk[0] * std::fabs(f0[j]);
    }
    for (std::size_t i = 1; i < x.size(); ++i) {
      Vec fp = f(c + h * x[i]), fm = f(c - h * x[i]);
      for (std::size_t j = 0; j < K; ++j) {
        kr[j] += wk[i] * (fp[j] + fm[j]);
        l1[j] += wk[i] * (std::fabs(fp[j]) + std::fabs(fm[j]));
        if (i % 2 == 0) ga[j] += wg[i / 2] * (fp[j] + fm[j]);
      }
    }
    Piece p;
    p.err = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
      p.k[j] = h * kr[j];
      p.l1[j] = std::fabs(h) * l1[j];
      p.err = std::max(p.err, std::fabs(h * (kr[j] - ga[j])));
    }
    return p;
  };
  Vec total{};
  double total_err = 0.0;
  if (a == b) {
    if (error) *error = 0.0;
    return total;
  }
  Piece whole = rule(a, b);
  double scale = 0.0;
  for (double v : whole.l1) scale = std::max(scale, v);
  double target = std::max(rel_tol * scale, abs_tol);
  struct Item {
    double lo, hi;
    unsigned depth;
    Piece p;
  };
  std::vector<Item> stack{{a, b, 0, whole}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    double width_share = (it.hi - it.lo) / (b - a);
    if (it.p.err <= target * std::max(width_share, 1e-3) || it.depth >= max_depth) {
      for (std::size_t j = 0; j < K; ++j) total[j] += it.p.k[j];
      total_err += it.p.err;
      continue;
    }
    double m = 0.5 * (it.lo + it.hi);
    stack.push_back({it.lo, m, it.depth + 1, rule(it.lo, m)});
    stack.push_back({m, it.hi, it.depth + 1, rule(m, it.hi)});
  }
  if (error) *error = total_err;
  return total;
}

//! Fixed Gauss-Legendre rule with N points on [a, b] (exact for degree 2N-1).
template <unsigned N, class F>
double gauss_fixed(F&& f, double a, double b) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss<double, N>::integrate(f, a, b);
}

//--------------------------------------------------------------------------------------
// Polynomials (ascending coefficients)
//--------------------------------------------------------------------------------------
struct Poly {
  std::vector<double> c;  //!< c[k] multiplies x^k

  Poly() = default;
  explicit Poly(std::vector<double> coeffs) : c(std::move(coeffs)) { trim(); }
  int degree() const { return static_cast<int>(c.size()) - 1; }
  double operator()(double x) const {
    double s = 0.0;
    for (int k = degree(); k >= 0; --k) s = s * x + c[k];
    return s;
  }
  //! Sum of |c_k| |x|^k, the scale against which a value is judged as zero.
  double magnitude(double x) const {
    double s = 0.0, ax = std::fabs(x);
    for (int k = degree(); k >= 0; --k) s = s * ax + std::fabs(c[k]);
    return s;
  }
  Poly derivative() const {
    std::vector<double> d;
    for (int k = 1; k <= degree(); ++k) d.push_back(k * c[k]);
    if (d.empty()) d.push_back(0.0);
    return Poly(d);
  }
  void trim() {
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    if (c.empty()) c.push_back(0.0);
  }
};

Poly operator*(const Poly& a, const Poly& b);
Poly operator+(const Poly& a, const Poly& b);
Poly operator-(const Poly& a, const Poly& b);
Poly operator*(double s, const Poly& a);

struct PolyRoot {
  double x;
  int multiplicity;
};

//! Real roots of p in the open interval (a, b) with multiplicity, found by a derivative
//! cascade: critical points split (a, b) into monotone pieces, each bracketed by sign.
//! A critical point where |p| is below zero_tol * magnitude is reported as a double
//! root. Roots closer than merge_tol * max(1, |x|) are merged.
std::vector<PolyRoot> real_roots(const Poly& p, double a, double b, double zero_tol = 1e-13,
                                 double merge_tol = 1e-7);

//! Cauchy bound: every root of p satisfies |x| < bound.
double cauchy_bound(const Poly& p);

//! Real eigenvalues of the companion matrix (independent oracle). Eigenvalues whose
//! imaginary part is below imag_tol * max(1, |z|) count as real.
std::vector<double> companion_real_roots(const Poly& p, double imag_tol = 1e-7);

//--------------------------------------------------------------------------------------
// Dormand-Prince 5(4) with PI step control and 4th-order dense output
//--------------------------------------------------------------------------------------
struct Dopri5Options {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h0 = 0.0;  //!< initial step, 0 selects automatically
  double hmax = std::numeric_limits<double>::infinity();
  double hmin = 1e-14;
  std::size_t max_steps = 5000000;
};

template <std::size_t N>
class Dopri5 {
 public:
  using State = std::array<double, N>;
  using Rhs = std::function<void(double, const State&, State&)>;

  Dopri5(Rhs rhs, Dopri5Options opt) : f_(std::move(rhs)), opt_(opt) {}

  void reset(double t0, const State& y0) {
    t_ = t0;
    y_ = y0;
    f_(t_, y_, k1_);
    nfev_ = 1;
    h_ = opt_.h0 > 0 ? opt_.h0 : initial_step();
    errold_ = 1e-4;
    steps_ = 0;
  }

  //! Take one accepted step towards t_end (sign of t_end - t picks direction).
  //! After the call, [t_prev(), t()] is the dense-output interval.
  bool step(double t_end) {
    double dir = t_end >= t_ ? 1.0 : -1.0;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double beta = 0.04, expo1 = 0.2 - beta * 0.75, safe = 0.9, facl = 0.2,
                            facr = 10.0;
    State ytmp, k7;
    while (true) {
      if (++steps_ > opt_.max_steps) throw Error(ErrorCode::StepUnderflow, "step budget exhausted");
      double h = std::min(std::fabs(h_), opt_.hmax);
      if (std::fabs(t_end - t_) < h) h = std::fabs(t_end - t_);
      if (h < opt_.hmin) throw Error(ErrorCode::StepUnderflow, "step size below floor");
      h *= dir;
      for (std::size_t i = 0; i < N; ++i) ytmp[i] = y_[i] + h * a21 * k1_[i];
      f_(t_ + c2 * h, ytmp, k2_);
      for (std::size_t i = 0; i < N; ++i) ytmp[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
      f_(t_ + c3 * h, ytmp, k3_);
      for (std::size_t i = 0; i < N; ++i)
        ytmp[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
      f_(t_ + c4 * h, ytmp, k4_);
      for (std::size_t i = 0; i < N; ++i)
        ytmp[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
      f_(t_ + c5 * h, ytmp, k5_);
      for (std::size_t i = 0; i < N; ++i)
        ytmp[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
      f_(t_ + h, ytmp, k6_);
      State ynew;
      for (std::size_t i = 0; i < N; ++i)
        ynew[i] = y_[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]);
      f_(t_ + h, ynew, k7);
      nfev_ += 6;
      double err = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        double sk = opt_.atol + opt_.rtol * std::max(std::fabs(y_[i]), std::fabs(ynew[i]));
        double ei = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] + e7 * k7[i]);
        err += (ei / sk) * (ei / sk);
      }
      err = std::sqrt(err / N);
      if (!std::isfinite(err)) {
        h_ = std::fabs(h) * 0.25;
        continue;
      }
      double fac11 = std::pow(err, expo1);
      double fac = fac11 / std::pow(errold_, beta);
      fac = std::max(1.0 / facr, std::min(1.0 / facl, fac / safe));
      double hnew = std::fabs(h) / fac;
      if (err <= 1.0) {
        errold_ = std::max(err, 1e-4);
        // dense output coefficients (Hairer's continuous extension)
        static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                                d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                                d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
        for (std::size_t i = 0; i < N; ++i) {
          double ydiff = ynew[i] - y_[i];
          double bspl = h * k1_[i] - ydiff;
          r1_[i] = y_[i];
          r2_[i] = ydiff;
          r3_[i] = bspl;
          r4_[i] = ydiff - h * k7[i] - bspl;
          r5_[i] = h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] + d6 * k6_[i] + d7 * k7[i]);
        }
        tprev_ = t_;
        hlast_ = h;
        t_ = (std::fabs(t_end - (t_ + h)) <= 1e-15 * std::max(1.0, std::fabs(t_end))) ? t_end : t_ + h;
        y_ = ynew;
        k1_ = k7;
        h_ = hnew;
        return true;
      }
      h_ = std::fabs(h) / std::min(1.0 / facl, fac11 / safe);
    }
  }

  //! Dense output on the last accepted step.
  State dense(double t) const {
    State out;
    double s = (t - tprev_) / hlast_;
    double s1 = 1.0 - s;
    for (std::size_t i = 0; i < N; ++i)
      out[i] = r1_[i] + s * (r2_[i] + s1 * (r3_[i] + s * (r4_[i] + s1 * r5_[i])));
    return out;
  }

  double t() const { return t_; }
  double t_prev() const { return tprev_; }
  const State& y() const { return y_; }
  std::size_t steps() const { return steps_; }
  std::size_t evaluations() const { return nfev_; }
  //! Restart from a state on the current dense interval (after a terminal event).
  void truncate_to(double t) {
    State ys = dense(t);
    reset(t, ys);
  }

 private:
  double initial_step() {
    State ytmp, f1;
    double d0 = 0, d1 = 0;
    for (std::size_t i = 0; i < N; ++i) {
      double sk = opt_.atol + opt_.rtol * std::fabs(y_[i]);
      d0 += (y_[i] / sk) * (y_[i] / sk);
      d1 += (k1_[i] / sk) * (k1_[i] / sk);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, opt_.hmax);
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y_[i] + h * k1_[i];
    f_(t_ + h, ytmp, f1);
    double d2 = 0;
    for (std::size_t i = 0; i < N; ++i) {
      double sk = opt_.atol + opt_.rtol * std::fabs(y_[i]);
      d2 += ((f1[i] - k1_[i]) / sk) * ((f1[i] - k1_[i]) / sk);
    }
    d2 = std::sqrt(d2 / N) / h;
    double h1 = (std::max(d1, d2) <= 1e-15) ? std::max(1e-6, h * 1e-3)
                                             : std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min({100 * h, h1, opt_.hmax});
  }

  Rhs f_;
  Dopri5Options opt_;
  double t_ = 0, tprev_ = 0, h_ = 0, hlast_ = 1, errold_ = 1e-4;
  State y_{}, k1_{}, k2_{}, k3_{}, k4_{}, k5_{}, k6_{};
  State r1_{}, r2_{}, r3_{}, r4_{}, r5_{};
  std::size_t steps_ = 0, nfev_ = 0;
};

}  // namespace num
}  // namespace kerrshell

#endif  // KERRSHELL_NUMERICS_HPP_
