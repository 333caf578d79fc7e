//========================================================================================
// kerrshell: polynomial utilities and the companion-matrix oracle
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#include "kerrshell/numerics.hpp"

#include <algorithm>
#include <complex>

#include <Eigen/Dense>

namespace kerrshell {
namespace num {

Poly operator*(const Poly& a, const Poly& b) {
  std::vector<double> c(a.c.size() + b.c.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c.size(); ++i)
    for (std::size_t j = 0; j < b.c.size(); ++j) c[i + j] += a.c[i] * b.c[j];
  return Poly(c);
}

Poly operator+(const Poly& a, const Poly& b) {
  std::vector<double> c(std::max(a.c.size(), b.c.size()), 0.0);
  for (std::size_t i = 0; i < a.c.size(); ++i) c[i] += a.c[i];
  for (std::size_t i = 0; i < b.c.size(); ++i) c[i] += b.c[i];
  return Poly(c);
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-1.0) * b; }

Poly operator*(double s, const Poly& a) {
  std::vector<double> c = a.c;
  for (auto& x : c) x *= s;
  return Poly(c);
}

double cauchy_bound(const Poly& p) {
  int n = p.degree();
  if (n < 1) return 1.0;
  double m = 0.0;
  for (int k = 0; k < n; ++k) m = std::max(m, std::fabs(p.c[k] / p.c[n]));
  return 1.0 + m;
}

namespace {

int sgn(double x) { return (x > 0) - (x < 0); }

std::vector<PolyRoot> merge_roots(std::vector<PolyRoot> roots, double merge_tol) {
  std::sort(roots.begin(), roots.end(), [](const PolyRoot& u, const PolyRoot& v) { return u.x < v.x; });
  std::vector<PolyRoot> out;
  for (const auto& r : roots) {
    if (!out.empty() && std::fabs(r.x - out.back().x) <= merge_tol * std::max(1.0, std::fabs(r.x))) {
      int m = out.back().multiplicity + r.multiplicity;
      out.back().x = (out.back().x * out.back().multiplicity + r.x * r.multiplicity) / m;
      out.back().multiplicity = m;
    } else {
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace

std::vector<PolyRoot> real_roots(const Poly& p, double a, double b, double zero_tol, double merge_tol) {
  std::vector<PolyRoot> roots;
  int n = p.degree();
  if (n < 1 || !(b > a)) return roots;
  if (n == 1) {
    double x = -p.c[0] / p.c[1];
    if (x > a && x < b) roots.push_back({x, 1});
    return roots;
  }
  std::vector<PolyRoot> crit = real_roots(p.derivative(), a, b, zero_tol, merge_tol);
  // Critical points where p vanishes to tolerance are multiple roots.
  std::vector<double> knots{a};
  std::vector<bool> knot_zero{false};
  for (const auto& c : crit) {
    double v = p(c.x);
    bool zero = std::fabs(v) <= zero_tol * p.magnitude(c.x);
    if (zero) roots.push_back({c.x, c.multiplicity + 1});
    knots.push_back(c.x);
    knot_zero.push_back(zero);
  }
  knots.push_back(b);
  knot_zero.push_back(false);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (knot_zero[i] || knot_zero[i + 1]) continue;
    double x0 = knots[i], x1 = knots[i + 1];
    double f0 = p(x0), f1 = p(x1);
    // exact zeros only occur at flagged critical knots or at the excluded ends a, b
    if (sgn(f0) == 0 || sgn(f1) == 0) continue;
    if (sgn(f0) != sgn(f1)) roots.push_back({find_root([&](double x) { return p(x); }, x0, x1, f0, f1), 1});
  }
  return merge_roots(roots, merge_tol);
}

std::vector<double> companion_real_roots(const Poly& p, double imag_tol) {
  int n = p.degree();
  std::vector<double> out;
  if (n < 1) return out;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -p.c[i] / p.c[n];
  Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
  for (int i = 0; i < n; ++i) {
    std::complex<double> z = es.eigenvalues()[i];
    if (std::fabs(z.imag()) <= imag_tol * std::max(1.0, std::abs(z))) out.push_back(z.real());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace num
}  // namespace kerrshell
