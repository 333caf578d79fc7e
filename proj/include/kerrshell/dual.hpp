//========================================================================================
// kerrshell: forward-mode dual numbers for exact first (and nested second) derivatives
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#ifndef KERRSHELL_DUAL_HPP_
#define KERRSHELL_DUAL_HPP_

#include <cmath>

namespace kerrshell {

//! Dual number v + d*eps with eps^2 = 0. Nesting Dual<Dual<double>> gives second
//! derivatives. Templates in the library are written against this interface.
template <class T>
struct Dual {
  T v{};
  T d{};
  Dual() = default;
  Dual(double x) : v(x), d(0.0) {}  // NOLINT: implicit promotion from constants
  Dual(T x, T dx) : v(x), d(dx) {}
};

template <class T> struct is_dual { static constexpr bool value = false; };
template <class T> struct is_dual<Dual<T>> { static constexpr bool value = true; };

//! Plain value of a (possibly nested) dual number.
inline double value_of(double x) { return x; }
template <class T> double value_of(const Dual<T>& x) { return value_of(x.v); }

template <class T> Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
template <class T> Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T inv = T(1.0) / b.v;
  return {a.v * inv, (a.d * b.v - a.v * b.d) * inv * inv};
}
template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T> Dual<T> operator+(const Dual<T>& a, double b) { return {a.v + b, a.d}; }
template <class T> Dual<T> operator+(double a, const Dual<T>& b) { return {a + b.v, b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, double b) { return {a.v - b, a.d}; }
template <class T> Dual<T> operator-(double a, const Dual<T>& b) { return {a - b.v, -b.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, double b) { return {a.v * b, a.d * b}; }
template <class T> Dual<T> operator*(double a, const Dual<T>& b) { return {a * b.v, a * b.d}; }
template <class T> Dual<T> operator/(const Dual<T>& a, double b) { return {a.v / b, a.d / b}; }
template <class T> Dual<T> operator/(double a, const Dual<T>& b) { return Dual<T>(T(a), T(0.0)) / b; }
template <class T> Dual<T>& operator+=(Dual<T>& a, const Dual<T>& b) { return a = a + b; }
template <class T> Dual<T>& operator-=(Dual<T>& a, const Dual<T>& b) { return a = a - b; }
template <class T> Dual<T>& operator*=(Dual<T>& a, const Dual<T>& b) { return a = a * b; }
template <class T> Dual<T>& operator/=(Dual<T>& a, const Dual<T>& b) { return a = a / b; }
template <class T> bool operator<(const Dual<T>& a, const Dual<T>& b) { return a.v < b.v; }
template <class T> bool operator>(const Dual<T>& a, const Dual<T>& b) { return a.v > b.v; }
template <class T> bool operator<(const Dual<T>& a, double b) { return a.v < b; }
template <class T> bool operator>(const Dual<T>& a, double b) { return a.v > b; }

template <class T> Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  T s = sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}
template <class T> Dual<T> sin(const Dual<T>& a) { using std::sin; using std::cos; return {sin(a.v), a.d * cos(a.v)}; }
template <class T> Dual<T> cos(const Dual<T>& a) { using std::sin; using std::cos; return {cos(a.v), -(a.d * sin(a.v))}; }
template <class T> Dual<T> exp(const Dual<T>& a) { using std::exp; T e = exp(a.v); return {e, a.d * e}; }
template <class T> Dual<T> log(const Dual<T>& a) { using std::log; return {log(a.v), a.d / a.v}; }
template <class T> Dual<T> atan(const Dual<T>& a) { using std::atan; return {atan(a.v), a.d / (1.0 + a.v * a.v)}; }
template <class T> Dual<T> acos(const Dual<T>& a) {
  using std::acos; using std::sqrt;
  return {acos(a.v), -(a.d / sqrt(1.0 - a.v * a.v))};
}
template <class T> Dual<T> pow(const Dual<T>& a, double p) {
  using std::pow;
  return {pow(a.v, p), a.d * (p * pow(a.v, p - 1.0))};
}
template <class T> Dual<T> cbrt(const Dual<T>& a) {
  using std::cbrt;
  T c = cbrt(a.v);
  return {c, a.d / (3.0 * c * c)};
}

//! Seed helpers for gradients of f(x, y).
inline Dual<double> seed(double x, bool active) { return {x, active ? 1.0 : 0.0}; }

}  // namespace kerrshell

#endif  // KERRSHELL_DUAL_HPP_
