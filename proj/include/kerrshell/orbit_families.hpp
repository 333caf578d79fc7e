//========================================================================================
// kerrshell: radial/angular quartics, their roots, circular and spherical orbits and
// the partition of the (eps, ell_z) parameter plane
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#ifndef KERRSHELL_ORBIT_FAMILIES_HPP_
#define KERRSHELL_ORBIT_FAMILIES_HPP_

#include <string>
#include <vector>

#include "kerrshell/kerr_geometry.hpp"
#include "kerrshell/numerics.hpp"

// All operations in this header use M = 1 units: radii in units of M, eps and ell_z per
// unit rest mass (ell_z in units of M). Only params.d() is read from KerrParams.

namespace kerrshell {

//! Integrals of motion (eps, ell_z, q).
struct ConservedSet {
  double eps = 0.0;
  double ell = 0.0;
  double q = 0.0;
};

enum class Branch { Direct, Retrograde };
const char* branch_name(Branch b);
//! Branch of ell_z: direct when d * ell_z >= 0 (d = 0 counts as direct).
Branch branch_of(double d, double ell);

struct RadialPoly {
  double R, dR, d2R;
};
//! R(r) = (eps(r^2+d^2) - d ell)^2 - Delta(r)(r^2 + (ell - d eps)^2 + q), with derivatives.
RadialPoly radial_poly(double r, const ConservedSet& cs, const KerrParams& p);
//! Expanded coefficients of R (ascending powers of r).
num::Poly radial_coeffs(const ConservedSet& cs, const KerrParams& p);
//! T(Y) = q - (q + d^2(1 - eps^2) + ell^2) Y^2 + d^2(1 - eps^2) Y^4.
double angular_poly(double Y, const ConservedSet& cs, const KerrParams& p);
//! Physical root y = cos^2(theta_min) of T in Y^2 (the smaller root). Returns 1 when the
//! motion reaches the axis (ell = 0 and q beyond the polar value).
double theta_turning_y(const ConservedSet& cs, const KerrParams& p);
//! Both roots of A y^2 - B y + q = 0 in [0, 1] (needed when the angular potential is not
//! monotone, eps > 1 with d^2(eps^2 - 1) > ell^2).
std::vector<double> theta_turning_all(const ConservedSet& cs, const KerrParams& p);
//! qbar(r) = R(r, q = 0) / Delta(r); R(r, q) = Delta(r)(qbar(r) - q).
double qbar(double r, double eps, double ell, const KerrParams& p);
//! Carter constant of a point with angular velocity component v_theta.
double carter_q(double theta, double v_theta, double eps, double ell, const KerrParams& p);

//! Root-table case per the root tables: table 1..5 (0 = not tabulated), 1-based column.
struct RootCase {
  int table = 0;
  int column = 0;
  int expected_count = 0;  //!< roots in (r_H, inf), with multiplicity
  std::string label;
};

struct RadialRoot {
  double r;
  int multiplicity;
};

struct RootSet {
  std::vector<RadialRoot> roots;  //!< ascending, in (r_H, inf)
  RootCase rcase;
  int count() const;
  bool has_multiple() const;
};

//! Real roots of R(., cs) in (r_H, inf) by derivative-cascade bracketing and TOMS 748.
//! The case tag is filled when with_case is true (it costs an extra quintic solve).
RootSet radial_roots(const ConservedSet& cs, const KerrParams& p, bool with_case = true);
//! Critical points of qbar in (r_H, inf) with their qbar values (the Carter constants
//! of spherical orbits at fixed (eps, ell_z)).
std::vector<std::pair<double, double>> qbar_critical(double eps, double ell, const KerrParams& p);
//! Table/column for (eps, ell_z, q).
RootCase root_case(const ConservedSet& cs, const KerrParams& p);

//--------------------------------------------------------------------------------------
// Circular orbits
//--------------------------------------------------------------------------------------
struct CircularOrbitData {
  double r_c;
  Branch branch;
  double eps;  //!< Phi(r_c)
  double ell;  //!< Psi(r_c), signed
};

struct IscoData {
  double r_ms;
  double eps_min;
  double ell_min;  //!< signed (retrograde values are negative for d > 0)
};

//! (Phi(r), Psi(r)) of the branch; throws InvalidInput for r <= r_ph of the branch.
std::pair<double, double> circular_curves(double r, Branch b, const KerrParams& p);
CircularOrbitData circular_orbit(double r, Branch b, const KerrParams& p);
double photon_radius(Branch b, const KerrParams& p);
IscoData isco(Branch b, const KerrParams& p);
double marginally_bound_radius(Branch b, const KerrParams& p);
//! rho^{mb} = sqrt(Delta(r_mb)).
double marginally_bound_rho(Branch b, const KerrParams& p);

//! Unstable circular radius at energy eps (in (r_ph, r_ms]); eps > eps_min.
double r_max_of_eps(double eps, Branch b, const KerrParams& p);
//! Stable circular radius at energy eps (in [r_ms, inf)); eps_min < eps < 1.
double r_min_of_eps(double eps, Branch b, const KerrParams& p);

struct AngularMomentumBounds {
  double ell_lb;
  double ell_ub;  //!< NaN for eps >= 1 (no stable circular orbit)
};
//! ell_lb = Psi(r_max(eps)), ell_ub = Psi(r_min(eps)). Signed; |ell_lb| <= |ell_ub|.
AngularMomentumBounds angular_momentum_bounds(double eps, Branch b, const KerrParams& p);
//! Inverse of ell_lb: eps_s(ell) (|ell| >= |ell_min| of the branch).
double eps_s(double ell, Branch b, const KerrParams& p);
//! Inverse of ell_ub: eps_m(ell).
double eps_m(double ell, Branch b, const KerrParams& p);

//--------------------------------------------------------------------------------------
// Spherical orbits
//--------------------------------------------------------------------------------------
struct SphericalOrbitData {
  double r_s;
  double eps;
  double ell;    //!< eps * ell_c
  double ell_c;  //!< ell / eps
  double eta;    //!< q / eps^2
  double q;
};

//! Spherical orbit through r_s at energy eps on the minus branch of the double-root
//! system. Throws NoSphericalOrbit if eta < 0, InvalidInput for d = 0 (degenerate).
SphericalOrbitData spherical_branch(double r_s, double eps, const KerrParams& p, bool minus_branch = true);
//! All spherical orbits with given (eps, ell_z): critical points of qbar with q >= 0.
std::vector<SphericalOrbitData> spherical_solve(double eps, double ell, const KerrParams& p);

//--------------------------------------------------------------------------------------
// Parameter regions and orbit classification
//--------------------------------------------------------------------------------------
enum class ParameterRegion {
  ABoundPlus,
  ABoundMinus,
  AScatteredPlus,
  AScatteredMinus,
  ACirc,
  AAbsBound,
  AAbsUnbound,
  Inadmissible
};
const char* region_name(ParameterRegion r);

struct RegionResult {
  ParameterRegion region;
  bool boundary = false;  //!< within tol of a circular-orbit curve
};

RegionResult classify_region(double eps, double ell, const KerrParams& p, double tol = 1e-9);

enum class OrbitClass {
  Trapped,
  Plunging,
  PlungingFromInfinity,
  Scattered,
  Escaping,
  Spherical,
  Circular,
  AsymptoticToCircular,
  Indeterminate
};
const char* orbit_class_name(OrbitClass c);

//! Forward-time fate implied by an orbit class.
enum class Fate { Trapped, Plunging, Escaped, Indeterminate };
const char* fate_name(Fate f);
Fate expected_fate(OrbitClass c);

//! Classification of the geodesic with constants cs through r0 with radial direction
//! sign_vr in {-1, 0, +1}. Requires R(r0) >= 0 and T(cos theta0) >= 0 within tolerance.
OrbitClass classify_orbit(const ConservedSet& cs, BLPoint start, int sign_vr, const KerrParams& p,
                          double margin = 1e-7);

}  // namespace kerrshell

#endif  // KERRSHELL_ORBIT_FAMILIES_HPP_
