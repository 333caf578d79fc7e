//========================================================================================
// kerrshell: tests for radial roots, circular/spherical orbits and parameter regions
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#include <cmath>
#include <random>

#include "doctest.h"
#include "kerrshell/orbit_families.hpp"

using namespace kerrshell;

namespace {

int companion_count(const ConservedSet& cs, const KerrParams& p) {
  double rH = p.r_plus();
  int n = 0;
  for (double x : num::companion_real_roots(radial_coeffs(cs, p)))
    if (x > rH) ++n;
  return n;
}

}  // namespace

TEST_CASE("radial polynomial") {
  KerrParams p = KerrParams::make(1.0, 0.5);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    ConservedSet cs{1.0 + 0.5 * U(rng), 5.0 * U(rng), 10.0 * U(rng)};
    double r = 2.0 + 20.0 * std::fabs(U(rng));
    RadialPoly rp = radial_poly(r, cs, p);
    num::Poly c = radial_coeffs(cs, p);
    CHECK(std::fabs(rp.R - c(r)) <= 1e-12 * c.magnitude(r));
    num::Poly dc = c.derivative();
    CHECK(std::fabs(rp.dR - dc(r)) <= 1e-12 * dc.magnitude(r));
    CHECK(std::fabs(rp.d2R - dc.derivative()(r)) <= 1e-12 * dc.derivative().magnitude(r));
    // R = Delta (qbar - q)
    double D = r * r - 2 * r + 0.25;
    CHECK(std::fabs(rp.R - D * (qbar(r, cs.eps, cs.ell, p) - cs.q)) <= 1e-11 * c.magnitude(r));
  }
  ConservedSet cs{0.93, 3.1, 2.0};
  double rH = p.r_plus();
  double expect = std::pow(2 * rH * cs.eps - 0.5 * cs.ell, 2);
  CHECK(radial_poly(rH, cs, p).R == doctest::Approx(expect).epsilon(1e-12));
  num::Poly cubic = radial_coeffs({1.0, 3.0, 1.0}, p);
  cubic.trim();
  CHECK(cubic.c.size() == 4);
}

TEST_CASE("angular polynomial") {
  KerrParams p = KerrParams::make(1.0, 0.7);
  ConservedSet cs{0.95, 2.5, 3.0};
  CHECK(angular_poly(0.0, cs, p) == cs.q);
  ConservedSet eq{0.95, 2.5, 0.0};
  CHECK(angular_poly(0.0, eq, p) == 0.0);
  CHECK(std::fabs(angular_poly(1e-4, eq, p)) < 1e-7);
  double y = theta_turning_y(cs, p);
  CHECK(std::fabs(angular_poly(std::sqrt(y), cs, p)) < 1e-12);
  CHECK(y > 0.0);
  CHECK(y < 1.0);
  for (double yy : theta_turning_all(cs, p)) CHECK(std::fabs(angular_poly(std::sqrt(yy), cs, p)) < 1e-12);
}

TEST_CASE("special orbits at a = 0") {
  KerrParams p = KerrParams::make(1.0, 0.0);
  for (Branch b : {Branch::Direct, Branch::Retrograde}) {
    CHECK(std::fabs(photon_radius(b, p) - 3.0) < 1e-12);
    IscoData is = isco(b, p);
    CHECK(std::fabs(is.r_ms - 6.0) < 1e-12);
    CHECK(std::fabs(is.eps_min - std::sqrt(8.0 / 9.0)) < 1e-12);
    CHECK(std::fabs(std::fabs(is.ell_min) - std::sqrt(12.0)) < 1e-12);
    CHECK(std::fabs(marginally_bound_radius(b, p) - 4.0) < 1e-12);
  }
  CHECK_THROWS_AS(circular_curves(2.9, Branch::Direct, p), Error);
}

TEST_CASE("circular orbits are double roots and extrema of Phi, Psi at the ISCO") {
  for (double d : {-0.8, -0.3, 0.2, 0.5, 0.9}) {
    KerrParams p = KerrParams::make(1.0, d);
    for (Branch b : {Branch::Direct, Branch::Retrograde}) {
      double rph = photon_radius(b, p);
      for (double r : {rph + 0.05, rph + 1.0, 8.0, 30.0}) {
        auto [e, l] = circular_curves(r, b, p);
        CHECK(branch_of(d, l) == b);
        ConservedSet cs{e, l, 0.0};
        RadialPoly rp = radial_poly(r, cs, p);
        double sc = radial_coeffs(cs, p).magnitude(r);
        CHECK(std::fabs(rp.R) < 1e-10 * sc);
        CHECK(std::fabs(rp.dR) < 1e-10 * sc);
      }
      IscoData is = isco(b, p);
      double h = 1e-4;
      auto Phi = [&](double r) { return circular_curves(r, b, p).first; };
      auto Psi = [&](double r) { return circular_curves(r, b, p).second; };
      CHECK(std::fabs((Phi(is.r_ms + h) - Phi(is.r_ms - h)) / (2 * h)) < 1e-6);
      CHECK(std::fabs((Psi(is.r_ms + h) - Psi(is.r_ms - h)) / (2 * h)) < 1e-6);
      // marginally bound: eps = 1
      CHECK(std::fabs(Phi(marginally_bound_radius(b, p)) - 1.0) < 1e-12);
      // ISCO is a triple root of R
      RootSet rs = radial_roots({is.eps_min, is.ell_min, 0.0}, p, false);
      int mult = 0;
      for (auto& rr : rs.roots)
        if (std::fabs(rr.r - is.r_ms) < 1e-3) mult = rr.multiplicity;
      CHECK(mult >= 2);
    }
  }
}

TEST_CASE("angular momentum bounds and inverses") {
  for (double d : {0.0, 0.5, -0.5, 0.9}) {
    KerrParams p = KerrParams::make(1.0, d);
    for (Branch b : {Branch::Direct, Branch::Retrograde}) {
      IscoData is = isco(b, p);
      auto bnd = angular_momentum_bounds(is.eps_min + 1e-9, b, p);
      CHECK(bnd.ell_lb == doctest::Approx(is.ell_min).epsilon(1e-3));
      CHECK(bnd.ell_ub == doctest::Approx(is.ell_min).epsilon(1e-3));
      double prev = std::fabs(bnd.ell_lb);
      for (int i = 1; i <= 40; ++i) {
        double e = is.eps_min + (1.5 - is.eps_min) * i / 40.0;
        auto bb = angular_momentum_bounds(e, b, p);
        CHECK(std::fabs(bb.ell_lb) > prev);
        prev = std::fabs(bb.ell_lb);
        CHECK(std::fabs(eps_s(bb.ell_lb, b, p) - e) < 1e-9);
        if (e < 1.0) {
          CHECK(std::fabs(bb.ell_ub) > std::fabs(bb.ell_lb));
          CHECK(std::fabs(eps_m(bb.ell_ub, b, p) - e) < 1e-9);
        } else {
          CHECK(std::isnan(bb.ell_ub));
        }
      }
      CHECK_THROWS_AS(angular_momentum_bounds(is.eps_min - 1e-3, b, p), Error);
      // eps_s decreasing-then-increasing is not claimed; eps_s increasing in |ell|, eps_m increasing too
      double e1 = eps_s(is.ell_min * 1.1, b, p), e2 = eps_s(is.ell_min * 1.2, b, p);
      CHECK(e2 > e1);
      double m1 = eps_m(is.ell_min * 1.1, b, p), m2 = eps_m(is.ell_min * 1.2, b, p);
      CHECK(m2 > m1);
      CHECK(m2 < 1.0);
    }
  }
}

TEST_CASE("spherical orbits") {
  for (double d : {0.3, 0.5, 0.9, -0.5}) {
    KerrParams p = KerrParams::make(1.0, d);
    // q = 0 reduces to circular
    for (double e : {0.97, 0.99, 1.05}) {
      double rm = r_max_of_eps(e, Branch::Direct, p);
      SphericalOrbitData s = spherical_branch(rm, e, p);
      CHECK(std::fabs(s.ell_c * e - angular_momentum_bounds(e, Branch::Direct, p).ell_lb) < 1e-9);
      CHECK(std::fabs(s.q) < 1e-9);
    }
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int accepted = 0;
    double rph = photon_radius(Branch::Retrograde, p);
    for (int i = 0; i < 300; ++i) {
      // between the direct and retrograde circular energies at r, so that eta >= 0
      double r = rph + 0.2 + 15.0 * U(rng);
      double ep = circular_curves(r, Branch::Direct, p).first;
      double em = circular_curves(r, Branch::Retrograde, p).first;
      double e = ep + (em - ep) * (0.001 + 0.998 * U(rng));
      SphericalOrbitData s = spherical_branch(r, e, p);
      ++accepted;
      ConservedSet cs{s.eps, s.ell, s.q};
      RadialPoly rp = radial_poly(r, cs, p);
      double sc = radial_coeffs(cs, p).magnitude(r);
      CHECK(std::fabs(rp.R) < 1e-9 * sc);
      CHECK(std::fabs(rp.dR) < 1e-9 * sc);
      CHECK(s.eta > 0.0);
      // the other root of the double-root system has eta < 0
      CHECK_THROWS_AS(spherical_branch(r, e, p, false), Error);
      // outside the energy window there is no spherical orbit
      if (em * 1.01 * em * 1.01 >= (r - 1.0) / r) CHECK_THROWS_AS(spherical_branch(r, em * 1.01, p), Error);
    }
    CHECK(accepted == 300);
    // spherical_solve returns double roots
    for (const auto& s : spherical_solve(0.96, 2.0 * (d > 0 ? 1 : -1), p)) {
      ConservedSet cs{s.eps, s.ell, s.q};
      RadialPoly rp = radial_poly(s.r_s, cs, p);
      double sc = radial_coeffs(cs, p).magnitude(s.r_s);
      CHECK(std::fabs(rp.R) < 1e-9 * sc);
      CHECK(std::fabs(rp.dR) < 1e-9 * sc);
    }
  }
  CHECK_THROWS_AS(spherical_branch(6.0, 0.95, KerrParams::make(1.0, 0.0)), Error);
}

TEST_CASE("parameter regions") {
  KerrParams p = KerrParams::make(1.0, 0.5);
  CHECK(classify_region(0.98, 4.0, p).region == ParameterRegion::ABoundPlus);
  IscoData ip = isco(Branch::Direct, p), im = isco(Branch::Retrograde, p);
  for (double l : {-6.0, -1.0, 0.0, 2.0, 3.0, 10.0})
    CHECK(classify_region(ip.eps_min - 1e-3, l, p).region == ParameterRegion::AAbsBound);
  CHECK(classify_region(0.98, -5.0, p).region == ParameterRegion::ABoundMinus);
  CHECK(classify_region(1.1, 5.0, p).region == ParameterRegion::AScatteredPlus);
  CHECK(classify_region(1.1, -7.0, p).region == ParameterRegion::AScatteredMinus);
  CHECK(classify_region(1.1, 0.5, p).region == ParameterRegion::AAbsUnbound);
  CHECK(classify_region(-0.1, 1.0, p).region == ParameterRegion::Inadmissible);
  auto bnd = angular_momentum_bounds(0.97, Branch::Direct, p);
  RegionResult on = classify_region(0.97, bnd.ell_lb, p);
  CHECK(on.region == ParameterRegion::ACirc);
  CHECK(on.boundary);
  CHECK(classify_region(im.eps_min + 1e-3, im.ell_min, p).region != ParameterRegion::Inadmissible);
  // symmetry under (d, ell) -> (-d, -ell)
  KerrParams m = KerrParams::make(1.0, -0.5);
  CHECK(classify_region(0.98, -4.0, m).region == ParameterRegion::ABoundPlus);
}

TEST_CASE("root counts for A_bound pairs with q = 0: three simple roots") {
  KerrParams p = KerrParams::make(1.0, 0.5);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (Branch b : {Branch::Direct, Branch::Retrograde}) {
    IscoData is = isco(b, p);
    for (int i = 0; i < 100; ++i) {
      double e = is.eps_min + (1.0 - is.eps_min) * (0.01 + 0.98 * U(rng));
      auto bnd = angular_momentum_bounds(e, b, p);
      double l = bnd.ell_lb + (bnd.ell_ub - bnd.ell_lb) * (0.01 + 0.98 * U(rng));
      RootSet rs = radial_roots({e, l, 0.0}, p);
      REQUIRE(rs.roots.size() == 3);
      for (auto& r : rs.roots) CHECK(r.multiplicity == 1);
      CHECK(rs.rcase.expected_count == 3);
      CHECK(companion_count({e, l, 0.0}, p) == 3);
    }
  }
}

TEST_CASE("root table examples") {
  KerrParams p = KerrParams::make(1.0, 0.5);
  RootSet none = radial_roots({1.2, 3.0, -2.0}, p);
  CHECK(none.count() == 0);
  CHECK(none.rcase.table == 2);
  // three roots inside the bound band for small q
  RootSet three = radial_roots({0.98, 4.0, 0.5}, p);
  CHECK(three.count() == 3);
  CHECK(three.rcase.expected_count == 3);
  // double root at ell = ell_lb
  auto bnd = angular_momentum_bounds(0.97, Branch::Direct, p);
  RootSet dbl = radial_roots({0.97, bnd.ell_lb, 0.0}, p);
  CHECK(dbl.has_multiple());
  CHECK(dbl.count() == 3);
}

TEST_CASE("stratified root counts match the companion oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int n = 0;
  while (n < 300) {
    double d = -0.95 + 1.9 * U(rng);
    KerrParams p = KerrParams::make(1.0, d);
    ConservedSet cs{0.85 + 0.4 * U(rng), -8.0 + 16.0 * U(rng), U(rng) < 0.2 ? 0.0 : -2.0 + 20.0 * U(rng)};
    RootSet rs = radial_roots(cs, p);
    ++n;
    // skip samples whose roots nearly collide (companion eigenvalues lose precision)
    bool close = false;
    for (std::size_t i = 0; i + 1 < rs.roots.size(); ++i)
      if (rs.roots[i + 1].r - rs.roots[i].r < 1e-3) close = true;
    if (close || rs.has_multiple()) continue;
    CHECK(rs.count() == companion_count(cs, p));
    INFO("d=" << d << " eps=" << cs.eps << " ell=" << cs.ell << " q=" << cs.q << " case " << rs.rcase.label);
    CHECK(rs.count() == rs.rcase.expected_count);
    CHECK(rs.count() <= 3);
  }
}

TEST_CASE("orbit classification from roots") {
  KerrParams p = KerrParams::make(1.0, 0.5);
  ConservedSet cs{0.98, 4.0, 0.0};
  RootSet rs = radial_roots(cs, p);
  REQUIRE(rs.roots.size() == 3);
  double r0 = rs.roots[0].r, r1 = rs.roots[1].r, r2 = rs.roots[2].r;
  CHECK(classify_orbit(cs, {0.5 * (r1 + r2), M_PI / 2}, 1, p) == OrbitClass::Trapped);
  CHECK(classify_orbit(cs, {0.5 * (p.r_plus() + r0), M_PI / 2}, 1, p) == OrbitClass::Plunging);
  CHECK(classify_orbit(cs, {r1, M_PI / 2}, 0, p) == OrbitClass::Trapped);
  CHECK_THROWS_AS(classify_orbit(cs, {0.5 * (r0 + r1), M_PI / 2}, 1, p), Error);
  ConservedSet sc{1.1, 6.0, 1.0};
  RootSet rsc = radial_roots(sc, p);
  REQUIRE(rsc.roots.size() == 2);
  CHECK(classify_orbit(sc, {rsc.roots[1].r + 5.0, M_PI / 2}, -1, p) == OrbitClass::Scattered);
  CHECK(classify_orbit(sc, {rsc.roots[1].r + 5.0, M_PI / 2}, 1, p) == OrbitClass::Scattered);
  ConservedSet pl{1.1, 0.5, 1.0};
  CHECK(classify_orbit(pl, {20.0, M_PI / 2}, -1, p) == OrbitClass::PlungingFromInfinity);
  CHECK(classify_orbit(pl, {20.0, M_PI / 2}, 1, p) == OrbitClass::Escaping);
  IscoData is = isco(Branch::Direct, p);
  CHECK(classify_orbit({is.eps_min, is.ell_min, 0.0}, {is.r_ms, M_PI / 2}, 0, p) == OrbitClass::Circular);
  double rc = 8.0;
  auto co = circular_orbit(rc, Branch::Direct, p);
  CHECK(classify_orbit({co.eps, co.ell, 0.0}, {rc, M_PI / 2}, 0, p) == OrbitClass::Circular);
  double emid = 0.5 * (circular_curves(7.0, Branch::Direct, p).first + circular_curves(7.0, Branch::Retrograde, p).first);
  SphericalOrbitData s = spherical_branch(7.0, emid, p);
  CHECK(classify_orbit({s.eps, s.ell, s.q}, {7.0, M_PI / 2}, 0, p) == OrbitClass::Spherical);
  CHECK(expected_fate(OrbitClass::Trapped) == Fate::Trapped);
  CHECK(expected_fate(OrbitClass::AsymptoticToCircular) == Fate::Indeterminate);
}
