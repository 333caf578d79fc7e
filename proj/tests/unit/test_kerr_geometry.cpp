//========================================================================================
// kerrshell: tests for the Kerr background
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#include <cmath>
#include <random>

#include "doctest.h"
#include "kerrshell/kerr_geometry.hpp"

using namespace kerrshell;

TEST_CASE("horizon radii") {
  auto [rm, rp] = horizon_radii(KerrParams::make(1.0, 0.0));
  CHECK(rp == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(rm == doctest::Approx(0.0).epsilon(1e-14));
  auto h = horizon_radii(KerrParams::make(1.0, 0.8));
  CHECK(std::fabs(h.second - 1.6) < 1e-14);
  CHECK(std::fabs(h.first - 0.4) < 1e-14);
  CHECK_THROWS_AS(KerrParams::make(1.0, 1.0), Error);
  CHECK_THROWS_AS(KerrParams::make(1.0, -1.2), Error);
  try {
    KerrParams::make(1.0, 1.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidInput);
    CHECK(e.exit_code() == 2);
  }
}

TEST_CASE("bl_to_weyl examples and roundtrip") {
  KerrParams p = KerrParams::make(1.0, 0.5);
  WeylPoint w = bl_to_weyl(p, {4.0, M_PI / 2});
  CHECK(std::fabs(w.rho - std::sqrt(8.25)) < 1e-14);
  CHECK(std::fabs(w.z) < 1e-14);
  BLPoint b = weyl_to_bl(p, w);
  CHECK(std::fabs(b.r - 4.0) < 1e-12);
  CHECK(std::fabs(b.theta - M_PI / 2) < 1e-12);
  CHECK_THROWS_AS(bl_to_weyl(p, {p.r_plus(), 1.0}), Error);
  CHECK_THROWS_AS(weyl_to_bl(p, {0.0, 3.0}), Error);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    double a = -0.99 + 1.98 * U(rng);
    KerrParams q = KerrParams::make(1.0, a);
    double r = q.r_plus() + 1e-6 + std::pow(10.0, 3.0 * U(rng)) - 1.0 + 1e-6;
    double th = 1e-3 + (M_PI - 2e-3) * U(rng);
    BLPoint back = weyl_to_bl(q, bl_to_weyl(q, {r, th}));
    worst = std::max(worst, std::fabs(back.r - r) / r + std::fabs(back.theta - th));
    // reflection symmetry
    WeylPoint ww = bl_to_weyl(q, {r, th});
    BLPoint refl = weyl_to_bl(q, {ww.rho, -ww.z});
    CHECK(std::fabs(refl.r - back.r) < 1e-9 * r);
    CHECK(std::fabs(refl.theta - (M_PI - back.theta)) < 1e-9);
  }
  CHECK(worst < 1e-9);

  // large distances: r ~ sqrt(rho^2 + z^2) + M
  BLPoint far = weyl_to_bl(p, {3e5, 4e5});
  CHECK(std::fabs(far.r - (5e5 + 1.0)) < 1e-4);
}

TEST_CASE("metric identities") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    double a = -0.95 + 1.9 * U(rng);
    KerrParams p = KerrParams::make(1.0, a);
    WeylPoint w{1e-2 + 20.0 * U(rng), -20.0 + 40.0 * U(rng)};
    MetricComponents m = metric_weyl(p, w);
    CHECK(m.X > 0.0);
    CHECK(std::fabs(m.X * m.V + m.W * m.W - w.rho * w.rho) <= 1e-10 * std::max(1.0, w.rho * w.rho));
    CHECK(m.sigma == doctest::Approx(w.rho));
    MetricComponents mr = metric_weyl(p, {w.rho, -w.z});
    CHECK(std::fabs(mr.V - m.V) <= 1e-12 * (1 + std::fabs(m.V)));
    CHECK(std::fabs(mr.W - m.W) <= 1e-12 * (1 + std::fabs(m.W)));
    CHECK(std::fabs(mr.X - m.X) <= 1e-12 * (1 + std::fabs(m.X)));
    CHECK(std::fabs(mr.e2lambda - m.e2lambda) <= 1e-12 * m.e2lambda);
  }
  KerrParams s = KerrParams::make(1.0, 0.0);
  CHECK(metric_weyl(s, {3.0, 1.0}).W == 0.0);
  // dimensional rescaling: M = 2 doubles all lengths
  KerrParams p1 = KerrParams::make(1.0, 0.6), p2 = KerrParams::make(2.0, 1.2);
  MetricComponents m1 = metric_bl(p1, {5.0, 1.0}), m2 = metric_bl(p2, {10.0, 1.0});
  CHECK(m2.V == doctest::Approx(m1.V));
  CHECK(m2.X == doctest::Approx(4.0 * m1.X));
  CHECK(m2.W == doctest::Approx(2.0 * m1.W));
}

TEST_CASE("axis factor and near-axis behavior") {
  KerrParams p = KerrParams::make(1.0, 0.7);
  for (double z : {2.0, 5.0, -3.0}) {
    double XA0 = axis_factor(p, {1e-9, z});
    CHECK(XA0 > 0.0);
    double rho = 1e-3;
    CHECK(metric_weyl(p, {rho, z}).X / (rho * rho) == doctest::Approx(axis_factor(p, {rho, z})).epsilon(1e-10));
  }
}

TEST_CASE("ergosphere") {
  KerrParams s = KerrParams::make(1.0, 0.0);
  CHECK(ergosphere_radius(s, 0.7) == doctest::Approx(2.0));
  for (double d : {0.3, 0.5, 0.9}) {
    KerrParams p = KerrParams::make(1.0, d);
    CHECK(std::fabs(ergosphere_weyl(p, M_PI / 2).rho - d) < 1e-14);
    for (double th : {0.3, 1.0, 1.5, 2.5}) {
      double r = ergosphere_radius(p, th);
      CHECK(std::fabs(metric_bl(p, {r, th}).V) < 1e-10);
    }
  }
}

TEST_CASE("pole charts") {
  KerrParams p = KerrParams::make(1.0, 0.6);
  for (bool north : {true, false}) {
    for (double s : {0.1, 0.5, 1.2})
      for (double chi : {0.05, 0.7, 2.0}) {
        WeylPoint w = pole_chart_to_weyl(p, s, chi, north);
        auto [s2, chi2] = weyl_to_pole_chart(p, w, north);
        CHECK(s2 == doctest::Approx(s).epsilon(1e-10));
        CHECK(chi2 == doctest::Approx(chi).epsilon(1e-10));
      }
  }
}

TEST_CASE("Delta vanishes at the horizon") {
  for (double d : {0.1, 0.5, 0.99}) {
    KerrParams p = KerrParams::make(1.0, d);
    CHECK(std::fabs(kerr::Delta(d, p.r_plus())) < 1e-14);
    for (double r : {p.r_plus() + 1e-6, 3.0, 100.0}) CHECK(kerr::Delta(d, r) > 0.0);
  }
}
