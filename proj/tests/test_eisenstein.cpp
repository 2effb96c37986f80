#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/calculus.hpp"
#include "core/eisenstein.hpp"

using namespace sj;

TEST_CASE("closed b-sum matches pi^2/sin^2 and its derivative ladder") {
  cplx ts[] = {cplx(0.3, 0.4), cplx(-0.7, 0.1), cplx(0.25, -0.6), cplx(0.5, 0.0)};
  for (cplx t : ts) {
    cplx s = std::sin(kPi * t);
    CHECK(std::abs(lattice_b_sum(2, t) - kPi * kPi / (s * s)) <
          1e-12 * std::abs(lattice_b_sum(2, t)));
    CHECK(std::abs(lattice_b_sum(1, t) - kPi * std::cos(kPi * t) / s) <
          1e-12 * std::abs(lattice_b_sum(1, t)));
    // F_{k+1} = -F_k'/k via central differences
    for (int k = 1; k <= 4; ++k) {
      double h = 1e-5;
      cplx d = (lattice_b_sum(k, t + h) - lattice_b_sum(k, t - h)) / (2.0 * h);
      CHECK(std::abs(lattice_b_sum(k + 1, t) + d / static_cast<double>(k)) <
            1e-6 * (1.0 + std::abs(lattice_b_sum(k + 1, t))));
    }
  }
}

TEST_CASE("production q-series agrees with the lattice oracle") {
  cplx zs[] = {cplx(0.21, 0.9), cplx(-0.4, 1.7)};
  cplx ws[] = {cplx(0.31, 0.12), cplx(-0.22, -0.28)};
  for (cplx z : zs)
    for (cplx w : ws)
      for (int p = 0; p <= 2; ++p)
        for (int q = 0; q <= 2 - p; ++q) {
          LatticeValue a = g1_lattice(z, w, p, q, 200);
          cplx b = g1_qseries(z, w, p, q);
          CHECK(std::abs(a.value - b) <
                1e-9 * (1.0 + std::abs(b)) + 10.0 * a.est_err);
          LatticeValue a2 = g2_lattice(z, w, p, q, 200);
          cplx b2 = g2_qseries(z, w, p, q);
          CHECK(std::abs(a2.value - b2) <
                1e-9 * (1.0 + std::abs(b2)) + 10.0 * a2.est_err);
        }
  for (cplx z : zs)
    for (int p = 0; p <= 2; ++p) {
      LatticeValue a = gee2_lattice(z, p, 200);
      cplx b = gee2_qseries(z, p);
      CHECK(std::abs(a.value - b) < 1e-9 * (1.0 + std::abs(b)) + 10.0 * a.est_err);
    }
}

TEST_CASE("termwise partials match finite differences of the evaluators") {
  cplx z(0.13, 1.1), w(0.27, 0.18);
  double h = 1e-4;
  // d/dw of g1
  cplx fd = (g1_qseries(z, w + h, 0, 0) - g1_qseries(z, w - h, 0, 0)) / (2 * h);
  CHECK(std::abs(fd - g1_qseries(z, w, 0, 1)) < 1e-6 * (1.0 + std::abs(fd)));
  // d/dz of g1
  fd = (g1_qseries(z + h, w, 0, 0) - g1_qseries(z - h, w, 0, 0)) / (2 * h);
  CHECK(std::abs(fd - g1_qseries(z, w, 1, 0)) < 1e-6 * (1.0 + std::abs(fd)));
  // mixed second of g2
  fd = (g2_qseries(z + h, w + h, 0, 0) - g2_qseries(z + h, w - h, 0, 0) -
        g2_qseries(z - h, w + h, 0, 0) + g2_qseries(z - h, w - h, 0, 0)) /
       (4 * h * h);
  CHECK(std::abs(fd - g2_qseries(z, w, 1, 1)) < 1e-4 * (1.0 + std::abs(fd)));
  // d/dz of E2
  fd = (e2_qseries(z + h, 0) - e2_qseries(z - h, 0)) / (2 * h);
  CHECK(std::abs(fd - e2_qseries(z, 1)) < 1e-6 * (1.0 + std::abs(fd)));
}

TEST_CASE("classical special value E2(i) = 3/pi") {
  cplx v = e2_qseries(cplx(0.0, 1.0), 0);
  CHECK(std::abs(v - cplx(3.0 / kPi, 0.0)) < 1e-12);
}

TEST_CASE("inversion anomaly of the modular weight-2 factor") {
  // gee2(-1/z) = z^2 gee2(z) - 2 pi i z
  cplx zs[] = {cplx(0.2, 1.3), cplx(-0.37, 0.81)};
  for (cplx z : zs) {
    cplx lhs = gee2_qseries(-1.0 / z, 0);
    cplx rhs = z * z * gee2_qseries(z, 0) - 2.0 * kPi * kI * z;
    CHECK(std::abs(lhs - rhs) < 1e-9 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("lattice translation law of the twisted weight-1 factor") {
  // g1(z, w + lam z + mu) = g1(z, w) - 2 pi i lam  (lattice route; the shifted
  // point leaves the production annulus for lam != 0)
  cplx z(0.11, 1.05), w(0.21, 0.13);
  for (int lam = -1; lam <= 1; ++lam)
    for (int mu = -1; mu <= 1; ++mu) {
      LatticeValue lhs = g1_lattice(z, w + static_cast<double>(lam) * z +
                                           static_cast<double>(mu), 0, 0, 150);
      LatticeValue rhs = g1_lattice(z, w, 0, 0, 150);
      cplx expect = rhs.value - 2.0 * kPi * kI * static_cast<double>(lam);
      CHECK(std::abs(lhs.value - expect) <
            1e-8 * (1.0 + std::abs(expect)) + 10.0 * (lhs.est_err + rhs.est_err));
    }
}

TEST_CASE("inversion law of the twisted weight-1 factor") {
  // g1(-1/z, w/z) = z g1(z, w) + 2 pi i w
  cplx z(0.0, 1.2), w(0.17, 0.05);
  LatticeValue lhs = g1_lattice(-1.0 / z, w / z, 0, 0, 300);
  cplx rhs = z * g1_qseries(z, w, 0, 0) + 2.0 * kPi * kI * w;
  CHECK(std::abs(lhs.value - rhs) < 1e-7 * (1.0 + std::abs(rhs)) + 10.0 * lhs.est_err);
}

TEST_CASE("coefficient maps: holomorphy, row independence, FD consistency") {
  CoordSystem cs(1, 2);
  Point x = random_point(1, 2, 64);
  for (int row = 0; row < 2; ++row) {
    MapPtr e1 = map_e1hat(cs, row);
    CHECK(e1->holomorphic());
    // independent of the other W row and all bar coordinates
    int other = cs.w_index(1 - row, 0);
    CHECK(std::abs(e1->partial(x, mi(other))) == 0.0);
    CHECK(std::abs(e1->partial(x, mi(cs.conj(0)))) == 0.0);
    for (int c : {0, cs.w_index(row, 0)}) {
      cplx a = e1->partial(x, mi(c));
      cplx b = fd_partial(*e1, x, mi(c));
      CHECK(std::abs(a - b) < 1e-6 * (1.0 + std::abs(a)));
    }
  }
  MapPtr gz = map_gee2(cs);
  cplx a = gz->partial(x, mi(0, 0));
  cplx b = fd_partial(*gz, x, mi(0, 0));
  CHECK(std::abs(a - b) < 2e-5 * (1.0 + std::abs(a)));
  CHECK_THROWS_AS(map_g1(CoordSystem(2, 1), 0), invalid_input);
}

TEST_CASE("annulus and pole guards reject bad evaluation points") {
  CHECK_THROWS_AS(g1_qseries(cplx(0.0, 0.4), cplx(0.3, 0.39), 0, 0),
                  numeric_guard);
  CHECK_THROWS_AS(g1_qseries(cplx(0.0, 1.0), cplx(0.005, 0.0), 0, 0),
                  numeric_guard);
  CHECK_THROWS_AS(g2_qseries(cplx(0.0, 1.0), cplx(1.01, 0.0), 0, 0),
                  numeric_guard);
  CHECK_NOTHROW(g1_qseries(cplx(0.0, 1.0), cplx(0.4, 0.2), 0, 0));
}
