#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "core/metric.hpp"
#include "core/smoothmap.hpp"

using namespace sj;

namespace {
Mat random_sym(int n, Rng& rng) {
  Mat S(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      cplx v(rng.unif(-1, 1), rng.unif(-1, 1));
      S(i, j) = v;
      S(j, i) = v;
    }
  return S;
}
Mat random_rect(int m, int n, Rng& rng) {
  Mat W(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) W(i, j) = cplx(rng.unif(-1, 1), rng.unif(-1, 1));
  return W;
}
}  // namespace

TEST_CASE("block assembly reproduces the trace-form quadratic value") {
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 3; ++m) {
      CoordSystem cs(n, m);
      MetricParams par(1.3, 0.8);
      Point x = random_point(n, m, 100 + 10 * n + m);
      MetricBlocks bl = metric_blocks(x, par);
      Rng rng(9 + n + m);
      for (int t = 0; t < 6; ++t) {
        Mat dZ = random_sym(n, rng);
        Mat dW = random_rect(m, n, rng);
        double a = ds2_eval(x, par, dZ, dW);
        double b = ds2_blocks_eval(bl, cs, dZ, dW);
        CHECK(std::abs(a - b) < 1e-12 * (1.0 + std::abs(a)));
      }
      // positive definite on nonzero tangents
      Mat dZ = random_sym(n, rng);
      Mat dW = random_rect(m, n, rng);
      CHECK(ds2_eval(x, par, dZ, dW) > 0.0);
    }
}

TEST_CASE("closed-form inverse: P * Pinv = I across dimensions") {
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 3; ++m) {
      MetricParams par(0.9, 1.7);
      Point x = random_point(n, m, 200 + 10 * n + m);
      RMat P = metric_blocks(x, par).P();
      RMat Pi = metric_inverse_closed(x, par).Pinv();
      RMat I = RMat::Identity(P.rows(), P.cols());
      CHECK((P * Pi - I).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((Pi * P - I).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("n = m = 1 matrix, inverse, and connection match the closed scalars") {
  MetricParams par(1.4, 0.6);
  const double A = par.A, B = par.B;
  Rng rng(321);
  for (int t = 0; t < 10; ++t) {
    double xr = rng.unif(-1, 1), y = rng.unif(0.5, 2.5);
    double ur = rng.unif(-0.5, 0.5), v = rng.unif(-0.8, 0.8);
    Mat Z(1, 1), W(1, 1);
    Z(0, 0) = cplx(xr, y);
    W(0, 0) = cplx(ur, v);
    Point x(Z, W);
    MetricBlocks bl = metric_blocks(x, par);
    CHECK(std::abs(bl.W1(0, 0) - (A / (2 * y * y) + B * v * v / (2 * y * y * y))) < 1e-12);
    CHECK(std::abs(bl.W2(0, 0) - (-B * v / (2 * y * y))) < 1e-12);
    CHECK(std::abs(bl.W3(0, 0) - (B / (2 * y))) < 1e-12);
    MetricInverseBlocks iv = metric_inverse_closed(x, par);
    CHECK(std::abs(iv.M1(0, 0) - 2 * y * y / A) < 1e-12);
    CHECK(std::abs(iv.M2(0, 0) - 2 * v * y / A) < 1e-12);
    CHECK(std::abs(iv.M3(0, 0) - (2 * y / B + 2 * v * v / A)) < 1e-12);

    ConnectionData G = connection_closed(x, par);
    const int z = 0, w = 1;  // holomorphic ids at n = m = 1
    auto gv = [&](int K, int I, int J) { return G.at(K, I, J); };
    cplx i_(0.0, 1.0);
    CHECK(std::abs(gv(z, z, z) - (i_ / y + i_ * B * v * v / (2 * A * y * y))) < 1e-12);
    CHECK(std::abs(gv(z, z, w) - (-i_ * B * v / (2 * A * y))) < 1e-12);
    CHECK(std::abs(gv(z, w, w) - (i_ * B / (2 * A))) < 1e-12);
    CHECK(std::abs(gv(w, z, z) - (i_ * B * v * v * v / (2 * A * y * y * y))) < 1e-12);
    CHECK(std::abs(gv(w, z, w) - (i_ / (2 * y) - i_ * B * v * v / (2 * A * y * y))) < 1e-12);
    CHECK(std::abs(gv(w, w, w) - (i_ * B * v / (2 * A * y))) < 1e-12);
    // conjugate triple mirrors
    CHECK(std::abs(gv(z + 2, z + 2, z + 2) - std::conj(gv(z, z, z))) == 0.0);
    // mixed holo/anti triples vanish identically
    CHECK(std::abs(gv(z, z, z + 2)) == 0.0);
    CHECK(std::abs(gv(w + 2, z, w)) == 0.0);
  }
}

TEST_CASE("closed connection equals the derivative-route connection") {
  struct Cfg { int n, m; };
  const Cfg cfgs[] = {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {3, 1}, {1, 3}};
  const MetricParams pars[] = {MetricParams(1, 1), MetricParams(2.2, 0.7),
                               MetricParams(0.5, 3.1)};
  for (const auto& c : cfgs)
    for (const auto& par : pars) {
      Point x = random_point(c.n, c.m, 400 + 10 * c.n + c.m);
      ConnectionData a = connection_closed(x, par);
      ConnectionData b = christoffel_numeric(x, par);
      CHECK(a.max_abs_diff(b) < 1e-9);
      CHECK(a.max_abs() > 1e-3);  // nondegenerate comparison
    }
}

TEST_CASE("derivative-route connection symmetry and reality structure") {
  Point x = random_point(2, 2, 777);
  MetricParams par(1.1, 0.9);
  ConnectionData b = christoffel_numeric(x, par);
  const int H = b.cs.H;
  double sym = 0, conjd = 0, mixed = 0;
  for (int K = 0; K < 2 * H; ++K)
    for (int I = 0; I < 2 * H; ++I)
      for (int J = 0; J < 2 * H; ++J) {
        sym = std::max(sym, std::abs(b.at(K, I, J) - b.at(K, J, I)));
        int Kc = K < H ? K + H : K - H, Ic = I < H ? I + H : I - H,
            Jc = J < H ? J + H : J - H;
        conjd = std::max(conjd,
                         std::abs(b.at(K, I, J) - std::conj(b.at(Kc, Ic, Jc))));
        bool kh = K < H, ih = I < H, jh = J < H;
        if (!(kh == ih && ih == jh))
          mixed = std::max(mixed, std::abs(b.at(K, I, J)));
      }
  CHECK(sym < 1e-11);
  CHECK(conjd < 1e-11);
  CHECK(mixed < 1e-9);
}

TEST_CASE("metric is invariant under the group action") {
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 3; ++m) {
      MetricParams par(1.6, 0.9);
      for (std::uint64_t s = 0; s < 4; ++s) {
        Point x = random_point(n, m, 500 + 10 * n + m + s);
        GroupElement g = random_group_element(n, m, 900 + 10 * n + m + s);
        CHECK(metric_invariance_residual(g, x, par, 40 + s) < 1e-9);
      }
    }
}

TEST_CASE("non-invariance control: a non-group deformation breaks ds^2") {
  // Scale B only on one side by tweaking params between x and g.x.
  MetricParams par(1.0, 1.0), par2(1.0, 1.3);
  Point x = random_point(2, 1, 808);
  Rng rng(11);
  Mat dZ = random_sym(2, rng);
  Mat dW = random_rect(1, 2, rng);
  double a = ds2_eval(x, par, dZ, dW);
  double b = ds2_eval(x, par2, dZ, dW);
  CHECK(std::abs(a - b) / (1.0 + std::abs(a)) > 1e-3);
}

TEST_CASE("connection CSV: header, shape, determinism") {
  Point x = random_point(2, 1, 909);
  MetricParams par(1.0, 2.0);
  std::string csv1 = christoffel_csv(x, par);
  std::string csv2 = christoffel_csv(x, par);
  CHECK(csv1 == csv2);
  std::istringstream in(csv1);
  std::string line;
  std::getline(in, line);
  CHECK(line == "K_index,I_index,J_index,re,im");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  // K over H holo ids, (I,J) over holo pairs I <= J: H * H(H+1)/2 with H = 5
  CHECK(rows == 5 * 15);
}
