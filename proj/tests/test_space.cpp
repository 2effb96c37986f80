#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/calculus.hpp"
#include "core/group.hpp"
#include "core/point.hpp"
#include "core/smoothmap.hpp"

using namespace sj;

namespace {
GroupElement random_heisenberg(int n, int m, std::uint64_t seed) {
  Rng rng(seed);
  RMat lam(m, n), mu(m, n), S = RMat::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      lam(i, j) = static_cast<double>(rng.unif_int(-3, 3));
      mu(i, j) = static_cast<double>(rng.unif_int(-3, 3));
    }
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j)
      S(i, j) = S(j, i) = static_cast<double>(rng.unif_int(-3, 3));
  RMat kap = S - mu * lam.transpose();
  return GroupElement(RMat::Identity(n, n), RMat::Zero(n, n), RMat::Zero(n, n),
                      RMat::Identity(n, n), lam, mu, kap);
}

double group_diff(const GroupElement& a, const GroupElement& b) {
  double d = 0.0;
  d = std::max(d, (a.A() - b.A()).cwiseAbs().maxCoeff());
  d = std::max(d, (a.B() - b.B()).cwiseAbs().maxCoeff());
  d = std::max(d, (a.C() - b.C()).cwiseAbs().maxCoeff());
  d = std::max(d, (a.D() - b.D()).cwiseAbs().maxCoeff());
  d = std::max(d, (a.lam() - b.lam()).cwiseAbs().maxCoeff());
  d = std::max(d, (a.mu() - b.mu()).cwiseAbs().maxCoeff());
  d = std::max(d, (a.kappa() - b.kappa()).cwiseAbs().maxCoeff());
  return d;
}

double point_diff(const Point& a, const Point& b) {
  return std::max((a.Z() - b.Z()).cwiseAbs().maxCoeff(),
                  (a.W() - b.W()).cwiseAbs().maxCoeff());
}
}  // namespace

TEST_CASE("coordinate system indexing round-trips") {
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 3; ++m) {
      CoordSystem cs(n, m);
      CHECK(cs.H == n * (n + 1) / 2 + m * n);
      int c = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          CHECK(cs.z_index(i, j) == c);
          auto [a, b] = cs.z_pair(c);
          CHECK(a == i);
          CHECK(b == j);
          CHECK(cs.is_z(c));
          CHECK(cs.is_holo(c));
          CHECK(cs.conj(cs.conj(c)) == c);
          ++c;
        }
      for (int r = 0; r < m; ++r)
        for (int s = 0; s < n; ++s) {
          int id = cs.w_index(r, s);
          CHECK(id == c);
          auto [rr, ss] = cs.w_pair(id);
          CHECK(rr == r);
          CHECK(ss == s);
          CHECK(!cs.is_z(id));
          ++c;
        }
    }
}

TEST_CASE("Heisenberg composition matches the matrix-embedding oracle (m=1)") {
  for (int n = 1; n <= 3; ++n) {
    for (std::uint64_t s = 0; s < 25; ++s) {
      GroupElement h1 = random_heisenberg(n, 1, 1000 * n + s);
      GroupElement h2 = random_heisenberg(n, 1, 2000 * n + s);
      GroupElement h12 = h1.compose(h2);
      RMat E1 = heisenberg_embedding(h1.lam(), h1.mu(), h1.kappa());
      RMat E2 = heisenberg_embedding(h2.lam(), h2.mu(), h2.kappa());
      RMat E12 = heisenberg_embedding(h12.lam(), h12.mu(), h12.kappa());
      CHECK((E1 * E2 - E12).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("group axioms: identity, inverse, associativity") {
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 2; ++m) {
      GroupElement e = GroupElement::identity(n, m);
      for (std::uint64_t s = 1; s <= 10; ++s) {
        GroupElement g = random_group_element(n, m, s);
        CHECK(g.symplectic_residual() < 1e-9);
        CHECK(g.kappa_residual() < 1e-9);
        CHECK(group_diff(g.compose(e), g) < 1e-12);
        CHECK(group_diff(e.compose(g), g) < 1e-12);
        CHECK(group_diff(g.compose(g.inverse()), e) < 1e-10);
        CHECK(group_diff(g.inverse().compose(g), e) < 1e-10);
        GroupElement h = random_group_element(n, m, s + 100);
        GroupElement k = random_group_element(n, m, s + 200);
        CHECK(group_diff(g.compose(h).compose(k), g.compose(h.compose(k))) <
              1e-9);
      }
    }
}

TEST_CASE("random_group_element(scale=0) is the identity") {
  GroupElement g = random_group_element(2, 2, 7, 0);
  CHECK(group_diff(g, GroupElement::identity(2, 2)) == 0.0);
}

TEST_CASE("action is compatible with composition") {
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 2; ++m)
      for (std::uint64_t s = 1; s <= 8; ++s) {
        Point x = random_point(n, m, s);
        GroupElement g = random_group_element(n, m, s + 10);
        GroupElement h = random_group_element(n, m, s + 20);
        Point a = g.compose(h).act(x);
        Point b = g.act(h.act(x));
        CHECK(point_diff(a, b) < 1e-9);
        // identity acts trivially
        CHECK(point_diff(GroupElement::identity(n, m).act(x), x) < 1e-13);
        // inverse undoes the action
        CHECK(point_diff(g.inverse().act(g.act(x)), x) < 1e-9);
      }
}

TEST_CASE("random_point is deterministic, well-conditioned, in the box") {
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 3; ++m) {
      Point x1 = random_point(n, m, 42);
      Point x2 = random_point(n, m, 42);
      CHECK(point_diff(x1, x2) == 0.0);
      Point x3 = random_point(n, m, 43);
      CHECK(point_diff(x1, x3) > 1e-6);
      Eigen::SelfAdjointEigenSolver<RMat> es(x1.Y());
      CHECK(es.eigenvalues().minCoeff() >= 0.7 - 1e-12);
      CHECK(es.eigenvalues().maxCoeff() <= 2.5 + 1e-12);
      CHECK(x1.X().cwiseAbs().maxCoeff() <= 1.0);
      CHECK(x1.W().cwiseAbs().maxCoeff() <= 0.5);
      CHECK((x1.R() * x1.Y() - RMat::Identity(n, n)).cwiseAbs().maxCoeff() <
            1e-12);
    }
}

TEST_CASE("point validation rejects malformed input") {
  Mat Z(2, 2), W(1, 2);
  Z << cplx(0, 1), cplx(0.5, 0), cplx(0.2, 0), cplx(0, 1);  // not symmetric
  W.setZero();
  CHECK_THROWS_AS(Point(Z, W), invalid_input);
  Z << cplx(0, -1), cplx(0, 0), cplx(0, 0), cplx(0, -1);  // Y negative
  CHECK_THROWS_AS(Point(Z, W), invalid_input);
  Z << cplx(0, 1), cplx(0, 0), cplx(0, 0), cplx(0, 1);
  Mat Wbad(1, 3);
  Wbad.setZero();
  CHECK_THROWS_AS(Point(Z, Wbad), invalid_input);
}

TEST_CASE("automorphy factor: cocycle up to a constant unimodular phase") {
  for (int n = 1; n <= 2; ++n)
    for (int m = 1; m <= 2; ++m) {
      WeightIndex wi(3, RMat::Identity(m, m));
      for (std::uint64_t s = 1; s <= 6; ++s) {
        GroupElement g1 = random_group_element(n, m, s);
        GroupElement g2 = random_group_element(n, m, s + 50);
        GroupElement g12 = g1.compose(g2);
        Point x1 = random_point(n, m, s);
        Point x2 = random_point(n, m, s + 99);
        auto defect = [&](const Point& x) {
          cplx lhs = g12.automorphy(wi, x);
          cplx rhs = g1.automorphy(wi, g2.act(x)) * g2.automorphy(wi, x);
          return lhs / rhs;
        };
        cplx d1 = defect(x1), d2 = defect(x2);
        CHECK(std::abs(std::abs(d1) - 1.0) < 1e-9);   // unimodular
        CHECK(std::abs(d1 - d2) < 1e-8);              // independent of x
        // integral index + integral Heisenberg data: the phase is trivial
        CHECK(std::abs(d1 - cplx(1.0, 0.0)) < 1e-8);
      }
    }
}

TEST_CASE("automorphy at the identity is 1") {
  Point x = random_point(2, 2, 5);
  WeightIndex wi(4, RMat::Identity(2, 2));
  cplx j = GroupElement::identity(2, 2).automorphy(wi, x);
  CHECK(std::abs(j - cplx(1.0, 0.0)) < 1e-14);
}

TEST_CASE("slash action composes (up to the same constant phase, here 1)") {
  CoordSystem cs(1, 1);
  auto f = random_exp_poly(cs, 11, true);
  WeightIndex wi = WeightIndex::scalar(2, 1.0);
  GroupElement g1 = random_group_element(1, 1, 3);
  GroupElement g2 = random_group_element(1, 1, 4);
  MapPtr lhs = slash(slash(f, g1, wi, 0), g2, wi, 0);
  MapPtr rhs = slash(f, g1.compose(g2), wi, 0);
  for (std::uint64_t s = 1; s <= 5; ++s) {
    Point x = random_point(1, 1, s);
    cplx a = lhs->eval(x), b = rhs->eval(x);
    CHECK(std::abs(a - b) / (1.0 + std::abs(b)) < 1e-9);
  }
}

TEST_CASE("slash by the identity is the identity") {
  CoordSystem cs(2, 1);
  auto f = random_exp_poly(cs, 21, false);
  WeightIndex wi = WeightIndex::scalar(3, 2.0);
  MapPtr sf = slash(f, GroupElement::identity(2, 1), wi, 2);
  Point x = random_point(2, 1, 9);
  CHECK(std::abs(sf->eval(x) - f->eval(x)) < 1e-12);
  // partials agree too (composition machinery at order 2)
  for (int c = 0; c < cs.total; ++c)
    CHECK(std::abs(sf->partial(x, mi(c)) - f->partial(x, mi(c))) < 1e-10);
}

TEST_CASE("cotangent transforms match finite differences of the action") {
  for (int n = 1; n <= 2; ++n)
    for (int m = 1; m <= 2; ++m) {
      Point x = random_point(n, m, 17);
      GroupElement g = random_group_element(n, m, 23);
      CotangentData ct = cotangent_transforms(g, x);
      Rng rng(99);
      Mat dZ(n, n), dW(m, n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          dZ(i, j) = dZ(j, i) = cplx(rng.unif(-1, 1), rng.unif(-1, 1));
      for (int r = 0; r < m; ++r)
        for (int s = 0; s < n; ++s)
          dW(r, s) = cplx(rng.unif(-1, 1), rng.unif(-1, 1));
      double h = 1e-6;
      Point xp(x.Z() + h * dZ, x.W() + h * dW, 1e-9, 1e-12);
      Point xm(x.Z() - h * dZ, x.W() - h * dW, 1e-9, 1e-12);
      Mat dgZ = (g.act(xp).Z() - g.act(xm).Z()) / (2 * h);
      Mat dgW = (g.act(xp).W() - g.act(xm).W()) / (2 * h);
      CHECK((dgZ - ct.push_dZ(dZ)).cwiseAbs().maxCoeff() < 1e-6);
      CHECK((dgW - ct.push_dW(dW, dZ)).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("point JSON round-trip is exact; shorthand accepted") {
  Point x = random_point(2, 2, 77);
  Point y = Point::from_json(x.to_json());
  CHECK(point_diff(x, y) == 0.0);
  Point p = Point::from_json(R"({"z":"i","w":"0.2"})");
  CHECK(p.n() == 1);
  CHECK(std::abs(p.Z()(0, 0) - cplx(0, 1)) == 0.0);
  CHECK(std::abs(p.W()(0, 0) - cplx(0.2, 0)) == 0.0);
  CHECK_THROWS_AS(Point::from_json("{\"n\":1}"), invalid_input);
  CHECK_THROWS_AS(Point::from_json("not json"), invalid_input);
}

TEST_CASE("group JSON round-trip is exact") {
  GroupElement g = random_group_element(2, 2, 5);
  GroupElement h = GroupElement::from_json(g.to_json());
  CHECK(group_diff(g, h) == 0.0);
  CHECK_THROWS_AS(GroupElement::from_json("{}"), invalid_input);
}

TEST_CASE("complex literal parsing") {
  CHECK(complex_from_string("i") == cplx(0, 1));
  CHECK(complex_from_string("-i") == cplx(0, -1));
  CHECK(complex_from_string("2i") == cplx(0, 2));
  CHECK(complex_from_string("0.2") == cplx(0.2, 0));
  CHECK(complex_from_string("1+2i") == cplx(1, 2));
  CHECK(complex_from_string("1.5-0.5i") == cplx(1.5, -0.5));
  CHECK(complex_from_string("3e-2-1.5e+1i") == cplx(0.03, -15.0));
  CHECK(complex_from_string(" 1 + 2i ") == cplx(1, 2));
  CHECK_THROWS_AS(complex_from_string("foo"), invalid_input);
  CHECK_THROWS_AS(complex_from_string(""), invalid_input);
  // round-trip through the printer
  for (cplx v : {cplx(0.25, -1.75), cplx(0, 3), cplx(-2, 0), cplx(1e-17, 1)})
    CHECK(complex_from_string(complex_to_string(v)) == v);
}

TEST_CASE("weight index validation") {
  RMat M(2, 2);
  M << 1.0, 0.5, 0.5, 2.0;
  CHECK_NOTHROW(WeightIndex(3, M));
  M(0, 1) = M(1, 0) = 0.3;  // not half-integral
  CHECK_THROWS_AS(WeightIndex(3, M), invalid_input);
  M(0, 1) = M(1, 0) = 0.5;
  M(0, 0) = 0.5;  // diagonal must be integral
  CHECK_THROWS_AS(WeightIndex(3, M), invalid_input);
}
