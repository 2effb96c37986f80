#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/calculus.hpp"
#include "core/group.hpp"
#include "core/point.hpp"
#include "core/smoothmap.hpp"

using namespace sj;

namespace {
// Weight kernel det(Y)^k exp(-4 pi Tr(M V R V^t)) as a jet-backed map.
MapPtr kernel_map(const CoordSystem& cs, int k, const RMat& M) {
  return make_coeff(
      cs,
      [k, M](const Point&, const PointJets& pj) {
        const JetSpacePtr& sp = pj.big;
        JetMat Mv(static_cast<int>(M.rows()), static_cast<int>(M.cols()), sp);
        for (int i = 0; i < M.rows(); ++i)
          for (int j = 0; j < M.cols(); ++j) Mv(i, j) = Jet(sp, M(i, j));
        Jet tr = (Mv * pj.V * pj.R * pj.V.transpose()).trace();
        return pj.detY.pow_int(k) * (tr * (-4.0 * kPi)).exp();
      },
      4, "weight-kernel");
}

MapPtr trace_MVRV_map(const CoordSystem& cs, const RMat& M) {
  return make_coeff(
      cs,
      [M](const Point&, const PointJets& pj) {
        const JetSpacePtr& sp = pj.big;
        JetMat Mv(static_cast<int>(M.rows()), static_cast<int>(M.cols()), sp);
        for (int i = 0; i < M.rows(); ++i)
          for (int j = 0; j < M.cols(); ++j) Mv(i, j) = Jet(sp, M(i, j));
        return (Mv * pj.V * pj.R * pj.V.transpose()).trace();
      },
      4, "trace-MVRV");
}

RMat random_index_matrix(int m, std::uint64_t seed) {
  Rng rng(seed);
  RMat M = RMat::Zero(m, m);
  for (int i = 0; i < m; ++i) M(i, i) = static_cast<double>(rng.unif_int(1, 3));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      M(i, j) = M(j, i) = 0.5 * static_cast<double>(rng.unif_int(-1, 1));
  // keep it positive definite
  return M + static_cast<double>(m) * RMat::Identity(m, m);
}
}  // namespace

TEST_CASE("exp-poly partials match the finite-difference oracle") {
  for (int n = 1; n <= 2; ++n)
    for (int m = 1; m <= 2; ++m) {
      CoordSystem cs(n, m);
      auto f = random_exp_poly(cs, 31 + 10 * n + m, false);
      Point x = random_point(n, m, 7);
      for (int c = 0; c < cs.total; ++c) {
        cplx a = f->partial(x, mi(c));
        cplx b = fd_partial(*f, x, mi(c));
        CHECK(std::abs(a - b) < 1e-7 * (1.0 + std::abs(a)));
      }
      // a few second and third order mixed partials
      Rng rng(5);
      for (int t = 0; t < 8; ++t) {
        MultiIndex idx;
        int ord = 2 + (t % 2);
        for (int q = 0; q < ord; ++q)
          idx.push_back(static_cast<int>(rng.unif_int(0, cs.total - 1)));
        std::sort(idx.begin(), idx.end());
        cplx a = f->partial(x, idx);
        cplx b = fd_partial(*f, x, idx);
        CHECK(std::abs(a - b) < 2e-5 * (1.0 + std::abs(a)));
      }
    }
}

TEST_CASE("holomorphic exp-poly has vanishing bar-derivatives") {
  CoordSystem cs(2, 2);
  auto f = random_exp_poly(cs, 77, true);
  CHECK(f->holomorphic());
  Point x = random_point(2, 2, 3);
  for (int c = cs.H; c < cs.total; ++c)
    CHECK(std::abs(f->partial(x, mi(c))) == 0.0);
}

TEST_CASE("jet-backed coefficients match FD and closed forms: Tr(MVRV^t)") {
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 2; ++m) {
      CoordSystem cs(n, m);
      RMat M = random_index_matrix(m, 11);
      MapPtr tr = trace_MVRV_map(cs, M);
      Point x = random_point(n, m, 19);
      // matrix-convention gradients
      MatrixGradient g = grad(*tr, x);
      Mat closedW = grad_trace_MVRV_W(x, M);
      Mat closedZ = grad_trace_MVRV_Z(x, M);
      CHECK((g.dW - closedW).cwiseAbs().maxCoeff() < 1e-11);
      CHECK((g.dZ - closedZ).cwiseAbs().maxCoeff() < 1e-11);
      // FD cross-check of the same
      MatrixGradient gf = fd_gradient(*tr, x);
      CHECK((gf.dW - closedW).cwiseAbs().maxCoeff() < 1e-7);
      CHECK((gf.dZ - closedZ).cwiseAbs().maxCoeff() < 1e-7);
      // conjugate-coordinate gradients are the conjugates (real function)
      CHECK((g.dZb - closedZ.conjugate()).cwiseAbs().maxCoeff() < 1e-11);
      CHECK((g.dWb - closedW.conjugate()).cwiseAbs().maxCoeff() < 1e-11);
    }
}

TEST_CASE("det Y gradient closed form") {
  for (int n = 1; n <= 3; ++n) {
    CoordSystem cs(n, 1);
    MapPtr dy = make_coeff(
        cs, [](const Point&, const PointJets& pj) { return pj.detY; }, 2,
        "detY");
    Point x = random_point(n, 1, 4);
    MatrixGradient g = grad(*dy, x);
    CHECK((g.dZ - grad_detY_Z(x)).cwiseAbs().maxCoeff() < 1e-11);
    MatrixGradient gf = fd_gradient(*dy, x);
    CHECK((gf.dZ - grad_detY_Z(x)).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("R = Y^{-1} entry derivatives: closed form vs jets vs FD") {
  for (int n = 1; n <= 3; ++n) {
    CoordSystem cs(n, 1);
    Point x = random_point(n, 1, 8);
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t) {
        MapPtr re = make_coeff(
            cs,
            [s, t](const Point&, const PointJets& pj) { return pj.R(s, t); },
            2, "R-entry");
        for (int k = 0; k < n; ++k)
          for (int l = k; l < n; ++l) {
            cplx closed = grad_R_Z(x, k, l)(s, t);
            cplx viajet = re->partial(x, mi(cs.z_index(k, l)));
            cplx viafd = fd_partial(*re, x, mi(cs.z_index(k, l)));
            CHECK(std::abs(closed - viajet) < 1e-11);
            CHECK(std::abs(closed - viafd) < 1e-7);
          }
      }
  }
}

TEST_CASE("entrywise coordinate derivative helpers dY, dV, dR") {
  CoordSystem cs(2, 2);
  Point x = random_point(2, 2, 13);
  // dY/dz_{01} moves both symmetric entries with weight -i/2
  Mat dy = dY_dcoord(x, cs.z_index(0, 1));
  CHECK(std::abs(dy(0, 1) - cplx(0, -0.5)) == 0.0);
  CHECK(std::abs(dy(1, 0) - cplx(0, -0.5)) == 0.0);
  CHECK(std::abs(dy(0, 0)) == 0.0);
  // conjugate coordinate flips the sign
  Mat dyb = dY_dcoord(x, cs.conj(cs.z_index(0, 1)));
  CHECK(std::abs(dyb(0, 1) - cplx(0, 0.5)) == 0.0);
  // dR = -R dY R holds against grad_R_Z
  for (int k = 0; k < 2; ++k)
    for (int l = k; l < 2; ++l) {
      Mat a = dR_dcoord(x, cs.z_index(k, l));
      Mat b = grad_R_Z(x, k, l);
      CHECK((a - b).cwiseAbs().maxCoeff() < 1e-13);
    }
  // dV for a W coordinate
  Mat dv = dV_dcoord(x, cs.w_index(1, 0));
  CHECK(std::abs(dv(1, 0) - cplx(0, -0.5)) == 0.0);
  CHECK(dv.cwiseAbs().sum() == 0.5);
}

TEST_CASE("W-Hessian kernel equals the kernel-weighted product Hessian") {
  for (int n = 1; n <= 2; ++n)
    for (int m = 1; m <= 2; ++m) {
      CoordSystem cs(n, m);
      RMat M = random_index_matrix(m, 21);
      int k = 3;
      auto f = random_exp_poly(cs, 900 + 10 * n + m, true);
      MapPtr h = kernel_map(cs, k, M);
      MapPtr fh = map_product(f, h);
      Point x = random_point(n, m, 31);
      cplx hv = h->eval(x);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          Mat K = hessian_W_kernel(*f, x, M, i, j);
          for (int kk = 0; kk < n; ++kk)
            for (int ll = 0; ll < n; ++ll) {
              cplx lhs =
                  fh->partial(x, mi(cs.w_index(j, kk), cs.w_index(i, ll))) / hv;
              CHECK(std::abs(lhs - K(kk, ll)) <
                    1e-9 * (1.0 + std::abs(K(kk, ll))));
            }
        }
    }
}

TEST_CASE("kernel gradient identity d(h)/dW = 4 pi i R V^t M h") {
  CoordSystem cs(2, 2);
  RMat M = random_index_matrix(2, 5);
  MapPtr h = kernel_map(cs, 2, M);
  Point x = random_point(2, 2, 55);
  MatrixGradient g = grad(*h, x);
  Mat expect = 4.0 * kPi * kI *
               (x.R() * x.V().transpose() * M).cast<cplx>() * h->eval(x);
  CHECK((g.dW - expect).cwiseAbs().maxCoeff() < 1e-9 * (1 + expect.cwiseAbs().maxCoeff()));
}

TEST_CASE("cofactor contraction identity on W-Hessian blocks") {
  for (int m = 1; m <= 3; ++m) {
    CoordSystem cs(2, m);
    RMat M = random_index_matrix(m, 41);
    auto f = random_exp_poly(cs, 60 + m, false);
    Point x = random_point(2, m, 61);
    CHECK(cofactor_trace_identity_check(*f, x, M) < 1e-10);
  }
}

TEST_CASE("product/derivative/conjugate combinators vs FD") {
  CoordSystem cs(1, 2);
  auto f = random_exp_poly(cs, 71, false);
  auto g = random_exp_poly(cs, 72, false);
  MapPtr p = map_product(f, g);
  MapPtr d = map_deriv(p, cs.w_index(1, 0));
  MapPtr c = map_conj(f);
  Point x = random_point(1, 2, 73);
  for (int cc = 0; cc < cs.total; ++cc) {
    CHECK(std::abs(p->partial(x, mi(cc)) - fd_partial(*p, x, mi(cc))) < 1e-6);
    CHECK(std::abs(d->partial(x, mi(cc)) - fd_partial(*d, x, mi(cc))) < 2e-5);
    CHECK(std::abs(c->partial(x, mi(cc)) - fd_partial(*c, x, mi(cc))) < 1e-6);
  }
  CHECK(std::abs(c->eval(x) - std::conj(f->eval(x))) == 0.0);
}

TEST_CASE("composition with the action: jet route vs direct evaluation") {
  for (int n = 1; n <= 2; ++n)
    for (int m = 1; m <= 2; ++m) {
      CoordSystem cs(n, m);
      auto f = random_exp_poly(cs, 300 + n + 3 * m, false);
      GroupElement g = random_group_element(n, m, 17);
      MapPtr fg = compose_with_action(f, g, 2);
      Point x = random_point(n, m, 23);
      // value agrees with f(g.x)
      CHECK(std::abs(fg->eval(x) - f->eval(g.act(x))) < 1e-10);
      // first partials agree with FD of x -> f(g.x)
      for (int c = 0; c < cs.total; ++c) {
        cplx a = fg->partial(x, mi(c));
        cplx b = fd_partial(*fg, x, mi(c));
        CHECK(std::abs(a - b) < 1e-6 * (1.0 + std::abs(a)));
      }
      // one second-order mixed partial
      cplx a2 = fg->partial(x, mi(0, cs.total - 1));
      cplx b2 = fd_partial(*fg, x, mi(0, cs.total - 1));
      CHECK(std::abs(a2 - b2) < 2e-5 * (1.0 + std::abs(a2)));
    }
}

TEST_CASE("automorphy reciprocal map: value and holomorphy") {
  CoordSystem cs(2, 1);
  GroupElement g = random_group_element(2, 1, 29);
  WeightIndex wi = WeightIndex::scalar(3, 1.0);
  MapPtr rec = automorphy_reciprocal(g, wi, 2);
  Point x = random_point(2, 1, 37);
  CHECK(std::abs(rec->eval(x) - 1.0 / g.automorphy(wi, x)) <
        1e-12 * std::abs(rec->eval(x)));
  CHECK(rec->holomorphic());
  for (int c = cs.H; c < cs.total; ++c)
    CHECK(std::abs(rec->partial(x, mi(c))) == 0.0);
  // holomorphic first partial agrees with FD
  for (int c = 0; c < cs.H; ++c) {
    cplx a = rec->partial(x, mi(c));
    cplx b = fd_partial(*rec, x, mi(c));
    CHECK(std::abs(a - b) < 1e-6 * (1.0 + std::abs(a)));
  }
}
