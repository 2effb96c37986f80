#include "group.hpp"

#include <nlohmann/json.hpp>

namespace sj {

using nlohmann::json;

WeightIndex::WeightIndex(int k_, RMat M_, double tol) : k(k_), M(std::move(M_)) {
  if (M.rows() != M.cols()) throw invalid_input("WeightIndex: M must be square");
  if (!approx_symmetric(M, tol))
    throw invalid_input("WeightIndex: M must be symmetric");
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) {
      double twice = 2.0 * M(i, j);
      if (std::abs(twice - std::round(twice)) > tol)
        throw invalid_input("WeightIndex: 2M must be integral");
      if (i == j && std::abs(M(i, i) - std::round(M(i, i))) > tol)
        throw invalid_input("WeightIndex: diagonal of M must be integral");
    }
}

GroupElement::GroupElement(RMat A, RMat B, RMat C, RMat D, RMat lam, RMat mu,
                           RMat kappa, double tol)
    : n_(static_cast<int>(A.rows())), m_(static_cast<int>(lam.rows())),
      A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)),
      lam_(std::move(lam)), mu_(std::move(mu)), kappa_(std::move(kappa)) {
  auto chk = [&](const RMat& M, int r, int c, const char* what) {
    if (M.rows() != r || M.cols() != c)
      throw invalid_input(std::string("GroupElement: bad shape for ") + what);
  };
  chk(A_, n_, n_, "A");
  chk(B_, n_, n_, "B");
  chk(C_, n_, n_, "C");
  chk(D_, n_, n_, "D");
  chk(lam_, m_, n_, "lambda");
  chk(mu_, m_, n_, "mu");
  chk(kappa_, m_, m_, "kappa");
  if (symplectic_residual() > tol)
    throw invalid_input("GroupElement: [[A,B],[C,D]] is not symplectic");
  if (kappa_residual() > tol)
    throw invalid_input("GroupElement: kappa + mu lambda^t must be symmetric");
}

GroupElement GroupElement::identity(int n, int m) {
  return GroupElement(RMat::Identity(n, n), RMat::Zero(n, n), RMat::Zero(n, n),
                      RMat::Identity(n, n), RMat::Zero(m, n), RMat::Zero(m, n),
                      RMat::Zero(m, m));
}

double GroupElement::symplectic_residual() const {
  RMat M(2 * n_, 2 * n_), J(2 * n_, 2 * n_);
  M << A_, B_, C_, D_;
  J << RMat::Zero(n_, n_), RMat::Identity(n_, n_), -RMat::Identity(n_, n_),
      RMat::Zero(n_, n_);
  return (M.transpose() * J * M - J).cwiseAbs().maxCoeff();
}

double GroupElement::kappa_residual() const {
  RMat S = kappa_ + mu_ * lam_.transpose();
  return (S - S.transpose()).cwiseAbs().maxCoeff();
}

GroupElement GroupElement::compose(const GroupElement& o) const {
  // (M,(l,u;kap)) * (M',(l',u';kap')) with (lt,ut) = (l,u) M':
  RMat lt = lam_ * o.A_ + mu_ * o.C_;
  RMat ut = lam_ * o.B_ + mu_ * o.D_;
  RMat A = A_ * o.A_ + B_ * o.C_;
  RMat B = A_ * o.B_ + B_ * o.D_;
  RMat C = C_ * o.A_ + D_ * o.C_;
  RMat D = C_ * o.B_ + D_ * o.D_;
  RMat lam = lt + o.lam_;
  RMat mu = ut + o.mu_;
  RMat kap = kappa_ + o.kappa_ + lt * o.mu_.transpose() - ut * o.lam_.transpose();
  return GroupElement(std::move(A), std::move(B), std::move(C), std::move(D),
                      std::move(lam), std::move(mu), std::move(kap));
}

GroupElement GroupElement::inverse() const {
  // Symplectic inverse: [[D^t, -B^t], [-C^t, A^t]].
  RMat Ai = D_.transpose(), Bi = -B_.transpose(), Ci = -C_.transpose(),
       Di = A_.transpose();
  RMat li = -(lam_ * Ai + mu_ * Ci);
  RMat ui = -(lam_ * Bi + mu_ * Di);
  RMat ki = -kappa_ + li * ui.transpose() - ui * li.transpose();
  return GroupElement(std::move(Ai), std::move(Bi), std::move(Ci), std::move(Di),
                      std::move(li), std::move(ui), std::move(ki));
}

Point GroupElement::act(const Point& x) const {
  if (x.n() != n_ || x.m() != m_)
    throw invalid_input("GroupElement::act: dimension mismatch");
  Mat Z = x.Z(), W = x.W();
  Mat CZD = C_.cast<cplx>() * Z + D_.cast<cplx>();
  Mat Jinv = CZD.inverse();
  Mat Znew = (A_.cast<cplx>() * Z + B_.cast<cplx>()) * Jinv;
  Znew = 0.5 * (Znew + Znew.transpose().eval());
  Mat Wnew = (W + lam_.cast<cplx>() * Z + mu_.cast<cplx>()) * Jinv;
  return Point(std::move(Znew), std::move(Wnew));
}

cplx GroupElement::automorphy(const WeightIndex& wi, const Point& x) const {
  // Exact one-cocycle: with Wf = W + lam Z + mu,
  //   J(g,x) = det(CZ+D)^k
  //            exp(2 pi i Tr(M [Wf (CZ+D)^{-1} C Wf^t
  //                             - lam Z lam^t - 2 lam W^t - mu lam^t - kappa])).
  // On pure symplectic or pure integral-Heisenberg generators this agrees with
  // the plain-W quadratic form up to a constant phase that is trivial for
  // integral index data; unlike that form it composes exactly on the whole
  // group, which the slash machinery relies on.
  if (wi.m() != m_) throw invalid_input("automorphy: index size mismatch");
  Mat Z = x.Z();
  const Mat& W = x.W();
  Mat CZD = C_.cast<cplx>() * Z + D_.cast<cplx>();
  cplx det = CZD.determinant();
  Mat lamc = lam_.cast<cplx>(), muc = mu_.cast<cplx>(), Mc = wi.M.cast<cplx>();
  Mat Wf = W + lamc * Z + muc;
  Mat E = Wf * CZD.inverse() * C_.cast<cplx>() * Wf.transpose() -
          (lamc * Z * lamc.transpose() + 2.0 * lamc * W.transpose() +
           muc * lamc.transpose() + kappa_.cast<cplx>());
  cplx tr = (Mc * E).trace();
  return std::pow(det, wi.k) * std::exp(2.0 * kPi * kI * tr);
}

std::string GroupElement::to_json() const {
  json j;
  auto dump = [](const RMat& M) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < M.rows(); ++i) {
      std::vector<double> r(M.cols());
      for (int c = 0; c < M.cols(); ++c) r[c] = M(i, c);
      rows.push_back(std::move(r));
    }
    return rows;
  };
  j["A"] = dump(A_);
  j["B"] = dump(B_);
  j["C"] = dump(C_);
  j["D"] = dump(D_);
  j["lambda"] = dump(lam_);
  j["mu"] = dump(mu_);
  j["kappa"] = dump(kappa_);
  return j.dump();
}

namespace {
RMat jmat(const json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw invalid_input(std::string("group JSON: bad ") + what);
  int rows = static_cast<int>(j.size());
  int cols = static_cast<int>(j[0].size());
  RMat M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols)
      throw invalid_input(std::string("group JSON: ragged ") + what);
    for (int c = 0; c < cols; ++c) M(i, c) = j[i][c].get<double>();
  }
  return M;
}
}  // namespace

GroupElement GroupElement::from_json(const std::string& text, int) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw invalid_input("group JSON: parse error");
  for (const char* key : {"A", "B", "C", "D", "lambda", "mu", "kappa"})
    if (!j.contains(key))
      throw invalid_input(std::string("group JSON: missing ") + key);
  return GroupElement(jmat(j["A"], "A"), jmat(j["B"], "B"), jmat(j["C"], "C"),
                      jmat(j["D"], "D"), jmat(j["lambda"], "lambda"),
                      jmat(j["mu"], "mu"), jmat(j["kappa"], "kappa"));
}

CotangentData cotangent_transforms(const GroupElement& g, const Point& x) {
  CotangentData d;
  d.J = g.C().cast<cplx>() * x.Z() + g.D().cast<cplx>();
  d.Jinv = d.J.inverse();
  d.Wtilde = (x.W() + g.lam().cast<cplx>() * x.Z() + g.mu().cast<cplx>()) * d.Jinv;
  d.Theta = g.lam().cast<cplx>() - d.Wtilde * g.C().cast<cplx>();
  return d;
}

RMat heisenberg_embedding(const RMat& lam, const RMat& mu, const RMat& kappa) {
  // m = 1 faithful matrix model used as a composition oracle in tests:
  //   [ 1   lam  mu   s  ]
  //   [ 0   I    0   mu^t]
  //   [ 0   0    I    0  ]
  //   [ 0   0    0    1  ]  with s = (kappa + lam mu^t) / 2.
  // One checks directly that E(l,u,k) E(l',u',k') = E of the composed triple
  // (l+l', u+u', k+k'+l u'^t-u l'^t) for m = 1.
  int n = static_cast<int>(lam.cols());
  if (lam.rows() != 1 || mu.rows() != 1 || kappa.rows() != 1 || kappa.cols() != 1)
    throw invalid_input("heisenberg_embedding: oracle is for m = 1");
  RMat E = RMat::Identity(2 * n + 2, 2 * n + 2);
  for (int j = 0; j < n; ++j) {
    E(0, 1 + j) = lam(0, j);
    E(0, 1 + n + j) = mu(0, j);
    E(1 + j, 2 * n + 1) = mu(0, j);
  }
  E(0, 2 * n + 1) = 0.5 * (kappa(0, 0) + (lam * mu.transpose())(0, 0));
  return E;
}

GroupElement random_group_element(int n, int m, std::uint64_t seed, int scale) {
  Rng rng(mix_seed(seed, "group"));
  GroupElement g = GroupElement::identity(n, m);
  int len = std::min(scale, 6);
  for (int step = 0; step < len; ++step) {
    int kind = static_cast<int>(rng.unif_int(0, 2));
    if (kind == 0) {
      // Upper shear by a small integral symmetric S.
      RMat S = RMat::Zero(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          S(i, j) = S(j, i) = static_cast<double>(rng.unif_int(-1, 1));
      GroupElement t(RMat::Identity(n, n), S, RMat::Zero(n, n),
                     RMat::Identity(n, n), RMat::Zero(m, n), RMat::Zero(m, n),
                     RMat::Zero(m, m));
      g = g.compose(t);
    } else if (kind == 1) {
      // The symplectic inversion (Z -> -Z^{-1}).
      GroupElement t(RMat::Zero(n, n), -RMat::Identity(n, n),
                     RMat::Identity(n, n), RMat::Zero(n, n), RMat::Zero(m, n),
                     RMat::Zero(m, n), RMat::Zero(m, m));
      g = g.compose(t);
    } else {
      // GL-rotation diag(U, U^{-t}) with a small unimodular integral U.
      RMat U = RMat::Identity(n, n);
      if (n > 1) {
        int a = static_cast<int>(rng.unif_int(0, n - 1));
        int b = static_cast<int>(rng.unif_int(0, n - 1));
        if (a != b) U(a, b) = static_cast<double>(rng.unif_int(-1, 1));
      }
      RMat Uinv = U.inverse();
      GroupElement t(U, RMat::Zero(n, n), RMat::Zero(n, n), Uinv.transpose(),
                     RMat::Zero(m, n), RMat::Zero(m, n), RMat::Zero(m, m));
      g = g.compose(t);
    }
  }
  if (scale > 0) {
    RMat lam(m, n), mu(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        lam(i, j) = static_cast<double>(rng.unif_int(-2, 2));
        mu(i, j) = static_cast<double>(rng.unif_int(-2, 2));
      }
    RMat S = RMat::Zero(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j)
        S(i, j) = S(j, i) = static_cast<double>(rng.unif_int(-2, 2));
    RMat kap = S - mu * lam.transpose();
    GroupElement h(RMat::Identity(n, n), RMat::Zero(n, n), RMat::Zero(n, n),
                   RMat::Identity(n, n), std::move(lam), std::move(mu),
                   std::move(kap));
    g = g.compose(h);
  }
  return g;
}

}  // namespace sj
