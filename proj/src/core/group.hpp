#pragma once

#include <string>

#include "common.hpp"
#include "point.hpp"

namespace sj {

// Weight data for the slash action: integer weight k and a rational symmetric
// half-integral m x m index matrix M (2M integral, diagonal of M integral).
struct WeightIndex {
  int k = 0;
  RMat M;  // m x m

  WeightIndex() = default;
  WeightIndex(int k_, RMat M_, double tol = 1e-9);
  int m() const { return static_cast<int>(M.rows()); }
  static WeightIndex scalar(int k, double M_val) {
    RMat M(1, 1);
    M(0, 0) = M_val;
    return WeightIndex(k, M);
  }
};

// Element of the Jacobi group Sp(n,R) x| H^{(n,m)}_R: a symplectic block
// matrix [[A,B],[C,D]] together with (lambda, mu; kappa), lambda/mu m x n and
// kappa m x m constrained by kappa + mu lambda^t symmetric.
class GroupElement {
 public:
  GroupElement(RMat A, RMat B, RMat C, RMat D, RMat lam, RMat mu, RMat kappa,
               double tol = 1e-9);

  static GroupElement identity(int n, int m);

  int n() const { return n_; }
  int m() const { return m_; }
  const RMat& A() const { return A_; }
  const RMat& B() const { return B_; }
  const RMat& C() const { return C_; }
  const RMat& D() const { return D_; }
  const RMat& lam() const { return lam_; }
  const RMat& mu() const { return mu_; }
  const RMat& kappa() const { return kappa_; }

  // Group product g1 * g2, i.e. the element acting as x -> g1.(g2.x).
  GroupElement compose(const GroupElement& other) const;
  GroupElement inverse() const;

  Point act(const Point& x) const;
  // Canonical automorphy factor J_{k,M}(g, x) (kappa does not enter; the
  // cocycle identity then holds up to a constant unimodular phase).
  cplx automorphy(const WeightIndex& wi, const Point& x) const;

  // Residual of the defining symplectic relation g^t J g = J.
  double symplectic_residual() const;
  // Residual of the kappa-symmetry constraint.
  double kappa_residual() const;

  std::string to_json() const;
  static GroupElement from_json(const std::string& json, int m_hint = -1);

 private:
  int n_, m_;
  RMat A_, B_, C_, D_, lam_, mu_, kappa_;
};

// First-order data of the action at (g, x): with J = CZ + D,
// Wt = (W + lambda Z + mu) J^{-1} and Theta = lambda - Wt C, tangents push as
//   d(gZ) = J^{-t} dZ J^{-1},   d(gW) = dW J^{-1} + Theta dZ J^{-1}.
struct CotangentData {
  Mat J, Jinv, Wtilde, Theta;
  Mat push_dZ(const Mat& dZ) const {
    return Jinv.transpose() * dZ * Jinv;
  }
  Mat push_dW(const Mat& dW, const Mat& dZ) const {
    return dW * Jinv + Theta * dZ * Jinv;
  }
};
CotangentData cotangent_transforms(const GroupElement& g, const Point& x);

// Embedding of the m = 1 Heisenberg part into (2n+2) x (2n+2) matrices used
// as an independent oracle for the composition law.
RMat heisenberg_embedding(const RMat& lam, const RMat& mu, const RMat& kappa);

// Random word in symplectic generators (shears and the inversion) plus an
// integral Heisenberg part.  scale = 0 yields the identity; scale caps the
// word length at min(scale, 6).
GroupElement random_group_element(int n, int m, std::uint64_t seed, int scale = 4);

}  // namespace sj
