#pragma once

// The invariant Kaehler-type metric on H_{n,m},
//   ds^2 = A Tr(R dZ R dZb)
//        + B { Tr(R V^t V R dZ R dZb) + Tr(R dW^t dWb)
//              - Tr(V R dZ R dWb^t) - Tr(V R dZb R dW^t) },
// its block matrices over the coordinate index sets, the closed-form inverse,
// and the Levi-Civita connection via two independent routes (analytic
// coordinate differentiation vs. closed matrix expressions).

#include <string>

#include "common.hpp"
#include "group.hpp"
#include "point.hpp"

namespace sj {

struct MetricParams {
  double A = 1.0, B = 1.0;
  MetricParams() = default;
  MetricParams(double A_, double B_) : A(A_), B(B_) {
    if (!(A > 0.0) || !(B > 0.0)) throw invalid_input("MetricParams: need A,B > 0");
  }
};

// Documented coordinate orderings: Omega = symmetric Z pairs (i <= j) in
// row-major order; OmegaPrime = W entries (r,s) row-major.  These fix the
// row/column meaning of every matrix and CSV in this module.
struct IndexSets {
  std::vector<std::pair<int, int>> omega;
  std::vector<std::pair<int, int>> omega_prime;
};
IndexSets index_sets(int n, int m);

// Coefficient blocks of the metric in the mixed basis:
//   ds^2 = sum 2 W1_{I,J} dZ_I dZb_J + 2 W2_{I,J'} (dZ_I dWb_{J'} + dZb_I dW_{J'})
//        + 2 W3_{I',J'} dW_{I'} dWb_{J'} ... i.e. the entries are the matrix
// entries of the symmetric 2H x 2H Gram matrix (monomial coefficients halved),
// matching the printed n = m = 1 matrix.
struct MetricBlocks {
  RMat W1;  // |Omega| x |Omega|
  RMat W2;  // |Omega| x |OmegaPrime|
  RMat W3;  // |OmegaPrime| x |OmegaPrime|
  RMat P() const;     // [[W1, W2], [W2^t, W3]], H x H
  RMat full() const;  // [[0, P], [P^t, 0]], 2H x 2H (basis: holo then bar)
};
MetricBlocks metric_blocks(const Point& x, const MetricParams& par);

// Closed-form inverse blocks (pair with MetricBlocks: P * Pinv = I).
struct MetricInverseBlocks {
  RMat M1, M2, M3;
  RMat Pinv() const;       // [[M1, M2], [M2^t, M3]]
  RMat full_inv() const;   // [[0, Pinv^t], [Pinv, 0]]
};
MetricInverseBlocks metric_inverse_closed(const Point& x, const MetricParams& par);

// Quadratic form evaluated directly from the trace expression (oracle) on a
// tangent (dZ symmetric n x n, dW m x n).
double ds2_eval(const Point& x, const MetricParams& par, const Mat& dZ,
                const Mat& dW);
// Same value from the assembled blocks.
double ds2_blocks_eval(const MetricBlocks& bl, const CoordSystem& cs,
                       const Mat& dZ, const Mat& dW);

// Levi-Civita connection coefficients Gamma^K_{IJ} over all complexified
// coordinate triples (K, I, J in [0, 2H)), symmetric in (I, J).
struct ConnectionData {
  CoordSystem cs;
  std::vector<cplx> coeff;  // ((K * 2H) + I) * 2H + J
  explicit ConnectionData(const CoordSystem& c)
      : cs(c), coeff(static_cast<std::size_t>(c.total) * c.total * c.total,
                     cplx(0.0, 0.0)) {}
  cplx& at(int K, int I, int J) {
    return coeff[(static_cast<std::size_t>(K) * cs.total + I) * cs.total + J];
  }
  cplx at(int K, int I, int J) const {
    return coeff[(static_cast<std::size_t>(K) * cs.total + I) * cs.total + J];
  }
  double max_abs_diff(const ConnectionData& o) const;
  double max_abs() const;
};

// Route 1: Gamma = 1/2 g^{..}(dg + dg - dg) with analytic (jet) first
// derivatives of the assembled metric.
ConnectionData christoffel_numeric(const Point& x, const MetricParams& par);

// Route 2: closed matrix expressions; purely holomorphic (and conjugate)
// triples are populated, mixed ones are structural zeros.
ConnectionData connection_closed(const Point& x, const MetricParams& par);

// Invariance of ds^2 under the group action: compares the form at x on a
// random tangent with the form at g.x on the pushed-forward tangent.
double metric_invariance_residual(const GroupElement& g, const Point& x,
                                  const MetricParams& par, std::uint64_t seed);

// CSV dump (header K_index,I_index,J_index,re,im; K over Omega then
// OmegaPrime, I <= J over the holomorphic ids) of the closed-form connection.
std::string christoffel_csv(const Point& x, const MetricParams& par);

}  // namespace sj
