#pragma once

// Wirtinger matrix calculus on H_{n,m}: matrix-convention gradients, the
// finite-difference oracle, and the closed-form gradient identities used by
// the operator layer (each cross-checked against the oracle in tests).

#include "common.hpp"
#include "point.hpp"
#include "smoothmap.hpp"

namespace sj {

// Matrix-convention gradients of a scalar function:
//   dZ  is n x n symmetric with off-diagonal entries halved, so that
//       d f = Tr(dZ(f) . delta Z) for symmetric perturbations;
//   dW  is n x m with (j,i) entry  df/dw_{i,j}  (so  d f = Tr(dW(f) . delta W));
//   dZb, dWb are the conjugate-coordinate analogues.
struct MatrixGradient {
  Mat dZ, dW, dZb, dWb;
};

MatrixGradient grad(const SmoothMap& f, const Point& x);

// Finite-difference oracle: central differences with one Richardson step
// (h and h/2).  Never used in production paths; tests compare it against the
// analytic partials.
cplx fd_partial(const SmoothMap& f, const Point& x, const MultiIndex& mi,
                double h = 4e-3);
MatrixGradient fd_gradient(const SmoothMap& f, const Point& x, double h = 4e-3);

// --- closed-form gradient identities ---------------------------------------

// d/dW of Tr(M V R V^t)  (n x m, matrix convention):  -i R V^t M.
Mat grad_trace_MVRV_W(const Point& x, const RMat& M);

// d/dZ of Tr(M V R V^t)  (n x n, symmetric convention):  (i/2) R V^t M V R.
Mat grad_trace_MVRV_Z(const Point& x, const RMat& M);

// d/dZ of det Y  (symmetric convention):  -(i/2) det(Y) R.
Mat grad_detY_Z(const Point& x);

// Plain-coordinate derivative of R = Y^{-1} along z_{kl}:  the n x n matrix
// dR/dz_{kl} = (i/2)(R E_{kl} R + [k != l] R E_{lk} R).
Mat grad_R_Z(const Point& x, int k, int l);

// The covariant W-Hessian kernel attached to a holomorphic f and index M:
// for block (i,j) returns the n x n matrix with (k,l) entry
//   f_{w_{jk} w_{il}} + 4 pi i (MVR)_{il} f_{w_{jk}} + 4 pi i (MVR)_{jk} f_{w_{il}}
//   + ( -16 pi^2 (MVR)_{il} (MVR)_{jk} + 2 pi M_{ij} R_{kl} ) f .
// It equals  (d/dW_i (d(f h)/dW_j)^t) / h  for the weight kernel
// h = det(Y)^k exp(-4 pi Tr(MVRV^t)), which is how the tests validate it.
Mat hessian_W_kernel(const SmoothMap& f, const Point& x, const RMat& M, int i,
                     int j);

// Residual of the cofactor contraction identity
//   sum_{i,j} adj(M)_{ij} H_{ij}  =  det(M) * sum_{i,j} (M^{-1})_{ij} H_{ij}
// on the W-Hessian blocks H_{ij} = [ f_{w_{ia} w_{jb}} ]_{ab}; returns the
// max entry deviation (an exact identity, so this is a consistency check of
// the Hessian plumbing).
double cofactor_trace_identity_check(const SmoothMap& f, const Point& x,
                                     const RMat& M);

// Plain-coordinate partial of a matrix entry helper used across modules:
// gradient matrices of Y, V, R as functions of one coordinate id.
Mat dY_dcoord(const Point& x, int coord);  // n x n
Mat dV_dcoord(const Point& x, int coord);  // m x n
Mat dR_dcoord(const Point& x, int coord);  // n x n

}  // namespace sj
