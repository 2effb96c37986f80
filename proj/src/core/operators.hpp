#pragma once

// Differential operators on functions over H_{n,m}.
//
// Two families live here.
//
// 1. Weight/index-shifting operators compatible with the slash action: for
//    each operator Op there are signatures (k, M) -> (k', M') with
//        Op(f |_{k,M} g) = (Op f) |_{k',M'} g
//    for every group element g.  The catalogue covers the scalar case
//    n = m = 1, the several-elliptic-variables case n = 1, m >= 1, and
//    determinant-type operators for general degree, plus Eisenstein-corrected
//    combinations that keep holomorphic inputs holomorphic and two bilinear
//    pairings.
//
// 2. Invariant operators: matrices of differential operators built from the
//    gradient blocks whose scalar contractions commute with the group action,
//        D(f o g) = (D f) o g.
//    These are assembled symbolically (coefficient functions to the left of
//    the derivatives) so they can be composed exactly; see invariant_ops.cpp.
//
// Everything here is pure: operators never mutate their input maps, and all
// returned maps are safe to evaluate concurrently.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "core/common.hpp"
#include "core/group.hpp"
#include "core/point.hpp"
#include "core/smoothmap.hpp"

namespace sj {

// --- error taxonomy ---------------------------------------------------------

// Input map's declared derivative order cannot support the operator.
struct OrderTooLow : invalid_input {
  using invalid_input::invalid_input;
};
// A row/column/selector index is outside its valid range.
struct IndexOutOfRange : invalid_input {
  using invalid_input::invalid_input;
};
// A row-selection vector for a determinant operator is not a strictly
// increasing size-n subset of {0,...,m-1}.
struct BadRowSelection : invalid_input {
  using invalid_input::invalid_input;
};
// The index matrix M is singular where the operator needs M^{-1}.
struct SingularIndex : invalid_input {
  using invalid_input::invalid_input;
};
// A binary operator received operands of incompatible shape (e.g. the
// degree-one pairing needs n == m).
struct DimensionMismatch : invalid_input {
  using invalid_input::invalid_input;
};

// --- matrices of maps -------------------------------------------------------

// Dense rectangular matrix of scalar maps.  Entries are never null.
using MapMat = std::vector<std::vector<MapPtr>>;

MapMat mm_zero(int r, int c);
MapMat mm_from_const(const Mat& A);
MapMat mm_add(const MapMat& A, const MapMat& B);
MapMat mm_sub(const MapMat& A, const MapMat& B);
MapMat mm_scale(cplx s, const MapMat& A);
MapMat mm_scale_map(const MapPtr& s, const MapMat& A);
MapMat mm_mul(const MapMat& A, const MapMat& B);
MapMat mm_transpose(const MapMat& A);
MapPtr mm_trace(const MapMat& A);
MapPtr mm_det(const MapMat& A);  // Leibniz expansion; fine for n <= 4

// --- coefficient matrices ---------------------------------------------------
//
// Entries of the standard point matrices as maps (jet-backed, derivative
// order 4): Y = Im Z (n x n), V = Im W (m x n), R = Y^{-1}, and the products
// V R (m x n) and R V^t (n x m).

MapMat coeff_Y(const CoordSystem& cs);
MapMat coeff_V(const CoordSystem& cs);
MapMat coeff_R(const CoordSystem& cs);
MapMat coeff_VR(const CoordSystem& cs);
MapMat coeff_RVt(const CoordSystem& cs);
MapPtr coeff_detY(const CoordSystem& cs);

// --- gradient matrices (matrix calculus layout) -----------------------------
//
// d/dZ is the symmetric n x n matrix with (i,j) entry (1+delta_ij)/2 *
// d/dz_ij, realised through the symmetric-perturbation convention of the
// coordinate system.  d/dW is the n x m matrix whose (s,i) entry is
// d/dw_is — rows indexed by the column of W, columns by the row of W — so
// that products like Y^{-1} V^t M match it in shape.

MapMat grad_Z_mat(const MapPtr& f, const CoordSystem& cs);
MapMat grad_W_mat(const MapPtr& f, const CoordSystem& cs);
MapMat grad_Zbar_mat(const MapPtr& f, const CoordSystem& cs);
MapMat grad_Wbar_mat(const MapPtr& f, const CoordSystem& cs);
// n x n matrix with (s,t) entry sum_{i,j} S_ij d^2 f / dw_is dw_jt for a
// constant symmetric m x m matrix S.
MapMat hess_W_mat(const MapPtr& f, const CoordSystem& cs, const RMat& S);

// --- weight kernel ----------------------------------------------------------
//
// h_1(x) = det(Y)^k exp(-4 pi Tr(M V Y^{-1} V^t)); conjugation by h_1 turns
// plain derivatives into the raising operators below (e.g. the degree-one
// raising operator is h_1^{-1} d/dw h_1 when n = m = 1).

struct WeightKernel {
  CoordSystem cs;
  WeightIndex wi;
  MapPtr h;
};
WeightKernel weight_kernel(const CoordSystem& cs, const WeightIndex& wi);

// --- the catalogue (direct forms) -------------------------------------------
//
// All functions take the input weight/index (k, M) of f and return the
// transformed map; the output signature is given by out_signature below.

// n = m = 1.
MapPtr op_D1(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs);
MapPtr op_heat_Lm(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs);
MapPtr op_heat_Lkm(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs);
MapPtr op_D2(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs);
MapPtr op_delta1(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs);
MapPtr op_delta2(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs);

// Eisenstein-corrected combinations, n = m = 1.  Variants:
//   'a'  heat + 2M(1-2k) G_2 f              (holomorphic in, holomorphic out)
//   'b'  heat + 2M(1-2k) Ghat_2(z,w) f      (meromorphic)
//   'c'  d/dw f + 4 pi i M Ehat_1(z,w) f    (meromorphic)
//   'd'  Ehat_1 d/dw f + d/dz f + 2 pi i M Ehat_1^2 f
//          + (i k / 2 pi)(a G_2 + b Ghat_2) f,  requires a + b = -1
// The 'd' constraint comes from rewriting the covariant combination
// Ehat_1 f_w + f_z + 2 pi i M Ehat_1^2 f - (i k / 2 y) f: only G_2 - pi/y and
// Ghat_2 - pi/y multiply covariantly, so absorbing -(i k/2 pi)(pi/y) forces
// the coefficient sum to -1 (any split along that line works).
// `literal` switches 'c' to the uncorrected constant 4 pi M (no i) and lets
// 'd' accept arbitrary (a, b); the off-constraint forms break covariance and
// are kept as negative controls.
MapPtr op_serre_like(const MapPtr& f, const WeightIndex& wi,
                     const CoordSystem& cs, char variant, double a = -0.5,
                     double b = -0.5, bool literal = false);

// n = 1, m >= 1.  i selects a row of W where applicable.
MapPtr op_D1_i(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs,
               int i);
MapPtr op_delta1_i(const MapPtr& f, const WeightIndex& wi,
                   const CoordSystem& cs, int i);
MapPtr op_heat_m(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs,
                 bool full = true);  // full=false drops the 1/y zeroth-order term
MapPtr op_D2_m(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs);
MapPtr op_delta2_m(const MapPtr& f, const WeightIndex& wi,
                   const CoordSystem& cs);
// Variants 'a' (G_2), 'b' (Ghat_2(z,w_i)), 'c' (coupled Ehat_1 sum on row i);
// `literal` switches 'c' to the uncoupled form 4 pi (sum_t M_it) Ehat_1(z,w_i)
// without i, kept as a negative control.
MapPtr op_serre_like_m(const MapPtr& f, const WeightIndex& wi,
                       const CoordSystem& cs, char variant, int i = 0,
                       bool literal = false);

// General degree.  `rows` selects which n rows of W enter the determinant
// when m > n (strictly increasing, size n; empty means {0,...,n-1}).
MapPtr op_D1_det(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs,
                 const std::vector<int>& rows = {});
MapPtr op_delta1_det(const MapPtr& f, const WeightIndex& wi,
                     const CoordSystem& cs, const std::vector<int>& rows = {});
MapPtr op_heat_det(const MapPtr& f, const WeightIndex& wi,
                   const CoordSystem& cs);
// For both second-order determinant operators the symmetrized mixed term is
// the covariant form; symmetrized = false keeps the one-sided mixed term,
// which fails under inversions and lambda translations (negative control).
MapPtr op_D2_det(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs,
                 bool symmetrized = true);
MapPtr op_delta2_det(const MapPtr& f, const WeightIndex& wi,
                     const CoordSystem& cs, bool symmetrized = true);

// Bilinear pairings.
//  variant 'a': det((df/dW) M2 g - (dg/dW) M1 f); needs n == m and
//               commuting index matrices.  Signature (n(k1+k2)+1, n(M1+M2)).
//  variant 'b': det((m-2k2) Theta_f g - (m-2k1) Theta_g f) with
//               Theta_f = -8 pi i df/dZ + [sum (M1^{-1})_ij d^2 f/dw_is dw_jt];
//               needs invertible indices.  Output index n(M1+M2); the output
//               weight is determined numerically (see bracket_b_weight_scan).
MapPtr op_bracket(const MapPtr& f, const WeightIndex& wf, const MapPtr& g,
                  const WeightIndex& wg, const CoordSystem& cs, char variant);

// --- registry ---------------------------------------------------------------

// Options steering the parameterised operators; defaults give the covariant
// forms.
struct OpOptions {
  char variant = 'a';
  double a = -0.5, b = -0.5;   // serre_like 'd' coefficients; need a + b = -1
  bool literal = false;        // naive control forms (known non-covariant)
  bool symmetrized = true;     // D2_det / delta2_det mixed term
  int i = 0;                   // W-row selector
  int j = 1;                   // invariant-family degree (A_j, H_j, T_kl)
  int k_sel = 0, l_sel = 0;    // invariant-family row selectors
  std::vector<int> rows;       // determinant row selection
};

struct OpResult {
  MapPtr f;
  WeightIndex wi;
};

struct OperatorInfo {
  std::string name;
  int arity = 1;
  int order = 1;               // highest derivative order used
  std::string n_str, m_str;    // applicability, e.g. "1", ">=1", "==m"
  std::string k_out;           // e.g. "k+1", "n*k+2", "k" (invariant)
  std::string index_scale;     // "1", "n", "n*(M1+M2)"
  bool invariant = false;      // true: commutes with the plain action
  bool matrix_valued = false;  // true: builder only, not scalar-appliable
  std::function<bool(int n, int m)> applicable;
};

const std::vector<OperatorInfo>& op_registry();
const OperatorInfo* find_op(const std::string& name);
std::string list_ops_json();

// Output signature of a unary catalogue operator for inputs of weight wi on
// H_{n,m}; throws invalid_input for unknown or binary names.
WeightIndex out_signature(const std::string& name, const WeightIndex& wi,
                          const CoordSystem& cs, const OpOptions& opt = {});
WeightIndex out_signature2(const std::string& name, const WeightIndex& wf,
                           const WeightIndex& wg, const CoordSystem& cs,
                           const OpOptions& opt = {});

// Uniform dispatch; covers every scalar-valued unary operator (covariant and
// invariant).  Throws invalid_input for unknown names or violated
// applicability constraints.
OpResult apply_operator(const std::string& name, const MapPtr& f,
                        const WeightIndex& wi, const CoordSystem& cs,
                        const OpOptions& opt = {});
OpResult apply_operator2(const std::string& name, const MapPtr& f,
                         const WeightIndex& wf, const MapPtr& g,
                         const WeightIndex& wg, const CoordSystem& cs,
                         const OpOptions& opt = {});

// Parse "name[:variant][:key=val,...]" into a registry name plus options;
// e.g. "serre_like:d:a=0.3,b=-1.3", "D1_det:rows=02", "T_kl:j=1,k=0,l=1".
std::pair<std::string, OpOptions> parse_op_spec(const std::string& spec);

// --- symbolic linear differential operators ---------------------------------
//
// A term c(x) d^alpha with the coefficient left of the derivative; a null
// coefficient means the constant 1.  Composition expands by the Leibniz rule;
// multiplication by a plain function matrix only scales coefficients (normal
// ordering).

struct LinTerm {
  MapPtr coeff;      // may be null (constant 1)
  MultiIndex deriv;  // sorted coordinate ids, possibly empty
};

struct LinOp {
  std::vector<LinTerm> terms;
};

LinOp lin_zero();
LinOp lin_identity();
LinOp lin_deriv(int coord);
LinOp lin_add(const LinOp& A, const LinOp& B);
LinOp lin_scale(cplx s, const LinOp& A);
LinOp lin_scale_map(const MapPtr& c, const LinOp& A);  // coefficient product
LinOp lin_compose(const LinOp& A, const LinOp& B);     // A then B, Leibniz
// Merge terms sharing a derivative multi-index (keeps term counts bounded
// through repeated composition).
LinOp lin_merge(const LinOp& A);
MapPtr lin_apply(const LinOp& A, const MapPtr& f);

// Matrix of symbolic operators.
using OpMat = std::vector<std::vector<LinOp>>;

OpMat om_zero(int r, int c);
OpMat om_add(const OpMat& A, const OpMat& B);
OpMat om_scale(cplx s, const OpMat& A);
OpMat om_transpose(const OpMat& A);
OpMat om_compose(const OpMat& A, const OpMat& B);       // entrywise Leibniz
OpMat om_left_fun(const MapMat& F, const OpMat& A);     // coefficients only
OpMat om_right_fun(const OpMat& A, const MapMat& F);    // coefficients only
OpMat om_compose_scalar(const OpMat& A, const LinOp& s);
LinOp om_trace(const OpMat& A);
MapMat om_apply(const OpMat& A, const MapPtr& f);

// --- the invariant family ---------------------------------------------------
//
// Raising/lowering gradient blocks and the derived central elements.  Names
// follow the registry: "Y+", "Y-", "X+", "X-", "K", "Lambda" build the full
// matrices; "Y+k"/"Y-k" take the k-th column/row.  A_j is defined by
//   A_1 = Lambda K + ((n+1)/2) K,
//   A_j = A_1 A_{j-1} - ((n+1)/2) Lambda A_{j-1} + (1/2) Lambda Tr A_{j-1}
//         + (1/2)(Z - Zbar)((Z - Zbar)^{-1} (Lambda^t A_{j-1}^t)^t)^t,
// and H_j = Tr A_j; the scalar contractions T/U/V pair the gradient blocks
// with A_j, X+ and X-.

OpMat inv_Yplus(const CoordSystem& cs);                  // n x m
OpMat inv_Yminus(const CoordSystem& cs);                 // m x n
OpMat inv_Yplus_col(const CoordSystem& cs, int k);       // n x 1
OpMat inv_Yminus_row(const CoordSystem& cs, int k);      // 1 x n
OpMat inv_Xplus(const CoordSystem& cs);                  // n x n
OpMat inv_Xminus(const CoordSystem& cs);                 // n x n
OpMat inv_K(const CoordSystem& cs);                      // n x n
OpMat inv_Lambda(const CoordSystem& cs);                 // n x n
OpMat inv_A(const CoordSystem& cs, int j);               // n x n, j >= 1
OpMat inv_YmYp(const CoordSystem& cs);                   // m x m, entrywise invariant
LinOp inv_H(const CoordSystem& cs, int j);
LinOp inv_T(const CoordSystem& cs, int j, int k, int l);
LinOp inv_U(const CoordSystem& cs, int k, int l);
LinOp inv_V(const CoordSystem& cs, int k, int l);

// Dispatch by registry name ("Y+", "A_j", ...); scalar names return a 1 x 1
// matrix.  Throws invalid_input for unknown names, IndexOutOfRange for bad
// selectors.
OpMat build_invariant(const std::string& name, const CoordSystem& cs,
                      const OpOptions& opt = {});

}  // namespace sj
