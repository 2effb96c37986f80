#include "core/operators.hpp"

// Builders for the invariant-operator family.  Matrix entries are symbolic
// sums c(x) d^alpha with coefficients to the left of the derivatives; matrix
// products of two operator matrices expand with the Leibniz rule, while
// sandwiching with plain function matrices only rescales coefficients.

namespace sj {

namespace {

// (d/dZ)_{st} with the symmetric-matrix convention: off-diagonal entries are
// half of the symmetric-perturbation derivative.
LinOp zder(const CoordSystem& cs, int s, int t, bool bar) {
  int id = cs.z_index(s, t);
  if (bar) id = cs.conj(id);
  LinOp d = lin_deriv(id);
  return (s == t) ? d : lin_scale(0.5, d);
}

int wid(const CoordSystem& cs, int i, int s, bool bar) {
  int id = cs.w_index(i, s);
  return bar ? cs.conj(id) : id;
}

// Shared skeleton of X+ and its conjugate:
//   2i d/dZ + i (Y^{-1} V^t) (d/dW)^t + i (d/dW) (V Y^{-1})
// with every derivative replaced by its conjugate when bar is set.
OpMat xplus_core(const CoordSystem& cs, bool bar) {
  const int n = cs.n, m = cs.m;
  MapMat RVt = coeff_RVt(cs);  // n x m
  MapMat VR = coeff_VR(cs);    // m x n
  OpMat out = om_zero(n, n);
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) {
      LinOp acc = lin_scale(2.0 * kI, zder(cs, s, t, bar));
      for (int i = 0; i < m; ++i) {
        acc = lin_add(acc, lin_scale(kI, lin_scale_map(RVt[s][i],
                                                       lin_deriv(wid(cs, i, t, bar)))));
        acc = lin_add(acc, lin_scale(kI, lin_scale_map(VR[i][t],
                                                       lin_deriv(wid(cs, i, s, bar)))));
      }
      out[s][t] = lin_merge(acc);
    }
  return out;
}

}  // namespace

OpMat inv_Yplus(const CoordSystem& cs) {
  OpMat out = om_zero(cs.n, cs.m);
  for (int s = 0; s < cs.n; ++s)
    for (int i = 0; i < cs.m; ++i) out[s][i] = lin_deriv(cs.w_index(i, s));
  return out;
}

OpMat inv_Yminus(const CoordSystem& cs) {
  MapMat Y = coeff_Y(cs);
  OpMat out = om_zero(cs.m, cs.n);
  for (int i = 0; i < cs.m; ++i)
    for (int t = 0; t < cs.n; ++t) {
      LinOp acc;
      for (int s = 0; s < cs.n; ++s)
        acc = lin_add(acc, lin_scale_map(Y[s][t],
                                         lin_deriv(cs.conj(cs.w_index(i, s)))));
      out[i][t] = lin_merge(acc);
    }
  return out;
}

OpMat inv_Yplus_col(const CoordSystem& cs, int k) {
  if (k < 0 || k >= cs.m)
    throw IndexOutOfRange("Y+k: selector outside [0,m)");
  OpMat out = om_zero(cs.n, 1);
  for (int s = 0; s < cs.n; ++s) out[s][0] = lin_deriv(cs.w_index(k, s));
  return out;
}

OpMat inv_Yminus_row(const CoordSystem& cs, int k) {
  if (k < 0 || k >= cs.m)
    throw IndexOutOfRange("Y-k: selector outside [0,m)");
  MapMat Y = coeff_Y(cs);
  OpMat out = om_zero(1, cs.n);
  for (int t = 0; t < cs.n; ++t) {
    LinOp acc;
    for (int s = 0; s < cs.n; ++s)
      acc = lin_add(acc, lin_scale_map(Y[s][t],
                                       lin_deriv(cs.conj(cs.w_index(k, s)))));
    out[0][t] = lin_merge(acc);
  }
  return out;
}

OpMat inv_Xplus(const CoordSystem& cs) { return xplus_core(cs, false); }

OpMat inv_K(const CoordSystem& cs) {
  return om_left_fun(coeff_Y(cs), xplus_core(cs, false));
}

OpMat inv_Lambda(const CoordSystem& cs) {
  return om_left_fun(coeff_Y(cs), xplus_core(cs, true));
}

OpMat inv_Xminus(const CoordSystem& cs) {
  const int n = cs.n, m = cs.m;
  MapMat Y = coeff_Y(cs);
  MapMat V = coeff_V(cs);
  OpMat out = om_zero(n, n);
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) {
      LinOp acc;
      // 2i (Y dZbar Y)_{st}
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          MapPtr c = map_product(Y[s][p], Y[q][t]);
          acc = lin_add(acc, lin_scale(2.0 * kI,
                                       lin_scale_map(c, zder(cs, p, q, true))));
        }
      // i (Y dWbar V)_{st}
      for (int p = 0; p < n; ++p)
        for (int i = 0; i < m; ++i) {
          MapPtr c = map_product(Y[s][p], V[i][t]);
          acc = lin_add(acc,
                        lin_scale(kI, lin_scale_map(c, lin_deriv(wid(cs, i, p, true)))));
        }
      // i (V^t dWbar^t Y)_{st}
      for (int i = 0; i < m; ++i)
        for (int q = 0; q < n; ++q) {
          MapPtr c = map_product(V[i][s], Y[q][t]);
          acc = lin_add(acc,
                        lin_scale(kI, lin_scale_map(c, lin_deriv(wid(cs, i, q, true)))));
        }
      out[s][t] = lin_merge(acc);
    }
  return out;
}

OpMat inv_A(const CoordSystem& cs, int j) {
  if (j < 1) throw invalid_input("A_j: degree must be >= 1");
  const double half_np1 = 0.5 * (cs.n + 1);
  OpMat K = inv_K(cs);
  OpMat L = inv_Lambda(cs);
  OpMat A = om_add(om_compose(L, K), om_scale(half_np1, K));
  if (j == 1) return A;
  OpMat A1 = A;
  for (int step = 2; step <= j; ++step) {
    OpMat t1 = om_compose(A1, A);
    OpMat t2 = om_scale(-half_np1, om_compose(L, A));
    OpMat t3 = om_scale(0.5, om_compose_scalar(L, om_trace(A)));
    // (1/2)(Z - Zbar)((Z - Zbar)^{-1}(Lambda^t A^t)^t)^t with the function
    // matrices acting on coefficients only.
    OpMat B = om_compose(om_transpose(L), om_transpose(A));
    OpMat C = om_transpose(B);
    OpMat D = om_left_fun(mm_scale(cplx(0.0, -0.5), coeff_R(cs)), C);
    OpMat E = om_transpose(D);
    OpMat F = om_left_fun(mm_scale(2.0 * kI, coeff_Y(cs)), E);
    OpMat t4 = om_scale(0.5, F);
    A = om_add(om_add(t1, t2), om_add(t3, t4));
    for (auto& row : A)
      for (auto& e : row) e = lin_merge(e);
  }
  return A;
}

OpMat inv_YmYp(const CoordSystem& cs) {
  return om_compose(inv_Yminus(cs), inv_Yplus(cs));
}

LinOp inv_H(const CoordSystem& cs, int j) { return om_trace(inv_A(cs, j)); }

LinOp inv_T(const CoordSystem& cs, int j, int k, int l) {
  if (l < 0 || l >= cs.m) throw IndexOutOfRange("T_kl: l outside [0,m)");
  OpMat P = om_transpose(inv_Yminus_row(cs, k));  // n x 1
  OpMat Q = om_transpose(inv_Yplus_col(cs, l));   // 1 x n
  return om_trace(om_compose(om_compose(P, Q), inv_A(cs, j)));
}

LinOp inv_U(const CoordSystem& cs, int k, int l) {
  if (l < 0 || l >= cs.m) throw IndexOutOfRange("U_kl: l outside [0,m)");
  OpMat P = om_transpose(inv_Yminus_row(cs, k));  // n x 1
  OpMat Q = inv_Yminus_row(cs, l);                // 1 x n
  return om_trace(om_compose(om_compose(P, Q), inv_Xplus(cs)));
}

LinOp inv_V(const CoordSystem& cs, int k, int l) {
  if (l < 0 || l >= cs.m) throw IndexOutOfRange("V_kl: l outside [0,m)");
  OpMat P = inv_Yplus_col(cs, k);                 // n x 1
  OpMat Q = om_transpose(inv_Yplus_col(cs, l));   // 1 x n
  return om_trace(om_compose(om_compose(P, Q), inv_Xminus(cs)));
}

OpMat build_invariant(const std::string& name, const CoordSystem& cs,
                      const OpOptions& opt) {
  if (name == "Y+") return inv_Yplus(cs);
  if (name == "Y-") return inv_Yminus(cs);
  if (name == "Y+k") return inv_Yplus_col(cs, opt.k_sel);
  if (name == "Y-k") return inv_Yminus_row(cs, opt.k_sel);
  if (name == "X+") return inv_Xplus(cs);
  if (name == "X-") return inv_Xminus(cs);
  if (name == "K") return inv_K(cs);
  if (name == "Lambda") return inv_Lambda(cs);
  if (name == "A_j") return inv_A(cs, opt.j);
  if (name == "Y-Y+") return inv_YmYp(cs);
  if (name == "H_j") return OpMat{{inv_H(cs, opt.j)}};
  if (name == "T_kl") return OpMat{{inv_T(cs, opt.j, opt.k_sel, opt.l_sel)}};
  if (name == "U_kl") return OpMat{{inv_U(cs, opt.k_sel, opt.l_sel)}};
  if (name == "V_kl") return OpMat{{inv_V(cs, opt.k_sel, opt.l_sel)}};
  throw invalid_input("build_invariant: unknown name " + name);
}

}  // namespace sj
