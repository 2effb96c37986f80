#include "core/operators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "core/eisenstein.hpp"
#include "core/jet.hpp"

namespace sj {

namespace {

constexpr int kCoeffOrder = 4;

std::string itos(int v) { return std::to_string(v); }

// --- single-entry coefficient maps -----------------------------------------

MapPtr cY(const CoordSystem& cs, int i, int j) {
  return make_coeff(cs,
                    [i, j](const Point&, const PointJets& pj) { return pj.Y(i, j); },
                    kCoeffOrder, "Y" + itos(i) + "," + itos(j));
}
MapPtr cV(const CoordSystem& cs, int i, int j) {
  return make_coeff(cs,
                    [i, j](const Point&, const PointJets& pj) { return pj.V(i, j); },
                    kCoeffOrder, "V" + itos(i) + "," + itos(j));
}
MapPtr cR(const CoordSystem& cs, int i, int j) {
  return make_coeff(cs,
                    [i, j](const Point&, const PointJets& pj) { return pj.R(i, j); },
                    kCoeffOrder, "R" + itos(i) + "," + itos(j));
}
// (V R)_{i,t}, i < m, t < n.
MapPtr cVR(const CoordSystem& cs, int i, int t) {
  const int n = cs.n;
  return make_coeff(cs,
                    [i, t, n](const Point&, const PointJets& pj) {
                      Jet acc = Jet::zero(pj.big);
                      for (int q = 0; q < n; ++q) acc += pj.V(i, q) * pj.R(q, t);
                      return acc;
                    },
                    kCoeffOrder, "VR" + itos(i) + "," + itos(t));
}
// (R V^t)_{s,i}, s < n, i < m.
MapPtr cRVt(const CoordSystem& cs, int s, int i) {
  const int n = cs.n;
  return make_coeff(cs,
                    [s, i, n](const Point&, const PointJets& pj) {
                      Jet acc = Jet::zero(pj.big);
                      for (int q = 0; q < n; ++q) acc += pj.R(s, q) * pj.V(i, q);
                      return acc;
                    },
                    kCoeffOrder, "RVt" + itos(s) + "," + itos(i));
}
// (R V^t M)_{s,i} for a constant m x m matrix M.
MapPtr cRVtM(const CoordSystem& cs, int s, int i, const RMat& M) {
  const int n = cs.n, m = cs.m;
  return make_coeff(cs,
                    [s, i, n, m, M](const Point&, const PointJets& pj) {
                      Jet acc = Jet::zero(pj.big);
                      for (int t = 0; t < m; ++t)
                        for (int q = 0; q < n; ++q)
                          acc += pj.R(s, q) * pj.V(t, q) * M(t, i);
                      return acc;
                    },
                    kCoeffOrder, "RVtM" + itos(s) + "," + itos(i));
}
// (R V^t M V R)_{s,t}.
MapPtr cRVtMVR(const CoordSystem& cs, int s, int t, const RMat& M) {
  const int n = cs.n, m = cs.m;
  return make_coeff(cs,
                    [s, t, n, m, M](const Point&, const PointJets& pj) {
                      // (R V^t)_{s,i} M_{i,j} (R V^t)_{t,j}
                      Jet acc = Jet::zero(pj.big);
                      for (int i = 0; i < m; ++i)
                        for (int j = 0; j < m; ++j) {
                          Jet a = Jet::zero(pj.big), b = Jet::zero(pj.big);
                          for (int q = 0; q < n; ++q) a += pj.R(s, q) * pj.V(i, q);
                          for (int q = 0; q < n; ++q) b += pj.R(t, q) * pj.V(j, q);
                          acc += a * M(i, j) * b;
                        }
                      return acc;
                    },
                    kCoeffOrder, "RVtMVR" + itos(s) + "," + itos(t));
}

// Adjugate (transposed cofactor matrix); valid for singular input.
RMat rmat_adjugate(const RMat& M) {
  const int m = static_cast<int>(M.rows());
  if (m == 1) {
    RMat one(1, 1);
    one(0, 0) = 1.0;
    return one;
  }
  RMat adj(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      RMat minor(m - 1, m - 1);
      for (int r = 0, rr = 0; r < m; ++r) {
        if (r == i) continue;
        for (int c = 0, cc = 0; c < m; ++c) {
          if (c == j) continue;
          minor(rr, cc) = M(r, c);
          ++cc;
        }
        ++rr;
      }
      double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      adj(j, i) = sign * minor.determinant();
    }
  return adj;
}

void require_order(const MapPtr& f, int need, const char* who) {
  if (f->max_order() < need)
    throw OrderTooLow(std::string(who) + ": input supports derivatives up to order " +
                      itos(f->max_order()) + ", need " + itos(need));
}
void require_nm(const CoordSystem& cs, int n, int m, const char* who) {
  if (cs.n != n || cs.m != m)
    throw invalid_input(std::string(who) + ": defined on H_{" + itos(n) + "," +
                        itos(m) + "} only");
}
void require_n1(const CoordSystem& cs, const char* who) {
  if (cs.n != 1)
    throw invalid_input(std::string(who) + ": defined for n = 1 only");
}
void check_wrow(const CoordSystem& cs, int i, const char* who) {
  if (i < 0 || i >= cs.m)
    throw IndexOutOfRange(std::string(who) + ": row " + itos(i) +
                          " outside [0," + itos(cs.m) + ")");
}

std::vector<int> canonical_rows(const CoordSystem& cs, std::vector<int> rows,
                                const char* who) {
  if (rows.empty()) {
    rows.resize(cs.n);
    std::iota(rows.begin(), rows.end(), 0);
  }
  if (static_cast<int>(rows.size()) != cs.n)
    throw BadRowSelection(std::string(who) + ": need exactly n = " + itos(cs.n) +
                          " rows");
  for (std::size_t p = 0; p < rows.size(); ++p) {
    if (rows[p] < 0 || rows[p] >= cs.m)
      throw BadRowSelection(std::string(who) + ": row " + itos(rows[p]) +
                            " outside [0," + itos(cs.m) + ")");
    if (p > 0 && rows[p] <= rows[p - 1])
      throw BadRowSelection(std::string(who) + ": rows must be strictly increasing");
  }
  return rows;
}

int permutation_sign(const std::vector<int>& p) {
  int inv = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++inv;
  return (inv % 2 == 0) ? 1 : -1;
}

}  // namespace

// --- MapMat helpers ---------------------------------------------------------

MapMat mm_zero(int r, int c) {
  return MapMat(r, std::vector<MapPtr>(c, map_const(0.0)));
}

MapMat mm_from_const(const Mat& A) {
  MapMat out(A.rows(), std::vector<MapPtr>(A.cols()));
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) out[i][j] = map_const(A(i, j));
  return out;
}

MapMat mm_add(const MapMat& A, const MapMat& B) {
  if (A.size() != B.size() || (A.size() && A[0].size() != B[0].size()))
    throw DimensionMismatch("mm_add: shape mismatch");
  MapMat out(A.size(), std::vector<MapPtr>(A[0].size()));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < A[0].size(); ++j) out[i][j] = map_add(A[i][j], B[i][j]);
  return out;
}

MapMat mm_sub(const MapMat& A, const MapMat& B) {
  return mm_add(A, mm_scale(-1.0, B));
}

MapMat mm_scale(cplx s, const MapMat& A) {
  MapMat out(A.size(), std::vector<MapPtr>(A.empty() ? 0 : A[0].size()));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < A[i].size(); ++j) out[i][j] = map_scale(s, A[i][j]);
  return out;
}

MapMat mm_scale_map(const MapPtr& s, const MapMat& A) {
  MapMat out(A.size(), std::vector<MapPtr>(A.empty() ? 0 : A[0].size()));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < A[i].size(); ++j) out[i][j] = map_product(s, A[i][j]);
  return out;
}

MapMat mm_mul(const MapMat& A, const MapMat& B) {
  if (A.empty() || B.empty() || A[0].size() != B.size())
    throw DimensionMismatch("mm_mul: shape mismatch");
  MapMat out(A.size(), std::vector<MapPtr>(B[0].size()));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < B[0].size(); ++j) {
      std::vector<MapPtr> terms;
      for (std::size_t u = 0; u < B.size(); ++u)
        terms.push_back(map_product(A[i][u], B[u][j]));
      out[i][j] = map_sum(std::move(terms));
    }
  return out;
}

MapMat mm_transpose(const MapMat& A) {
  if (A.empty()) return A;
  MapMat out(A[0].size(), std::vector<MapPtr>(A.size()));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < A[0].size(); ++j) out[j][i] = A[i][j];
  return out;
}

MapPtr mm_trace(const MapMat& A) {
  std::vector<MapPtr> terms;
  for (std::size_t i = 0; i < A.size(); ++i) terms.push_back(A[i][i]);
  return map_sum(std::move(terms));
}

MapPtr mm_det(const MapMat& A) {
  const int n = static_cast<int>(A.size());
  if (n == 0 || static_cast<int>(A[0].size()) != n)
    throw DimensionMismatch("mm_det: square matrix required");
  if (n == 1) return A[0][0];
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<MapPtr> terms;
  do {
    MapPtr prod = A[0][perm[0]];
    for (int r = 1; r < n; ++r) prod = map_product(prod, A[r][perm[r]]);
    if (permutation_sign(perm) < 0) prod = map_scale(-1.0, prod);
    terms.push_back(std::move(prod));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return map_sum(std::move(terms));
}

// --- coefficient matrices ---------------------------------------------------

MapMat coeff_Y(const CoordSystem& cs) {
  MapMat out(cs.n, std::vector<MapPtr>(cs.n));
  for (int i = 0; i < cs.n; ++i)
    for (int j = 0; j < cs.n; ++j) out[i][j] = cY(cs, i, j);
  return out;
}
MapMat coeff_V(const CoordSystem& cs) {
  MapMat out(cs.m, std::vector<MapPtr>(cs.n));
  for (int i = 0; i < cs.m; ++i)
    for (int j = 0; j < cs.n; ++j) out[i][j] = cV(cs, i, j);
  return out;
}
MapMat coeff_R(const CoordSystem& cs) {
  MapMat out(cs.n, std::vector<MapPtr>(cs.n));
  for (int i = 0; i < cs.n; ++i)
    for (int j = 0; j < cs.n; ++j) out[i][j] = cR(cs, i, j);
  return out;
}
MapMat coeff_VR(const CoordSystem& cs) {
  MapMat out(cs.m, std::vector<MapPtr>(cs.n));
  for (int i = 0; i < cs.m; ++i)
    for (int j = 0; j < cs.n; ++j) out[i][j] = cVR(cs, i, j);
  return out;
}
MapMat coeff_RVt(const CoordSystem& cs) {
  MapMat out(cs.n, std::vector<MapPtr>(cs.m));
  for (int i = 0; i < cs.n; ++i)
    for (int j = 0; j < cs.m; ++j) out[i][j] = cRVt(cs, i, j);
  return out;
}
MapPtr coeff_detY(const CoordSystem& cs) {
  return make_coeff(cs, [](const Point&, const PointJets& pj) { return pj.detY; },
                    kCoeffOrder, "detY");
}

// --- gradient matrices ------------------------------------------------------

MapMat grad_Z_mat(const MapPtr& f, const CoordSystem& cs) {
  MapMat out(cs.n, std::vector<MapPtr>(cs.n));
  for (int i = 0; i < cs.n; ++i)
    for (int j = 0; j < cs.n; ++j) {
      MapPtr d = map_deriv(f, cs.z_index(i, j));
      out[i][j] = (i == j) ? d : map_scale(0.5, d);
    }
  return out;
}
MapMat grad_Zbar_mat(const MapPtr& f, const CoordSystem& cs) {
  MapMat out(cs.n, std::vector<MapPtr>(cs.n));
  for (int i = 0; i < cs.n; ++i)
    for (int j = 0; j < cs.n; ++j) {
      MapPtr d = map_deriv(f, cs.conj(cs.z_index(i, j)));
      out[i][j] = (i == j) ? d : map_scale(0.5, d);
    }
  return out;
}
MapMat grad_W_mat(const MapPtr& f, const CoordSystem& cs) {
  MapMat out(cs.n, std::vector<MapPtr>(cs.m));
  for (int s = 0; s < cs.n; ++s)
    for (int i = 0; i < cs.m; ++i) out[s][i] = map_deriv(f, cs.w_index(i, s));
  return out;
}
MapMat grad_Wbar_mat(const MapPtr& f, const CoordSystem& cs) {
  MapMat out(cs.n, std::vector<MapPtr>(cs.m));
  for (int s = 0; s < cs.n; ++s)
    for (int i = 0; i < cs.m; ++i)
      out[s][i] = map_deriv(f, cs.conj(cs.w_index(i, s)));
  return out;
}
MapMat hess_W_mat(const MapPtr& f, const CoordSystem& cs, const RMat& S) {
  MapMat out(cs.n, std::vector<MapPtr>(cs.n));
  for (int s = 0; s < cs.n; ++s)
    for (int t = 0; t < cs.n; ++t) {
      std::vector<MapPtr> terms;
      for (int i = 0; i < cs.m; ++i)
        for (int j = 0; j < cs.m; ++j) {
          if (S(i, j) == 0.0) continue;
          terms.push_back(map_scale(
              S(i, j), map_deriv(f, mi(cs.w_index(i, s), cs.w_index(j, t)))));
        }
      out[s][t] = map_sum(std::move(terms));
    }
  return out;
}

// --- weight kernel ----------------------------------------------------------

WeightKernel weight_kernel(const CoordSystem& cs, const WeightIndex& wi) {
  const int n = cs.n, m = cs.m, k = wi.k;
  if (wi.M.rows() != m)
    throw DimensionMismatch("weight_kernel: index must be m x m");
  const RMat M = wi.M;
  MapPtr h = make_coeff(
      cs,
      [n, m, k, M](const Point&, const PointJets& pj) {
        // Tr(M V R V^t)
        Jet tr = Jet::zero(pj.big);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) {
            if (M(i, j) == 0.0) continue;
            Jet vrv = Jet::zero(pj.big);
            for (int p = 0; p < n; ++p)
              for (int q = 0; q < n; ++q)
                vrv += pj.V(j, p) * pj.R(p, q) * pj.V(i, q);
            tr += M(i, j) * vrv;
          }
        return pj.detY.pow_int(k) * (tr * (-4.0 * kPi)).exp();
      },
      kCoeffOrder, "h1");
  return WeightKernel{cs, wi, h};
}

// --- catalogue: n = m = 1 ---------------------------------------------------

MapPtr op_D1(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs) {
  require_nm(cs, 1, 1, "D1");
  require_order(f, 1, "D1");
  const double M = wi.M(0, 0);
  const int w = cs.w_index(0, 0);
  return map_add(map_deriv(f, w),
                 map_product(map_scale(4.0 * kPi * M * kI, cVR(cs, 0, 0)), f));
}

MapPtr op_heat_Lm(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs) {
  require_nm(cs, 1, 1, "heat_Lkm");
  require_order(f, 2, "heat_Lkm");
  const double M = wi.M(0, 0);
  const int z = cs.z_index(0, 0), w = cs.w_index(0, 0);
  return map_sub(map_deriv(f, mi(w, w)),
                 map_scale(8.0 * kPi * M * kI, map_deriv(f, z)));
}

MapPtr op_heat_Lkm(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs) {
  const double M = wi.M(0, 0);
  const int k = wi.k;
  return map_add(op_heat_Lm(f, wi, cs),
                 map_product(map_scale(2.0 * kPi * M * (1.0 - 2.0 * k), cR(cs, 0, 0)),
                             f));
}

MapPtr op_D2(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs) {
  require_nm(cs, 1, 1, "D2");
  require_order(f, 1, "D2");
  const double M = wi.M(0, 0);
  const int k = wi.k;
  const int z = cs.z_index(0, 0), w = cs.w_index(0, 0);
  MapPtr vy = cVR(cs, 0, 0);
  return map_sum({map_product(vy, map_deriv(f, w)), map_deriv(f, z),
                  map_product(map_scale(2.0 * kPi * M * kI, map_product(vy, vy)), f),
                  map_product(map_scale(cplx(0.0, -0.5 * k), cR(cs, 0, 0)), f)});
}

MapPtr op_delta1(const MapPtr& f, const WeightIndex&, const CoordSystem& cs) {
  require_nm(cs, 1, 1, "delta1");
  require_order(f, 1, "delta1");
  return map_product(cY(cs, 0, 0), map_deriv(f, cs.conj(cs.w_index(0, 0))));
}

MapPtr op_delta2(const MapPtr& f, const WeightIndex&, const CoordSystem& cs) {
  require_nm(cs, 1, 1, "delta2");
  require_order(f, 1, "delta2");
  const int zb = cs.conj(cs.z_index(0, 0)), wb = cs.conj(cs.w_index(0, 0));
  MapPtr y = cY(cs, 0, 0);
  return map_add(map_product(map_product(y, y), map_deriv(f, zb)),
                 map_product(map_product(cV(cs, 0, 0), y), map_deriv(f, wb)));
}

MapPtr op_serre_like(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs,
                     char variant, double a, double b, bool literal) {
  require_nm(cs, 1, 1, "serre_like");
  const double M = wi.M(0, 0);
  const int k = wi.k;
  const int z = cs.z_index(0, 0), w = cs.w_index(0, 0);
  switch (variant) {
    case 'a':
      require_order(f, 2, "serre_like");
      return map_add(op_heat_Lm(f, wi, cs),
                     map_scale(2.0 * M * (1.0 - 2.0 * k),
                               map_product(map_gee2(cs), f)));
    case 'b':
      require_order(f, 2, "serre_like");
      return map_add(op_heat_Lm(f, wi, cs),
                     map_scale(2.0 * M * (1.0 - 2.0 * k),
                               map_product(map_g2w(cs, 0), f)));
    case 'c': {
      require_order(f, 1, "serre_like");
      cplx c0 = literal ? cplx(4.0 * kPi * M, 0.0) : 4.0 * kPi * M * kI;
      return map_add(map_deriv(f, w),
                     map_scale(c0, map_product(map_e1hat(cs, 0), f)));
    }
    case 'd': {
      require_order(f, 1, "serre_like");
      if (!literal && std::abs(a + b + 1.0) > 1e-12)
        throw invalid_input("serre_like d: coefficients must satisfy a + b = -1");
      MapPtr e1 = map_e1hat(cs, 0);
      MapPtr g2mix = map_add(map_scale(a, map_gee2(cs)),
                             map_scale(b, map_g2w(cs, 0)));
      return map_sum(
          {map_product(e1, map_deriv(f, w)), map_deriv(f, z),
           map_scale(2.0 * kPi * M * kI, map_product(map_product(e1, e1), f)),
           map_scale(cplx(0.0, k / (2.0 * kPi)), map_product(g2mix, f))});
    }
    default:
      throw invalid_input("serre_like: variant must be one of a, b, c, d");
  }
}

// --- catalogue: n = 1, m >= 1 -----------------------------------------------

MapPtr op_D1_i(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs,
               int i) {
  require_n1(cs, "D1_i");
  check_wrow(cs, i, "D1_i");
  require_order(f, 1, "D1_i");
  std::vector<MapPtr> cterms;
  for (int t = 0; t < cs.m; ++t) {
    if (wi.M(i, t) == 0.0) continue;
    cterms.push_back(map_scale(wi.M(i, t), cVR(cs, t, 0)));
  }
  return map_add(map_deriv(f, cs.w_index(i, 0)),
                 map_product(map_scale(4.0 * kPi * kI, map_sum(std::move(cterms))),
                             f));
}

MapPtr op_delta1_i(const MapPtr& f, const WeightIndex&, const CoordSystem& cs,
                   int i) {
  require_n1(cs, "delta1_i");
  check_wrow(cs, i, "delta1_i");
  require_order(f, 1, "delta1_i");
  return map_product(cY(cs, 0, 0), map_deriv(f, cs.conj(cs.w_index(i, 0))));
}

MapPtr op_heat_m(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs,
                 bool full) {
  require_n1(cs, "heat_m");
  require_order(f, 2, "heat_m");
  const int m = cs.m, k = wi.k;
  const RMat adj = rmat_adjugate(wi.M);
  const double detM = wi.M.determinant();
  const int z = cs.z_index(0, 0);
  std::vector<MapPtr> terms;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (adj(i, j) == 0.0) continue;
      terms.push_back(map_scale(
          adj(i, j), map_deriv(f, mi(cs.w_index(i, 0), cs.w_index(j, 0)))));
    }
  terms.push_back(map_scale(-8.0 * kPi * detM * kI, map_deriv(f, z)));
  if (full)
    terms.push_back(map_product(
        map_scale(2.0 * kPi * detM * (m - 2.0 * k), cR(cs, 0, 0)), f));
  return map_sum(std::move(terms));
}

MapPtr op_D2_m(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs) {
  require_n1(cs, "D2_m");
  require_order(f, 1, "D2_m");
  const int m = cs.m, k = wi.k;
  std::vector<MapPtr> terms{map_deriv(f, cs.z_index(0, 0))};
  for (int i = 0; i < m; ++i)
    terms.push_back(map_product(cVR(cs, i, 0), map_deriv(f, cs.w_index(i, 0))));
  // (v^t M v) / y^2
  std::vector<MapPtr> quad;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (wi.M(i, j) == 0.0) continue;
      quad.push_back(
          map_scale(wi.M(i, j), map_product(cVR(cs, i, 0), cVR(cs, j, 0))));
    }
  terms.push_back(
      map_product(map_scale(2.0 * kPi * kI, map_sum(std::move(quad))), f));
  terms.push_back(
      map_product(map_scale(cplx(0.0, -0.5 * k), cR(cs, 0, 0)), f));
  return map_sum(std::move(terms));
}

MapPtr op_delta2_m(const MapPtr& f, const WeightIndex&, const CoordSystem& cs) {
  require_n1(cs, "delta2_m");
  require_order(f, 1, "delta2_m");
  MapPtr y = cY(cs, 0, 0);
  std::vector<MapPtr> terms{
      map_product(map_product(y, y), map_deriv(f, cs.conj(cs.z_index(0, 0))))};
  for (int i = 0; i < cs.m; ++i)
    terms.push_back(map_product(map_product(cV(cs, i, 0), y),
                                map_deriv(f, cs.conj(cs.w_index(i, 0)))));
  return map_sum(std::move(terms));
}

MapPtr op_serre_like_m(const MapPtr& f, const WeightIndex& wi,
                       const CoordSystem& cs, char variant, int i, bool literal) {
  require_n1(cs, "serre_like_m");
  const int m = cs.m, k = wi.k;
  const double detM = wi.M.determinant();
  switch (variant) {
    case 'a':
      require_order(f, 2, "serre_like_m");
      return map_add(op_heat_m(f, wi, cs, false),
                     map_scale(2.0 * detM * (m - 2.0 * k),
                               map_product(map_gee2(cs), f)));
    case 'b':
      require_order(f, 2, "serre_like_m");
      check_wrow(cs, i, "serre_like_m");
      return map_add(op_heat_m(f, wi, cs, false),
                     map_scale(2.0 * detM * (m - 2.0 * k),
                               map_product(map_g2w(cs, i), f)));
    case 'c': {
      require_order(f, 1, "serre_like_m");
      check_wrow(cs, i, "serre_like_m");
      if (literal) {
        double msum = 0.0;
        for (int t = 0; t < m; ++t) msum += wi.M(i, t);
        return map_add(map_deriv(f, cs.w_index(i, 0)),
                       map_scale(4.0 * kPi * msum,
                                 map_product(map_e1hat(cs, i), f)));
      }
      std::vector<MapPtr> corr;
      for (int t = 0; t < m; ++t) {
        if (wi.M(i, t) == 0.0) continue;
        corr.push_back(map_scale(wi.M(i, t), map_e1hat(cs, t)));
      }
      return map_add(map_deriv(f, cs.w_index(i, 0)),
                     map_scale(4.0 * kPi * kI,
                               map_product(map_sum(std::move(corr)), f)));
    }
    default:
      throw invalid_input("serre_like_m: variant must be one of a, b, c");
  }
}

// --- catalogue: general degree ----------------------------------------------

MapPtr op_D1_det(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs,
                 const std::vector<int>& rows_in) {
  if (cs.m < cs.n)
    throw DimensionMismatch("D1_det: needs m >= n");
  require_order(f, 1, "D1_det");
  auto rows = canonical_rows(cs, rows_in, "D1_det");
  MapMat E(cs.n, std::vector<MapPtr>(cs.n));
  for (int s = 0; s < cs.n; ++s)
    for (int c = 0; c < cs.n; ++c) {
      const int i = rows[c];
      E[s][c] = map_add(map_deriv(f, cs.w_index(i, s)),
                        map_product(map_scale(4.0 * kPi * kI, cRVtM(cs, s, i, wi.M)),
                                    f));
    }
  return mm_det(E);
}

MapPtr op_delta1_det(const MapPtr& f, const WeightIndex&, const CoordSystem& cs,
                     const std::vector<int>& rows_in) {
  if (cs.m < cs.n)
    throw DimensionMismatch("delta1_det: needs m >= n");
  require_order(f, 1, "delta1_det");
  auto rows = canonical_rows(cs, rows_in, "delta1_det");
  MapMat S(cs.n, std::vector<MapPtr>(cs.n));
  for (int s = 0; s < cs.n; ++s)
    for (int c = 0; c < cs.n; ++c)
      S[s][c] = map_deriv(f, cs.conj(cs.w_index(rows[c], s)));
  return mm_det(mm_mul(coeff_Y(cs), S));
}

MapPtr op_heat_det(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs) {
  require_order(f, 2, "heat_det");
  const double detM = wi.M.determinant();
  if (std::abs(detM) < 1e-12 * std::max(1.0, wi.M.cwiseAbs().maxCoeff()))
    throw SingularIndex("heat_det: index matrix must be invertible");
  const RMat Minv = wi.M.inverse();
  const double c0 = 2.0 * kPi * (cs.m - 2.0 * wi.k);
  MapMat D = mm_add(mm_scale(-8.0 * kPi * kI, grad_Z_mat(f, cs)),
                    hess_W_mat(f, cs, Minv));
  MapMat Rmat = coeff_R(cs);
  for (int s = 0; s < cs.n; ++s)
    for (int t = 0; t < cs.n; ++t)
      D[s][t] = map_add(D[s][t],
                        map_scale(c0, map_product(Rmat[s][t], f)));
  return mm_det(D);
}

MapPtr op_D2_det(const MapPtr& f, const WeightIndex& wi, const CoordSystem& cs,
                 bool symmetrized) {
  require_order(f, 1, "D2_det");
  const int k = wi.k;
  MapMat D = grad_Z_mat(f, cs);
  MapMat X = mm_mul(grad_W_mat(f, cs), coeff_VR(cs));
  MapMat mixed = symmetrized ? mm_scale(0.5, mm_add(X, mm_transpose(X))) : X;
  MapMat Rmat = coeff_R(cs);
  for (int s = 0; s < cs.n; ++s)
    for (int t = 0; t < cs.n; ++t) {
      MapPtr zero_order = map_add(
          map_product(map_scale(2.0 * kPi * kI, cRVtMVR(cs, s, t, wi.M)), f),
          map_product(map_scale(cplx(0.0, -0.5 * k), Rmat[s][t]), f));
      D[s][t] = map_sum({D[s][t], mixed[s][t], zero_order});
    }
  return mm_det(D);
}

// The matrix under the determinant must be the Y-sandwich
//   Y (df/dZbar) Y + 1/2 (Y (df/dWbar) V + V^t (df/dWbar)^t Y):
// only in this arrangement do the chain-rule corrections of the group action
// telescope (writing the Y factors on one side, as if matrices commuted,
// breaks covariance under inversions at degree >= 2; both agree at n = 1).
// The unsymmetrized mixed term fails under inversions and lambda translations
// and is kept as a negative control.
MapPtr op_delta2_det(const MapPtr& f, const WeightIndex&, const CoordSystem& cs,
                     bool symmetrized) {
  require_order(f, 1, "delta2_det");
  MapMat Ymat = coeff_Y(cs);
  MapMat base = mm_mul(Ymat, mm_mul(grad_Zbar_mat(f, cs), Ymat));
  MapMat Xb = mm_mul(Ymat, mm_mul(grad_Wbar_mat(f, cs), coeff_V(cs)));
  MapMat mixed = symmetrized ? mm_scale(0.5, mm_add(Xb, mm_transpose(Xb))) : Xb;
  return mm_det(mm_add(base, mixed));
}

MapPtr op_bracket(const MapPtr& f, const WeightIndex& wf, const MapPtr& g,
                  const WeightIndex& wg, const CoordSystem& cs, char variant) {
  if (wf.M.rows() != cs.m || wg.M.rows() != cs.m)
    throw DimensionMismatch("bracket: index matrices must be m x m");
  if (variant == 'a') {
    if (cs.n != cs.m)
      throw DimensionMismatch("bracket a: needs n == m");
    require_order(f, 1, "bracket");
    require_order(g, 1, "bracket");
    RMat comm = wf.M * wg.M - wg.M * wf.M;
    if (comm.cwiseAbs().maxCoeff() > 1e-10)
      throw invalid_input("bracket a: index matrices must commute");
    MapMat Af = mm_mul(grad_W_mat(f, cs), mm_from_const(wg.M.cast<cplx>()));
    MapMat Ag = mm_mul(grad_W_mat(g, cs), mm_from_const(wf.M.cast<cplx>()));
    MapMat E(cs.n, std::vector<MapPtr>(cs.n));
    for (int s = 0; s < cs.n; ++s)
      for (int t = 0; t < cs.n; ++t)
        E[s][t] = map_sub(map_product(Af[s][t], g), map_product(Ag[s][t], f));
    return mm_det(E);
  }
  if (variant == 'b') {
    require_order(f, 2, "bracket");
    require_order(g, 2, "bracket");
    const double d1 = wf.M.determinant(), d2 = wg.M.determinant();
    double scale = std::max(1.0, std::max(wf.M.cwiseAbs().maxCoeff(),
                                          wg.M.cwiseAbs().maxCoeff()));
    if (std::abs(d1) < 1e-12 * scale || std::abs(d2) < 1e-12 * scale)
      throw SingularIndex("bracket b: index matrices must be invertible");
    auto theta = [&](const MapPtr& h, const WeightIndex& wh) {
      return mm_add(mm_scale(-8.0 * kPi * kI, grad_Z_mat(h, cs)),
                    hess_W_mat(h, cs, wh.M.inverse()));
    };
    MapMat Tf = theta(f, wf), Tg = theta(g, wg);
    const double cf = cs.m - 2.0 * wg.k, cg = cs.m - 2.0 * wf.k;
    MapMat E(cs.n, std::vector<MapPtr>(cs.n));
    for (int s = 0; s < cs.n; ++s)
      for (int t = 0; t < cs.n; ++t)
        E[s][t] = map_sub(map_scale(cf, map_product(Tf[s][t], g)),
                          map_scale(cg, map_product(Tg[s][t], f)));
    return mm_det(E);
  }
  throw invalid_input("bracket: variant must be a or b");
}

// --- symbolic linear operators ----------------------------------------------

LinOp lin_zero() { return LinOp{}; }

LinOp lin_identity() { return LinOp{{LinTerm{nullptr, {}}}}; }

LinOp lin_deriv(int coord) { return LinOp{{LinTerm{nullptr, {coord}}}}; }

LinOp lin_add(const LinOp& A, const LinOp& B) {
  LinOp out = A;
  out.terms.insert(out.terms.end(), B.terms.begin(), B.terms.end());
  return out;
}

LinOp lin_scale(cplx s, const LinOp& A) {
  LinOp out;
  for (const auto& t : A.terms) {
    MapPtr c = t.coeff ? map_scale(s, t.coeff) : map_const(s);
    out.terms.push_back(LinTerm{std::move(c), t.deriv});
  }
  return out;
}

LinOp lin_scale_map(const MapPtr& c, const LinOp& A) {
  LinOp out;
  for (const auto& t : A.terms) {
    MapPtr nc = t.coeff ? map_product(c, t.coeff) : c;
    out.terms.push_back(LinTerm{std::move(nc), t.deriv});
  }
  return out;
}

namespace {

double binom_d(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Run-length encode a sorted multi-index.
std::vector<std::pair<int, int>> rle(const MultiIndex& a) {
  std::vector<std::pair<int, int>> out;
  for (int id : a) {
    if (!out.empty() && out.back().first == id)
      ++out.back().second;
    else
      out.emplace_back(id, 1);
  }
  return out;
}

}  // namespace

LinOp lin_compose(const LinOp& A, const LinOp& B) {
  LinOp out;
  for (const auto& a : A.terms) {
    auto runs = rle(a.deriv);
    const int nr = static_cast<int>(runs.size());
    for (const auto& b : B.terms) {
      if (!b.coeff) {
        // Derivatives pass through the constant coefficient unchanged.
        MultiIndex d = a.deriv;
        d.insert(d.end(), b.deriv.begin(), b.deriv.end());
        std::sort(d.begin(), d.end());
        out.terms.push_back(LinTerm{a.coeff, std::move(d)});
        continue;
      }
      // Leibniz: split a.deriv into a part gamma that keeps differentiating
      // and a part delta applied to b's coefficient.
      std::vector<int> take(nr, 0);
      while (true) {
        double scale = 1.0;
        MultiIndex gamma, delta;
        for (int r = 0; r < nr; ++r) {
          scale *= binom_d(runs[r].second, take[r]);
          for (int c = 0; c < take[r]; ++c) gamma.push_back(runs[r].first);
          for (int c = take[r]; c < runs[r].second; ++c)
            delta.push_back(runs[r].first);
        }
        MapPtr bc = delta.empty() ? b.coeff : map_deriv(b.coeff, delta);
        MapPtr c = a.coeff ? map_product(a.coeff, bc) : bc;
        if (scale != 1.0) c = map_scale(scale, c);
        MultiIndex d = gamma;
        d.insert(d.end(), b.deriv.begin(), b.deriv.end());
        std::sort(d.begin(), d.end());
        out.terms.push_back(LinTerm{std::move(c), std::move(d)});
        // Advance the mixed-radix counter over per-run take counts.
        int r = 0;
        while (r < nr) {
          if (take[r] < runs[r].second) {
            ++take[r];
            break;
          }
          take[r] = 0;
          ++r;
        }
        if (r == nr) break;
      }
    }
  }
  return lin_merge(out);
}

LinOp lin_merge(const LinOp& A) {
  std::map<MultiIndex, std::vector<MapPtr>> groups;
  std::map<MultiIndex, int> plain;  // count of coefficient-free terms
  for (const auto& t : A.terms) {
    if (t.coeff)
      groups[t.deriv].push_back(t.coeff);
    else
      ++plain[t.deriv];
  }
  LinOp out;
  for (auto& [d, cnt] : plain) {
    auto it = groups.find(d);
    if (it == groups.end() && cnt == 1) {
      out.terms.push_back(LinTerm{nullptr, d});
    } else {
      auto& vec = groups[d];
      if (cnt != 0) vec.push_back(map_const(static_cast<double>(cnt)));
    }
  }
  for (auto& [d, vec] : groups) {
    MapPtr c = (vec.size() == 1) ? vec[0] : map_sum(std::move(vec));
    out.terms.push_back(LinTerm{std::move(c), d});
  }
  return out;
}

MapPtr lin_apply(const LinOp& A, const MapPtr& f) {
  int need = 0;
  for (const auto& t : A.terms)
    need = std::max(need, static_cast<int>(t.deriv.size()));
  require_order(f, need, "lin_apply");
  std::vector<MapPtr> parts;
  for (const auto& t : A.terms) {
    MapPtr d = t.deriv.empty() ? f : map_deriv(f, t.deriv);
    parts.push_back(t.coeff ? map_product(t.coeff, d) : d);
  }
  return map_sum(std::move(parts));
}

OpMat om_zero(int r, int c) { return OpMat(r, std::vector<LinOp>(c)); }

OpMat om_add(const OpMat& A, const OpMat& B) {
  if (A.size() != B.size() || (A.size() && A[0].size() != B[0].size()))
    throw DimensionMismatch("om_add: shape mismatch");
  OpMat out(A.size(), std::vector<LinOp>(A[0].size()));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < A[0].size(); ++j)
      out[i][j] = lin_add(A[i][j], B[i][j]);
  return out;
}

OpMat om_scale(cplx s, const OpMat& A) {
  OpMat out(A.size(), std::vector<LinOp>(A.empty() ? 0 : A[0].size()));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < A[i].size(); ++j) out[i][j] = lin_scale(s, A[i][j]);
  return out;
}

OpMat om_transpose(const OpMat& A) {
  if (A.empty()) return A;
  OpMat out(A[0].size(), std::vector<LinOp>(A.size()));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < A[0].size(); ++j) out[j][i] = A[i][j];
  return out;
}

OpMat om_compose(const OpMat& A, const OpMat& B) {
  if (A.empty() || B.empty() || A[0].size() != B.size())
    throw DimensionMismatch("om_compose: shape mismatch");
  OpMat out(A.size(), std::vector<LinOp>(B[0].size()));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < B[0].size(); ++j) {
      LinOp acc;
      for (std::size_t u = 0; u < B.size(); ++u)
        acc = lin_add(acc, lin_compose(A[i][u], B[u][j]));
      out[i][j] = lin_merge(acc);
    }
  return out;
}

OpMat om_left_fun(const MapMat& F, const OpMat& A) {
  if (F.empty() || A.empty() || F[0].size() != A.size())
    throw DimensionMismatch("om_left_fun: shape mismatch");
  OpMat out(F.size(), std::vector<LinOp>(A[0].size()));
  for (std::size_t i = 0; i < F.size(); ++i)
    for (std::size_t j = 0; j < A[0].size(); ++j) {
      LinOp acc;
      for (std::size_t u = 0; u < A.size(); ++u)
        acc = lin_add(acc, lin_scale_map(F[i][u], A[u][j]));
      out[i][j] = lin_merge(acc);
    }
  return out;
}

OpMat om_right_fun(const OpMat& A, const MapMat& F) {
  if (F.empty() || A.empty() || A[0].size() != F.size())
    throw DimensionMismatch("om_right_fun: shape mismatch");
  OpMat out(A.size(), std::vector<LinOp>(F[0].size()));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < F[0].size(); ++j) {
      LinOp acc;
      for (std::size_t u = 0; u < F.size(); ++u)
        acc = lin_add(acc, lin_scale_map(F[u][j], A[i][u]));
      out[i][j] = lin_merge(acc);
    }
  return out;
}

OpMat om_compose_scalar(const OpMat& A, const LinOp& s) {
  OpMat out(A.size(), std::vector<LinOp>(A.empty() ? 0 : A[0].size()));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < A[i].size(); ++j)
      out[i][j] = lin_compose(A[i][j], s);
  return out;
}

LinOp om_trace(const OpMat& A) {
  LinOp acc;
  for (std::size_t i = 0; i < A.size(); ++i) acc = lin_add(acc, A[i][i]);
  return lin_merge(acc);
}

MapMat om_apply(const OpMat& A, const MapPtr& f) {
  MapMat out(A.size(), std::vector<MapPtr>(A.empty() ? 0 : A[0].size()));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < A[i].size(); ++j) out[i][j] = lin_apply(A[i][j], f);
  return out;
}

// --- registry ---------------------------------------------------------------

namespace {

std::function<bool(int, int)> nm_pred(int mode) {
  switch (mode) {
    case 0: return [](int n, int m) { return n == 1 && m == 1; };
    case 1: return [](int n, int) { return n == 1; };
    case 2: return [](int n, int m) { return m >= n; };
    case 3: return [](int, int) { return true; };
    case 4: return [](int n, int m) { return n == m; };
  }
  return [](int, int) { return false; };
}

std::vector<OperatorInfo> build_registry() {
  std::vector<OperatorInfo> r;
  auto cov = [&](std::string name, int order, int mode, std::string n_str,
                 std::string m_str, std::string k_out, std::string scale) {
    OperatorInfo e;
    e.name = std::move(name);
    e.arity = 1;
    e.order = order;
    e.n_str = std::move(n_str);
    e.m_str = std::move(m_str);
    e.k_out = std::move(k_out);
    e.index_scale = std::move(scale);
    e.applicable = nm_pred(mode);
    r.push_back(std::move(e));
  };
  cov("D1", 1, 0, "1", "1", "k+1", "1");
  cov("heat_Lkm", 2, 0, "1", "1", "k+2", "1");
  cov("D2", 1, 0, "1", "1", "k+2", "1");
  cov("delta1", 1, 0, "1", "1", "k-1", "1");
  cov("delta2", 1, 0, "1", "1", "k-2", "1");
  cov("serre_like", 2, 0, "1", "1", "k+2 (c: k+1)", "1");
  cov("D1_i", 1, 1, "1", ">=1", "k+1", "1");
  cov("delta1_i", 1, 1, "1", ">=1", "k-1", "1");
  cov("heat_m", 2, 1, "1", ">=1", "k+2", "1");
  cov("D2_m", 1, 1, "1", ">=1", "k+2", "1");
  cov("delta2_m", 1, 1, "1", ">=1", "k-2", "1");
  cov("serre_like_m", 2, 1, "1", ">=1", "k+2 (c: k+1)", "1");
  cov("D1_det", 1, 2, ">=1", ">=n", "n*k+1", "n");
  cov("delta1_det", 1, 2, ">=1", ">=n", "n*k-1", "n");
  cov("heat_det", 2, 3, ">=1", ">=1", "n*k+2", "n");
  cov("D2_det", 1, 3, ">=1", ">=1", "n*k+2", "n");
  cov("delta2_det", 1, 3, ">=1", ">=1", "n*k-2", "n");
  {
    OperatorInfo e;
    e.name = "bracket";
    e.arity = 2;
    e.order = 2;
    e.n_str = ">=1 (a: ==m)";
    e.m_str = ">=1";
    e.k_out = "a: n*(k1+k2)+1; b: n*(k1+k2)+2";
    e.index_scale = "n*(M1+M2)";
    e.applicable = nm_pred(3);
    r.push_back(std::move(e));
  }
  auto inv = [&](std::string name, int order, bool matrix) {
    OperatorInfo e;
    e.name = std::move(name);
    e.arity = 1;
    e.order = order;
    e.n_str = ">=1";
    e.m_str = ">=1";
    e.k_out = "k";
    e.index_scale = "1";
    e.invariant = true;
    e.matrix_valued = matrix;
    e.applicable = nm_pred(3);
    r.push_back(std::move(e));
  };
  inv("Y+", 1, true);
  inv("Y-", 1, true);
  inv("Y+k", 1, true);
  inv("Y-k", 1, true);
  inv("X+", 1, true);
  inv("X-", 1, true);
  inv("K", 1, true);
  inv("Lambda", 1, true);
  inv("A_j", 2, true);   // order 2j for degree j
  inv("Y-Y+", 2, false);
  inv("H_j", 2, false);  // order 2j
  inv("T_kl", 4, false);
  inv("U_kl", 3, false);
  inv("V_kl", 3, false);
  return r;
}

}  // namespace

const std::vector<OperatorInfo>& op_registry() {
  static const std::vector<OperatorInfo> reg = build_registry();
  return reg;
}

const OperatorInfo* find_op(const std::string& name) {
  for (const auto& e : op_registry())
    if (e.name == name) return &e;
  return nullptr;
}

std::string list_ops_json() {
  std::ostringstream os;
  os << "[";
  bool first = true;
  for (const auto& e : op_registry()) {
    if (!first) os << ",";
    first = false;
    os << "\n  {\"name\":\"" << e.name << "\",\"n\":\"" << e.n_str
       << "\",\"m\":\"" << e.m_str << "\",\"arity\":" << e.arity
       << ",\"k_out\":\"" << e.k_out << "\",\"index_scale\":\"" << e.index_scale
       << "\",\"order\":" << e.order << "}";
  }
  os << "\n]\n";
  return os.str();
}

WeightIndex out_signature(const std::string& name, const WeightIndex& wi,
                          const CoordSystem& cs, const OpOptions& opt) {
  const int n = cs.n, k = wi.k;
  const RMat& M = wi.M;
  if (name == "D1" || name == "D1_i") return WeightIndex(k + 1, M);
  if (name == "heat_Lkm" || name == "heat_m" || name == "D2" || name == "D2_m")
    return WeightIndex(k + 2, M);
  if (name == "delta1" || name == "delta1_i") return WeightIndex(k - 1, M);
  if (name == "delta2" || name == "delta2_m") return WeightIndex(k - 2, M);
  if (name == "serre_like" || name == "serre_like_m")
    return WeightIndex(opt.variant == 'c' ? k + 1 : k + 2, M);
  const RMat Mn = static_cast<double>(n) * M;
  if (name == "D1_det") return WeightIndex(n * k + 1, Mn);
  if (name == "delta1_det") return WeightIndex(n * k - 1, Mn);
  if (name == "heat_det" || name == "D2_det") return WeightIndex(n * k + 2, Mn);
  if (name == "delta2_det") return WeightIndex(n * k - 2, Mn);
  const OperatorInfo* info = find_op(name);
  if (info && info->invariant) return wi;
  throw invalid_input("out_signature: unknown unary operator " + name);
}

WeightIndex out_signature2(const std::string& name, const WeightIndex& wf,
                           const WeightIndex& wg, const CoordSystem& cs,
                           const OpOptions& opt) {
  if (name != "bracket")
    throw invalid_input("out_signature2: unknown binary operator " + name);
  if (wf.M.rows() != wg.M.rows())
    throw DimensionMismatch("bracket: operand index sizes differ");
  const int n = cs.n;
  RMat Msum = static_cast<double>(n) * (wf.M + wg.M);
  int k = (opt.variant == 'a') ? n * (wf.k + wg.k) + 1 : n * (wf.k + wg.k) + 2;
  return WeightIndex(k, Msum);
}

OpResult apply_operator(const std::string& name, const MapPtr& f,
                        const WeightIndex& wi, const CoordSystem& cs,
                        const OpOptions& opt) {
  const OperatorInfo* info = find_op(name);
  if (!info) throw invalid_input("unknown operator: " + name);
  if (info->arity != 1)
    throw invalid_input(name + ": binary operator, use apply_operator2");
  if (info->matrix_valued)
    throw invalid_input(name + ": matrix-valued, use build_invariant");
  if (info->invariant) {
    LinOp op;
    if (name == "H_j") {
      op = inv_H(cs, opt.j);
    } else if (name == "T_kl") {
      op = inv_T(cs, opt.j, opt.k_sel, opt.l_sel);
    } else if (name == "U_kl") {
      op = inv_U(cs, opt.k_sel, opt.l_sel);
    } else if (name == "V_kl") {
      op = inv_V(cs, opt.k_sel, opt.l_sel);
    } else if (name == "Y-Y+") {
      if (opt.k_sel < 0 || opt.k_sel >= cs.m || opt.l_sel < 0 || opt.l_sel >= cs.m)
        throw IndexOutOfRange("Y-Y+: selectors outside [0,m)");
      op = inv_YmYp(cs)[opt.k_sel][opt.l_sel];
    } else {
      throw invalid_input("unhandled invariant operator: " + name);
    }
    return OpResult{lin_apply(op, f), wi};
  }
  MapPtr out;
  if (name == "D1") out = op_D1(f, wi, cs);
  else if (name == "heat_Lkm") out = op_heat_Lkm(f, wi, cs);
  else if (name == "D2") out = op_D2(f, wi, cs);
  else if (name == "delta1") out = op_delta1(f, wi, cs);
  else if (name == "delta2") out = op_delta2(f, wi, cs);
  else if (name == "serre_like")
    out = op_serre_like(f, wi, cs, opt.variant, opt.a, opt.b, opt.literal);
  else if (name == "D1_i") out = op_D1_i(f, wi, cs, opt.i);
  else if (name == "delta1_i") out = op_delta1_i(f, wi, cs, opt.i);
  else if (name == "heat_m") out = op_heat_m(f, wi, cs);
  else if (name == "D2_m") out = op_D2_m(f, wi, cs);
  else if (name == "delta2_m") out = op_delta2_m(f, wi, cs);
  else if (name == "serre_like_m")
    out = op_serre_like_m(f, wi, cs, opt.variant, opt.i, opt.literal);
  else if (name == "D1_det") out = op_D1_det(f, wi, cs, opt.rows);
  else if (name == "delta1_det") out = op_delta1_det(f, wi, cs, opt.rows);
  else if (name == "heat_det") out = op_heat_det(f, wi, cs);
  else if (name == "D2_det") out = op_D2_det(f, wi, cs, opt.symmetrized);
  else if (name == "delta2_det") out = op_delta2_det(f, wi, cs, opt.symmetrized);
  else throw invalid_input("unhandled operator: " + name);
  return OpResult{out, out_signature(name, wi, cs, opt)};
}

OpResult apply_operator2(const std::string& name, const MapPtr& f,
                         const WeightIndex& wf, const MapPtr& g,
                         const WeightIndex& wg, const CoordSystem& cs,
                         const OpOptions& opt) {
  if (name != "bracket") throw invalid_input("unknown binary operator: " + name);
  MapPtr out = op_bracket(f, wf, g, wg, cs, opt.variant);
  return OpResult{out, out_signature2(name, wf, wg, cs, opt)};
}

std::pair<std::string, OpOptions> parse_op_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : spec) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  if (parts.empty() || parts[0].empty())
    throw invalid_input("empty operator spec");
  OpOptions o;
  for (std::size_t p = 1; p < parts.size(); ++p) {
    const std::string& seg = parts[p];
    if (seg.size() == 1 && seg[0] >= 'a' && seg[0] <= 'd') {
      o.variant = seg[0];
      continue;
    }
    std::stringstream ss(seg);
    std::string kv;
    while (std::getline(ss, kv, ',')) {
      auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw invalid_input("bad operator option: " + kv);
      std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      auto to_int = [&kv](const std::string& v) {
        std::size_t pos = 0;
        int r = 0;
        try {
          r = std::stoi(v, &pos);
        } catch (const std::exception&) {
          throw invalid_input("bad operator option value: " + kv);
        }
        if (pos != v.size())
          throw invalid_input("bad operator option value: " + kv);
        return r;
      };
      auto to_dbl = [&kv](const std::string& v) {
        std::size_t pos = 0;
        double r = 0;
        try {
          r = std::stod(v, &pos);
        } catch (const std::exception&) {
          throw invalid_input("bad operator option value: " + kv);
        }
        if (pos != v.size())
          throw invalid_input("bad operator option value: " + kv);
        return r;
      };
      if (key == "variant" && val.size() == 1) o.variant = val[0];
      else if (key == "a") o.a = to_dbl(val);
      else if (key == "b") o.b = to_dbl(val);
      else if (key == "i") o.i = to_int(val);
      else if (key == "j") o.j = to_int(val);
      else if (key == "k") o.k_sel = to_int(val);
      else if (key == "l") o.l_sel = to_int(val);
      else if (key == "literal") o.literal = (val != "0");
      else if (key == "sym") o.symmetrized = (val != "0");
      else if (key == "rows") {
        o.rows.clear();
        for (char ch : val) {
          if (ch < '0' || ch > '9')
            throw invalid_input("bad operator option value: " + kv);
          o.rows.push_back(ch - '0');
        }
      } else {
        throw invalid_input("unknown operator option: " + key);
      }
    }
  }
  return {parts[0], o};
}

}  // namespace sj
