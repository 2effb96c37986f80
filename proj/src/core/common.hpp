#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sj {

using cplx = std::complex<double>;
using Mat  = Eigen::MatrixXcd;   // complex dense
using RMat = Eigen::MatrixXd;    // real dense
using Vec  = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr cplx kI{0.0, 1.0};

// Thrown on malformed inputs (non-symmetric Z, non-positive Y, bad JSON, ...).
struct invalid_input : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
// Thrown when a numerical guard trips (pole proximity, truncation too small, ...).
struct numeric_guard : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Coordinate bookkeeping on H_{n,m} = H_n x C^{(m,n)}.
//
// Real-analytic functions are handled in Wirtinger coordinates.  The
// holomorphic coordinates are
//   Z_(i,j), i <= j   (the upper triangle of the symmetric n x n block,
//                      enumerated row-major: (0,0),(0,1),...,(0,n-1),(1,1),...)
//   W_(r,s)           (entries of the m x n block, row-major: r*n+s)
// followed by their conjugates in the same order.  A coordinate id c in
// [0, 2H) with H = n(n+1)/2 + m*n is holomorphic iff c < H; conj(c) = c^H
// toggles the bar.  A partial derivative with respect to Z_(i,j) (i < j) is
// the derivative along the symmetric perturbation that moves entries (i,j)
// and (j,i) together.
// ---------------------------------------------------------------------------
struct CoordSystem {
  int n = 0, m = 0;
  int nZ = 0;     // n(n+1)/2
  int nW = 0;     // m*n
  int H  = 0;     // nZ + nW, number of holomorphic coordinates
  int total = 0;  // 2H

  CoordSystem() = default;
  CoordSystem(int n_, int m_)
      : n(n_), m(m_), nZ(n_ * (n_ + 1) / 2), nW(m_ * n_),
        H(nZ + nW), total(2 * (nZ + nW)) {
    if (n_ < 1 || m_ < 1) throw invalid_input("CoordSystem: need n,m >= 1");
  }

  int z_index(int i, int j) const {            // i <= j required
    if (i > j) std::swap(i, j);
    // row-major upper triangle offset
    return i * n - i * (i - 1) / 2 + (j - i);
  }
  int w_index(int r, int s) const { return nZ + r * n + s; }
  bool is_holo(int c) const { return c < H; }
  int conj(int c) const { return c < H ? c + H : c - H; }
  bool is_z(int c) const { int h = c % H; return h < nZ; }
  // For a Z-type id, recover (i,j); for W-type, (r,s).
  std::pair<int, int> z_pair(int c) const {
    int h = c % H;
    int i = 0, off = h;
    while (off >= n - i) { off -= n - i; ++i; }
    return {i, i + off};
  }
  std::pair<int, int> w_pair(int c) const {
    int h = c % H - nZ;
    return {h / n, h % n};
  }
};

// A mixed partial-derivative request: a sorted list of coordinate ids with
// repetition; empty means plain evaluation.  Order is bounded by 4 throughout.
using MultiIndex = std::vector<int>;

inline MultiIndex mi() { return {}; }
inline MultiIndex mi(int a) { return {a}; }
inline MultiIndex mi(int a, int b) {
  if (a > b) std::swap(a, b);
  return {a, b};
}
inline MultiIndex mi_sorted(MultiIndex v) {
  std::sort(v.begin(), v.end());
  return v;
}
inline MultiIndex mi_join(MultiIndex v, int extra) {
  v.push_back(extra);
  std::sort(v.begin(), v.end());
  return v;
}

inline bool approx_symmetric(const Mat& A, double tol) {
  return (A - A.transpose()).cwiseAbs().maxCoeff() <= tol;
}
inline bool approx_symmetric(const RMat& A, double tol) {
  return (A - A.transpose()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace sj
