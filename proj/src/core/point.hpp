#pragma once

#include <string>

#include "common.hpp"
#include "rng.hpp"

namespace sj {

// A point (Z, W) of H_{n,m}: Z symmetric n x n with positive-definite
// imaginary part, W an arbitrary complex m x n block.  Derived real matrices
// (Y, V, R = Y^{-1}, det Y) are cached on construction.
class Point {
 public:
  Point(Mat Z, Mat W, double sym_tol = 1e-12, double pd_tol = 1e-10);

  int n() const { return n_; }
  int m() const { return m_; }
  const Mat& Z() const { return Z_; }
  const Mat& W() const { return W_; }
  const RMat& X() const { return X_; }
  const RMat& Y() const { return Y_; }
  const RMat& U() const { return U_; }
  const RMat& V() const { return V_; }
  const RMat& R() const { return R_; }  // Y^{-1}
  double detY() const { return detY_; }
  const CoordSystem& coords() const { return cs_; }

  // Value of the coordinate with id c (conjugated for antiholomorphic ids).
  cplx coord(int c) const;
  // Rebuild a point with one coordinate displaced (symmetric Z entries move
  // together); used by the finite-difference oracle.
  Point displaced(int holo_coord, cplx dz) const;

  // Stable byte key for per-point caches.
  const std::string& key() const { return key_; }

  std::string to_json() const;
  static Point from_json(const std::string& json);

 private:
  int n_, m_;
  CoordSystem cs_;
  Mat Z_, W_;
  RMat X_, Y_, U_, V_, R_;
  double detY_;
  std::string key_;
};

// Sample a well-conditioned random point: eigenvalues of Y in [0.7, 2.5],
// |Re Z| entries <= 1, |W| entries <= 0.5.
Point random_point(int n, int m, std::uint64_t seed);

std::string complex_to_string(cplx v);
cplx complex_from_string(const std::string& s);

}  // namespace sj
