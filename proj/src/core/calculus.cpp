#include "calculus.hpp"

namespace sj {

MatrixGradient grad(const SmoothMap& f, const Point& x) {
  const CoordSystem& cs = x.coords();
  int n = cs.n, m = cs.m;
  MatrixGradient g;
  g.dZ = Mat::Zero(n, n);
  g.dZb = Mat::Zero(n, n);
  g.dW = Mat::Zero(n, m);
  g.dWb = Mat::Zero(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      int c = cs.z_index(i, j);
      cplx v = f.partial(x, mi(c));
      cplx vb = f.partial(x, mi(cs.conj(c)));
      double w = (i == j) ? 1.0 : 0.5;
      g.dZ(i, j) = g.dZ(j, i) = w * v;
      g.dZb(i, j) = g.dZb(j, i) = w * vb;
    }
  for (int r = 0; r < m; ++r)
    for (int s = 0; s < n; ++s) {
      int c = cs.w_index(r, s);
      g.dW(s, r) = f.partial(x, mi(c));
      g.dWb(s, r) = f.partial(x, mi(cs.conj(c)));
    }
  return g;
}

namespace {
// One central difference of f in the direction of holomorphic coordinate
// base (real or imaginary displacement), recursing on the remaining indices.
cplx fd_step(const SmoothMap& f, const Point& x, const MultiIndex& mi,
             double h);

cplx fd_dir(const SmoothMap& f, const Point& x, const MultiIndex& rest,
            int holo_coord, cplx dz, double h) {
  Point xp = x.displaced(holo_coord, dz);
  Point xm = x.displaced(holo_coord, -dz);
  cplx fp = rest.empty() ? f.eval(xp) : fd_step(f, xp, rest, h);
  cplx fm = rest.empty() ? f.eval(xm) : fd_step(f, xm, rest, h);
  return (fp - fm) / (2.0 * std::abs(dz));
}

cplx fd_step(const SmoothMap& f, const Point& x, const MultiIndex& mi,
             double h) {
  int c = mi.back();
  MultiIndex rest(mi.begin(), mi.end() - 1);
  const CoordSystem& cs = x.coords();
  bool holo = cs.is_holo(c);
  int hc = holo ? c : cs.conj(c);
  cplx dx = fd_dir(f, x, rest, hc, cplx(h, 0.0), h);
  cplx dy = fd_dir(f, x, rest, hc, cplx(0.0, h), h);
  // d/dz = (dx - i dy)/2 ; d/dzbar = (dx + i dy)/2.
  return holo ? 0.5 * (dx - kI * dy) : 0.5 * (dx + kI * dy);
}
}  // namespace

cplx fd_partial(const SmoothMap& f, const Point& x, const MultiIndex& mi,
                double h) {
  if (mi.empty()) return f.eval(x);
  cplx coarse = fd_step(f, x, mi, h);
  cplx fine = fd_step(f, x, mi, h / 2.0);
  return (4.0 * fine - coarse) / 3.0;  // Richardson on the h^2 error term
}

MatrixGradient fd_gradient(const SmoothMap& f, const Point& x, double h) {
  const CoordSystem& cs = x.coords();
  int n = cs.n, m = cs.m;
  MatrixGradient g;
  g.dZ = Mat::Zero(n, n);
  g.dZb = Mat::Zero(n, n);
  g.dW = Mat::Zero(n, m);
  g.dWb = Mat::Zero(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      int c = cs.z_index(i, j);
      double w = (i == j) ? 1.0 : 0.5;
      cplx v = fd_partial(f, x, mi(c), h);
      cplx vb = fd_partial(f, x, mi(cs.conj(c)), h);
      g.dZ(i, j) = g.dZ(j, i) = w * v;
      g.dZb(i, j) = g.dZb(j, i) = w * vb;
    }
  for (int r = 0; r < m; ++r)
    for (int s = 0; s < n; ++s) {
      int c = cs.w_index(r, s);
      g.dW(s, r) = fd_partial(f, x, mi(c), h);
      g.dWb(s, r) = fd_partial(f, x, mi(cs.conj(c)), h);
    }
  return g;
}

Mat grad_trace_MVRV_W(const Point& x, const RMat& M) {
  return -kI * (x.R() * x.V().transpose() * M).cast<cplx>();
}

Mat grad_trace_MVRV_Z(const Point& x, const RMat& M) {
  RMat G = x.R() * x.V().transpose() * M * x.V() * x.R();
  return (0.5 * kI) * G.cast<cplx>();
}

Mat grad_detY_Z(const Point& x) {
  return (-0.5 * kI) * (x.detY() * x.R()).cast<cplx>();
}

Mat grad_R_Z(const Point& x, int k, int l) {
  const RMat& R = x.R();
  RMat G = R.col(k) * R.row(l);
  if (k != l) G += R.col(l) * R.row(k);
  return (0.5 * kI) * G.cast<cplx>();
}

Mat dY_dcoord(const Point& x, int coord) {
  const CoordSystem& cs = x.coords();
  int n = cs.n;
  Mat D = Mat::Zero(n, n);
  if (!cs.is_z(coord)) return D;
  auto [i, j] = cs.z_pair(coord);
  cplx w = cs.is_holo(coord) ? cplx(0.0, -0.5) : cplx(0.0, 0.5);  // d(Im)/dz
  D(i, j) += w;
  if (i != j) D(j, i) += w;
  return D;
}

Mat dV_dcoord(const Point& x, int coord) {
  const CoordSystem& cs = x.coords();
  Mat D = Mat::Zero(cs.m, cs.n);
  if (cs.is_z(coord)) return D;
  auto [r, s] = cs.w_pair(coord);
  D(r, s) = cs.is_holo(coord) ? cplx(0.0, -0.5) : cplx(0.0, 0.5);
  return D;
}

Mat dR_dcoord(const Point& x, int coord) {
  Mat R = x.R().cast<cplx>();
  return -R * dY_dcoord(x, coord) * R;
}

Mat hessian_W_kernel(const SmoothMap& f, const Point& x, const RMat& M, int i,
                     int j) {
  const CoordSystem& cs = x.coords();
  int n = cs.n;
  RMat MVR = M * x.V() * x.R();
  cplx fv = f.eval(x);
  Mat K(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      cplx fjk = f.partial(x, mi(cs.w_index(j, k)));
      cplx fil = f.partial(x, mi(cs.w_index(i, l)));
      cplx fkl = f.partial(x, mi(cs.w_index(j, k), cs.w_index(i, l)));
      K(k, l) = fkl + 4.0 * kPi * kI * (MVR(i, l) * fjk + MVR(j, k) * fil) +
                (-16.0 * kPi * kPi * MVR(i, l) * MVR(j, k) +
                 2.0 * kPi * M(i, j) * x.R()(k, l)) *
                    fv;
    }
  return K;
}

double cofactor_trace_identity_check(const SmoothMap& f, const Point& x,
                                     const RMat& M) {
  const CoordSystem& cs = x.coords();
  int n = cs.n, m = cs.m;
  double det = M.determinant();
  RMat Minv = M.inverse();
  RMat adj = det * Minv;  // adjugate
  Mat lhs = Mat::Zero(n, n), rhs = Mat::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          cplx h = f.partial(x, mi(cs.w_index(i, a), cs.w_index(j, b)));
          lhs(a, b) += adj(i, j) * h;
          rhs(a, b) += det * Minv(i, j) * h;
        }
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace sj
