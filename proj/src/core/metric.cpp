#include "metric.hpp"

#include <cstdio>

#include "jet.hpp"
#include "rng.hpp"
#include "smoothmap.hpp"

namespace sj {

IndexSets index_sets(int n, int m) {
  IndexSets s;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s.omega.emplace_back(i, j);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) s.omega_prime.emplace_back(r, c);
  return s;
}

namespace {

// Minimal generic dense matrix so the block assembly can run over plain
// doubles (fast path) and over first-order jets (analytic metric derivatives)
// from one piece of code.
template <class T>
struct TM {
  int r = 0, c = 0;
  std::vector<T> d;
  TM() = default;
  TM(int r_, int c_, const T& zero)
      : r(r_), c(c_), d(static_cast<std::size_t>(r_) * c_, zero) {}
  T& operator()(int i, int j) { return d[static_cast<std::size_t>(i) * c + j]; }
  const T& operator()(int i, int j) const {
    return d[static_cast<std::size_t>(i) * c + j];
  }
};

template <class T>
TM<T> tmul(const TM<T>& A, const TM<T>& B, const T& zero) {
  TM<T> R(A.r, B.c, zero);
  for (int i = 0; i < A.r; ++i)
    for (int j = 0; j < B.c; ++j) {
      T acc = zero;
      for (int k = 0; k < A.c; ++k) acc += A(i, k) * B(k, j);
      R(i, j) = acc;
    }
  return R;
}

template <class T>
TM<T> ttrans(const TM<T>& A, const T& zero) {
  TM<T> R(A.c, A.r, zero);
  for (int i = 0; i < A.r; ++i)
    for (int j = 0; j < A.c; ++j) R(j, i) = A(i, j);
  return R;
}

inline double scaled(double a, double s) { return a * s; }
inline Jet scaled(const Jet& a, double s) { return a * cplx(s, 0.0); }

template <class T>
struct TBlocks {
  TM<T> C1, C2, C3;  // unhalved monomial coefficients
};

// Expand the trace form of ds^2 into coordinate-monomial coefficients.
template <class T>
TBlocks<T> assemble_C(const CoordSystem& cs, const TM<T>& V, const TM<T>& R,
                      double A, double B, const T& zero) {
  const int n = cs.n, m = cs.m, nZ = cs.nZ, nW = cs.nW;
  TBlocks<T> out;
  out.C1 = TM<T>(nZ, nZ, zero);
  out.C2 = TM<T>(nZ, nW, zero);
  out.C3 = TM<T>(nW, nW, zero);
  auto zc = [&cs](int a, int b) { return cs.z_index(a, b); };
  auto wc = [n](int r, int s) { return r * n + s; };

  TM<T> Vt = ttrans(V, zero);
  TM<T> VR = tmul(V, R, zero);              // m x n
  TM<T> RVt = tmul(R, Vt, zero);            // n x m
  TM<T> G = tmul(RVt, VR, zero);            // R V^t V R
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      G(i, j) = scaled(G(i, j), B) + scaled(R(i, j), A);

  // (A R + B R V^t V R)_{ab} dZ_{bc} R_{cd} dZb_{da}
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          out.C1(zc(b, c), zc(d, a)) += G(a, b) * R(c, d);

  // B R_{ab} dW_{cb} dWb_{ca}
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < m; ++c)
        out.C3(wc(c, b), wc(c, a)) += scaled(R(a, b), B);

  // -B (VR)_{pb} dZ_{bc} R_{cd} dWb_{pd}   (the conjugate cross term
  // contributes the same coefficients to the mirrored monomials)
  for (int p = 0; p < m; ++p)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          out.C2(zc(b, c), wc(p, d)) += scaled(VR(p, b) * R(c, d), -B);

  return out;
}

RMat to_rmat(const TM<double>& M) {
  RMat R(M.r, M.c);
  for (int i = 0; i < M.r; ++i)
    for (int j = 0; j < M.c; ++j) R(i, j) = M(i, j);
  return R;
}

}  // namespace

MetricBlocks metric_blocks(const Point& x, const MetricParams& par) {
  const CoordSystem& cs = x.coords();
  TM<double> V(cs.m, cs.n, 0.0), R(cs.n, cs.n, 0.0);
  for (int i = 0; i < cs.m; ++i)
    for (int j = 0; j < cs.n; ++j) V(i, j) = x.V()(i, j);
  for (int i = 0; i < cs.n; ++i)
    for (int j = 0; j < cs.n; ++j) R(i, j) = x.R()(i, j);
  TBlocks<double> C = assemble_C<double>(cs, V, R, par.A, par.B, 0.0);
  MetricBlocks b;
  b.W1 = 0.5 * to_rmat(C.C1);
  b.W2 = 0.5 * to_rmat(C.C2);
  b.W3 = 0.5 * to_rmat(C.C3);
  return b;
}

RMat MetricBlocks::P() const {
  int nZ = static_cast<int>(W1.rows()), nW = static_cast<int>(W3.rows());
  RMat P(nZ + nW, nZ + nW);
  P << W1, W2, W2.transpose(), W3;
  return P;
}

RMat MetricBlocks::full() const {
  RMat p = P();
  int H = static_cast<int>(p.rows());
  RMat g = RMat::Zero(2 * H, 2 * H);
  g.block(0, H, H, H) = p;
  g.block(H, 0, H, H) = p.transpose();
  return g;
}

MetricInverseBlocks metric_inverse_closed(const Point& x,
                                          const MetricParams& par) {
  const CoordSystem& cs = x.coords();
  const RMat& Y = x.Y();
  const RMat& V = x.V();
  const RMat& R = x.R();
  const double A = par.A, B = par.B;
  IndexSets is = index_sets(cs.n, cs.m);
  int nZ = cs.nZ, nW = cs.nW;
  MetricInverseBlocks out;
  out.M1 = RMat(nZ, nZ);
  out.M2 = RMat(nZ, nW);
  out.M3 = RMat(nW, nW);
  RMat VRVt = V * R * V.transpose();
  for (int I = 0; I < nZ; ++I) {
    auto [i, j] = is.omega[I];
    for (int J = 0; J < nZ; ++J) {
      auto [r, s] = is.omega[J];
      out.M1(I, J) = (Y(i, r) * Y(j, s) + Y(j, r) * Y(i, s)) / A;
    }
    for (int Jp = 0; Jp < nW; ++Jp) {
      auto [rp, sp] = is.omega_prime[Jp];
      out.M2(I, Jp) = (V(rp, i) * Y(j, sp) + V(rp, j) * Y(i, sp)) / A;
    }
  }
  for (int Ip = 0; Ip < nW; ++Ip) {
    auto [ip, jp] = is.omega_prime[Ip];
    for (int Jp = 0; Jp < nW; ++Jp) {
      auto [rp, sp] = is.omega_prime[Jp];
      out.M3(Ip, Jp) = VRVt(ip, rp) * Y(jp, sp) / A + V(ip, sp) * V(rp, jp) / A +
                       2.0 / B * (ip == rp ? Y(jp, sp) : 0.0);
    }
  }
  return out;
}

RMat MetricInverseBlocks::Pinv() const {
  int nZ = static_cast<int>(M1.rows()), nW = static_cast<int>(M3.rows());
  RMat P(nZ + nW, nZ + nW);
  P << M1, M2, M2.transpose(), M3;
  return P;
}

RMat MetricInverseBlocks::full_inv() const {
  RMat p = Pinv();
  int H = static_cast<int>(p.rows());
  RMat g = RMat::Zero(2 * H, 2 * H);
  g.block(0, H, H, H) = p.transpose();
  g.block(H, 0, H, H) = p;
  return g;
}

double ds2_eval(const Point& x, const MetricParams& par, const Mat& dZ,
                const Mat& dW) {
  Mat R = x.R().cast<cplx>();
  Mat V = x.V().cast<cplx>();
  Mat dZb = dZ.conjugate(), dWb = dW.conjugate();
  cplx v = par.A * (R * dZ * R * dZb).trace() +
           par.B * ((R * V.transpose() * V * R * dZ * R * dZb).trace() +
                    (R * dW.transpose() * dWb).trace() -
                    (V * R * dZ * R * dWb.transpose()).trace() -
                    (V * R * dZb * R * dW.transpose()).trace());
  return v.real();
}

double ds2_blocks_eval(const MetricBlocks& bl, const CoordSystem& cs,
                       const Mat& dZ, const Mat& dW) {
  IndexSets is = index_sets(cs.n, cs.m);
  Vec t(cs.H);
  for (int I = 0; I < cs.nZ; ++I) t[I] = dZ(is.omega[I].first, is.omega[I].second);
  for (int Ip = 0; Ip < cs.nW; ++Ip)
    t[cs.nZ + Ip] = dW(is.omega_prime[Ip].first, is.omega_prime[Ip].second);
  RMat P = bl.P();
  cplx v = t.transpose() * P.cast<cplx>() * t.conjugate();
  return 2.0 * v.real();
}

double ConnectionData::max_abs_diff(const ConnectionData& o) const {
  double m = 0.0;
  for (std::size_t i = 0; i < coeff.size(); ++i)
    m = std::max(m, std::abs(coeff[i] - o.coeff[i]));
  return m;
}

double ConnectionData::max_abs() const {
  double m = 0.0;
  for (const cplx& c : coeff) m = std::max(m, std::abs(c));
  return m;
}

ConnectionData christoffel_numeric(const Point& x, const MetricParams& par) {
  const CoordSystem& cs = x.coords();
  const int T2 = cs.total, H = cs.H, nZ = cs.nZ;
  auto pj = PointJets::get(x, 1);
  const JetSpacePtr& sp = pj->big;
  Jet zero = Jet::zero(sp);
  TM<Jet> V(cs.m, cs.n, zero), R(cs.n, cs.n, zero);
  for (int i = 0; i < cs.m; ++i)
    for (int j = 0; j < cs.n; ++j) V(i, j) = pj->V(i, j);
  for (int i = 0; i < cs.n; ++i)
    for (int j = 0; j < cs.n; ++j) R(i, j) = pj->R(i, j);
  TBlocks<Jet> C = assemble_C<Jet>(cs, V, R, par.A, par.B, zero);

  auto Pjet = [&](int I, int J) -> const Jet& {
    if (I < nZ) return J < nZ ? C.C1(I, J) : C.C2(I, J - nZ);
    return J < nZ ? C.C2(J, I - nZ) : C.C3(I - nZ, J - nZ);
  };
  // g_{alpha beta} as deg-1 jets (only holo x bar is nonzero); halved blocks.
  std::vector<Jet> g(static_cast<std::size_t>(T2) * T2, zero);
  auto gref = [&](int a, int b) -> Jet& {
    return g[static_cast<std::size_t>(a) * T2 + b];
  };
  for (int I = 0; I < H; ++I)
    for (int J = 0; J < H; ++J) {
      Jet v = scaled(Pjet(I, J), 0.5);
      gref(I, J + H) = v;
      gref(J + H, I) = v;
    }

  // Metric value and its coordinate partials from the jet coefficients.
  Mat g0(T2, T2);
  std::vector<Mat> dg(T2, Mat::Zero(T2, T2));
  for (int a = 0; a < T2; ++a)
    for (int b = 0; b < T2; ++b) {
      const Jet& jv = gref(a, b);
      g0(a, b) = jv.value();
      for (int d = 0; d < T2; ++d) dg[d](a, b) = jv.coeffs()[sp->var_mon(d)];
    }

  // Inverse via the block structure.
  RMat P0(H, H);
  for (int I = 0; I < H; ++I)
    for (int J = 0; J < H; ++J) P0(I, J) = 0.5 * Pjet(I, J).value().real();
  RMat Pinv0 = P0.inverse();
  Mat ginv = Mat::Zero(T2, T2);
  for (int I = 0; I < H; ++I)
    for (int J = 0; J < H; ++J) {
      ginv(I, J + H) = Pinv0(J, I);
      ginv(J + H, I) = Pinv0(I, J);
    }

  ConnectionData out(cs);
  for (int K = 0; K < T2; ++K)
    for (int I = 0; I < T2; ++I)
      for (int J = I; J < T2; ++J) {
        cplx acc{0.0, 0.0};
        for (int d = 0; d < T2; ++d) {
          cplx w = ginv(K, d);
          if (w == cplx(0.0, 0.0)) continue;
          acc += w * (dg[I](J, d) + dg[J](I, d) - dg[d](I, J));
        }
        acc *= 0.5;
        out.at(K, I, J) = acc;
        out.at(K, J, I) = acc;
      }
  return out;
}

ConnectionData connection_closed(const Point& x, const MetricParams& par) {
  const CoordSystem& cs = x.coords();
  const int n = cs.n, m = cs.m, H = cs.H;
  const double A = par.A, B = par.B;
  const RMat& R = x.R();
  const RMat& V = x.V();
  RMat VR = V * R;
  RMat RVt = R * V.transpose();
  RMat S11z = 2.0 * (A / B) * R + RVt * VR;  // for the dZ equation
  RMat S11w = RVt * VR;                      // for the dW equation
  cplx pref = kI * B / (2.0 * A);

  ConnectionData out(cs);
  // Unordered monomial coefficients first.
  std::vector<std::vector<cplx>> C(
      H, std::vector<cplx>(static_cast<std::size_t>(H) * H, cplx(0.0, 0.0)));
  auto add = [&](int K, int I, int J, cplx v) {
    if (I > J) std::swap(I, J);
    C[K][static_cast<std::size_t>(I) * H + J] += v;
  };
  auto zc = [&cs](int a, int b) { return cs.z_index(a, b); };
  auto wcp = [&cs](int r, int s) { return cs.w_index(r, s); };

  // D(dZ)_{pq} = pref * [dZ S11z dZ - dZ RV^t dW - dW^t VR dZ + dW^t dW]_{pq}
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q) {
      int K = zc(p, q);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          add(K, zc(p, a), zc(b, q), pref * S11z(a, b));
      for (int a = 0; a < n; ++a)
        for (int r = 0; r < m; ++r)
          add(K, zc(p, a), wcp(r, q), -pref * RVt(a, r));
      for (int r = 0; r < m; ++r)
        for (int b = 0; b < n; ++b)
          add(K, wcp(r, p), zc(b, q), -pref * VR(r, b));
      for (int r = 0; r < m; ++r)
        add(K, wcp(r, p), wcp(r, q), pref);
    }

  // D(dW)_{ij} = pref * (VR)_{ic} [dZ S11w dZ - dZ RV^t dW - dW^t VR dZ
  //                                + dW^t dW]_{cj} + i (dW R dZ)_{ij}
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      int K = wcp(i, j);
      for (int c = 0; c < n; ++c) {
        cplx w = pref * VR(i, c);
        if (w == cplx(0.0, 0.0)) continue;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            add(K, zc(c, a), zc(b, j), w * S11w(a, b));
        for (int a = 0; a < n; ++a)
          for (int r = 0; r < m; ++r)
            add(K, zc(c, a), wcp(r, j), -w * RVt(a, r));
        for (int r = 0; r < m; ++r)
          for (int b = 0; b < n; ++b)
            add(K, wcp(r, c), zc(b, j), -w * VR(r, b));
        for (int r = 0; r < m; ++r)
          add(K, wcp(r, c), wcp(r, j), w);
      }
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          add(K, wcp(i, c), zc(d, j), kI * R(c, d));
    }

  for (int K = 0; K < H; ++K)
    for (int I = 0; I < H; ++I)
      for (int J = I; J < H; ++J) {
        cplx c = C[K][static_cast<std::size_t>(I) * H + J];
        cplx v = (I == J) ? c : 0.5 * c;
        out.at(K, I, J) = v;
        out.at(K, J, I) = v;
        out.at(K + H, I + H, J + H) = std::conj(v);
        out.at(K + H, J + H, I + H) = std::conj(v);
      }
  return out;
}

double metric_invariance_residual(const GroupElement& g, const Point& x,
                                  const MetricParams& par, std::uint64_t seed) {
  Rng rng(mix_seed(seed, "tangent"));
  int n = x.n(), m = x.m();
  Mat dZ(n, n), dW(m, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      dZ(i, j) = dZ(j, i) = cplx(rng.unif(-1.0, 1.0), rng.unif(-1.0, 1.0));
  for (int r = 0; r < m; ++r)
    for (int s = 0; s < n; ++s)
      dW(r, s) = cplx(rng.unif(-1.0, 1.0), rng.unif(-1.0, 1.0));
  double v1 = ds2_eval(x, par, dZ, dW);
  CotangentData ct = cotangent_transforms(g, x);
  Point gx = g.act(x);
  double v2 = ds2_eval(gx, par, ct.push_dZ(dZ), ct.push_dW(dW, dZ));
  return std::abs(v1 - v2) / (1.0 + std::abs(v1));
}

std::string christoffel_csv(const Point& x, const MetricParams& par) {
  ConnectionData cd = connection_closed(x, par);
  const CoordSystem& cs = x.coords();
  std::string out = "K_index,I_index,J_index,re,im\n";
  char buf[128];
  for (int K = 0; K < cs.H; ++K)
    for (int I = 0; I < cs.H; ++I)
      for (int J = I; J < cs.H; ++J) {
        cplx v = cd.at(K, I, J);
        std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.17g,%.17g\n", K, I, J,
                      v.real(), v.imag());
        out += buf;
      }
  return out;
}

}  // namespace sj
