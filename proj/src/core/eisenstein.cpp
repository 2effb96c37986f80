#include "eisenstein.hpp"

#include <array>
#include <cmath>

namespace sj {

namespace {

constexpr int kMaxOrder = 8;  // highest supported mixed partial order

double fact_of(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Q_k with F_k(t) = pi^k Q_k(cot(pi t)); Q_1 = c, Q_{k+1} = (1+c^2) Q_k'/k.
const std::vector<std::vector<double>>& cot_polys() {
  static const std::vector<std::vector<double>> polys = [] {
    std::vector<std::vector<double>> ps;
    ps.push_back({});         // unused k = 0 slot
    ps.push_back({0.0, 1.0});  // Q_1 = c
    for (int k = 1; k <= kMaxOrder + 2; ++k) {
      const std::vector<double>& q = ps.back();
      std::vector<double> dq(q.size() > 1 ? q.size() - 1 : 1, 0.0);
      for (std::size_t i = 1; i < q.size(); ++i)
        dq[i - 1] = q[i] * static_cast<double>(i);
      // (1 + c^2) * dq / k
      std::vector<double> nxt(dq.size() + 2, 0.0);
      for (std::size_t i = 0; i < dq.size(); ++i) {
        nxt[i] += dq[i] / k;
        nxt[i + 2] += dq[i] / k;
      }
      ps.push_back(std::move(nxt));
    }
    return ps;
  }();
  return polys;
}

cplx eval_poly(const std::vector<double>& p, cplx c) {
  cplx acc(0.0, 0.0);
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * c + p[i];
  return acc;
}

void annulus_guard(cplx z, cplx w) {
  double y = z.imag(), v = std::abs(w.imag());
  if (!(y > 0.0)) throw numeric_guard("eisenstein: Im z must be positive");
  if (!(y - v >= 0.05))
    throw numeric_guard("eisenstein: point outside the convergence annulus");
  double d = std::abs(w - std::round(w.real()));
  if (d < 0.02) throw numeric_guard("eisenstein: too close to a pole w in Z");
}

}  // namespace

cplx cot_pi(cplx t) {
  if (t.imag() >= 0.0) {
    cplx u = std::exp(cplx(0.0, 2.0 * kPi) * t);
    return -kI * (1.0 + u) / (1.0 - u);
  }
  cplx u = std::exp(cplx(0.0, -2.0 * kPi) * t);
  return kI * (1.0 + u) / (1.0 - u);
}

cplx lattice_b_sum(int k, cplx t) {
  const auto& ps = cot_polys();
  if (k < 1 || k >= static_cast<int>(ps.size()))
    throw invalid_input("lattice_b_sum: order out of range");
  cplx c = cot_pi(t);
  return std::pow(cplx(kPi, 0.0), k) * eval_poly(ps[k], c);
}

namespace {

// Shared outer loop: a0 term + sum over a = 1..2A of
//   sgn * a^p [F_k(w + a z) + (-1)^p F_k(w - a z)],
// recording the value at A to produce the doubling estimate.
LatticeValue outer_sum(cplx z, cplx w, int p, int k, double sgn, int A,
                       bool with_a0) {
  cplx acc = with_a0 ? sgn * lattice_b_sum(k, w) : cplx(0.0, 0.0);
  cplx at_A(0.0, 0.0);
  for (int a = 1; a <= 2 * A; ++a) {
    double ap = std::pow(static_cast<double>(a), p);
    cplx pair = lattice_b_sum(k, w + static_cast<double>(a) * z);
    cplx neg = lattice_b_sum(k, w - static_cast<double>(a) * z);
    pair += ((p % 2 == 0) ? neg : -neg);
    acc += sgn * ap * pair;
    if (a == A) at_A = acc;
  }
  return {acc, std::abs(acc - at_A)};
}

}  // namespace

LatticeValue g1_lattice(cplx z, cplx w, int p, int q, int A) {
  int k = 1 + p + q;
  double sgn = ((p + q) % 2 == 0 ? 1.0 : -1.0) * fact_of(p + q);
  return outer_sum(z, w, p, k, sgn, A, p == 0);
}

LatticeValue g2_lattice(cplx z, cplx w, int p, int q, int A) {
  int k = 2 + p + q;
  double sgn = ((p + q) % 2 == 0 ? 1.0 : -1.0) * fact_of(p + q + 1);
  return outer_sum(z, w, p, k, sgn, A, p == 0);
}

LatticeValue gee2_lattice(cplx z, int p, int A) {
  int k = 2 + p;
  double sgn = (p % 2 == 0 ? 1.0 : -1.0) * fact_of(p + 1);
  cplx acc = (p == 0) ? cplx(kPi * kPi / 3.0, 0.0) : cplx(0.0, 0.0);
  cplx at_A(0.0, 0.0);
  for (int a = 1; a <= 2 * A; ++a) {
    double ap = std::pow(static_cast<double>(a), p);
    acc += 2.0 * sgn * ap * lattice_b_sum(k, static_cast<double>(a) * z);
    if (a == A) at_A = acc;
  }
  return {acc, std::abs(acc - at_A)};
}

namespace {

// q-series core shared by g1 (wt = 1) and g2 (wt = 2):
//   g1 tail term: -2 pi i   q^{ar} (zeta^r - zeta^-r)
//   g2 tail term: -4 pi^2 r q^{ar} (zeta^r + zeta^-r)
// with the (p, q)-partial acting termwise as (2 pi i a r)^p (+-2 pi i r)^q.
cplx q_tail(cplx z, cplx w, int p, int q, int wt) {
  const cplx qz = std::exp(cplx(0.0, 2.0 * kPi) * z);
  const cplx zeta = std::exp(cplx(0.0, 2.0 * kPi) * w);
  const cplx zinv = 1.0 / zeta;
  cplx acc(0.0, 0.0);
  const cplx front = (wt == 1) ? cplx(0.0, -2.0 * kPi)
                               : cplx(-4.0 * kPi * kPi, 0.0);
  // Terms decay like e^{-2 pi (a y - |v| r)} against polynomial growth; with
  // the annulus margin enforced by the caller a consecutive-small-term rule
  // terminates both loops safely.
  auto tiny = [&](double t) { return t < 1e-20 * (1.0 + std::abs(acc)); };
  int small_outer = 0;
  for (int a = 1; a <= 20000 && small_outer < 3; ++a) {
    cplx qa = std::pow(qz, a);
    if (std::abs(qa) < 1e-300) break;
    cplx qar = qa;  // q^{a r}
    cplx zp = zeta, zm = zinv;
    double inner_peak = 0.0;
    int small_inner = 0;
    for (int r = 1; r <= 20000 && small_inner < 3; ++r) {
      double rr = r, ar = static_cast<double>(a) * r;
      cplx cz = std::pow(cplx(0.0, 2.0 * kPi * ar), p);
      cplx cwp = std::pow(cplx(0.0, 2.0 * kPi * rr), q);
      cplx cwm = std::pow(cplx(0.0, -2.0 * kPi * rr), q);
      cplx term = (wt == 1) ? qar * (cz * cwp * zp - cz * cwm * zm)
                            : rr * qar * (cz * cwp * zp + cz * cwm * zm);
      acc += front * term;
      inner_peak = std::max(inner_peak, std::abs(term));
      small_inner = tiny(std::abs(term)) ? small_inner + 1 : 0;
      qar *= qa;
      zp *= zeta;
      zm *= zinv;
    }
    small_outer = tiny(inner_peak) ? small_outer + 1 : 0;
  }
  return acc;
}

}  // namespace

cplx g1_qseries(cplx z, cplx w, int p, int q) {
  if (p < 0 || q < 0 || p + q > kMaxOrder)
    throw invalid_input("g1_qseries: partial order out of range");
  annulus_guard(z, w);
  cplx head(0.0, 0.0);
  if (p == 0) {
    double s = (q % 2 == 0 ? 1.0 : -1.0) * fact_of(q);
    head = s * lattice_b_sum(1 + q, w);
  }
  return head + q_tail(z, w, p, q, 1);
}

cplx g2_qseries(cplx z, cplx w, int p, int q) {
  if (p < 0 || q < 0 || p + q > kMaxOrder)
    throw invalid_input("g2_qseries: partial order out of range");
  annulus_guard(z, w);
  cplx head(0.0, 0.0);
  if (p == 0) {
    double s = (q % 2 == 0 ? 1.0 : -1.0) * fact_of(q + 1);
    head = s * lattice_b_sum(2 + q, w);
  }
  return head + q_tail(z, w, p, q, 2);
}

cplx e2_qseries(cplx z, int p) {
  if (p < 0 || p > kMaxOrder)
    throw invalid_input("e2_qseries: partial order out of range");
  if (!(z.imag() > 0.02)) throw numeric_guard("e2_qseries: Im z too small");
  const cplx qz = std::exp(cplx(0.0, 2.0 * kPi) * z);
  // sigma_1 via sieve, extended adaptively.
  cplx acc = (p == 0) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
  cplx qn = qz;
  for (int n = 1; n <= 20000; ++n) {
    double s1 = 0.0;
    for (int d = 1; d * d <= n; ++d)
      if (n % d == 0) {
        s1 += d;
        if (d != n / d) s1 += n / d;
      }
    cplx term = -24.0 * s1 * std::pow(cplx(0.0, 2.0 * kPi * n), p) * qn;
    acc += term;
    if (std::abs(qn) * std::pow(n + 1.0, p + 3) < 1e-19 * (1.0 + std::abs(acc)))
      break;
    qn *= qz;
  }
  return acc;
}

cplx gee2_qseries(cplx z, int p) { return (kPi * kPi / 3.0) * e2_qseries(z, p); }

cplx e1hat_qseries(cplx z, cplx w, int p, int q) {
  return (kI / (2.0 * kPi)) * g1_qseries(z, w, p, q);
}

namespace {

enum class Factor { G1, G2W, E1Hat, Gee2 };

class EisenMap : public SmoothMap {
 public:
  EisenMap(Factor which, CoordSystem cs, int wrow)
      : which_(which), cs_(cs), wrow_(wrow) {
    if (cs_.n != 1)
      throw invalid_input("eisenstein map: defined on H_{1,m} only");
    if (which_ != Factor::Gee2 && (wrow_ < 0 || wrow_ >= cs_.m))
      throw invalid_input("eisenstein map: W row out of range");
  }

  cplx partial(const Point& x, const MultiIndex& mi) const override {
    int p = 0, q = 0;
    const int zid = cs_.z_index(0, 0);
    const int wid = (which_ == Factor::Gee2) ? -1 : cs_.w_index(wrow_, 0);
    for (int id : mi) {
      if (id == zid)
        ++p;
      else if (id == wid)
        ++q;
      else
        return {0.0, 0.0};  // independent of every other coordinate
    }
    cplx z = x.Z()(0, 0);
    switch (which_) {
      case Factor::G1:
        return g1_qseries(z, x.W()(wrow_, 0), p, q);
      case Factor::G2W:
        return g2_qseries(z, x.W()(wrow_, 0), p, q);
      case Factor::E1Hat:
        return e1hat_qseries(z, x.W()(wrow_, 0), p, q);
      case Factor::Gee2:
        return gee2_qseries(z, p);
    }
    return {0.0, 0.0};
  }
  int max_order() const override { return kMaxOrder; }
  bool holomorphic() const override { return true; }

 private:
  Factor which_;
  CoordSystem cs_;
  int wrow_;
};

}  // namespace

MapPtr map_g1(const CoordSystem& cs, int wrow) {
  return std::make_shared<EisenMap>(Factor::G1, cs, wrow);
}
MapPtr map_g2w(const CoordSystem& cs, int wrow) {
  return std::make_shared<EisenMap>(Factor::G2W, cs, wrow);
}
MapPtr map_e1hat(const CoordSystem& cs, int wrow) {
  return std::make_shared<EisenMap>(Factor::E1Hat, cs, wrow);
}
MapPtr map_gee2(const CoordSystem& cs) {
  return std::make_shared<EisenMap>(Factor::Gee2, cs, 0);
}

}  // namespace sj
