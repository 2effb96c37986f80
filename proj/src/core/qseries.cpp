#include "qseries.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace sj {

namespace {

long vt_min(long a, long b) { return std::min(a, b); }
long vt_add(long a, long b) {
  if (a >= kValidAll || b >= kValidAll) return kValidAll;
  long s = a + b;
  return s > kValidAll ? kValidAll : s;
}

}  // namespace

// ---- QSeries ---------------------------------------------------------------

void QSeries::set(long n24, rat v) {
  if (v == 0)
    c.erase(n24);
  else
    c[n24] = std::move(v);
}

QSeries& QSeries::truncate(long vt) {
  valid_to = vt_min(valid_to, vt);
  c.erase(c.lower_bound(valid_to), c.end());
  return *this;
}

QSeries QSeries::operator+(const QSeries& o) const {
  if (pi_pow != o.pi_pow)
    throw invalid_input("QSeries +: mismatched pi powers");
  QSeries r = *this;
  r.valid_to = vt_min(valid_to, o.valid_to);
  for (const auto& [e, v] : o.c) r.set(e, r.coeff(e) + v);
  r.truncate(r.valid_to);
  return r;
}

QSeries QSeries::operator-(const QSeries& o) const {
  return *this + o.scaled(rat(-1));
}

QSeries QSeries::operator*(const QSeries& o) const {
  QSeries r;
  r.pi_pow = pi_pow + o.pi_pow;
  r.valid_to = vt_min(vt_add(valid_to, o.lowest()), vt_add(o.valid_to, lowest()));
  for (const auto& [ea, va] : c) {
    if (ea >= r.valid_to) break;
    for (const auto& [eb, vb] : o.c) {
      long e = ea + eb;
      if (e >= r.valid_to) break;
      auto [it, fresh] = r.c.try_emplace(e, rat(0));
      it->second += va * vb;
      (void)fresh;
    }
  }
  for (auto it = r.c.begin(); it != r.c.end();)
    it = (it->second == 0) ? r.c.erase(it) : std::next(it);
  return r;
}

QSeries QSeries::scaled(const rat& s) const {
  QSeries r;
  r.pi_pow = pi_pow;
  r.valid_to = valid_to;
  if (s == 0) return r;
  for (const auto& [e, v] : c) r.c.emplace(e, v * s);
  return r;
}

QSeries QSeries::with_pi(int delta) const {
  QSeries r = *this;
  r.pi_pow += delta;
  return r;
}

QSeries QSeries::rescale_q(long ell) const {
  if (ell <= 0) throw invalid_input("QSeries::rescale_q: need ell >= 1");
  QSeries r;
  r.pi_pow = pi_pow;
  r.valid_to = valid_to >= kValidAll ? kValidAll
                                     : std::min<long>(kValidAll, valid_to * ell);
  for (const auto& [e, v] : c) r.c.emplace(e * ell, v);
  return r;
}

QSeries QSeries::inverse() const {
  if (c.empty()) throw invalid_input("QSeries::inverse of zero series");
  if (valid_to >= kValidAll)
    throw invalid_input("QSeries::inverse needs a truncated series");
  const long e0 = lowest();
  const rat c0 = c.begin()->second;
  // Unit-part grid: gcd of exponent offsets (24 when only the lead exists).
  long g = 0;
  for (const auto& [e, v] : c) g = std::gcd(g, e - e0);
  if (g == 0) g = 24;
  const long vt_unit = valid_to - e0;  // validity of the unit part, exclusive
  const long terms = (vt_unit + g - 1) / g;
  if (terms > 2000000) throw invalid_input("QSeries::inverse: grid too fine");
  std::vector<rat> a(static_cast<std::size_t>(terms), rat(0));
  for (const auto& [e, v] : c) {
    long off = e - e0;
    if (off % g != 0)
      throw invalid_input("QSeries::inverse: exponents off the unit grid");
    if (off / g < terms) a[static_cast<std::size_t>(off / g)] = v / c0;
  }
  std::vector<rat> b(static_cast<std::size_t>(terms), rat(0));
  b[0] = 1;
  for (long j = 1; j < terms; ++j) {
    rat s(0);
    for (long i = 1; i <= j; ++i)
      if (a[static_cast<std::size_t>(i)] != 0)
        s += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j - i)];
    b[static_cast<std::size_t>(j)] = -s;
  }
  QSeries r;
  r.pi_pow = -pi_pow;
  r.valid_to = vt_unit - e0;  // q^{-e0} shift costs e0 of validity
  for (long j = 0; j < terms; ++j)
    if (b[static_cast<std::size_t>(j)] != 0)
      r.c.emplace(-e0 + j * g, b[static_cast<std::size_t>(j)] / c0);
  r.truncate(r.valid_to);
  return r;
}

QSeries QSeries::pow_int(int e) const {
  if (e < 0) return inverse().pow_int(-e);
  QSeries acc;
  acc.c.emplace(0, rat(1));
  QSeries base = *this;
  while (e > 0) {
    if (e & 1) acc = acc * base;
    base = (e > 1) ? base * base : base;
    e >>= 1;
  }
  return acc;
}

// ---- FJSeries --------------------------------------------------------------

long FJSeries::lowest() const {
  long lo = kValidAll;
  for (const auto& [k, v] : c) lo = std::min(lo, k.first);
  return lo;
}

void FJSeries::set(long n24, long r2, rat v) {
  if (v == 0)
    c.erase({n24, r2});
  else
    c[{n24, r2}] = std::move(v);
}

FJSeries& FJSeries::truncate(long vt) {
  valid_to = vt_min(valid_to, vt);
  for (auto it = c.begin(); it != c.end();)
    it = (it->first.first >= valid_to) ? c.erase(it) : std::next(it);
  return *this;
}

FJSeries FJSeries::operator+(const FJSeries& o) const {
  if (pi_pow != o.pi_pow)
    throw invalid_input("FJSeries +: mismatched pi powers");
  FJSeries r = *this;
  r.valid_to = vt_min(valid_to, o.valid_to);
  for (const auto& [k, v] : o.c) r.set(k.first, k.second, r.coeff(k.first, k.second) + v);
  r.truncate(r.valid_to);
  return r;
}

FJSeries FJSeries::operator-(const FJSeries& o) const {
  return *this + o.scaled(rat(-1));
}

FJSeries FJSeries::operator*(const FJSeries& o) const {
  FJSeries r;
  r.pi_pow = pi_pow + o.pi_pow;
  r.valid_to = vt_min(vt_add(valid_to, o.lowest()), vt_add(o.valid_to, lowest()));
  for (const auto& [ka, va] : c) {
    if (ka.first >= r.valid_to) continue;
    for (const auto& [kb, vb] : o.c) {
      long e = ka.first + kb.first;
      if (e >= r.valid_to) continue;
      auto [it, fresh] = r.c.try_emplace({e, ka.second + kb.second}, rat(0));
      it->second += va * vb;
      (void)fresh;
    }
  }
  for (auto it = r.c.begin(); it != r.c.end();)
    it = (it->second == 0) ? r.c.erase(it) : std::next(it);
  return r;
}

FJSeries FJSeries::operator*(const QSeries& o) const {
  FJSeries r;
  r.pi_pow = pi_pow + o.pi_pow;
  r.valid_to = vt_min(vt_add(valid_to, o.lowest()), vt_add(o.valid_to, lowest()));
  for (const auto& [ka, va] : c) {
    for (const auto& [eb, vb] : o.c) {
      long e = ka.first + eb;
      if (e >= r.valid_to) break;
      auto [it, fresh] = r.c.try_emplace({e, ka.second}, rat(0));
      it->second += va * vb;
      (void)fresh;
    }
  }
  for (auto it = r.c.begin(); it != r.c.end();)
    it = (it->second == 0) ? r.c.erase(it) : std::next(it);
  return r;
}

FJSeries FJSeries::scaled(const rat& s) const {
  FJSeries r;
  r.pi_pow = pi_pow;
  r.valid_to = valid_to;
  if (s == 0) return r;
  for (const auto& [k, v] : c) r.c.emplace(k, v * s);
  return r;
}

FJSeries FJSeries::with_pi(int delta) const {
  FJSeries r = *this;
  r.pi_pow += delta;
  return r;
}

QSeries specialize_w0(const FJSeries& f) {
  QSeries r;
  r.pi_pow = f.pi_pow;
  r.valid_to = f.valid_to;
  for (const auto& [k, v] : f.c) {
    auto [it, fresh] = r.c.try_emplace(k.first, rat(0));
    it->second += v;
    (void)fresh;
  }
  for (auto it = r.c.begin(); it != r.c.end();)
    it = (it->second == 0) ? r.c.erase(it) : std::next(it);
  return r;
}

// ---- generators ------------------------------------------------------------

QSeries eta_product(long trunc) {
  if (trunc < 1) throw invalid_input("eta_product: trunc must be >= 1");
  std::vector<rat> p(static_cast<std::size_t>(trunc), rat(0));
  p[0] = 1;
  for (long n = 1; n < trunc; ++n)
    for (long j = trunc - 1; j >= n; --j)
      if (p[static_cast<std::size_t>(j - n)] != 0)
        p[static_cast<std::size_t>(j)] -= p[static_cast<std::size_t>(j - n)];
  QSeries r;
  r.valid_to = 24 * trunc;  // the q^{1/24} front factor keeps this exact
  for (long j = 0; j < trunc; ++j)
    if (p[static_cast<std::size_t>(j)] != 0)
      r.c.emplace(24 * j + 1, p[static_cast<std::size_t>(j)]);
  return r;
}

QSeries eta_pentagonal(long trunc) {
  QSeries r;
  r.valid_to = 24 * trunc;
  for (long k = -trunc; k <= trunc; ++k) {
    long e = k * (3 * k - 1) / 2;
    if (e >= 0 && e < trunc) {
      rat sgn = (k % 2 == 0) ? 1 : -1;
      r.set(24 * e + 1, r.coeff(24 * e + 1) + sgn);
    }
  }
  return r;
}

FJSeries theta_odd(long trunc) {
  if (trunc < 1) throw invalid_input("theta_odd: trunc must be >= 1");
  const long vt = 24 * trunc;
  FJSeries f;
  f.valid_to = vt;
  f.c.emplace(std::make_pair(3L, 1L), rat(1));
  f.c.emplace(std::make_pair(3L, -1L), rat(-1));
  // multiply by (1 - q^n)(1 - q^n zeta)(1 - q^n zeta^{-1}) for n = 1..trunc
  auto mul_binomial = [&](long de, long dr) {
    FJSeries g;
    g.pi_pow = f.pi_pow;
    g.valid_to = f.valid_to;
    for (const auto& [k, v] : f.c) {
      g.set(k.first, k.second, g.coeff(k.first, k.second) + v);
      long e = k.first + de;
      if (e < vt) g.set(e, k.second + dr, g.coeff(e, k.second + dr) - v);
    }
    f = std::move(g);
  };
  for (long n = 1; n <= trunc; ++n) {
    mul_binomial(24 * n, 0);
    mul_binomial(24 * n, 2);
    mul_binomial(24 * n, -2);
  }
  f.truncate(vt);
  return f;
}

FJSeries theta_shifted(int which, long trunc) {
  FJSeries r;
  r.valid_to = 24 * trunc;
  if (which == 2) {
    for (long n = -2 * trunc - 2; n <= 2 * trunc + 2; ++n) {
      long e = 3 * (2 * n + 1) * (2 * n + 1);
      if (e < r.valid_to) r.set(e, 2 * n + 1, rat(1));
    }
  } else if (which == 3 || which == 4) {
    for (long n = -2 * trunc - 2; n <= 2 * trunc + 2; ++n) {
      long e = 12 * n * n;
      if (e < r.valid_to) {
        rat sgn = (which == 3 || n % 2 == 0) ? 1 : -1;
        r.set(e, 2 * n, sgn);
      }
    }
  } else {
    throw invalid_input("theta_shifted: which must be 2, 3, or 4");
  }
  return r;
}

QSeries theta_null(int which, long trunc) {
  return specialize_w0(theta_shifted(which, trunc));
}

FJSeries weak_jacobi_m2_1(long trunc) {
  const long T = trunc + 2;
  FJSeries th = theta_odd(T);
  FJSeries num = th * th;
  QSeries eta6 = eta_product(T).pow_int(6);
  FJSeries r = num * eta6.inverse();
  r.truncate(24 * trunc);
  return r;
}

FJSeries weak_jacobi_0_1(long trunc) {
  const long T = trunc + 3;
  FJSeries acc;
  acc.valid_to = 24 * trunc;
  bool first = true;
  for (int which : {2, 3, 4}) {
    FJSeries ratio = theta_shifted(which, T) * theta_null(which, T).inverse();
    FJSeries sq = ratio * ratio;
    sq.truncate(24 * trunc);
    acc = first ? sq : acc + sq;
    first = false;
  }
  return acc.scaled(rat(4));
}

namespace {
std::vector<rat> bernoulli_upto(int m) {
  std::vector<rat> B(static_cast<std::size_t>(m) + 1, rat(0));
  B[0] = 1;
  for (int n = 1; n <= m; ++n) {
    rat s(0);
    rat binom(1);  // C(n+1, 0)
    for (int j = 0; j < n; ++j) {
      s += binom * B[static_cast<std::size_t>(j)];
      binom = binom * (n + 1 - j) / (j + 1);
    }
    B[static_cast<std::size_t>(n)] = -s / rat(n + 1);
  }
  return B;
}
}  // namespace

QSeries eisenstein_series(int k, long trunc) {
  if (k < 2 || k % 2 != 0 || k > 24)
    throw invalid_input("eisenstein_series: need even k in [2, 24]");
  std::vector<rat> B = bernoulli_upto(k);
  // 2 zeta(k) = (-1)^{k/2+1} B_k 2^k pi^k / k!
  rat fact(1);
  for (int i = 2; i <= k; ++i) fact *= i;
  rat zeta2 = B[static_cast<std::size_t>(k)] * rat(bigint(1) << k) / fact;
  if ((k / 2) % 2 == 0) zeta2 = -zeta2;
  QSeries r;
  r.pi_pow = k;
  r.valid_to = 24 * trunc;
  r.set(0, zeta2);
  // series part: 2 (2 pi i)^k / (k-1)! = pi^k * 2^{k+1} (-1)^{k/2} / (k-1)!
  rat factm(1);
  for (int i = 2; i <= k - 1; ++i) factm *= i;
  rat front = rat(bigint(1) << (k + 1)) / factm;
  if ((k / 2) % 2 != 0) front = -front;
  auto powk = [k](long d) {
    bigint p(1);
    for (int i = 0; i < k - 1; ++i) p *= d;
    return p;
  };
  for (long n = 1; n < trunc; ++n) {
    bigint s(0);
    for (long d = 1; d * d <= n; ++d)
      if (n % d == 0) {
        s += powk(d);
        if (d != n / d) s += powk(n / d);
      }
    r.set(24 * n, front * rat(s));
  }
  return r;
}

QSeries e2_series(long trunc) {
  QSeries r;
  r.valid_to = 24 * trunc;
  r.set(0, rat(1));
  for (long n = 1; n < trunc; ++n) {
    long s1 = 0;
    for (long d = 1; d * d <= n; ++d)
      if (n % d == 0) {
        s1 += d;
        if (d != n / d) s1 += n / d;
      }
    r.set(24 * n, rat(-24) * s1);
  }
  return r;
}

// ---- operators and the correspondence -------------------------------------

FJSeries heat_apply(const FJSeries& f) {
  FJSeries r;
  r.pi_pow = f.pi_pow + 2;
  r.valid_to = f.valid_to;
  for (const auto& [k, v] : f.c) {
    // 4 (4n - r^2) with n = n24/24, r = r2/2
    rat factor = rat(2 * k.first, 3) - rat(k.second * k.second);
    if (factor != 0) r.c.emplace(k, v * factor);
  }
  return r;
}

QSeries heat_target(const QSeries& h) {
  QSeries r;
  r.pi_pow = h.pi_pow + 2;
  r.valid_to = h.valid_to;
  for (const auto& [e, v] : h.c) {
    if (e % 24 != 0) throw invalid_input("heat_target: non-integral exponent");
    rat factor = rat(4 * (e / 24));
    if (factor != 0) r.c.emplace(e, v * factor);
  }
  return r;
}

ThetaComponents theta_decompose(const FJSeries& f) {
  ThetaComponents out;
  out.h0.pi_pow = out.h1.pi_pow = f.pi_pow;
  std::map<std::pair<long, int>, rat> seen;  // (N, parity) -> coefficient
  for (const auto& [k, v] : f.c) {
    if (k.first % 24 != 0 || k.second % 2 != 0)
      throw NotThetaDecomposable("fractional exponents present");
    long n = k.first / 24, r = k.second / 2;
    long N = 4 * n - r * r;
    int j = static_cast<int>(((r % 2) + 2) % 2);
    auto it = seen.find({N, j});
    if (it == seen.end())
      seen.emplace(std::make_pair(N, j), v);
    else if (it->second != v)
      throw NotThetaDecomposable(
          "coefficient depends on more than (4n - r^2, r mod 2)");
  }
  // cross-check every in-range pair against the stored component value
  for (const auto& [k, v] : f.c) {
    long n = k.first / 24, r = k.second / 2;
    long N = 4 * n - r * r;
    int j = static_cast<int>(((r % 2) + 2) % 2);
    if (seen.at({N, j}) != v)
      throw NotThetaDecomposable("inconsistent theta components");
  }
  long vq = f.valid_to >= kValidAll ? kValidAll : f.valid_to;
  long b0 = vq >= kValidAll ? kValidAll : 24 * (vq / 6);
  long b1 = vq >= kValidAll ? kValidAll : 24 * (vq / 6 - 1);
  out.h0.valid_to = b0;
  out.h1.valid_to = b1;
  for (const auto& [key, v] : seen) {
    QSeries& h = key.second == 0 ? out.h0 : out.h1;
    if (24 * key.first < h.valid_to) h.c.emplace(24 * key.first, v);
  }
  return out;
}

FJSeries theta_reconstruct(const ThetaComponents& comps, long trunc) {
  if (comps.h0.pi_pow != comps.h1.pi_pow)
    throw invalid_input("theta_reconstruct: mismatched pi powers");
  FJSeries r;
  r.pi_pow = comps.h0.pi_pow;
  r.valid_to = 24 * trunc;
  long rmax = 2;
  while (rmax * rmax < 8 * trunc + 64) ++rmax;
  for (int j = 0; j <= 1; ++j) {
    const QSeries& h = (j == 0) ? comps.h0 : comps.h1;
    for (const auto& [e, v] : h.c) {
      long N = e / 24;
      for (long rr = -rmax; rr <= rmax; ++rr) {
        if (((rr % 2) + 2) % 2 != j) continue;
        long num = N + rr * rr;
        if (num % 4 != 0) continue;
        long n = num / 4;
        if (n < 0 || 24 * n >= r.valid_to) continue;
        r.set(24 * n, 2 * rr, v);
      }
    }
  }
  // reconstruction is exact only where both components are known
  long vb = vt_min(comps.h0.valid_to, vt_add(comps.h1.valid_to, 24));
  if (vb < kValidAll) {
    // N < vb/24 known; terms with 4n - r^2 beyond that are unknown for r = 0/1
    long nq = (vb / 24) * 6;  // inverse of the decompose bound
    r.truncate(vt_min(r.valid_to, nq));
  }
  return r;
}

QSeries ez_map(const FJSeries& f) {
  ThetaComponents comps = theta_decompose(f);
  if (comps.h0.pi_pow != comps.h1.pi_pow)
    throw invalid_input("ez_map: mismatched pi powers");
  QSeries r;
  r.pi_pow = comps.h0.pi_pow;
  r.valid_to = vt_min(comps.h0.valid_to, comps.h1.valid_to);
  for (const auto& [e, v] : comps.h0.c)
    if (e < r.valid_to) r.c.emplace(e, v);
  for (const auto& [e, v] : comps.h1.c)
    if (e < r.valid_to) r.c.emplace(e, v);
  return r;
}

FJSeries serre_jacobi(const FJSeries& f, int k) {
  if (f.valid_to >= kValidAll)
    throw invalid_input("serre_jacobi: needs a truncated series");
  FJSeries part1;
  part1.pi_pow = f.pi_pow;
  part1.valid_to = f.valid_to;
  for (const auto& [key, v] : f.c) {
    rat factor = rat(key.first, 6) - rat(key.second * key.second, 4);
    if (factor != 0) part1.c.emplace(key, v * factor);
  }
  QSeries e2 = e2_series(f.valid_to / 24 + 2);
  FJSeries part2 = (f * e2).scaled(rat(1 - 2 * k, 6));
  part2.truncate(f.valid_to);
  return part1 + part2;
}

QSeries serre_modular(const QSeries& h, int k) {
  if (h.valid_to >= kValidAll)
    throw invalid_input("serre_modular: needs a truncated series");
  QSeries part1;
  part1.pi_pow = h.pi_pow;
  part1.valid_to = h.valid_to;
  for (const auto& [e, v] : h.c) {
    if (e % 24 != 0) throw invalid_input("serre_modular: non-integral exponent");
    rat factor = rat(e / 24);
    if (factor != 0) part1.c.emplace(e, v * factor);
  }
  QSeries e2 = e2_series(h.valid_to / (24 * 4) + 3).rescale_q(4);
  QSeries part2 = (h * e2).scaled(rat(1 - 2 * k, 6));
  part2.truncate(h.valid_to);
  return part1 + part2;
}

bool q_equal(const QSeries& a, const QSeries& b, long upto24) {
  if (a.pi_pow != b.pi_pow) return false;
  if (a.valid_to < upto24 || b.valid_to < upto24)
    throw invalid_input("q_equal: series not valid to the requested order");
  for (const auto& [e, v] : a.c)
    if (e < upto24 && b.coeff(e) != v) return false;
  for (const auto& [e, v] : b.c)
    if (e < upto24 && a.coeff(e) != v) return false;
  return true;
}

bool fj_equal(const FJSeries& a, const FJSeries& b, long upto24) {
  if (a.pi_pow != b.pi_pow) return false;
  if (a.valid_to < upto24 || b.valid_to < upto24)
    throw invalid_input("fj_equal: series not valid to the requested order");
  for (const auto& [k, v] : a.c)
    if (k.first < upto24 && b.coeff(k.first, k.second) != v) return false;
  for (const auto& [k, v] : b.c)
    if (k.first < upto24 && a.coeff(k.first, k.second) != v) return false;
  return true;
}

// ---- numeric bridge --------------------------------------------------------

namespace {
void eval_guard(const FJSeries& f, cplx z, cplx w) {
  double y = z.imag(), v = std::abs(w.imag());
  if (!(y > 0.0)) throw numeric_guard("fj_eval: Im z must be positive");
  if (f.valid_to >= kValidAll) return;
  double nt = static_cast<double>(f.valid_to) / 24.0;
  double tail_exp = 2.0 * kPi * (nt * y - 2.0 * std::sqrt(std::max(nt, 1.0)) * v);
  if (tail_exp < 30.0)
    throw numeric_guard("fj_eval: truncation insufficient at this point");
}
}  // namespace

cplx fj_eval(const FJSeries& f, cplx z, cplx w) {
  eval_guard(f, z, w);
  cplx acc(0.0, 0.0);
  for (const auto& [k, v] : f.c) {
    cplx e = std::exp(cplx(0.0, 2.0 * kPi) *
                      (z * (static_cast<double>(k.first) / 24.0) +
                       w * (static_cast<double>(k.second) / 2.0)));
    acc += static_cast<double>(v) * e;
  }
  return acc * std::pow(kPi, f.pi_pow);
}

namespace {
class FJMap : public SmoothMap {
 public:
  explicit FJMap(FJSeries f) : f_(std::move(f)) {}
  cplx partial(const Point& x, const MultiIndex& mi) const override {
    if (x.n() != 1 || x.m() != 1)
      throw invalid_input("fj_to_map: defined on H_{1,1} only");
    int p = 0, q = 0;
    for (int id : mi) {
      if (id == 0)
        ++p;
      else if (id == 1)
        ++q;
      else
        return {0.0, 0.0};
    }
    cplx z = x.Z()(0, 0), w = x.W()(0, 0);
    eval_guard(f_, z, w);
    cplx acc(0.0, 0.0);
    for (const auto& [k, v] : f_.c) {
      double n = static_cast<double>(k.first) / 24.0;
      double r = static_cast<double>(k.second) / 2.0;
      cplx term = std::exp(cplx(0.0, 2.0 * kPi) * (z * n + w * r));
      acc += static_cast<double>(v) * std::pow(cplx(0.0, 2.0 * kPi * n), p) *
             std::pow(cplx(0.0, 2.0 * kPi * r), q) * term;
    }
    return acc * std::pow(kPi, f_.pi_pow);
  }
  int max_order() const override { return 8; }
  bool holomorphic() const override { return true; }

 private:
  FJSeries f_;
};
}  // namespace

MapPtr fj_to_map(const FJSeries& f) { return std::make_shared<FJMap>(f); }

// ---- CSV -------------------------------------------------------------------

std::string fj_csv(const FJSeries& f, int weight, int index, long trunc) {
  if (f.pi_pow != 0) throw invalid_input("fj_csv: series carries pi powers");
  if (f.valid_to < 24 * trunc)
    throw invalid_input("fj_csv: series not valid to the requested truncation");
  std::ostringstream os;
  os << "# weight " << weight << " index " << index << " dq 24 dz 2 trunc "
     << trunc << "\n";
  for (const auto& [k, v] : f.c) {
    if (k.first >= 24 * trunc) continue;
    os << k.first << "," << k.second << "," << boost::multiprecision::numerator(v)
       << "," << boost::multiprecision::denominator(v) << "\n";
  }
  return os.str();
}

CsvHeader parse_csv_header(const std::string& text) {
  std::istringstream in(text);
  std::string hash, kw;
  CsvHeader h;
  in >> hash;
  if (hash != "#") throw invalid_input("csv header: expected leading '#'");
  while (in >> kw) {
    if (kw == "weight")
      in >> h.weight;
    else if (kw == "index")
      in >> h.index;
    else if (kw == "dq")
      in >> h.dq;
    else if (kw == "dz")
      in >> h.dz;
    else if (kw == "trunc") {
      in >> h.trunc;
      break;
    } else {
      throw invalid_input("csv header: unknown field " + kw);
    }
  }
  if (h.dq != 24 || h.dz != 2)
    throw invalid_input("csv header: unsupported exponent denominators");
  return h;
}

}  // namespace sj
