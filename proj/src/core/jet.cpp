#include "jet.hpp"

#include <functional>
#include <map>
#include <mutex>
#include <tuple>

namespace sj {

namespace {
std::string key_of(const std::vector<std::uint8_t>& e) {
  return std::string(reinterpret_cast<const char*>(e.data()), e.size());
}

void gen_monomials(int nvars, int deg, std::vector<std::vector<std::uint8_t>>& out) {
  // Graded order: all monomials of total degree d, d = 0..deg, lexicographic
  // within a degree class.
  std::vector<std::uint8_t> cur(nvars, 0);
  for (int d = 0; d <= deg; ++d) {
    // enumerate compositions of d into nvars parts, lexicographic by vector
    std::function<void(int, int)> rec = [&](int pos, int rem) {
      if (pos == nvars - 1) {
        cur[pos] = static_cast<std::uint8_t>(rem);
        out.push_back(cur);
        return;
      }
      for (int k = 0; k <= rem; ++k) {
        cur[pos] = static_cast<std::uint8_t>(k);
        rec(pos + 1, rem - k);
      }
    };
    rec(0, d);
  }
}
}  // namespace

JetSpace::JetSpace(int nv, int d) : nvars(nv), deg(d) {
  gen_monomials(nv, d, mons);
  size = static_cast<int>(mons.size());
  degs_.resize(size);
  fact.resize(size);
  for (int i = 0; i < size; ++i) {
    int total = 0;
    double f = 1.0;
    for (int v = 0; v < nvars; ++v) {
      total += mons[i][v];
      for (int k = 2; k <= mons[i][v]; ++k) f *= k;
    }
    degs_[i] = total;
    fact[i] = f;
    lookup_.emplace(key_of(mons[i]), i);
  }
  mul_tab_.assign(static_cast<std::size_t>(size) * size, -1);
  std::vector<std::uint8_t> tmp(nvars);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      if (degs_[i] + degs_[j] > deg) continue;
      for (int v = 0; v < nvars; ++v)
        tmp[v] = static_cast<std::uint8_t>(mons[i][v] + mons[j][v]);
      auto it = lookup_.find(key_of(tmp));
      mul_tab_[static_cast<std::size_t>(i) * size + j] =
          it == lookup_.end() ? -1 : it->second;
    }
  }
}

int JetSpace::index_of(const std::vector<std::uint8_t>& e) const {
  auto it = lookup_.find(key_of(e));
  return it == lookup_.end() ? -1 : it->second;
}

std::shared_ptr<const JetSpace> JetSpace::get(int nvars, int deg) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetSpace>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto key = std::make_pair(nvars, deg);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::shared_ptr<const JetSpace> sp(new JetSpace(nvars, deg));
  cache.emplace(key, sp);
  return sp;
}

cplx Jet::partial(const std::vector<std::uint8_t>& e) const {
  int idx = sp_->index_of(e);
  if (idx < 0) throw invalid_input("Jet::partial: order beyond truncation");
  return c_[idx] * sp_->fact[idx];
}

Jet Jet::operator+(const Jet& o) const {
  Jet r = *this;
  r.c_ += o.c_;
  return r;
}
Jet Jet::operator-(const Jet& o) const {
  Jet r = *this;
  r.c_ -= o.c_;
  return r;
}
Jet Jet::operator-() const {
  Jet r = *this;
  r.c_ = -r.c_;
  return r;
}
Jet& Jet::operator+=(const Jet& o) {
  c_ += o.c_;
  return *this;
}
Jet& Jet::operator-=(const Jet& o) {
  c_ -= o.c_;
  return *this;
}
Jet Jet::operator*(cplx s) const {
  Jet r = *this;
  r.c_ *= s;
  return r;
}
Jet Jet::operator+(cplx s) const {
  Jet r = *this;
  r.c_[0] += s;
  return r;
}
Jet Jet::operator-(cplx s) const {
  Jet r = *this;
  r.c_[0] -= s;
  return r;
}

Jet Jet::operator*(const Jet& o) const {
  const JetSpace& S = *sp_;
  Jet r = Jet::zero(sp_);
  const int n = S.size;
  for (int i = 0; i < n; ++i) {
    cplx a = c_[i];
    if (a == cplx(0.0, 0.0)) continue;
    for (int j = 0; j < n; ++j) {
      std::int32_t k = S.prod(i, j);
      if (k < 0) continue;
      cplx b = o.c_[j];
      if (b == cplx(0.0, 0.0)) continue;
      r.c_[k] += a * b;
    }
  }
  return r;
}

Jet Jet::reciprocal() const {
  cplx a0 = c_[0];
  if (a0 == cplx(0.0, 0.0)) throw numeric_guard("Jet::reciprocal at zero value");
  Jet u = *this * (1.0 / a0);
  u.c_[0] = 0.0;  // u = this/a0 - 1
  Jet acc(sp_, 1.0);
  Jet term(sp_, 1.0);
  for (int k = 1; k <= sp_->deg; ++k) {
    term = term * u;
    if ((k & 1) != 0)
      acc -= term;
    else
      acc += term;
  }
  return acc * (1.0 / a0);
}

Jet Jet::exp() const {
  cplx a0 = c_[0];
  Jet nil = *this;
  nil.c_[0] = 0.0;
  Jet acc(sp_, 1.0);
  Jet term(sp_, 1.0);
  double f = 1.0;
  for (int k = 1; k <= sp_->deg; ++k) {
    term = term * nil;
    f *= k;
    acc += term * (1.0 / f);
  }
  return acc * std::exp(a0);
}

Jet Jet::pow_int(long long p) const {
  if (p < 0) return reciprocal().pow_int(-p);
  Jet acc(sp_, 1.0);
  Jet base = *this;
  long long e = p;
  while (e > 0) {
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc;
}

Jet Jet::conjugate_coeffs() const {
  Jet r = *this;
  r.c_ = r.c_.conjugate();
  return r;
}

JetMat JetMat::operator+(const JetMat& o) const {
  JetMat r = *this;
  for (std::size_t i = 0; i < d_.size(); ++i) r.d_[i] += o.d_[i];
  return r;
}
JetMat JetMat::operator-(const JetMat& o) const {
  JetMat r = *this;
  for (std::size_t i = 0; i < d_.size(); ++i) r.d_[i] -= o.d_[i];
  return r;
}
JetMat JetMat::operator*(const JetMat& o) const {
  JetMat r(rows_, o.cols_, d_[0].space());
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < o.cols_; ++j) {
      Jet acc = Jet::zero(d_[0].space());
      for (int k = 0; k < cols_; ++k) acc += (*this)(i, k) * o(k, j);
      r(i, j) = acc;
    }
  return r;
}
JetMat JetMat::scale(const Jet& s) const {
  JetMat r = *this;
  for (auto& e : r.d_) e = e * s;
  return r;
}
JetMat JetMat::scale(cplx s) const {
  JetMat r = *this;
  for (auto& e : r.d_) e = e * s;
  return r;
}
JetMat JetMat::transpose() const {
  JetMat r(cols_, rows_, d_[0].space());
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}
Jet JetMat::trace() const {
  Jet acc = Jet::zero(d_[0].space());
  for (int i = 0; i < rows_; ++i) acc += (*this)(i, i);
  return acc;
}

Jet jet_det(const JetMat& A) {
  int n = A.rows();
  if (n == 1) return A(0, 0);
  if (n == 2) return A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  // Laplace along the first row (n is always tiny here).
  Jet acc = Jet::zero(A(0, 0).space());
  for (int j = 0; j < n; ++j) {
    JetMat minor(n - 1, n - 1, A(0, 0).space());
    for (int r = 1; r < n; ++r) {
      int cc = 0;
      for (int c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = A(r, c);
      }
    }
    Jet term = A(0, j) * jet_det(minor);
    acc += (j % 2 == 0) ? term : -term;
  }
  return acc;
}

JetMat jet_inverse(const JetMat& A) {
  int n = A.rows();
  Jet dinv = jet_det(A).reciprocal();
  JetMat r(n, n, A(0, 0).space());
  if (n == 1) {
    r(0, 0) = dinv;
    return r;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      JetMat minor(n - 1, n - 1, A(0, 0).space());
      int rr = 0;
      for (int a = 0; a < n; ++a) {
        if (a == j) continue;
        int cc = 0;
        for (int b = 0; b < n; ++b) {
          if (b == i) continue;
          minor(rr, cc++) = A(a, b);
        }
        ++rr;
      }
      Jet cof = jet_det(minor);
      r(i, j) = ((i + j) % 2 == 0) ? cof * dinv : -cof * dinv;
    }
  return r;
}

void cross_accumulate(const Jet& a, const Jet& b, cplx w, Jet& out) {
  const JetSpace& S = *a.space();
  const JetSpace& B = *out.space();
  const int k = S.nvars;
  if (B.nvars != 2 * k || B.deg != S.deg)
    throw invalid_input("cross_accumulate: space mismatch");

  struct Tab {
    std::vector<std::int32_t> idx;  // small x small -> big index (or -1)
  };
  static std::mutex mu;
  static std::map<std::tuple<int, int>, std::shared_ptr<Tab>> cache;
  std::shared_ptr<Tab> tab;
  {
    std::lock_guard<std::mutex> lk(mu);
    auto key = std::make_tuple(k, S.deg);
    auto it = cache.find(key);
    if (it != cache.end()) {
      tab = it->second;
    } else {
      tab = std::make_shared<Tab>();
      tab->idx.assign(static_cast<std::size_t>(S.size) * S.size, -1);
      std::vector<std::uint8_t> e(2 * k);
      for (int i = 0; i < S.size; ++i) {
        for (int j = 0; j < S.size; ++j) {
          if (S.degree_of(i) + S.degree_of(j) > S.deg) continue;
          for (int v = 0; v < k; ++v) {
            e[v] = S.mons[i][v];
            e[k + v] = S.mons[j][v];
          }
          tab->idx[static_cast<std::size_t>(i) * S.size + j] = B.index_of(e);
        }
      }
      cache.emplace(key, tab);
    }
  }
  for (int i = 0; i < S.size; ++i) {
    cplx av = a.coeffs()[i];
    if (av == cplx(0.0, 0.0)) continue;
    for (int j = 0; j < S.size; ++j) {
      std::int32_t t = tab->idx[static_cast<std::size_t>(i) * S.size + j];
      if (t < 0) continue;
      cplx bv = b.coeffs()[j];
      if (bv == cplx(0.0, 0.0)) continue;
      out.coeffs()[t] += w * av * bv;
    }
  }
}

}  // namespace sj
