#pragma once

// Truncated multivariate Taylor ("jet") arithmetic over complex<double>.
//
// A Jet stores the coefficients of a polynomial of total degree <= deg in
// nvars formal variables, indexed against a shared JetSpace monomial table.
// Propagating variable seeds (value + first-order term) through an arithmetic
// expression yields all mixed partial derivatives of the expression up to the
// truncation order — exact differentiation by mechanized chain rule, with no
// step-size error.  This is the analytic-derivative backbone for coefficient
// functions and for composing smooth functions with the group action.

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "common.hpp"

namespace sj {

class JetSpace {
 public:
  // Shared, memoized per (nvars, deg).
  static std::shared_ptr<const JetSpace> get(int nvars, int deg);

  int nvars = 0, deg = 0, size = 0;
  // Exponent vectors in graded (then lexicographic) order; mons[0] is 1.
  std::vector<std::vector<std::uint8_t>> mons;
  std::vector<double> fact;  // alpha! for each monomial

  int index_of(const std::vector<std::uint8_t>& e) const;  // -1 if absent
  // Monomial index of x_v (deg >= 1 spaces).  The degree-1 block is enumerated
  // with the nonzero exponent in the last variable first, hence the mirror.
  int var_mon(int v) const { return nvars - v; }

  // Product index table: mul_tab[i*size+j] = index of mons[i]*mons[j], or -1
  // if the product exceeds the truncation degree.
  std::int32_t prod(int i, int j) const {
    return mul_tab_[static_cast<std::size_t>(i) * size + j];
  }

  int degree_of(int idx) const { return degs_[idx]; }

 private:
  JetSpace(int nvars, int deg);
  std::vector<std::int32_t> mul_tab_;
  std::vector<int> degs_;
  std::unordered_map<std::string, int> lookup_;
};

using JetSpacePtr = std::shared_ptr<const JetSpace>;

class Jet {
 public:
  Jet() = default;
  Jet(JetSpacePtr sp, cplx constant) : sp_(std::move(sp)) {
    c_ = Vec::Zero(sp_->size);
    c_[0] = constant;
  }
  static Jet variable(const JetSpacePtr& sp, int v, cplx value) {
    Jet j(sp, value);
    if (sp->deg >= 1) j.c_[sp->var_mon(v)] = 1.0;  // truncated away at deg 0
    return j;
  }
  static Jet zero(const JetSpacePtr& sp) { return Jet(sp, 0.0); }

  const JetSpacePtr& space() const { return sp_; }
  cplx value() const { return c_[0]; }
  Vec& coeffs() { return c_; }
  const Vec& coeffs() const { return c_; }

  // Mixed partial for the exponent vector e (alpha! included).
  cplx partial(const std::vector<std::uint8_t>& e) const;

  Jet operator+(const Jet& o) const;
  Jet operator-(const Jet& o) const;
  Jet operator-() const;
  Jet operator*(const Jet& o) const;
  Jet operator*(cplx s) const;
  Jet operator+(cplx s) const;
  Jet operator-(cplx s) const;
  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);

  Jet reciprocal() const;        // 1/this, requires value() != 0
  Jet exp() const;               // exp(this)
  Jet pow_int(long long p) const;  // integer powers (negative allowed)
  Jet conjugate_coeffs() const;  // coefficient-wise conjugate (see callers)

 private:
  JetSpacePtr sp_;
  Vec c_;
};

inline Jet operator*(cplx s, const Jet& j) { return j * s; }

// Dense matrix of jets sharing one space.
class JetMat {
 public:
  JetMat() = default;
  JetMat(int r, int c, const JetSpacePtr& sp)
      : rows_(r), cols_(c), d_(static_cast<std::size_t>(r) * c, Jet::zero(sp)) {}
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Jet& operator()(int i, int j) { return d_[static_cast<std::size_t>(i) * cols_ + j]; }
  const Jet& operator()(int i, int j) const {
    return d_[static_cast<std::size_t>(i) * cols_ + j];
  }
  JetMat operator+(const JetMat& o) const;
  JetMat operator-(const JetMat& o) const;
  JetMat operator*(const JetMat& o) const;
  JetMat scale(const Jet& s) const;
  JetMat scale(cplx s) const;
  JetMat transpose() const;
  Jet trace() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Jet> d_;
};

Jet jet_det(const JetMat& A);       // Laplace expansion (small matrices)
JetMat jet_inverse(const JetMat& A);  // adjugate / det

// Cross-embedding: given jets a (on small space S: vars 0..k-1) and b (on the
// same small space shape, representing vars k..2k-1), accumulate the product
// a*b into `out`, which lives on the doubled space (2k vars, same degree),
// scaled by w.  Used to combine holomorphic and antiholomorphic factor jets.
void cross_accumulate(const Jet& a, const Jet& b, cplx w, Jet& out);

}  // namespace sj
