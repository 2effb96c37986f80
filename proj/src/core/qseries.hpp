#pragma once

// Exact rational q-expansion machinery for the degree-1, index-1 corpus:
// eta, the odd theta factor, the standard weak forms of weights -2 and 0,
// Eisenstein q-series, the index-1 heat operator, theta decomposition and the
// level-4 coefficient correspondence, and the pair of compatible
// holomorphy-corrected heat operators acting on the two sides.
//
// Series carry their coefficients as exact rationals on the exponent grids
// q^{n/24}, zeta^{r/2} (q = e^{2 pi i z}, zeta = e^{2 pi i w}) together with a
// global power of pi and an exclusive validity bound on the q-exponent, so
// every operation is exact and truncation-aware.

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "common.hpp"
#include "smoothmap.hpp"

namespace sj {

using bigint = boost::multiprecision::cpp_int;
using rat = boost::multiprecision::cpp_rational;

struct NotThetaDecomposable : std::runtime_error {
  explicit NotThetaDecomposable(const std::string& what)
      : std::runtime_error(what) {}
};

constexpr long kValidAll = 1LL << 60;  // "exact at every order"

// One-variable series: pi^pi_pow * sum c(n24) q^{n24/24}.
class QSeries {
 public:
  std::map<long, rat> c;
  int pi_pow = 0;
  long valid_to = kValidAll;  // exclusive bound in n24 units

  QSeries() = default;

  long lowest() const { return c.empty() ? kValidAll : c.begin()->first; }
  rat coeff(long n24) const {
    auto it = c.find(n24);
    return it == c.end() ? rat(0) : it->second;
  }
  void set(long n24, rat v);
  QSeries& truncate(long vt);

  QSeries operator+(const QSeries& o) const;
  QSeries operator-(const QSeries& o) const;
  QSeries operator*(const QSeries& o) const;
  QSeries scaled(const rat& s) const;
  QSeries with_pi(int delta) const;       // multiply by pi^delta
  QSeries rescale_q(long ell) const;      // q -> q^ell
  QSeries inverse() const;                // needs unit part on the 24-grid
  QSeries pow_int(int e) const;
};

// Two-variable series: pi^pi_pow * sum c(n24, r2) q^{n24/24} zeta^{r2/2}.
class FJSeries {
 public:
  std::map<std::pair<long, long>, rat> c;
  int pi_pow = 0;
  long valid_to = kValidAll;

  FJSeries() = default;

  long lowest() const;
  rat coeff(long n24, long r2) const {
    auto it = c.find({n24, r2});
    return it == c.end() ? rat(0) : it->second;
  }
  void set(long n24, long r2, rat v);
  FJSeries& truncate(long vt);

  FJSeries operator+(const FJSeries& o) const;
  FJSeries operator-(const FJSeries& o) const;
  FJSeries operator*(const FJSeries& o) const;
  FJSeries operator*(const QSeries& o) const;
  FJSeries scaled(const rat& s) const;
  FJSeries with_pi(int delta) const;
};

// zeta -> 1 specialization (w = 0), collapsing to a QSeries.
QSeries specialize_w0(const FJSeries& f);

// ---- generators (trunc in integral q-powers: exact for q-exponent < trunc) --
QSeries eta_product(long trunc);     // production route
QSeries eta_pentagonal(long trunc);  // closed-form oracle
FJSeries theta_odd(long trunc);      // q^{1/8}(s - s^-1) prod (1-q^n)(1-q^n s^2)(1-q^n s^-2), s = zeta^{1/2}
FJSeries theta_shifted(int which, long trunc);  // classical theta_2/3/4(z, w)
QSeries theta_null(int which, long trunc);      // theta_2/3/4(z, 0)
FJSeries weak_jacobi_m2_1(long trunc);  // theta_odd^2 / eta^6
FJSeries weak_jacobi_0_1(long trunc);   // 4 sum (theta_j(z,w)/theta_j(z,0))^2
QSeries eisenstein_series(int k, long trunc);  // G_k (even k >= 2), pi_pow = k
QSeries e2_series(long trunc);                 // E_2 = 1 - 24 sum sigma_1 q^n

// ---- index-1 operators and the coefficient correspondence ------------------
// Heat combination on q^n zeta^r: multiply by 4 pi^2 (4n - r^2).
FJSeries heat_apply(const FJSeries& f);
// Target-side derivative q' d/dq' scaled identically (N |-> 4 pi^2 N c(N)).
QSeries heat_target(const QSeries& h);

struct ThetaComponents {
  QSeries h0, h1;  // target-variable series: exponent grid q'^N (n24 = 24 N)
};
ThetaComponents theta_decompose(const FJSeries& f);
FJSeries theta_reconstruct(const ThetaComponents& comps, long trunc);
// Merge of the two components: h(q') = sum_N c(N) q'^N, N = 4n - r^2.
QSeries ez_map(const FJSeries& f);

// Holomorphy-corrected heat pair in the pi-stripped normalization
//   source side: (4n - r^2) c + ((1 - 2k)/6) (E2(q) f)
//   target side: N c(N) + ((1 - 2k)/6) (E2(q'^4) h)
FJSeries serre_jacobi(const FJSeries& f, int k);
QSeries serre_modular(const QSeries& h, int k);

// Exact equality of all coefficients with exponent < upto (n24 units; also
// requires equal pi_pow).
bool q_equal(const QSeries& a, const QSeries& b, long upto24);
bool fj_equal(const FJSeries& a, const FJSeries& b, long upto24);

// ---- numeric bridge --------------------------------------------------------
cplx fj_eval(const FJSeries& f, cplx z, cplx w);
// Holomorphic map on H_{1,1} with exact termwise partials.
MapPtr fj_to_map(const FJSeries& f);

// ---- pinned CSV serialization ---------------------------------------------
// Header "# weight K index M dq 24 dz 2 trunc T", then lines
// "n_num,r_num,coeff_num,coeff_den" sorted by (n_num, r_num).
std::string fj_csv(const FJSeries& f, int weight, int index, long trunc);
struct CsvHeader {
  int weight = 0, index = 0;
  long dq = 0, dz = 0, trunc = 0;
};
CsvHeader parse_csv_header(const std::string& text);

}  // namespace sj
