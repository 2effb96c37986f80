// Exact q-expansion layer: generator identities, the index-1 heat pair, theta
// decomposition and its coefficient correspondence, numeric cross-checks
// against direct product/sum evaluation, and the pinned CSV format.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "core/calculus.hpp"
#include "core/eisenstein.hpp"
#include "core/point.hpp"
#include "core/qseries.hpp"

using namespace sj;

namespace {

// Jacobi triple product right-hand side, assembled directly as a sparse
// series: sum_{n in Z} (-1)^n q^{(2n+1)^2/8} zeta^{(2n+1)/2}.
FJSeries sparse_odd_theta(long trunc) {
  FJSeries f;
  f.valid_to = 24 * trunc;
  for (long n = -2 * trunc - 2; n <= 2 * trunc + 2; ++n) {
    long e = 3 * (2 * n + 1) * (2 * n + 1);
    if (e < f.valid_to) f.set(e, 2 * n + 1, rat((n % 2 + 2) % 2 == 0 ? 1 : -1));
  }
  return f;
}

cplx num_eta(cplx z, int terms) {
  cplx q = std::exp(cplx(0, 2 * kPi) * z);
  cplx p = std::exp(cplx(0, 2 * kPi) * z / 24.0);
  for (int n = 1; n <= terms; ++n) p *= 1.0 - std::pow(q, n);
  return p;
}

cplx num_theta_odd(cplx z, cplx w, int terms) {
  cplx q = std::exp(cplx(0, 2 * kPi) * z);
  cplx zeta = std::exp(cplx(0, 2 * kPi) * w);
  cplx s = std::exp(cplx(0, kPi) * w);
  cplx p = std::exp(cplx(0, 2 * kPi) * z / 8.0) * (s - 1.0 / s);
  for (int n = 1; n <= terms; ++n) {
    cplx qn = std::pow(q, n);
    p *= (1.0 - qn) * (1.0 - qn * zeta) * (1.0 - qn / zeta);
  }
  return p;
}

cplx num_theta(int which, cplx z, cplx w, int terms) {
  cplx acc(0, 0);
  for (int n = -terms; n <= terms; ++n) {
    double half = (which == 2) ? n + 0.5 : n;
    double sgn = (which == 4 && ((n % 2 + 2) % 2 == 1)) ? -1.0 : 1.0;
    acc += sgn * std::exp(cplx(0, 2 * kPi) * (z * half * half / 2.0 + w * half));
  }
  return acc;
}

cplx eval_q(const QSeries& s, cplx z) {
  cplx acc(0, 0);
  for (const auto& [e, v] : s.c)
    acc += static_cast<double>(v) *
           std::exp(cplx(0, 2 * kPi) * z * (static_cast<double>(e) / 24.0));
  return acc * std::pow(kPi, s.pi_pow);
}

}  // namespace

TEST_CASE("series arithmetic: ring ops, inverse, validity bookkeeping") {
  QSeries one_minus_q;  // 1 - q
  one_minus_q.set(0, 1);
  one_minus_q.set(24, -1);
  one_minus_q.valid_to = 24 * 30;

  QSeries inv = one_minus_q.inverse();
  for (long n = 0; n < 28; ++n) CHECK(inv.coeff(24 * n) == 1);
  QSeries unit;
  unit.set(0, 1);
  CHECK(q_equal(one_minus_q * inv, unit, 24 * 25));

  QSeries sq = one_minus_q * one_minus_q;
  CHECK(sq.coeff(0) == 1);
  CHECK(sq.coeff(24) == -2);
  CHECK(sq.coeff(48) == 1);
  CHECK(q_equal(one_minus_q.pow_int(2), sq, 24 * 25));
  CHECK(q_equal(one_minus_q.pow_int(-2), inv * inv, 24 * 20));

  // validity: product of series valid to A and B with lowests a, b
  QSeries f;
  f.set(24, 1);
  f.valid_to = 24 * 5;
  QSeries g;
  g.set(48, 1);
  g.valid_to = 24 * 7;
  CHECK((f * g).valid_to == std::min(24 * 5 + 48, 24 * 7 + 24));

  // q -> q^2
  QSeries r2 = one_minus_q.rescale_q(2);
  CHECK(r2.coeff(48) == -1);
  CHECK(r2.valid_to == 2 * 24 * 30);

  CHECK_THROWS_AS((void)QSeries{}.inverse(), invalid_input);
}

TEST_CASE("eta: incremental product equals the pentagonal closed form") {
  QSeries a = eta_product(60);
  QSeries b = eta_pentagonal(60);
  CHECK(q_equal(a, b, 24 * 60));
  CHECK(a.coeff(1) == 1);
  CHECK(a.coeff(25) == -1);   // q^{1/24} * (-q)
  CHECK(a.coeff(49) == -1);   // q^{1/24} * (-q^2)
  CHECK(a.coeff(121) == 1);   // q^{1/24} * (+q^5)
  CHECK(a.valid_to == 24 * 60);
}

TEST_CASE("odd theta: product route equals the sparse bilateral sum") {
  FJSeries prod = theta_odd(40);
  FJSeries sparse = sparse_odd_theta(40);
  CHECK(fj_equal(prod, sparse, 24 * 40));
  CHECK(prod.coeff(3, 1) == 1);
  CHECK(prod.coeff(3, -1) == -1);

  // numeric: series evaluation vs direct product evaluation
  cplx z(0.31, 1.13), w(0.17, 0.21);
  cplx lhs = fj_eval(theta_odd(60), z, w);
  cplx rhs = num_theta_odd(z, w, 80);
  CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(rhs)));
}

TEST_CASE("shifted thetas: null-value triple product equals 2 eta^3") {
  long T = 50;
  QSeries lhs = theta_null(2, T) * theta_null(3, T) * theta_null(4, T);
  QSeries rhs = eta_product(T).pow_int(3).scaled(rat(2));
  CHECK(q_equal(lhs, rhs, 24 * (T - 2)));

  cplx z(0.31, 1.13), w(0.17, 0.21);
  for (int which : {2, 3, 4}) {
    cplx a = fj_eval(theta_shifted(which, 60), z, w);
    cplx b = num_theta(which, z, w, 40);
    CHECK(std::abs(a - b) < 1e-10 * (1.0 + std::abs(b)));
  }
}

TEST_CASE("weight -2 index 1 form: leading row, structure, numeric ratio") {
  FJSeries f = weak_jacobi_m2_1(50);
  CHECK(f.valid_to == 24 * 50);
  CHECK(f.coeff(0, 2) == 1);
  CHECK(f.coeff(0, 0) == -2);
  CHECK(f.coeff(0, -2) == 1);
  for (const auto& [k, v] : f.c) {
    CHECK(boost::multiprecision::denominator(v) == 1);  // integral
    CHECK(f.coeff(k.first, -k.second) == v);            // r -> -r symmetry
    CHECK(k.first % 24 == 0);
    CHECK(k.second % 2 == 0);
  }
  CHECK(specialize_w0(f).c.empty());  // vanishes along w = 0

  cplx z(0.23, 1.07), w(-0.11, 0.18);
  cplx lhs = fj_eval(f, z, w);
  cplx th = num_theta_odd(z, w, 90);
  cplx rhs = th * th / std::pow(num_eta(z, 90), 6);
  CHECK(std::abs(lhs - rhs) < 1e-9 * (1.0 + std::abs(rhs)));
}

TEST_CASE("weight 0 index 1 form: leading row, structure, numeric ratio") {
  FJSeries f = weak_jacobi_0_1(50);
  CHECK(f.coeff(0, 2) == 1);
  CHECK(f.coeff(0, 0) == 10);
  CHECK(f.coeff(0, -2) == 1);
  for (const auto& [k, v] : f.c) {
    CHECK(boost::multiprecision::denominator(v) == 1);
    CHECK(f.coeff(k.first, -k.second) == v);
    CHECK(k.first % 24 == 0);
    CHECK(k.second % 2 == 0);
  }
  QSeries at0 = specialize_w0(f);  // the three ratios each collapse to 1
  CHECK(at0.coeff(0) == 12);
  CHECK(at0.c.size() == 1);

  cplx z(0.23, 1.07), w(-0.11, 0.18);
  cplx lhs = fj_eval(f, z, w);
  cplx rhs(0, 0);
  for (int which : {2, 3, 4}) {
    cplx r = num_theta(which, z, w, 40) / num_theta(which, z, 0.0, 40);
    rhs += 4.0 * r * r;
  }
  CHECK(std::abs(lhs - rhs) < 1e-9 * (1.0 + std::abs(rhs)));
}

TEST_CASE("Eisenstein q-series: weight-2 normalization and E4^2 = E8") {
  QSeries g2 = eisenstein_series(2, 40);
  CHECK(g2.pi_pow == 2);
  CHECK(g2.coeff(0) == rat(1, 3));
  CHECK(q_equal(g2, e2_series(40).scaled(rat(1, 3)).with_pi(2), 24 * 40));

  QSeries g4 = eisenstein_series(4, 30);
  CHECK(g4.coeff(0) == rat(1, 45));        // 2 zeta(4) / pi^4
  CHECK(g4.coeff(24) == rat(16, 3));       // 2 (2 pi i)^4 / 3! * sigma_3(1)
  QSeries g6 = eisenstein_series(6, 30);
  CHECK(g6.coeff(0) == rat(2, 945));       // 2 zeta(6) / pi^6
  QSeries g8 = eisenstein_series(8, 30);
  CHECK(g8.coeff(0) == rat(1, 4725));      // 2 zeta(8) / pi^8

  // E4^2 = E8 translated to the G-normalization
  rat c4 = g4.coeff(0), c8 = g8.coeff(0);
  CHECK(q_equal((g4 * g4).scaled(c8 / (c4 * c4)), g8, 24 * 28));

  // cross-module: exact series vs the analytic weight-2 evaluator
  cplx z(0.19, 0.97);
  cplx exact = eval_q(e2_series(60), z);
  cplx direct = e2_qseries(z, 0);
  CHECK(std::abs(exact - direct) < 1e-11 * (1.0 + std::abs(direct)));
}

TEST_CASE("index-1 heat pair intertwines with the coefficient merge") {
  for (int pick : {0, 1}) {
    FJSeries f = pick == 0 ? weak_jacobi_m2_1(30) : weak_jacobi_0_1(30);
    QSeries lhs = ez_map(heat_apply(f));
    QSeries rhs = heat_target(ez_map(f));
    long upto = std::min(lhs.valid_to, rhs.valid_to);
    CHECK(upto >= 24 * 20 * 4);  // covers target exponents through q'^80
    CHECK(q_equal(lhs, rhs, upto));
  }
}

TEST_CASE("theta decomposition: components, reconstruction, rejection") {
  FJSeries f = weak_jacobi_m2_1(50);
  ThetaComponents comps = theta_decompose(f);
  CHECK(comps.h1.coeff(24 * -1) == 1);   // the q^0 zeta^{+-1} row
  CHECK(comps.h0.coeff(0) == -2);
  for (const auto& [e, v] : comps.h0.c) CHECK(((e / 24) % 4 + 4) % 4 == 0);
  for (const auto& [e, v] : comps.h1.c) CHECK(((e / 24) % 4 + 4) % 4 == 3);

  FJSeries back = theta_reconstruct(comps, 50);
  long upto = std::min(back.valid_to, f.valid_to);
  CHECK(upto >= 24 * 20);
  CHECK(fj_equal(back, f, upto));

  // the merge agrees with the components on their residue classes
  QSeries h = ez_map(f);
  for (const auto& [e, v] : comps.h0.c)
    if (e < h.valid_to) CHECK(h.coeff(e) == v);
  for (const auto& [e, v] : comps.h1.c)
    if (e < h.valid_to) CHECK(h.coeff(e) == v);

  // perturb one coefficient: the (4n - r^2, r mod 2) dependence breaks
  FJSeries bad = f;
  bad.set(24, 0, bad.coeff(24, 0) + 1);
  CHECK_THROWS_AS((void)theta_decompose(bad), NotThetaDecomposable);

  // fractional grids are rejected
  FJSeries frac = theta_odd(10);
  CHECK_THROWS_AS((void)theta_decompose(frac), NotThetaDecomposable);
}

TEST_CASE("holomorphy-corrected heat pair commutes with the merge exactly") {
  struct Case {
    int pick, k;
  } cases[] = {{0, -2}, {1, 0}, {0, 5}};
  for (const auto& cs : cases) {
    FJSeries f = cs.pick == 0 ? weak_jacobi_m2_1(50) : weak_jacobi_0_1(50);
    QSeries lhs = ez_map(serre_jacobi(f, cs.k));
    QSeries rhs = serre_modular(ez_map(f), cs.k);
    long upto = std::min(lhs.valid_to, rhs.valid_to);
    CHECK(upto >= 24 * 30 * 4);  // target exponents at least through q'^120
    CHECK(q_equal(lhs, rhs, upto));
  }
}

TEST_CASE("series-backed map: values and partials against the oracle") {
  FJSeries f = weak_jacobi_m2_1(60);
  MapPtr map = fj_to_map(f);
  CHECK(map->holomorphic());
  Point x(Mat::Constant(1, 1, cplx(0.27, 1.21)), Mat::Constant(1, 1, cplx(0.13, 0.17)));
  CHECK(std::abs(map->eval(x) - fj_eval(f, cplx(0.27, 1.21), cplx(0.13, 0.17))) <
        1e-13);
  for (MultiIndex mi : {MultiIndex{0}, MultiIndex{1}, MultiIndex{0, 0},
                        MultiIndex{0, 1}, MultiIndex{1, 1}, MultiIndex{0, 1, 1}}) {
    cplx a = map->partial(x, mi);
    cplx b = fd_partial(*map, x, mi);
    CHECK(std::abs(a - b) < 2e-6 * (1.0 + std::abs(a)));
  }
  CHECK(map->partial(x, {2}) == cplx(0.0, 0.0));  // antiholomorphic
  CHECK(map->partial(x, {3}) == cplx(0.0, 0.0));

  // truncation guard: too-short series at a low point must refuse to evaluate
  CHECK_THROWS_AS((void)fj_eval(weak_jacobi_m2_1(3), cplx(0.0, 0.4), cplx(0.0, 0.0)),
                  numeric_guard);
  CHECK_THROWS_AS((void)fj_eval(f, cplx(0.0, -1.0), cplx(0.0, 0.0)), numeric_guard);
}

TEST_CASE("CSV serialization: pinned header, determinism, round trip") {
  FJSeries f = weak_jacobi_0_1(12);
  std::string text = fj_csv(f, 0, 1, 10);
  std::string again = fj_csv(weak_jacobi_0_1(12), 0, 1, 10);
  CHECK(text == again);

  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  CHECK(header == "# weight 0 index 1 dq 24 dz 2 trunc 10");
  CsvHeader h = parse_csv_header(header);
  CHECK(h.weight == 0);
  CHECK(h.index == 1);
  CHECK(h.dq == 24);
  CHECK(h.dz == 2);
  CHECK(h.trunc == 10);

  FJSeries back;
  back.valid_to = 24 * h.trunc;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    long n24, r2;
    bigint num, den;
    char comma;
    ls >> n24 >> comma >> r2 >> comma >> num >> comma >> den;
    back.set(n24, r2, rat(num, den));
  }
  CHECK(fj_equal(back, f, 24 * 10));

  FJSeries withpi = f.with_pi(2);
  CHECK_THROWS_AS((void)fj_csv(withpi, 0, 1, 10), invalid_input);
  CHECK_THROWS_AS((void)parse_csv_header("# weight 0 index 1 dq 12 dz 2 trunc 5"),
                  invalid_input);
}
