#pragma once

// Twisted Eisenstein factors on H x C used as zeroth-order coefficients of
// holomorphy-restoring operators:
//
//   g1(z, w) = pi cot(pi w) - 2 pi i sum_{a,r >= 1} q^{ar} (zeta^r - zeta^-r)
//   g2(z, w) = pi^2/sin^2(pi w) - 4 pi^2 sum_{a,r >= 1} r q^{ar} (zeta^r + zeta^-r)
//   gee2(z)  = pi^2 E2(z) / 3,   E2 = 1 - 24 sum sigma_1(n) q^n
//   e1hat    = (i / 2 pi) g1
//
// with q = e^{2 pi i z}, zeta = e^{2 pi i w}.  Every evaluator comes in two
// independent routes: a production q-series (fast, used by the operator
// layer) and a lattice partial sum over |a| <= A whose inner b-sums are the
// closed cotangent forms (slow oracle with a doubling-based error estimate).

#include "common.hpp"
#include "smoothmap.hpp"

namespace sj {

// sum_{b in Z} 1/(t+b)^k for k >= 1 (k = 1 in the symmetric-limit sense);
// computed as pi^k Q_k(cot(pi t)) with Q_{k+1} = (1+c^2) Q_k' / k.
cplx lattice_b_sum(int k, cplx t);

// Numerically stable cot(pi t) via one-sided exponentials.
cplx cot_pi(cplx t);

struct LatticeValue {
  cplx value;      // partial sum at outer bound 2A
  double est_err;  // |sum_A - sum_2A|, a doubling convergence estimate
};

// d^p/dz^p d^q/dw^q of the three functions via lattice partial sums.
LatticeValue g1_lattice(cplx z, cplx w, int p, int q, int A);
LatticeValue g2_lattice(cplx z, cplx w, int p, int q, int A);
LatticeValue gee2_lattice(cplx z, int p, int A);

// Production q-series evaluators; throw numeric_guard when (z, w) is outside
// the convergence annulus |Im w| < Im z - margin or too close to a pole
// w in Z (mixed partial orders up to 8 are supported).
cplx g1_qseries(cplx z, cplx w, int p, int q);
cplx g2_qseries(cplx z, cplx w, int p, int q);
cplx e2_qseries(cplx z, int p);
cplx gee2_qseries(cplx z, int p);
cplx e1hat_qseries(cplx z, cplx w, int p, int q);

// Holomorphic coefficient maps on H_{1,m} (n = 1 only): the factor evaluated
// at (z, w_t) for the chosen row t of W, with exact termwise partials.
MapPtr map_g1(const CoordSystem& cs, int wrow);
MapPtr map_g2w(const CoordSystem& cs, int wrow);
MapPtr map_e1hat(const CoordSystem& cs, int wrow);
MapPtr map_gee2(const CoordSystem& cs);

}  // namespace sj
