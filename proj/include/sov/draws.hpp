// Deterministic parameter generation. Exact draws use distinct small
// rationals with mixed denominators (sparse integer patterns hit the
// degeneracy varieties measurably often; rational draws do not); float draws
// sample a disc with pairwise-separation rejection enforcing the
// inhomogeneity conditions with a 0.1|η| margin.
#pragma once

#include "sov/charge_algebra.hpp"
#include "sov/model.hpp"
#include "sov/rng.hpp"

namespace sov {

inline MatR draw_twist_exact(Rng& rng, int n, bool require_w_simple = true) {
  while (true) {
    MatR k(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) k(i, j) = rng.rational(12, 3);
    if (!require_w_simple || w_simple_check(k).is_w_simple) return k;
  }
}

inline ModelSpecR draw_exact_spec(Rng& rng, int n, int N, bool require_w_simple = true) {
  while (true) {
    ModelSpecR s;
    s.algebra = Algebra::RationalGL;
    s.n = n;
    s.N = N;
    s.eta = rng.nonzero_rational(6, 2);
    for (int a = 0; a < N; ++a) s.xi.push_back(rng.rational(10, 3));
    s.twist = draw_twist_exact(rng, n, require_w_simple);
    if (inhomogeneity_ok(s)) return s;
  }
}

inline RowVec<Rat> draw_covector_exact(Rng& rng, Eigen::Index d) {
  RowVec<Rat> s(d);
  while (true) {
    for (Eigen::Index i = 0; i < d; ++i) s(i) = rng.rational(12, 3);
    if (s.squaredNorm() != 0) return s;
  }
}

inline MatC draw_twist_float(Rng& rng, int n, bool require_w_simple = true) {
  while (true) {
    MatC k(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) k(i, j) = rng.complex_in_disc(1.0);
    if (!require_w_simple) return k;
    auto cert = w_simple_check(k);
    if (cert.is_w_simple && !cert.inconclusive) return k;
  }
}

/// Diagonalizable with simple spectrum and a healthy eigenvalue gap.
inline MatC draw_twist_simple_spectrum(Rng& rng, int n, double gap = 0.1) {
  while (true) {
    MatC k = draw_twist_float(rng, n, false);
    auto ep = eigen_decompose(k);
    if (ep.min_gap > gap) return k;
  }
}

inline ModelSpecC draw_float_spec(Rng& rng, int n, int N, bool require_w_simple = true) {
  while (true) {
    ModelSpecC s;
    s.algebra = Algebra::RationalGL;
    s.n = n;
    s.N = N;
    s.eta = Cplx(0.8, 0.2) + rng.complex_in_disc(0.3);
    for (int a = 0; a < N; ++a) s.xi.push_back(rng.complex_in_disc(1.5));
    s.twist = draw_twist_float(rng, n, require_w_simple);
    if (inhomogeneity_ok(s)) return s;
  }
}

inline ModelSpecC draw_trig_spec(Rng& rng, int N, int twist_a) {
  while (true) {
    ModelSpecC s;
    s.algebra = Algebra::Trig6V;
    s.n = 2;
    s.N = N;
    s.eta = Cplx(0.55, 0.15) + rng.complex_in_disc(0.2);
    for (int a = 0; a < N; ++a) s.xi.push_back(rng.complex_in_disc(1.0));
    s.twist_a = twist_a;
    s.twist_alpha = Cplx(0.5, 0.3) + rng.complex_in_disc(0.25);
    s.twist = twist_trig(twist_a, s.twist_alpha);
    if (inhomogeneity_ok(s)) return s;
  }
}

inline RowVecC draw_covector_float(Rng& rng, Eigen::Index d) {
  RowVecC s(d);
  for (Eigen::Index i = 0; i < d; ++i) s(i) = rng.complex_in_disc(1.0);
  return s;
}

}  // namespace sov
