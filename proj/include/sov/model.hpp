// Chain definition: algebra kind, local dimension, sites, inhomogeneities,
// twist. The inhomogeneity separation conditions are enforced at construction,
// exactly in the rational field and with a margin in the complex one.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sov/linalg.hpp"
#include "sov/scalar.hpp"

namespace sov {

enum class Algebra { RationalGL, Trig6V };

template <class T>
struct ModelSpec {
  Algebra algebra = Algebra::RationalGL;
  int n = 2;                    // local dimension
  int N = 1;                    // sites
  T eta{};
  std::vector<T> xi;
  Mat<T> twist;

  // Trig6V bookkeeping: twist = prefactor * K^{(a,alpha)}
  int twist_a = 0;
  T twist_alpha{};
  T twist_prefactor = T(1);

  Eigen::Index dim() const { return ipow(n, N); }

  /// Grid point ξ_a - h η (site index 1-based).
  T grid(int a, int h) const { return xi[a - 1] - T(h) * eta; }

  /// d(λ) = Π (λ - ξ_a) and a(λ) = d(λ + η), sinh analogues for Trig6V.
  T d_poly(const T& lambda) const {
    T p = T(1);
    for (const T& x : xi) p *= local_factor(lambda - x);
    return p;
  }
  T a_poly(const T& lambda) const { return d_poly(lambda + eta); }

  T local_factor(const T& z) const {
    if constexpr (is_exact_v<T>) {
      return z;
    } else {
      return algebra == Algebra::Trig6V ? std::sinh(z) : z;
    }
  }
};

using ModelSpecC = ModelSpec<Cplx>;
using ModelSpecR = ModelSpec<Rat>;

/// K^{(a,α)}: diag(e^α, e^{-α}) for a = 0, antidiag(e^α, e^{-α}) for a = 1.
inline MatC twist_trig(int a, Cplx alpha, Cplx prefactor = Cplx(1)) {
  MatC k = MatC::Zero(2, 2);
  if (a == 0) {
    k(0, 0) = std::exp(alpha);
    k(1, 1) = std::exp(-alpha);
  } else if (a == 1) {
    k(0, 1) = std::exp(alpha);
    k(1, 0) = std::exp(-alpha);
  } else {
    throw std::invalid_argument("twist_trig: a must be 0 or 1");
  }
  return prefactor * k;
}

namespace detail {

inline int inhomog_range(Algebra alg, int n) {
  // ξ_a ≠ ξ_b + r η with r in {-1,0,1} for n=2, {-2,...,2} for n=3
  return (alg == Algebra::RationalGL && n >= 3) ? 2 : 1;
}

}  // namespace detail

template <class T>
bool inhomogeneity_ok(const ModelSpec<T>& spec, double margin_factor = 0.1) {
  const int rmax = detail::inhomog_range(spec.algebra, spec.n);
  for (int a = 0; a < spec.N; ++a)
    for (int b = 0; b < spec.N; ++b) {
      if (a == b) continue;
      for (int r = -rmax; r <= rmax; ++r) {
        if constexpr (is_exact_v<T>) {
          if (spec.xi[a] == spec.xi[b] + T(r) * spec.eta) return false;
        } else {
          Cplx diff = spec.xi[a] - spec.xi[b] - T(r) * spec.eta;
          double margin = margin_factor * std::abs(spec.eta);
          if (spec.algebra == Algebra::Trig6V) {
            // exclusions are mod iπ
            if (std::abs(std::sinh(diff)) < margin) return false;
          } else {
            if (std::abs(diff) < margin) return false;
          }
        }
      }
    }
  return true;
}

template <class T>
void validate(const ModelSpec<T>& spec) {
  if (spec.N < 1) throw std::invalid_argument("ModelSpec: N must be positive");
  if (static_cast<int>(spec.xi.size()) != spec.N)
    throw std::invalid_argument("ModelSpec: xi size != N");
  if (spec.twist.rows() != spec.n || spec.twist.cols() != spec.n)
    throw std::invalid_argument("ModelSpec: twist dimension mismatch");
  if (spec.algebra == Algebra::Trig6V) {
    if constexpr (is_exact_v<T>)
      throw std::invalid_argument("ModelSpec: trig models are float-only");
    if (spec.n != 2) throw std::invalid_argument("ModelSpec: Trig6V forces n = 2");
  }
  if (!inhomogeneity_ok(spec))
    throw std::invalid_argument("ModelSpec: inhomogeneity condition violated");
}

inline ModelSpecC make_gl_rational(int n, int N, Cplx eta, std::vector<Cplx> xi, MatC twist) {
  ModelSpecC s;
  s.algebra = Algebra::RationalGL;
  s.n = n;
  s.N = N;
  s.eta = eta;
  s.xi = std::move(xi);
  s.twist = std::move(twist);
  validate(s);
  return s;
}

inline ModelSpecR make_gl_rational_exact(int n, int N, Rat eta, std::vector<Rat> xi, MatR twist) {
  ModelSpecR s;
  s.algebra = Algebra::RationalGL;
  s.n = n;
  s.N = N;
  s.eta = eta;
  s.xi = std::move(xi);
  s.twist = std::move(twist);
  validate(s);
  return s;
}

inline ModelSpecC make_trig(int N, Cplx eta, std::vector<Cplx> xi, int a, Cplx alpha,
                            Cplx prefactor = Cplx(1)) {
  ModelSpecC s;
  s.algebra = Algebra::Trig6V;
  s.n = 2;
  s.N = N;
  s.eta = eta;
  s.xi = std::move(xi);
  s.twist = twist_trig(a, alpha, prefactor);
  s.twist_a = a;
  s.twist_alpha = alpha;
  s.twist_prefactor = prefactor;
  validate(s);
  return s;
}

}  // namespace sov
