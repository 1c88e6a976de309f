// R-matrices and the algebraic certificates (Yang-Baxter and scalar
// Yang-Baxter residuals) that pin down the building blocks.
#pragma once

#include <cmath>
#include <stdexcept>
#include <type_traits>

#include "sov/linalg.hpp"
#include "sov/model.hpp"

namespace sov {

/// Rational gl_n R-matrix λ I + η P on C^n (x) C^n.
template <class T>
Mat<T> rational_r(int n, const std::type_identity_t<T>& lambda, const std::type_identity_t<T>& eta) {
  if (n < 2) throw std::invalid_argument("rational_r: n >= 2 required");
  Mat<T> r = permutation_op<T>(n);
  r *= eta;
  for (Eigen::Index i = 0; i < r.rows(); ++i) r(i, i) += lambda;
  return r;
}

/// Trigonometric 6-vertex R-matrix (float-only).
inline MatC trig_r(const Cplx& lambda, const Cplx& eta) {
  MatC r = MatC::Zero(4, 4);
  Cplx sp = std::sinh(lambda + eta), s = std::sinh(lambda), se = std::sinh(eta);
  r(0, 0) = sp;
  r(3, 3) = sp;
  r(1, 1) = s;
  r(2, 2) = s;
  r(1, 2) = se;
  r(2, 1) = se;
  return r;
}

template <class T>
Mat<T> model_r(const ModelSpec<T>& spec, const std::type_identity_t<T>& lambda) {
  if constexpr (is_exact_v<T>) {
    return rational_r<T>(spec.n, lambda, spec.eta);
  } else {
    return spec.algebra == Algebra::Trig6V ? trig_r(lambda, spec.eta)
                                           : rational_r<T>(spec.n, lambda, spec.eta);
  }
}

/// Relative residual of R12(λ-μ) R13(λ) R23(μ) = R23(μ) R13(λ) R12(λ-μ).
template <class T, class RFn>
residual_t<T> ybe_residual_impl(int n, RFn&& r_of, const std::type_identity_t<T>& lambda, const std::type_identity_t<T>& mu) {
  const Eigen::Index dim = ipow(n, 3);
  Mat<T> lhs = identity<T>(dim), rhs = identity<T>(dim);
  Mat<T> r12 = r_of(lambda - mu), r13 = r_of(lambda), r23 = r_of(mu);
  left_apply_two_leg(r23, 1, 2, n, 3, lhs);
  left_apply_two_leg(r13, 0, 2, n, 3, lhs);
  left_apply_two_leg(r12, 0, 1, n, 3, lhs);
  left_apply_two_leg(r12, 0, 1, n, 3, rhs);
  left_apply_two_leg(r13, 0, 2, n, 3, rhs);
  left_apply_two_leg(r23, 1, 2, n, 3, rhs);
  return rel_deviation(lhs, rhs);
}

template <class T>
residual_t<T> ybe_residual_rational(int n, const std::type_identity_t<T>& lambda, const std::type_identity_t<T>& mu, const std::type_identity_t<T>& eta) {
  return ybe_residual_impl<T>(
      n, [&](const T& z) { return rational_r<T>(n, z, eta); }, lambda, mu);
}

inline double ybe_residual_trig(const Cplx& lambda, const Cplx& mu, const Cplx& eta) {
  return ybe_residual_impl<Cplx>(
      2, [&](const Cplx& z) { return trig_r(z, eta); }, lambda, mu);
}

/// Relative residual of R12 K1 K2 = K2 K1 R12 (scalar Yang-Baxter equation).
template <class T>
residual_t<T> scalar_ybe_residual(const Mat<T>& r, const Mat<T>& k) {
  const int n = static_cast<int>(k.rows());
  Mat<T> k1 = kron(k, identity<T>(n));
  Mat<T> k2 = kron(identity<T>(n), k);
  return rel_deviation<T>(r * k1 * k2, k2 * k1 * r);
}

template <class T>
residual_t<T> scalar_ybe_residual_rational(int n, const Mat<T>& k, const std::type_identity_t<T>& lambda, const std::type_identity_t<T>& eta) {
  return scalar_ybe_residual(rational_r<T>(n, lambda, eta), k);
}

inline double scalar_ybe_residual_trig(const MatC& k, const Cplx& lambda, const Cplx& eta) {
  return scalar_ybe_residual(trig_r(lambda, eta), k);
}

}  // namespace sov
