// Monodromy matrices, the fundamental transfer matrix T1, the gl_3 fused
// transfer T2 and quantum determinant, and the fusion-identity certificates.
// Operators carry their auxiliary legs first, then sites 1..N slow-to-fast.
#pragma once

#include <cmath>
#include <map>
#include <type_traits>
#include <stdexcept>
#include <vector>

#include "sov/interp.hpp"
#include "sov/linalg.hpp"
#include "sov/model.hpp"
#include "sov/rmatrix.hpp"

namespace sov {

/// M_a(λ) = K_a R_{aN}(λ-ξ_N) ... R_{a1}(λ-ξ_1) on V_a (x) H.
template <class T>
Mat<T> monodromy(const ModelSpec<T>& spec, const std::type_identity_t<T>& lambda) {
  const int legs = spec.N + 1;
  Mat<T> m = identity<T>(ipow(spec.n, legs));
  for (int site = 1; site <= spec.N; ++site) {
    // rightmost factor R_{a1} first, so left-applying in site order builds
    // R_{aN} ... R_{a1}
    left_apply_two_leg(model_r(spec, lambda - spec.xi[site - 1]), 0, site, spec.n, legs, m);
  }
  left_apply_one_leg(spec.twist, 0, spec.n, legs, m);
  return m;
}

/// Block (i,j) of the monodromy with respect to the auxiliary leg
/// (gl_2: A = (0,0), B = (0,1), C = (1,0), D = (1,1)).
template <class T>
Mat<T> monodromy_block(const Mat<T>& m, int i, int j, Eigen::Index block_dim) {
  return m.block(i * block_dim, j * block_dim, block_dim, block_dim);
}

template <class T>
Mat<T> transfer1(const ModelSpec<T>& spec, const std::type_identity_t<T>& lambda) {
  return partial_trace_aux(monodromy(spec, lambda), spec.n);
}

/// Scalar gl_2 quantum determinant a(λ) d(λ-η) det K.
template <class T>
T qdet2_scalar(const ModelSpec<T>& spec, const std::type_identity_t<T>& lambda) {
  T det_k = spec.twist(0, 0) * spec.twist(1, 1) - spec.twist(0, 1) * spec.twist(1, 0);
  return spec.a_poly(lambda) * spec.d_poly(lambda - spec.eta) * det_k;
}

/// Residual of the operator identity A(λ)D(λ-η) - B(λ)C(λ-η) = qdet * Id.
template <class T>
residual_t<T> qdet2_operator_residual(const ModelSpec<T>& spec, const std::type_identity_t<T>& lambda) {
  const Eigen::Index d = spec.dim();
  Mat<T> m1 = monodromy(spec, lambda);
  Mat<T> m2 = monodromy(spec, lambda - spec.eta);
  Mat<T> lhs = monodromy_block(m1, 0, 0, d) * monodromy_block(m2, 1, 1, d) -
               monodromy_block(m1, 0, 1, d) * monodromy_block(m2, 1, 0, d);
  Mat<T> rhs = qdet2_scalar(spec, lambda) * identity<T>(d);
  return rel_deviation(lhs, rhs);
}

// ---------------------------------------------------------------------------
// gl_3 fusion
// ---------------------------------------------------------------------------

/// Antisymmetrizer (1/3!) Σ_σ sgn(σ) P_σ on (C^n)^(x)3.
template <class T>
Mat<T> antisymmetrizer3(int n) {
  const Eigen::Index d = ipow(n, 3);
  Mat<T> p = Mat<T>::Zero(d, d);
  const int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {1, 0, 2}, {2, 1, 0}};
  const int signs[6] = {1, 1, 1, -1, -1, -1};
  for (int s = 0; s < 6; ++s) {
    const int* pi = perms[s];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          int src[3] = {i, j, k};
          // P_σ |v_1 v_2 v_3> = |v_{σ^{-1}(1)} v_{σ^{-1}(2)} v_{σ^{-1}(3)}>
          Eigen::Index row = (src[pi[0]] * n + src[pi[1]]) * n + src[pi[2]];
          Eigen::Index col = (i * n + j) * n + k;
          p(row, col) += T(signs[s]);
        }
  }
  return p / T(6);
}

/// P^-_{abc} M_a(λ) M_b(λ+η) assembled on V_a (x) V_b (x) V_c (x) H with
/// structured leg applications.
template <class T>
Mat<T> fused_kernel(const ModelSpec<T>& spec, const std::type_identity_t<T>& lambda) {
  const int n = spec.n, legs = spec.N + 3;
  Mat<T> x = kron(antisymmetrizer3<T>(n), identity<T>(spec.dim()));
  // right-multiply by M_a(λ): factors K_a, then R_{aN}, ..., R_{a1}
  right_apply_one_leg(spec.twist, 0, n, legs, x);
  for (int site = spec.N; site >= 1; --site)
    right_apply_two_leg(model_r(spec, lambda - spec.xi[site - 1]), 0, site + 2, n, legs, x);
  // then by M_b(λ+η)
  right_apply_one_leg(spec.twist, 1, n, legs, x);
  for (int site = spec.N; site >= 1; --site)
    right_apply_two_leg(model_r(spec, lambda + spec.eta - spec.xi[site - 1]), 1, site + 2, n, legs, x);
  return x;
}

/// Fused monodromy U_a(λ) on V_a (x) H, defined through
/// U_c(λ)^t = 3 tr_{ab} P^-_{abc} M_a(λ) M_b(λ+η); the partial transpose on
/// the auxiliary leg is fixed by requiring the quantum-determinant exchange
/// identities with M to hold.
template <class T>
Mat<T> fused_u(const ModelSpec<T>& spec, const std::type_identity_t<T>& lambda) {
  Mat<T> traced = partial_trace_leading(fused_kernel(spec, lambda), ipow(spec.n, 2));
  traced *= T(3);
  return partial_transpose_aux(traced, spec.n);
}

template <class T>
Mat<T> transfer2(const ModelSpec<T>& spec, const std::type_identity_t<T>& lambda) {
  return partial_trace_aux(fused_u(spec, lambda), spec.n);
}

/// Scalar gl_3 quantum determinant det K Π (λ-ξ_b)(λ+η-ξ_b)(λ+3η-ξ_b).
template <class T>
T qdet3_scalar(const ModelSpec<T>& spec, const std::type_identity_t<T>& lambda) {
  T det_k;
  if constexpr (is_exact_v<T>) {
    det_k = det_exact(spec.twist);
  } else {
    det_k = Eigen::PartialPivLU<MatC>(spec.twist).determinant();
  }
  T p = det_k;
  for (const T& x : spec.xi)
    p *= (lambda - x) * (lambda + spec.eta - x) * (lambda + T(3) * spec.eta - x);
  return p;
}

/// tr_{123} P^- M_1(λ) M_2(λ+η) M_3(λ+2η) as an operator on H; a central
/// multiple of the identity.
template <class T>
Mat<T> qdet3_operator(const ModelSpec<T>& spec, const std::type_identity_t<T>& lambda) {
  const int n = spec.n, legs = spec.N + 3;
  Mat<T> x = kron(antisymmetrizer3<T>(n), identity<T>(spec.dim()));
  for (int aux = 0; aux < 3; ++aux) {
    T shift = lambda + T(aux) * spec.eta;
    right_apply_one_leg(spec.twist, aux, n, legs, x);
    for (int site = spec.N; site >= 1; --site)
      right_apply_two_leg(model_r(spec, shift - spec.xi[site - 1]), aux, site + 2, n, legs, x);
  }
  return partial_trace_leading(x, ipow(n, 3));
}

template <class T>
residual_t<T> qdet3_central_residual(const ModelSpec<T>& spec, const std::type_identity_t<T>& lambda) {
  Mat<T> lhs = qdet3_operator(spec, lambda);
  Mat<T> rhs = qdet3_scalar(spec, lambda) * identity<T>(spec.dim());
  return rel_deviation(lhs, rhs);
}

/// Residuals of the four orderings of the exchange identity
/// qdet * Id = M^{t_a}(λ) U(λ+η) = U(λ+η) M^{t_a}(λ)
///           = U^{t_a}(λ) M(λ+2η) = M(λ+2η) U^{t_a}(λ).
template <class T>
std::vector<residual_t<T>> qdet3_exchange_residuals(const ModelSpec<T>& spec, const std::type_identity_t<T>& lambda) {
  Mat<T> m0 = partial_transpose_aux(monodromy(spec, lambda), spec.n);
  Mat<T> u1 = fused_u(spec, lambda + spec.eta);
  Mat<T> ut = partial_transpose_aux(fused_u(spec, lambda), spec.n);
  Mat<T> m2 = monodromy(spec, lambda + T(2) * spec.eta);
  Mat<T> rhs = qdet3_scalar(spec, lambda) * identity<T>(spec.n * spec.dim());
  return {rel_deviation<T>(m0 * u1, rhs), rel_deviation<T>(u1 * m0, rhs),
          rel_deviation<T>(ut * m2, rhs), rel_deviation<T>(m2 * ut, rhs)};
}

// ---------------------------------------------------------------------------
// Interpolation data shared by the spectrum modules
// ---------------------------------------------------------------------------

template <class T>
T trace_of(const Mat<T>& m) {
  return m.trace();
}

template <class T>
T t2_leading(const ModelSpec<T>& spec) {
  T tr = spec.twist.trace();
  T tr2 = (spec.twist * spec.twist).trace();
  return (tr * tr - tr2) / T(2);
}

/// f_{a,h=1}(λ) = Π_{b≠a} (λ-ξ_b+η)/(ξ_a-ξ_b) * Π_b (λ-ξ_b)/(ξ_a-η-ξ_b):
/// the Lagrange weight of the node ξ_a-η on the 2N-point grid {ξ_b, ξ_b-η}.
template <class T>
T f_weight_h1(const ModelSpec<T>& spec, int a, const std::type_identity_t<T>& lambda) {
  T w = T(1);
  for (int b = 1; b <= spec.N; ++b) {
    if (b != a) w *= (lambda - spec.xi[b - 1] + spec.eta) / (spec.xi[a - 1] - spec.xi[b - 1]);
    w *= (lambda - spec.xi[b - 1]) / (spec.xi[a - 1] - spec.eta - spec.xi[b - 1]);
  }
  return w;
}

/// T_{2,h=1}^{(K,∞)}(λ) = (tr K)^2 - tr K^2)/2 * Π (λ-ξ_n)(λ-ξ_n+η).
template <class T>
T t2_infinity_h1(const ModelSpec<T>& spec, const std::type_identity_t<T>& lambda) {
  T p = t2_leading(spec);
  for (const T& x : spec.xi) p *= (lambda - x) * (lambda - x + spec.eta);
  return p;
}

/// T2 reconstructed from T1 through the fusion interpolation formula
/// T2(λ) = T_{2,1}^{(K,∞)}(λ) + Σ_a f_{a,1}(λ) T1(ξ_a-η) T1(ξ_a).
template <class T>
Mat<T> transfer2_from_t1(const ModelSpec<T>& spec, const std::type_identity_t<T>& lambda) {
  Mat<T> acc = t2_infinity_h1(spec, lambda) * identity<T>(spec.dim());
  for (int a = 1; a <= spec.N; ++a)
    acc += f_weight_h1(spec, a, lambda) *
           (transfer1(spec, spec.xi[a - 1] - spec.eta) * transfer1(spec, spec.xi[a - 1]));
  return acc;
}

// ---------------------------------------------------------------------------
// Node cache
// ---------------------------------------------------------------------------

/// Lazily materialized transfer-matrix values on the grid ξ_a - h η; every
/// downstream formula consumes only these points. Immutable once a point is
/// built.
template <class T>
class TransferFamily {
 public:
  explicit TransferFamily(ModelSpec<T> spec) : spec_(std::move(spec)) {}

  const ModelSpec<T>& spec() const { return spec_; }

  /// T1 at ξ_a - h η (a 1-based).
  const Mat<T>& node(int a, int h) const {
    auto key = std::make_pair(a, h);
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, transfer1(spec_, spec_.grid(a, h))).first;
    return it->second;
  }

  Mat<T> at(const std::type_identity_t<T>& lambda) const { return transfer1(spec_, lambda); }

  /// Degree-N reconstruction of T1 from its N primary nodes plus the central
  /// asymptotic (rational models).
  Mat<T> interpolated(const std::type_identity_t<T>& lambda) const {
    Mat<T> acc = spec_.twist.trace() * identity<T>(spec_.dim());
    for (const T& x : spec_.xi) acc *= (lambda - x);
    for (int a = 1; a <= spec_.N; ++a) {
      T w = T(1);
      for (int b = 1; b <= spec_.N; ++b) {
        if (b == a) continue;
        w *= (lambda - spec_.xi[b - 1]) / (spec_.xi[a - 1] - spec_.xi[b - 1]);
      }
      acc += w * node(a, 0);
    }
    return acc;
  }

  residual_t<T> commutation_residual(const std::type_identity_t<T>& lambda, const std::type_identity_t<T>& mu) const {
    Mat<T> a = at(lambda), b = at(mu);
    return rel_deviation<T>(a * b, b * a);
  }

 private:
  ModelSpec<T> spec_;
  mutable std::map<std::pair<int, int>, Mat<T>> cache_;
};

/// Per-point relative residuals of the fusion identities as operator
/// equations: gl_2 T(ξ_a)T(ξ_a-η) = qdet(ξ_a) Id; gl_3 both displayed
/// families.
template <class T>
struct FusionReport {
  std::vector<residual_t<T>> per_point;
  residual_t<T> max_residual{};
};

template <class T>
FusionReport<T> fusion_residual(const ModelSpec<T>& spec) {
  FusionReport<T> rep;
  auto push = [&rep](residual_t<T> r) {
    rep.per_point.push_back(r);
    if (rep.per_point.size() == 1 || rep.max_residual < r) rep.max_residual = r;
  };
  if (spec.n == 2) {
    for (int a = 1; a <= spec.N; ++a) {
      Mat<T> lhs = transfer1(spec, spec.grid(a, 0)) * transfer1(spec, spec.grid(a, 1));
      Mat<T> rhs = qdet2_scalar(spec, spec.grid(a, 0)) * identity<T>(spec.dim());
      push(rel_deviation(lhs, rhs));
    }
  } else if (spec.n == 3) {
    for (int a = 1; a <= spec.N; ++a) {
      T xa = spec.xi[a - 1];
      Mat<T> lhs1 = transfer1(spec, xa) * transfer2(spec, xa - T(2) * spec.eta);
      Mat<T> rhs1 = qdet3_scalar(spec, xa - T(2) * spec.eta) * identity<T>(spec.dim());
      push(rel_deviation(lhs1, rhs1));
      Mat<T> lhs2 = transfer1(spec, xa - spec.eta) * transfer1(spec, xa);
      Mat<T> rhs2 = transfer2(spec, xa - spec.eta);
      push(rel_deviation(lhs2, rhs2));
    }
  } else {
    throw std::invalid_argument("fusion_residual: only n = 2, 3 supported");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Trig asymptotics
// ---------------------------------------------------------------------------

/// S_z = Σ_n σ^z_n (diagonal).
inline MatC sz_operator(int N) {
  MatC sz = MatC::Zero(ipow(2, N), ipow(2, N));
  for (Eigen::Index s = 0; s < sz.rows(); ++s) {
    int up = 0;
    for (int bit = 0; bit < N; ++bit)
      if (!((s >> bit) & 1)) ++up;
    sz(s, s) = Cplx(2 * up - N);
  }
  return sz;
}

/// Leading operator coefficients T_{±N} = lim e^{∓λN} T(λ) of the trig
/// transfer matrix (zero for the antidiagonal twist family).
inline MatC trig_asym_operator(const ModelSpecC& spec, int sign) {
  const Eigen::Index d = spec.dim();
  if (spec.twist_a != 0) return MatC::Zero(d, d);
  Cplx xi_sum = 0;
  for (const Cplx& x : spec.xi) xi_sum += x;
  double sgn = sign > 0 ? 1.0 : -1.0;
  Cplx phase = (sign > 0) ? Cplx(1) : Cplx((spec.N % 2 == 0) ? 1.0 : -1.0);
  Cplx coef = phase * std::exp(sgn * (spec.eta * Cplx(spec.N) / Cplx(2) - xi_sum)) /
              std::pow(2.0, spec.N - 1);
  MatC sz = sz_operator(spec.N);
  MatC out = MatC::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    out(i, i) = coef * std::cosh(spec.eta / Cplx(2) * sz(i, i) + sgn * spec.twist_alpha);
  return spec.twist_prefactor * out;
}

/// Scalar asymptotic pair for a transfer eigenvalue in spin sector l.
inline std::pair<Cplx, Cplx> trig_asym_scalar(const ModelSpecC& spec, int l) {
  if (spec.twist_a != 0) return {Cplx(0), Cplx(0)};
  Cplx xi_sum = 0;
  for (const Cplx& x : spec.xi) xi_sum += x;
  auto one = [&](double sgn) {
    Cplx phase = (sgn > 0) ? Cplx(1) : Cplx((spec.N % 2 == 0) ? 1.0 : -1.0);
    return spec.twist_prefactor * phase *
           std::exp(sgn * (spec.eta * Cplx(spec.N) / Cplx(2) - xi_sum)) /
           std::pow(2.0, spec.N - 1) *
           std::cosh(spec.eta / Cplx(2) * Cplx(l) + sgn * spec.twist_alpha);
  };
  return {one(1.0), one(-1.0)};
}

}  // namespace sov
