// Nonderogatory (w-simple) machinery: certificates, companion form, covector
// power bases and the confluent Vandermonde determinant they rest on.
#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/SVD>

#include "sov/eigenpairs.hpp"
#include "sov/linalg.hpp"
#include "sov/rng.hpp"

namespace sov {

struct JordanBlockSketch {
  Cplx eigenvalue;
  std::vector<int> block_sizes;
};

struct WSimpleCertificate {
  bool is_w_simple = false;
  int minimal_poly_degree = 0;
  bool inconclusive = false;        // float mode: decision margin too thin
  double cluster_tol = 0;           // float mode: eigenvalue clustering tolerance
  std::vector<JordanBlockSketch> jordan_sketch;  // float mode only
};

namespace detail {

inline Eigen::Index rank_with_tol(const MatC& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<MatC> svd(a);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++r;
  return r;
}

}  // namespace detail

/// Exact test: the minimal polynomial degree is the rank of the vectorized
/// power stack [vec I, vec X, ..., vec X^{d-1}]; nonderogatory iff it equals d.
inline WSimpleCertificate w_simple_check(const MatR& x) {
  const Eigen::Index d = x.rows();
  MatR stack(d * d, d);
  MatR p = identity<Rat>(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = 0; i < d; ++i) stack(j * d + i, k) = p(i, j);
    if (k + 1 < d) p = (p * x).eval();
  }
  WSimpleCertificate cert;
  cert.minimal_poly_degree = static_cast<int>(rank_exact(stack));
  cert.is_w_simple = (cert.minimal_poly_degree == d);
  return cert;
}

/// Float test: cluster the spectrum, then read the Jordan structure of each
/// cluster from ranks of powers of (X - mu I). A gap thinner than the cluster
/// tolerance makes the verdict inconclusive rather than false.
inline WSimpleCertificate w_simple_check(const MatC& x) {
  const Eigen::Index d = x.rows();
  const double scale = std::max(frob_norm(x), 1e-300);
  WSimpleCertificate cert;
  cert.cluster_tol = 1e-8 * scale;

  Eigen::ComplexEigenSolver<MatC> solver(x, /*computeEigenvectors=*/false);
  std::vector<Cplx> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + d);
  std::sort(ev.begin(), ev.end(), [](Cplx a, Cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  std::vector<std::pair<Cplx, int>> clusters;  // (mean, multiplicity)
  for (const Cplx& v : ev) {
    bool merged = false;
    for (auto& [mu, m] : clusters)
      if (std::abs(v - mu) < cert.cluster_tol) {
        mu = (mu * static_cast<double>(m) + v) / static_cast<double>(m + 1);
        ++m;
        merged = true;
        break;
      }
    if (!merged) clusters.emplace_back(v, 1);
  }

  cert.is_w_simple = true;
  cert.minimal_poly_degree = 0;
  for (const auto& [mu, mult] : clusters) {
    JordanBlockSketch sk;
    sk.eigenvalue = mu;
    if (mult == 1) {
      sk.block_sizes = {1};
    } else {
      // #blocks of size >= k equals rank((X-mu)^{k-1}) - rank((X-mu)^k)
      MatC shifted = x - mu * identity<Cplx>(d);
      std::vector<Eigen::Index> ranks{d};
      MatC p = identity<Cplx>(d);
      for (int k = 1; k <= mult; ++k) {
        p = (p * shifted).eval();
        ranks.push_back(detail::rank_with_tol(p, cert.cluster_tol));
      }
      for (int k = 1; k <= mult; ++k) {
        Eigen::Index ge_k = ranks[k - 1] - ranks[k];
        Eigen::Index ge_k1 = (k < mult) ? ranks[k] - ranks[k + 1] : 0;
        for (Eigen::Index b = 0; b < ge_k - ge_k1; ++b) sk.block_sizes.push_back(k);
      }
      if (sk.block_sizes.empty()) sk.block_sizes = {mult};
      if (sk.block_sizes.size() > 1) cert.is_w_simple = false;
    }
    cert.minimal_poly_degree += *std::max_element(sk.block_sizes.begin(), sk.block_sizes.end());
    cert.jordan_sketch.push_back(std::move(sk));
  }

  // distinct clusters closer than 10x the clustering tolerance: near the
  // merge/split boundary, do not trust the verdict
  for (std::size_t i = 0; i < clusters.size(); ++i)
    for (std::size_t j = i + 1; j < clusters.size(); ++j)
      if (std::abs(clusters[i].first - clusters[j].first) < 10 * cert.cluster_tol)
        cert.inconclusive = true;
  return cert;
}

/// Characteristic polynomial coefficients (a_0 ... a_{d-1}, monic implied) via
/// Faddeev-LeVerrier; used as the independent oracle for companion forms.
template <class T>
std::vector<T> char_poly(const Mat<T>& x) {
  const Eigen::Index d = x.rows();
  std::vector<T> c(d + 1);
  c[d] = T(1);
  Mat<T> m = Mat<T>::Zero(d, d);
  for (Eigen::Index k = 1; k <= d; ++k) {
    m = (x * m).eval();
    for (Eigen::Index i = 0; i < d; ++i) m(i, i) += c[d - k + 1];
    T tr = (x * m).trace();
    c[d - k] = -tr / T(static_cast<int>(k));
  }
  return c;  // p(t) = sum c_k t^k
}

template <class T>
struct CompanionResult {
  Mat<T> companion;
  Mat<T> basis_change;  // V with V X V^{-1} = companion
};

/// Conjugate a w-simple matrix to companion form. The basis change is the
/// Krylov stack of a small random integer covector, retried until invertible.
template <class T>
CompanionResult<T> companion_conjugate(const Mat<T>& x, Rng& rng) {
  const Eigen::Index d = x.rows();
  for (int attempt = 0; attempt < 32; ++attempt) {
    RowVec<T> s(d);
    for (Eigen::Index i = 0; i < d; ++i) s(i) = T(static_cast<int>(rng.intval(-4, 4)));
    Mat<T> v(d, d);
    RowVec<T> row = s;
    for (Eigen::Index k = 0; k < d; ++k) {
      v.row(k) = row;
      row = (row * x).eval();
    }
    if constexpr (is_exact_v<T>) {
      if (det_exact(v) == 0) continue;
      return {v * x * inverse_exact(v), v};
    } else {
      Eigen::FullPivLU<MatC> lu(v);
      if (!lu.isInvertible()) continue;
      return {v * x * lu.inverse(), v};
    }
  }
  throw std::runtime_error("companion_conjugate: matrix is not w-simple (no cyclic covector found)");
}

template <class T>
struct PowerBasis {
  std::vector<RowVec<T>> covectors;  // ordered by n_h = sum h_k delta_k
  residual_t<T> det;
};

/// Covector basis <S| Π X_i^{h_i} with X_i = X^{δ_i}, δ_i = Π_{k<i} d_k.
/// The mixed-radix order makes row n the plain power <S| X^n.
template <class T>
PowerBasis<T> power_basis(const Mat<T>& x, const std::vector<int>& dims, const RowVec<T>& s) {
  Eigen::Index d = 1;
  for (int di : dims) d *= di;
  if (d != x.rows()) throw std::invalid_argument("power_basis: dims do not factor dim(X)");
  PowerBasis<T> out;
  out.covectors.reserve(d);
  RowVec<T> row = s;
  Mat<T> m(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    out.covectors.push_back(row);
    m.row(k) = row;
    if (k + 1 < d) row = (row * x).eval();
  }
  out.det = field_det(m);
  if constexpr (is_exact_v<T>) {
    if (out.det == 0) throw std::runtime_error("power_basis: degenerate orbit (det = 0)");
  } else {
    if (out.det == 0.0) throw std::runtime_error("power_basis: degenerate orbit (det = 0)");
  }
  return out;
}

struct ConfluentVandermonde {
  Rat closed_form;
  Rat brute_force;
};

/// Eq-style closed form Π (x_1^{(a)})^{n_a} Π_{a<b} (k_b - k_a)^{n_a n_b},
/// recomputed as the actual d x d determinant <S| X^{i-1} |s_j> as a cross
/// check; a mismatch is an internal bug signal.
inline ConfluentVandermonde confluent_vandermonde_det(
    const std::vector<std::pair<Rat, int>>& blocks, const std::vector<Rat>& x_first, Rng& rng) {
  Eigen::Index d = 0;
  for (const auto& [k, n] : blocks) d += n;
  MatR xj = MatR::Zero(d, d);
  RowVec<Rat> s(d);
  Eigen::Index pos = 0;
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    const auto& [k, n] = blocks[a];
    for (int i = 0; i < n; ++i) {
      xj(pos + i, pos + i) = k;
      if (i + 1 < n) xj(pos + i, pos + i + 1) = 1;
      s(pos + i) = (i == 0) ? x_first[a] : rng.rational(5, 2);
    }
    pos += n;
  }
  MatR v(d, d);
  RowVec<Rat> row = s;
  for (Eigen::Index i = 0; i < d; ++i) {
    v.row(i) = row;
    if (i + 1 < d) row = (row * xj).eval();
  }
  ConfluentVandermonde out;
  out.brute_force = det_exact(v);
  out.closed_form = 1;
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    Rat p = 1;
    for (int i = 0; i < blocks[a].second; ++i) p *= x_first[a];
    out.closed_form *= p;
  }
  for (std::size_t a = 0; a < blocks.size(); ++a)
    for (std::size_t b = a + 1; b < blocks.size(); ++b) {
      Rat diff = blocks[b].first - blocks[a].first;
      Rat p = 1;
      for (int e = 0; e < blocks[a].second * blocks[b].second; ++e) p *= diff;
      out.closed_form *= p;
    }
  if (out.closed_form != out.brute_force)
    throw std::logic_error("confluent_vandermonde_det: closed form disagrees with determinant");
  return out;
}

/// Unique eigenvector of a w-simple X from an eigenvalue, solved out of the
/// power-basis components <f_n|Λ> = λ^{n-1}.
inline VecC eigvec_from_eigenvalue(const MatC& x, const PowerBasis<Cplx>& basis, Cplx lambda,
                                   double residual_tol = 1e-9) {
  const Eigen::Index d = x.rows();
  MatC v(d, d);
  VecC rhs(d);
  Cplx p = 1;
  for (Eigen::Index k = 0; k < d; ++k) {
    v.row(k) = basis.covectors[k];
    rhs(k) = p;
    p *= lambda;
  }
  VecC vec = solve_refined(v, rhs);
  double res = (x * vec - lambda * vec).norm() / std::max(vec.norm() * frob_norm(x), 1e-300);
  if (res > residual_tol)
    throw std::runtime_error("eigvec_from_eigenvalue: lambda is not an eigenvalue");
  return vec;
}

}  // namespace sov
