// Dense kernels shared by every module: tensor-leg machinery (kron, site
// embedding, partial trace over the auxiliary leg) and field-generic
// determinant / rank / solve. Exact-field decompositions are hand-rolled
// Gaussian elimination; the complex-double path defers to Eigen solvers.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sov/scalar.hpp"

namespace sov {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <class T>
using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic>;

using MatC = Mat<Cplx>;
using VecC = Vec<Cplx>;
using RowVecC = RowVec<Cplx>;
using MatR = Mat<Rat>;

template <class T>
Mat<T> identity(Eigen::Index d) {
  return Mat<T>::Identity(d, d);
}

inline Eigen::Index ipow(Eigen::Index base, int exp) {
  Eigen::Index r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

/// Tensor product with the left factor on the slow (leading) legs.
template <class T>
Mat<T> kron(const Mat<T>& a, const Mat<T>& b) {
  Mat<T> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Permutation operator on C^n (x) C^n: P (u (x) v) = v (x) u.
template <class T>
Mat<T> permutation_op(int n) {
  Mat<T> p = Mat<T>::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p(i * n + j, j * n + i) = T(1);
  return p;
}

/// I (x) ... (x) M (x) ... (x) I with M on `site` (1-based), N legs of dim n.
template <class T>
Mat<T> embed_at(const Mat<T>& m, int site, int n, int N) {
  if (site < 1 || site > N) throw std::out_of_range("embed_at: site out of range");
  if (m.rows() != n || m.cols() != n) throw std::invalid_argument("embed_at: leg dim mismatch");
  Mat<T> out = identity<T>(ipow(n, site - 1));
  out = kron(out, m);
  return kron(out, identity<T>(ipow(n, N - site)));
}

/// Trace over the leading (auxiliary) leg of dimension aux_dim.
template <class T>
Mat<T> partial_trace_aux(const Mat<T>& x, Eigen::Index aux_dim) {
  if (x.rows() != x.cols() || x.rows() % aux_dim != 0)
    throw std::invalid_argument("partial_trace_aux: dimension not divisible by aux dim");
  const Eigen::Index d = x.rows() / aux_dim;
  Mat<T> out = Mat<T>::Zero(d, d);
  for (Eigen::Index k = 0; k < aux_dim; ++k) out += x.block(k * d, k * d, d, d);
  return out;
}

/// Partial transpose over the leading leg of dimension aux_dim.
template <class T>
Mat<T> partial_transpose_aux(const Mat<T>& x, Eigen::Index aux_dim) {
  const Eigen::Index d = x.rows() / aux_dim;
  Mat<T> out(x.rows(), x.cols());
  for (Eigen::Index a = 0; a < aux_dim; ++a)
    for (Eigen::Index b = 0; b < aux_dim; ++b)
      out.block(b * d, a * d, d, d) = x.block(a * d, b * d, d, d);
  return out;
}

// ---------------------------------------------------------------------------
// Structured two-leg application: multiply by an operator acting on legs
// (la, lb) of a space made of `legs` legs of dimension n each, without
// forming the embedded matrix. Cost n^2 * dim(X)^2 instead of dim(X)^3.
// Legs are 0-based, slowest first.
// ---------------------------------------------------------------------------

namespace detail {

inline void leg_strides(int n, int legs, int la, int lb, Eigen::Index& sa, Eigen::Index& sb) {
  sa = ipow(n, legs - 1 - la);
  sb = ipow(n, legs - 1 - lb);
}

}  // namespace detail

/// X := R_{la,lb} * X where R is n^2 x n^2 acting on legs (la, lb).
template <class T>
void left_apply_two_leg(const Mat<T>& r, int la, int lb, int n, int legs, Mat<T>& x) {
  const Eigen::Index dim = ipow(n, legs);
  if (x.rows() != dim) throw std::invalid_argument("left_apply_two_leg: dim mismatch");
  Eigen::Index sa, sb;
  detail::leg_strides(n, legs, la, lb, sa, sb);
  Mat<T> out = Mat<T>::Zero(x.rows(), x.cols());
  for (Eigen::Index row = 0; row < dim; ++row) {
    const int ia = static_cast<int>((row / sa) % n);
    const int ib = static_cast<int>((row / sb) % n);
    const Eigen::Index base = row - ia * sa - ib * sb;
    for (int ja = 0; ja < n; ++ja)
      for (int jb = 0; jb < n; ++jb) {
        const T& coef = r(ia * n + ib, ja * n + jb);
        if (coef == T(0)) continue;
        out.row(row) += coef * x.row(base + ja * sa + jb * sb);
      }
  }
  x.swap(out);
}

/// X := A_{la} * X where A is n x n acting on leg la.
template <class T>
void left_apply_one_leg(const Mat<T>& a, int la, int n, int legs, Mat<T>& x) {
  const Eigen::Index dim = ipow(n, legs);
  if (x.rows() != dim) throw std::invalid_argument("left_apply_one_leg: dim mismatch");
  const Eigen::Index sa = ipow(n, legs - 1 - la);
  Mat<T> out = Mat<T>::Zero(x.rows(), x.cols());
  for (Eigen::Index row = 0; row < dim; ++row) {
    const int ia = static_cast<int>((row / sa) % n);
    const Eigen::Index base = row - ia * sa;
    for (int ja = 0; ja < n; ++ja) {
      const T& coef = a(ia, ja);
      if (coef == T(0)) continue;
      out.row(row) += coef * x.row(base + ja * sa);
    }
  }
  x.swap(out);
}

/// X := X * R_{la,lb}.
template <class T>
void right_apply_two_leg(const Mat<T>& r, int la, int lb, int n, int legs, Mat<T>& x) {
  const Eigen::Index dim = ipow(n, legs);
  if (x.cols() != dim) throw std::invalid_argument("right_apply_two_leg: dim mismatch");
  Eigen::Index sa, sb;
  detail::leg_strides(n, legs, la, lb, sa, sb);
  Mat<T> out = Mat<T>::Zero(x.rows(), x.cols());
  for (Eigen::Index col = 0; col < dim; ++col) {
    const int jb2 = static_cast<int>((col / sb) % n);
    const int ja2 = static_cast<int>((col / sa) % n);
    const Eigen::Index base = col - ja2 * sa - jb2 * sb;
    for (int ia = 0; ia < n; ++ia)
      for (int ib = 0; ib < n; ++ib) {
        const T& coef = r(ja2 * n + jb2, ia * n + ib);
        if (coef == T(0)) continue;
        out.col(base + ia * sa + ib * sb) += coef * x.col(col);
      }
  }
  x.swap(out);
}

/// X := X * A_{la}.
template <class T>
void right_apply_one_leg(const Mat<T>& a, int la, int n, int legs, Mat<T>& x) {
  const Eigen::Index dim = ipow(n, legs);
  if (x.cols() != dim) throw std::invalid_argument("right_apply_one_leg: dim mismatch");
  const Eigen::Index sa = ipow(n, legs - 1 - la);
  Mat<T> out = Mat<T>::Zero(x.rows(), x.cols());
  for (Eigen::Index col = 0; col < dim; ++col) {
    const int ja = static_cast<int>((col / sa) % n);
    const Eigen::Index base = col - ja * sa;
    for (int ia = 0; ia < n; ++ia) {
      const T& coef = a(ja, ia);
      if (coef == T(0)) continue;
      out.col(base + ia * sa) += coef * x.col(col);
    }
  }
  x.swap(out);
}

/// Trace over the two leading legs (joint dimension lead_dim).
template <class T>
Mat<T> partial_trace_leading(const Mat<T>& x, Eigen::Index lead_dim) {
  return partial_trace_aux(x, lead_dim);
}

// ---------------------------------------------------------------------------
// Norms and residuals
// ---------------------------------------------------------------------------

template <class T>
double frob_norm(const Mat<T>& x) {
  double s = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      double a = abs_approx(x(i, j));
      s += a * a;
    }
  return std::sqrt(s);
}

/// Relative Frobenius deviation ||a-b|| / max(||a||, ||b||); exact field
/// returns the exact sum of squared differences (zero iff equal).
template <class T>
residual_t<T> rel_deviation(const Mat<T>& a, const Mat<T>& b) {
  if constexpr (is_exact_v<T>) {
    Rat s = 0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        Rat d = a(i, j) - b(i, j);
        s += d * d;
      }
    return s;
  } else {
    double na = frob_norm(a), nb = frob_norm(b);
    double scale = std::max(na, nb);
    if (scale == 0) return 0.0;
    return frob_norm<T>(a - b) / scale;
  }
}

// ---------------------------------------------------------------------------
// Exact-field elimination (determinant, rank, solve, inverse)
// ---------------------------------------------------------------------------

inline Rat det_exact(MatR a) {
  const Eigen::Index d = a.rows();
  Rat det = 1;
  for (Eigen::Index c = 0; c < d; ++c) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = c; r < d; ++r)
      if (a(r, c) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) return Rat(0);
    if (piv != c) {
      a.row(piv).swap(a.row(c));
      det = -det;
    }
    det *= a(c, c);
    Rat inv_piv = 1 / a(c, c);
    for (Eigen::Index r = c + 1; r < d; ++r) {
      if (a(r, c) == 0) continue;
      Rat f = a(r, c) * inv_piv;
      for (Eigen::Index k = c; k < d; ++k) a(r, k) -= f * a(c, k);
    }
  }
  return det;
}

inline Eigen::Index rank_exact(MatR a) {
  const Eigen::Index rows = a.rows(), cols = a.cols();
  Eigen::Index rank = 0;
  for (Eigen::Index c = 0; c < cols && rank < rows; ++c) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = rank; r < rows; ++r)
      if (a(r, c) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    a.row(piv).swap(a.row(rank));
    Rat inv_piv = 1 / a(rank, c);
    for (Eigen::Index r = rank + 1; r < rows; ++r) {
      if (a(r, c) == 0) continue;
      Rat f = a(r, c) * inv_piv;
      for (Eigen::Index k = c; k < cols; ++k) a(r, k) -= f * a(rank, k);
    }
    ++rank;
  }
  return rank;
}

inline Vec<Rat> solve_exact(MatR a, Vec<Rat> b) {
  const Eigen::Index d = a.rows();
  for (Eigen::Index c = 0; c < d; ++c) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = c; r < d; ++r)
      if (a(r, c) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) throw std::runtime_error("solve_exact: singular matrix");
    if (piv != c) {
      a.row(piv).swap(a.row(c));
      std::swap(b(piv), b(c));
    }
    Rat inv_piv = 1 / a(c, c);
    for (Eigen::Index r = c + 1; r < d; ++r) {
      if (a(r, c) == 0) continue;
      Rat f = a(r, c) * inv_piv;
      for (Eigen::Index k = c; k < d; ++k) a(r, k) -= f * a(c, k);
      b(r) -= f * b(c);
    }
  }
  Vec<Rat> x(d);
  for (Eigen::Index r = d - 1; r >= 0; --r) {
    Rat s = b(r);
    for (Eigen::Index k = r + 1; k < d; ++k) s -= a(r, k) * x(k);
    x(r) = s / a(r, r);
  }
  return x;
}

inline MatR inverse_exact(const MatR& a) {
  const Eigen::Index d = a.rows();
  MatR out(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Vec<Rat> e = Vec<Rat>::Zero(d);
    e(j) = 1;
    out.col(j) = solve_exact(a, e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Float-field helpers
// ---------------------------------------------------------------------------

/// log|det| of a complex matrix; -inf for numerically singular input.
inline double log_abs_det(const MatC& a) {
  Eigen::PartialPivLU<MatC> lu(a);
  double s = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double p = std::abs(lu.matrixLU()(i, i));
    if (p == 0) return -std::numeric_limits<double>::infinity();
    s += std::log(p);
  }
  return s;
}

/// LU solve with one step of iterative refinement.
inline VecC solve_refined(const MatC& a, const VecC& b) {
  Eigen::PartialPivLU<MatC> lu(a);
  VecC x = lu.solve(b);
  x += lu.solve(b - a * x);
  return x;
}

inline MatC solve_refined(const MatC& a, const MatC& b) {
  Eigen::PartialPivLU<MatC> lu(a);
  MatC x = lu.solve(b);
  x += lu.solve(b - a * x);
  return x;
}

/// Determinant in the field's natural residual type: exact rational, or
/// |det| for the complex field.
template <class T>
residual_t<T> field_det(const Mat<T>& a) {
  if constexpr (is_exact_v<T>) {
    return det_exact(a);
  } else {
    return std::abs(Eigen::PartialPivLU<MatC>(a).determinant());
  }
}

/// sin of the angle between the complex lines spanned by u and v, computed
/// from the orthogonal complement so that it stays meaningful down to
/// machine precision.
template <class VA, class VB>
double line_angle(const VA& u, const VB& v) {
  double nu = u.norm(), nv = v.norm();
  if (nu == 0 || nv == 0) return 1.0;
  Cplx h = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i) h += std::conj(Cplx(u(i))) * Cplx(v(i));
  h /= nu * nv;
  double s = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    Cplx w = Cplx(v(i)) / nv - h * Cplx(u(i)) / nu;
    s += std::norm(w);
  }
  return std::min(1.0, std::sqrt(s));
}

}  // namespace sov
