// Dense eigen-decomposition oracle with left/right pairs and degeneracy flags.
#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sov/linalg.hpp"

namespace sov {

struct EigenPairs {
  std::vector<Cplx> values;     // sorted lexicographically by (Re, Im)
  MatC right;                   // column i = right eigenvector r_i
  MatC left;                    // row i = left covector l_i, with l_i r_j = delta_ij
  std::vector<double> pairings; // 1/(|l_i| |r_i|), reciprocal eigenvalue condition
  std::vector<double> residuals;
  bool near_degenerate = false;
  double min_gap = 0;
};

/// Full left/right eigen-decomposition; near-degenerate pairs are flagged when
/// |λ_i - λ_j| < 1e-8 ||X||.
inline EigenPairs eigen_decompose(const MatC& x) {
  Eigen::ComplexEigenSolver<MatC> solver(x);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigen_decompose: no convergence");
  const Eigen::Index d = x.rows();
  const double scale = frob_norm(x);

  std::vector<Eigen::Index> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    Cplx u = solver.eigenvalues()(a), v = solver.eigenvalues()(b);
    if (u.real() != v.real()) return u.real() < v.real();
    return u.imag() < v.imag();
  });

  EigenPairs out;
  out.values.resize(d);
  out.right.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    out.values[i] = solver.eigenvalues()(order[i]);
    out.right.col(i) = solver.eigenvectors().col(order[i]);
  }

  // one Rayleigh-quotient step per pair sharpens vectors whose eigenvalues
  // sit close together
  for (Eigen::Index i = 0; i < d; ++i) {
    VecC v = out.right.col(i);
    MatC shifted = x - out.values[i] * identity<Cplx>(d);
    VecC w = Eigen::PartialPivLU<MatC>(shifted).solve(v);
    if (w.allFinite() && w.norm() > 0) {
      w.normalize();
      Cplx mu = w.dot(x * w);  // w is unit: Rayleigh quotient w^H X w
      if ((x * w - mu * w).norm() <= (x * v - out.values[i] * v).norm()) {
        out.right.col(i) = w;
        out.values[i] = mu;
      }
    }
  }
  out.left = solve_refined(out.right, identity<Cplx>(d));  // rows: l_i r_j = delta_ij

  out.min_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i + 1 < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j)
      out.min_gap = std::min(out.min_gap, std::abs(out.values[i] - out.values[j]));
  out.near_degenerate = (d > 1) && (out.min_gap < 1e-8 * std::max(scale, 1e-300));

  out.pairings.resize(d);
  out.residuals.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    out.pairings[i] = 1.0 / (out.left.row(i).norm() * out.right.col(i).norm());
    VecC r = x * out.right.col(i) - out.values[i] * out.right.col(i);
    RowVecC l = out.left.row(i) * x - out.values[i] * out.left.row(i);
    double den = std::max(scale, 1e-300);
    out.residuals[i] = std::max(r.norm() / (den * out.right.col(i).norm()),
                                l.norm() / (den * out.left.row(i).norm()));
  }
  return out;
}

}  // namespace sov
