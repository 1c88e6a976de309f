// Full gl_2 spectrum pipeline (rational and trigonometric): brute-force
// diagonalization oracle, the quadratic-system characterization of
// eigenvalue node tuples, factorized eigenvectors in the SoV basis, the spin
// sector sum rule, Baxter Q polynomials with the three-term functional
// equation, and the ABA product form for the diagonal trig twist.
#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <vector>

#include "sov/eigenpairs.hpp"
#include "sov/interp.hpp"
#include "sov/sov_basis.hpp"

namespace sov {

struct DegenerateFamily : std::runtime_error {
  explicit DegenerateFamily(const std::string& what) : std::runtime_error(what) {}
};

struct RejectedCandidate : std::runtime_error {
  explicit RejectedCandidate(const std::string& what) : std::runtime_error(what) {}
};

struct SpectrumRecord {
  std::vector<Cplx> t_nodes;      // t(ξ_a)
  std::optional<int> sector;      // trig a=0 spin sector l
  VecC right_vec;
  RowVecC left_covec;
  double pairing = 0;             // |<t|t>| / (|l| |r|)
  double system_residual = 0;
  double wave_residual = 0;
  std::vector<Cplx> q_roots;
};

/// Eigenvalue reconstruction t(λ) from node values: degree-N rational
/// polynomial with leading coefficient tr K, or the trig classes (asymptotic
/// pair from the sector for the diagonal family, vanishing asymptotics for
/// the antidiagonal one).
class EigenvalueInterp {
 public:
  EigenvalueInterp(const ModelSpecC& spec, const std::vector<Cplx>& nodes,
                   std::optional<int> sector = std::nullopt)
      : spec_(&spec) {
    std::vector<std::pair<Cplx, Cplx>> pts;
    for (int a = 1; a <= spec.N; ++a) pts.emplace_back(spec.xi[a - 1], nodes[a - 1]);
    if (spec.algebra == Algebra::Trig6V) {
      std::optional<std::pair<Cplx, Cplx>> asym;
      if (spec.twist_a == 0) {
        if (!sector.has_value())
          throw std::invalid_argument("EigenvalueInterp: diagonal trig twist needs a sector");
        asym = trig_asym_scalar(spec, *sector);
      }
      trig_ = TrigInterp(pts, asym);
    } else {
      rational_ = InterpPoly<Cplx>(pts, spec.twist.trace());
    }
  }

  Cplx operator()(const Cplx& lambda) const {
    return spec_->algebra == Algebra::Trig6V ? trig_(lambda) : rational_(lambda);
  }

  /// Derivative with respect to the node value x_b at evaluation point λ.
  Cplx node_weight(int b, const Cplx& lambda) const {
    Cplx w = 1;
    for (int c = 1; c <= spec_->N; ++c) {
      if (c == b) continue;
      w *= spec_->local_factor(lambda - spec_->xi[c - 1]) /
           spec_->local_factor(spec_->xi[b - 1] - spec_->xi[c - 1]);
    }
    if (spec_->algebra == Algebra::Trig6V && spec_->twist_a == 0)
      w *= std::cosh(lambda - spec_->xi[b - 1]);
    return w;
  }

  Cplx node_value(int b) const {
    return spec_->algebra == Algebra::Trig6V ? trig_.nodes()[b - 1].second
                                             : rational_.nodes()[b - 1].second;
  }

 private:
  const ModelSpecC* spec_;
  InterpPoly<Cplx> rational_;
  TrigInterp trig_;
};

// ---------------------------------------------------------------------------
// Spin sector
// ---------------------------------------------------------------------------

struct SectorResult {
  std::optional<int> sector;
  double winner_mismatch = 0;
  double runner_up_mismatch = 0;
  double node_sum_abs = 0;  // |Σ_a x_a / Π_{b≠a} sinh(ξ_a - ξ_b)|, the a=1 diagnostic
};

/// Resolve the spin sector l from the node sum rule (diagonal trig twist).
/// For the antidiagonal family the rule carries no sector information; only
/// the diagnostic sum is reported.
inline SectorResult sector_from_sum_rule(const ModelSpecC& spec, const std::vector<Cplx>& nodes) {
  if (spec.algebra != Algebra::Trig6V)
    throw std::invalid_argument("sector_from_sum_rule: trig models only");
  SectorResult out;
  Cplx s = 0;
  for (int a = 1; a <= spec.N; ++a) {
    Cplx w = nodes[a - 1];
    for (int b = 1; b <= spec.N; ++b) {
      if (b == a) continue;
      w /= std::sinh(spec.xi[a - 1] - spec.xi[b - 1]);
    }
    s += w;
  }
  out.node_sum_abs = std::abs(s);
  if (spec.twist_a != 0) return out;

  std::vector<std::pair<double, int>> mismatches;
  for (int l = -spec.N; l <= spec.N; l += 2) {
    Cplx rule = 0;
    for (double eps : {1.0, -1.0})
      rule += Cplx(eps) * std::exp(Cplx(eps) * spec.eta * Cplx(spec.N) / Cplx(2)) *
              std::cosh(spec.eta / Cplx(2) * Cplx(l) + Cplx(eps) * spec.twist_alpha);
    rule *= spec.twist_prefactor;
    mismatches.emplace_back(std::abs(s - rule), l);
  }
  std::sort(mismatches.begin(), mismatches.end());
  out.sector = mismatches[0].second;
  out.winner_mismatch = mismatches[0].first;
  out.runner_up_mismatch = mismatches[1].first;
  if (out.winner_mismatch > 1e-8 * std::max(1.0, out.node_sum_abs) ||
      out.runner_up_mismatch < 1e-3 * std::max(1.0, out.node_sum_abs))
    throw std::runtime_error("sector_from_sum_rule: ambiguous sector");
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

inline std::vector<SpectrumRecord> brute_force_spectrum(const ModelSpecC& spec, Rng& rng) {
  const Eigen::Index d = spec.dim();
  for (int attempt = 0; attempt < 5; ++attempt) {
    Cplx lambda0 = rng.complex_in_disc(1.3);
    MatC t0 = transfer1(spec, lambda0);
    EigenPairs ep = eigen_decompose(t0);
    if (ep.near_degenerate) continue;

    std::vector<SpectrumRecord> records(d);
    std::vector<MatC> t_at_nodes;
    for (int a = 1; a <= spec.N; ++a) t_at_nodes.push_back(transfer1(spec, spec.xi[a - 1]));
    for (Eigen::Index i = 0; i < d; ++i) {
      SpectrumRecord& rec = records[i];
      rec.right_vec = ep.right.col(i);
      rec.left_covec = ep.left.row(i);
      rec.pairing = ep.pairings[i];
      for (int a = 1; a <= spec.N; ++a)
        rec.t_nodes.push_back(rec.left_covec * t_at_nodes[a - 1] * rec.right_vec);
      if (spec.algebra == Algebra::Trig6V && spec.twist_a == 0)
        rec.sector = sector_from_sum_rule(spec, rec.t_nodes).sector;
    }
    std::sort(records.begin(), records.end(), [](const SpectrumRecord& u, const SpectrumRecord& v) {
      for (std::size_t a = 0; a < u.t_nodes.size(); ++a) {
        if (u.t_nodes[a].real() != v.t_nodes[a].real()) return u.t_nodes[a].real() < v.t_nodes[a].real();
        if (u.t_nodes[a].imag() != v.t_nodes[a].imag()) return u.t_nodes[a].imag() < v.t_nodes[a].imag();
      }
      return false;
    });
    return records;
  }
  throw DegenerateFamily("brute_force_spectrum: persistent near-degeneracy of T(λ0)");
}

// ---------------------------------------------------------------------------
// Quadratic system
// ---------------------------------------------------------------------------

/// max_a |t(ξ_a) t(ξ_a - η) - qdet(ξ_a)| / scale with t reconstructed from
/// the nodes by interpolation.
inline double quadratic_system_residual(const ModelSpecC& spec, const std::vector<Cplx>& nodes,
                                        std::optional<int> sector = std::nullopt) {
  EigenvalueInterp t(spec, nodes, sector);
  double worst = 0;
  for (int a = 1; a <= spec.N; ++a) {
    Cplx lhs = nodes[a - 1] * t(spec.xi[a - 1] - spec.eta);
    Cplx rhs = qdet2_scalar(spec, spec.xi[a - 1]);
    double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

/// Newton refinement of the N quadratic equations in the node unknowns.
inline std::vector<Cplx> solve_quadratic_system(const ModelSpecC& spec,
                                                const std::vector<Cplx>& seed,
                                                std::optional<int> sector = std::nullopt,
                                                int max_iter = 50, double tol = 1e-12) {
  std::vector<Cplx> x = seed;
  for (int iter = 0; iter < max_iter; ++iter) {
    EigenvalueInterp t(spec, x, sector);
    VecC f(spec.N);
    MatC jac(spec.N, spec.N);
    double scale = 0;
    for (int a = 1; a <= spec.N; ++a) {
      Cplx shifted = t(spec.xi[a - 1] - spec.eta);
      Cplx q = qdet2_scalar(spec, spec.xi[a - 1]);
      f(a - 1) = x[a - 1] * shifted - q;
      scale = std::max({scale, std::abs(q), std::abs(x[a - 1] * shifted)});
      for (int b = 1; b <= spec.N; ++b) {
        jac(a - 1, b - 1) = x[a - 1] * t.node_weight(b, spec.xi[a - 1] - spec.eta);
        if (a == b) jac(a - 1, b - 1) += shifted;
      }
    }
    if (f.norm() <= tol * std::max(scale, 1.0)) return x;
    Eigen::FullPivLU<MatC> lu(jac);
    if (!lu.isInvertible()) throw std::runtime_error("solve_quadratic_system: singular Jacobian");
    VecC dx = lu.solve(f);
    for (int a = 0; a < spec.N; ++a) x[a] -= dx(a);
  }
  throw std::runtime_error("solve_quadratic_system: no convergence");
}

// ---------------------------------------------------------------------------
// Factorized eigenvector
// ---------------------------------------------------------------------------

/// Solve the covector-basis linear system for the unique vector with
/// <h|t> = Π (t(ξ_a)/norm_a)^{h_a}, then certify the eigen-equation at
/// random λ and store the residual.
inline VecC factorized_eigenvector(const ModelSpecC& spec, const SovBasis<Cplx>& basis,
                                   const std::vector<Cplx>& nodes, Rng& rng,
                                   double* wave_residual_out = nullptr,
                                   std::optional<int> sector = std::nullopt,
                                   double tol = 1e-8) {
  const Eigen::Index d = spec.dim();
  VecC w(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    std::vector<int> h = basis.h_of(i);
    Cplx val = 1;
    for (int a = 0; a < spec.N; ++a)
      for (int k = 0; k < h[a]; ++k) val *= nodes[a] / basis.norms[a];
    w(i) = val;
  }
  VecC v = solve_refined(basis.rows, w);

  EigenvalueInterp t(spec, nodes, sector);
  double worst = 0;
  for (int rep = 0; rep < 5; ++rep) {
    Cplx lambda = rng.complex_in_disc(1.4);
    MatC top = transfer1(spec, lambda);
    worst = std::max(worst, (top * v - t(lambda) * v).norm() /
                                std::max(frob_norm(top) * v.norm(), 1e-300));
  }
  if (wave_residual_out) *wave_residual_out = worst;
  if (worst > tol)
    throw RejectedCandidate("factorized_eigenvector: eigen-equation residual too large");
  return v;
}

// ---------------------------------------------------------------------------
// Baxter Q
// ---------------------------------------------------------------------------

struct BaxterQ {
  int degree = 0;
  std::vector<Cplx> coeffs;     // monic; rational kind: λ-coefficients,
                                // trig kind: coefficients of P(w), w = e^{2λ}
  std::vector<Cplx> roots;      // Bethe roots λ_m
  double condition_residual = 0;
  double tq_residual = 0;
  double min_lattice_distance = 0;
  double uniqueness_gap = 0;    // two independent solves agree to this
  std::function<Cplx(Cplx)> eval;
};

namespace detail {

inline std::vector<Cplx> poly_roots(const std::vector<Cplx>& monic_coeffs) {
  const int m = static_cast<int>(monic_coeffs.size());
  if (m == 0) return {};
  MatC comp = MatC::Zero(m, m);
  for (int i = 0; i + 1 < m; ++i) comp(i + 1, i) = 1;
  for (int i = 0; i < m; ++i) comp(i, m - 1) = -monic_coeffs[i];
  Eigen::ComplexEigenSolver<MatC> solver(comp);
  std::vector<Cplx> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + m);
  std::sort(roots.begin(), roots.end(), [](Cplx a, Cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

}  // namespace detail

/// Smallest-degree monic Q with k0 a(ξ_a) Q(ξ_a - η) = t(ξ_a) Q(ξ_a); the
/// full three-term equation is certified at 20 random points afterwards.
inline BaxterQ baxter_q(const ModelSpecC& spec, const std::vector<Cplx>& nodes, Cplx k0, Rng& rng,
                        std::optional<int> sector = std::nullopt, double accept_tol = 1e-9,
                        double lattice_margin = 1e-6) {
  const bool trig = spec.algebra == Algebra::Trig6V;
  EigenvalueInterp t(spec, nodes, sector);

  auto condition_pair = [&](int a) -> std::pair<Cplx, Cplx> {
    // (u, v) with u Q(ξ_a - η) = v Q(ξ_a)
    return {k0 * spec.a_poly(spec.xi[a - 1]), nodes[a - 1]};
  };

  for (int m = 0; m <= spec.N; ++m) {
    // unknown coefficients c_0..c_{m-1} of the monic representation
    MatC rows(spec.N, std::max(m, 1));
    VecC rhs(spec.N);
    double row_scale = 0;
    for (int a = 1; a <= spec.N; ++a) {
      auto [u, v] = condition_pair(a);
      Cplx za = trig ? std::exp(Cplx(2) * spec.xi[a - 1]) : spec.xi[a - 1];
      Cplx za_shift = trig ? std::exp(Cplx(2) * (spec.xi[a - 1] - spec.eta)) : spec.xi[a - 1] - spec.eta;
      if (trig) u *= std::exp(Cplx(m) * spec.eta);  // e^{-M(λ-η)} / e^{-Mλ}
      Cplx pu = 1, pv = 1;
      for (int j = 0; j < m; ++j) {
        rows(a - 1, j) = u * pu - v * pv;
        pu *= za_shift;
        pv *= za;
      }
      if (m == 0) rows(a - 1, 0) = 0;
      rhs(a - 1) = -(u * pu - v * pv);  // monic top term moved to the right side
      row_scale = std::max({row_scale, std::abs(u * pu), std::abs(v * pv)});
    }

    VecC c_qr, c_svd;
    double resid;
    if (m == 0) {
      resid = rhs.norm() / std::max(row_scale, 1e-300);
      c_qr = VecC::Zero(0);
      c_svd = c_qr;
    } else {
      Eigen::ColPivHouseholderQR<MatC> qr(rows);
      c_qr = qr.solve(rhs);
      Eigen::JacobiSVD<MatC> svd(rows, Eigen::ComputeThinU | Eigen::ComputeThinV);
      c_svd = svd.solve(rhs);
      resid = (rows * c_qr - rhs).norm() / std::max(row_scale, 1e-300);
    }
    if (resid > accept_tol) continue;

    BaxterQ q;
    q.degree = m;
    q.coeffs.assign(c_qr.data(), c_qr.data() + m);
    q.condition_residual = resid;
    q.uniqueness_gap = (m == 0) ? 0.0 : (c_qr - c_svd).norm() / std::max(1.0, c_qr.norm());

    std::vector<Cplx> raw_roots = detail::poly_roots(q.coeffs);
    q.min_lattice_distance = std::numeric_limits<double>::infinity();
    for (const Cplx& r : raw_roots) {
      Cplx lambda_root = trig ? std::log(r) / Cplx(2) : r;
      q.roots.push_back(lambda_root);
      for (const Cplx& xi : spec.xi) {
        double dist = trig ? std::abs(std::sinh(lambda_root - xi)) : std::abs(lambda_root - xi);
        q.min_lattice_distance = std::min(q.min_lattice_distance, dist);
      }
    }
    if (m == 0) q.min_lattice_distance = std::numeric_limits<double>::infinity();
    if (q.min_lattice_distance < lattice_margin) continue;  // lattice collision: not admissible

    auto coeffs = q.coeffs;
    auto eval = [coeffs, m, trig](Cplx lambda) -> Cplx {
      Cplx z = trig ? std::exp(Cplx(2) * lambda) : lambda;
      Cplx acc = 1;  // monic
      for (int j = m - 1; j >= 0; --j) acc = acc * z + coeffs[j];
      if (trig) acc *= std::exp(-Cplx(m) * lambda);
      return acc;
    };
    q.eval = eval;

    // three-term functional equation at 20 random λ
    double worst = 0;
    for (int rep = 0; rep < 20; ++rep) {
      Cplx lambda = rng.complex_in_disc(1.5);
      Cplx beta = k0 * spec.a_poly(lambda);
      Cplx alpha = beta * (k0 * spec.a_poly(lambda - spec.eta));
      Cplx term1 = alpha * eval(lambda - Cplx(2) * spec.eta);
      Cplx term2 = -beta * t(lambda - spec.eta) * eval(lambda - spec.eta);
      Cplx term3 = qdet2_scalar(spec, lambda) * eval(lambda);
      double scale = std::max({std::abs(term1), std::abs(term2), std::abs(term3), 1e-300});
      worst = std::max(worst, std::abs(term1 + term2 + term3) / scale);
    }
    q.tq_residual = worst;
    return q;
  }
  throw std::runtime_error("baxter_q: no admissible degree M <= N");
}

// ---------------------------------------------------------------------------
// ABA product form (diagonal trig twist)
// ---------------------------------------------------------------------------

/// (-1)^{N M} Π_m B(λ_m) |0>, with B(λ) diagonal in the SoV basis with
/// eigenvalues Π_n sinh(λ - ξ_n^{(h_n)}); returned in the canonical basis.
inline VecC aba_state_trig(const ModelSpecC& spec, const SovBasis<Cplx>& basis,
                           const std::vector<Cplx>& bethe_roots) {
  const Eigen::Index d = spec.dim();
  // |0> = ⊗ (1,0)^T is the first canonical vector
  VecC ref = VecC::Zero(d);
  ref(0) = 1;
  VecC ref_coords = basis.rows * ref;  // <h|0>
  VecC coords(d);
  const int m = static_cast<int>(bethe_roots.size());
  double sign = ((spec.N * m) % 2 == 0) ? 1.0 : -1.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    std::vector<int> h = basis.h_of(i);
    Cplx acc = sign;
    for (const Cplx& root : bethe_roots)
      for (int a = 1; a <= spec.N; ++a) acc *= std::sinh(root - spec.grid(a, h[a - 1]));
    coords(i) = acc * ref_coords(i);
  }
  return solve_refined(basis.rows, coords);
}

}  // namespace sov
