// gl_3 spectrum: brute-force oracle over both transfer families, the cubic
// node system, t2 interpolation out of t1 data, the third-order quantum
// spectral curve with its φ polynomial, the reference eigenstate, and the
// ABA-type product rewriting.
#pragma once

#include "sov/spectrum_gl2.hpp"

namespace sov {

struct Gl3SpectrumRecord {
  std::vector<Cplx> t1_nodes;   // t1(ξ_a)
  VecC right_vec;
  RowVecC left_covec;
  double pairing = 0;
  double system_residual = 0;
  double wave_residual = 0;
  Cplx gamma0 = 0;
  std::vector<Cplx> phi_roots;
  double curve_residual = 0;
};

/// Degree-N reconstruction of t1 from its N nodes plus the tr K asymptotic.
inline InterpPoly<Cplx> t1_interp(const ModelSpecC& spec, const std::vector<Cplx>& nodes) {
  std::vector<std::pair<Cplx, Cplx>> pts;
  for (int a = 1; a <= spec.N; ++a) pts.emplace_back(spec.xi[a - 1], nodes[a - 1]);
  return InterpPoly<Cplx>(pts, spec.twist.trace());
}

/// t2(λ) = T_{2,1}^{(K,∞)}(λ) + Σ f_{n,1}(λ) t1(ξ_n - η) t1(ξ_n) as a
/// degree-2N polynomial in node-value form: zeros at every ξ_b plus the
/// fusion values on the shifted grid.
inline InterpPoly<Cplx> t2_from_t1_nodes(const ModelSpecC& spec, const std::vector<Cplx>& t1_nodes) {
  InterpPoly<Cplx> t1 = t1_interp(spec, t1_nodes);
  std::vector<std::pair<Cplx, Cplx>> pts;
  for (int b = 1; b <= spec.N; ++b) pts.emplace_back(spec.xi[b - 1], Cplx(0));
  for (int b = 1; b <= spec.N; ++b) {
    Cplx shifted = spec.xi[b - 1] - spec.eta;
    pts.emplace_back(shifted, t1(shifted) * t1_nodes[b - 1]);
  }
  Cplx tr = spec.twist.trace();
  Cplx c2 = (tr * tr - (spec.twist * spec.twist).trace()) / Cplx(2);
  return InterpPoly<Cplx>(pts, c2);
}

inline std::vector<Gl3SpectrumRecord> brute_force_spectrum_gl3(const ModelSpecC& spec, Rng& rng) {
  const Eigen::Index d = spec.dim();
  for (int attempt = 0; attempt < 5; ++attempt) {
    Cplx lambda0 = rng.complex_in_disc(1.3);
    EigenPairs ep = eigen_decompose(transfer1(spec, lambda0));
    if (ep.near_degenerate) continue;
    std::vector<MatC> t_at_nodes;
    for (int a = 1; a <= spec.N; ++a) t_at_nodes.push_back(transfer1(spec, spec.xi[a - 1]));
    std::vector<Gl3SpectrumRecord> records(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      Gl3SpectrumRecord& rec = records[i];
      rec.right_vec = ep.right.col(i);
      rec.left_covec = ep.left.row(i);
      rec.pairing = ep.pairings[i];
      for (int a = 1; a <= spec.N; ++a)
        rec.t1_nodes.push_back(rec.left_covec * t_at_nodes[a - 1] * rec.right_vec);
    }
    std::sort(records.begin(), records.end(),
              [](const Gl3SpectrumRecord& u, const Gl3SpectrumRecord& v) {
                for (std::size_t a = 0; a < u.t1_nodes.size(); ++a) {
                  if (u.t1_nodes[a].real() != v.t1_nodes[a].real())
                    return u.t1_nodes[a].real() < v.t1_nodes[a].real();
                  if (u.t1_nodes[a].imag() != v.t1_nodes[a].imag())
                    return u.t1_nodes[a].imag() < v.t1_nodes[a].imag();
                }
                return false;
              });
    return records;
  }
  throw DegenerateFamily("brute_force_spectrum_gl3: persistent near-degeneracy of T1(λ0)");
}

/// max_a relative residual of
/// x_a [T_{2,1}^{(K,∞)}(ξ_a-2η) + Σ_n f_{n,1}(ξ_a-2η) t1(ξ_n-η) x_n] = qdet(ξ_a-2η).
inline double cubic_system_residual(const ModelSpecC& spec, const std::vector<Cplx>& t1_nodes) {
  InterpPoly<Cplx> t2 = t2_from_t1_nodes(spec, t1_nodes);
  double worst = 0;
  for (int a = 1; a <= spec.N; ++a) {
    Cplx at = spec.xi[a - 1] - Cplx(2) * spec.eta;
    Cplx lhs = t1_nodes[a - 1] * t2(at);
    Cplx rhs = qdet3_scalar(spec, at);
    double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

/// Newton refinement of the N cubic equations in the node unknowns
/// x_a = t1(ξ_a); shifted values are always reconstructed by interpolation.
inline std::vector<Cplx> solve_cubic_system(const ModelSpecC& spec, const std::vector<Cplx>& seed,
                                            int max_iter = 50, double tol = 1e-13) {
  std::vector<Cplx> x = seed;
  auto lagrange = [&](int b, Cplx lambda) -> Cplx {
    Cplx w = 1;
    for (int c = 1; c <= spec.N; ++c) {
      if (c == b) continue;
      w *= (lambda - spec.xi[c - 1]) / (spec.xi[b - 1] - spec.xi[c - 1]);
    }
    return w;
  };
  for (int iter = 0; iter < max_iter; ++iter) {
    InterpPoly<Cplx> t1 = t1_interp(spec, x);
    VecC f(spec.N);
    MatC jac(spec.N, spec.N);
    double scale = 0;
    for (int a = 1; a <= spec.N; ++a) {
      Cplx at = spec.xi[a - 1] - Cplx(2) * spec.eta;
      Cplx g = t2_infinity_h1(spec, at);
      std::vector<Cplx> shifted(spec.N), fw(spec.N);
      for (int n = 1; n <= spec.N; ++n) {
        shifted[n - 1] = t1(spec.xi[n - 1] - spec.eta);
        fw[n - 1] = f_weight_h1(spec, n, at);
        g += fw[n - 1] * shifted[n - 1] * x[n - 1];
      }
      Cplx q = qdet3_scalar(spec, at);
      f(a - 1) = x[a - 1] * g - q;
      scale = std::max({scale, std::abs(q), std::abs(x[a - 1] * g)});
      for (int b = 1; b <= spec.N; ++b) {
        Cplx dg = fw[b - 1] * shifted[b - 1];
        for (int n = 1; n <= spec.N; ++n)
          dg += fw[n - 1] * x[n - 1] * lagrange(b, spec.xi[n - 1] - spec.eta);
        jac(a - 1, b - 1) = x[a - 1] * dg;
        if (a == b) jac(a - 1, b - 1) += g;
      }
    }
    if (f.norm() <= tol * std::max(scale, 1.0)) return x;
    Eigen::FullPivLU<MatC> lu(jac);
    if (!lu.isInvertible()) throw std::runtime_error("solve_cubic_system: singular Jacobian");
    VecC dx = lu.solve(f);
    for (int a = 0; a < spec.N; ++a) x[a] -= dx(a);
  }
  throw std::runtime_error("solve_cubic_system: no convergence");
}

/// Solve for |t> from the wave function Π t1(ξ_n)^{h_n}, then certify both
/// transfer families act diagonally with the interpolated eigenvalues.
inline VecC factorized_eigenvector_gl3(const ModelSpecC& spec, const SovBasis<Cplx>& basis,
                                       const std::vector<Cplx>& t1_nodes, Rng& rng,
                                       double* wave_residual_out = nullptr, double tol = 1e-8) {
  const Eigen::Index d = spec.dim();
  VecC w(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    std::vector<int> h = basis.h_of(i);
    Cplx val = 1;
    for (int a = 0; a < spec.N; ++a)
      for (int k = 0; k < h[a]; ++k) val *= t1_nodes[a];
    w(i) = val;
  }
  VecC v = solve_refined(basis.rows, w);

  InterpPoly<Cplx> t1 = t1_interp(spec, t1_nodes);
  InterpPoly<Cplx> t2 = t2_from_t1_nodes(spec, t1_nodes);
  double worst = 0;
  for (int rep = 0; rep < 3; ++rep) {
    Cplx lambda = rng.complex_in_disc(1.4);
    MatC top1 = transfer1(spec, lambda);
    MatC top2 = transfer2(spec, lambda);
    worst = std::max(worst, (top1 * v - t1(lambda) * v).norm() /
                                std::max(frob_norm(top1) * v.norm(), 1e-300));
    worst = std::max(worst, (top2 * v - t2(lambda) * v).norm() /
                                std::max(frob_norm(top2) * v.norm(), 1e-300));
  }
  if (wave_residual_out) *wave_residual_out = worst;
  if (worst > tol)
    throw RejectedCandidate("factorized_eigenvector_gl3: eigen-equation residual too large");
  return v;
}

// ---------------------------------------------------------------------------
// Quantum spectral curve
// ---------------------------------------------------------------------------

struct SpectralCurve {
  Cplx gamma0 = 0;
  int degree = 0;
  std::vector<Cplx> coeffs;  // monic φ
  std::vector<Cplx> roots;
  double condition_residual = 0;
  double curve_residual = 0;
  double min_lattice_distance = 0;
  std::function<Cplx(Cplx)> eval;
};

/// Nonzero eigenvalues of the twist, largest modulus first (the default γ0
/// branch is the first entry).
inline std::vector<Cplx> nonzero_twist_eigenvalues(const ModelSpecC& spec) {
  EigenPairs ep = eigen_decompose(spec.twist);
  std::vector<Cplx> out;
  for (const Cplx& v : ep.values)
    if (std::abs(v) > 1e-12 * frob_norm(spec.twist)) out.push_back(v);
  std::sort(out.begin(), out.end(), [](Cplx a, Cplx b) { return std::abs(a) > std::abs(b); });
  return out;
}

/// Monic φ of minimal degree M ≤ N with γ(ξ_a) φ(ξ_a-η) = t1(ξ_a) φ(ξ_a);
/// the third-order functional equation is then certified on the 4N-point
/// grid ξ_a + kη, k in {-1,0,1,2}, plus 10 random λ.
inline SpectralCurve spectral_curve_gl3(const ModelSpecC& spec, const std::vector<Cplx>& t1_nodes,
                                        Cplx gamma0, Rng& rng, double accept_tol = 1e-9,
                                        double lattice_margin = 1e-6) {
  InterpPoly<Cplx> t1 = t1_interp(spec, t1_nodes);
  InterpPoly<Cplx> t2 = t2_from_t1_nodes(spec, t1_nodes);
  auto gamma = [&](Cplx lambda) { return gamma0 * spec.a_poly(lambda); };

  for (int m = 0; m <= spec.N; ++m) {
    MatC rows(spec.N, std::max(m, 1));
    VecC rhs(spec.N);
    double row_scale = 0;
    for (int a = 1; a <= spec.N; ++a) {
      Cplx u = gamma(spec.xi[a - 1]);
      Cplx v = t1_nodes[a - 1];
      Cplx zu = spec.xi[a - 1] - spec.eta, zv = spec.xi[a - 1];
      Cplx pu = 1, pv = 1;
      for (int j = 0; j < m; ++j) {
        rows(a - 1, j) = u * pu - v * pv;
        pu *= zu;
        pv *= zv;
      }
      if (m == 0) rows(a - 1, 0) = 0;
      rhs(a - 1) = -(u * pu - v * pv);
      row_scale = std::max({row_scale, std::abs(u * pu), std::abs(v * pv)});
    }
    VecC c;
    double resid;
    if (m == 0) {
      c = VecC::Zero(0);
      resid = rhs.norm() / std::max(row_scale, 1e-300);
    } else {
      Eigen::ColPivHouseholderQR<MatC> qr(rows);
      c = qr.solve(rhs);
      resid = (rows * c - rhs).norm() / std::max(row_scale, 1e-300);
    }
    if (resid > accept_tol) continue;

    SpectralCurve curve;
    curve.gamma0 = gamma0;
    curve.degree = m;
    curve.coeffs.assign(c.data(), c.data() + m);
    curve.condition_residual = resid;
    curve.roots = detail::poly_roots(curve.coeffs);
    curve.min_lattice_distance = std::numeric_limits<double>::infinity();
    for (const Cplx& r : curve.roots)
      for (const Cplx& xi : spec.xi)
        curve.min_lattice_distance = std::min(curve.min_lattice_distance, std::abs(r - xi));
    if (m > 0 && curve.min_lattice_distance < lattice_margin) continue;

    auto coeffs = curve.coeffs;
    auto eval = [coeffs, m](Cplx lambda) -> Cplx {
      Cplx acc = 1;
      for (int j = m - 1; j >= 0; --j) acc = acc * lambda + coeffs[j];
      return acc;
    };
    curve.eval = eval;

    std::vector<Cplx> points;
    for (int a = 1; a <= spec.N; ++a)
      for (int k : {-1, 0, 1, 2}) points.push_back(spec.xi[a - 1] + Cplx(k) * spec.eta);
    for (int rep = 0; rep < 10; ++rep) points.push_back(rng.complex_in_disc(1.5));
    // two passes: lattice points where all four coefficient functions vanish
    // must not be normalized by their own rounding noise
    std::vector<std::pair<double, double>> sums_scales;
    double global_scale = 0;
    for (const Cplx& lambda : points) {
      Cplx g = gamma(lambda);
      Cplx b = g * gamma(lambda - spec.eta);
      Cplx al = b * gamma(lambda - Cplx(2) * spec.eta);
      Cplx term1 = al * eval(lambda - Cplx(3) * spec.eta);
      Cplx term2 = -b * t1(lambda - Cplx(2) * spec.eta) * eval(lambda - Cplx(2) * spec.eta);
      Cplx term3 = g * t2(lambda - Cplx(2) * spec.eta) * eval(lambda - spec.eta);
      Cplx term4 = -qdet3_scalar(spec, lambda - Cplx(2) * spec.eta) * eval(lambda);
      double scale = std::max({std::abs(term1), std::abs(term2), std::abs(term3), std::abs(term4)});
      sums_scales.emplace_back(std::abs(term1 + term2 + term3 + term4), scale);
      global_scale = std::max(global_scale, scale);
    }
    double worst = 0;
    for (const auto& [sum, scale] : sums_scales)
      worst = std::max(worst, sum / std::max({scale, 1e-9 * global_scale, 1e-300}));
    curve.curve_residual = worst;
    return curve;
  }
  throw std::runtime_error("spectral_curve_gl3: no admissible degree M <= N");
}

// ---------------------------------------------------------------------------
// Reference state
// ---------------------------------------------------------------------------

struct ReferenceState {
  VecC vec;                 // Γ_W ⊗ (1,0,0)^T
  std::vector<Cplx> t1_nodes;
  InterpPoly<Cplx> t1, t2;
  Cplx k0 = 0;
  double eigen_residual = 0;
};

/// Common eigenstate built from the Jordan data K = W K_J W^{-1}; requires a
/// nonzero leading Jordan eigenvalue k0.
inline ReferenceState reference_state(const ModelSpecC& spec, const MatC& w_jordan,
                                      const std::vector<Cplx>& jordan_eigs, Rng& rng) {
  Cplx k0 = jordan_eigs[0], k1 = jordan_eigs[1], k2 = jordan_eigs[2];
  if (std::abs(k0) < 1e-12 * frob_norm(spec.twist))
    throw std::invalid_argument("reference_state: k0 must be nonzero");
  ReferenceState ref;
  ref.k0 = k0;
  auto t10 = [&](Cplx lambda) -> Cplx {
    return k0 * spec.a_poly(lambda) + (k1 + k2) * spec.d_poly(lambda);
  };
  // d(λ)[k1 k2 a(λ) + k0(k1+k2) a(λ+η)]: the unique degree-2N polynomial
  // with the central zeros, the (trK² - trK²)/2 asymptotic and both fusion
  // identities against t10
  auto t20 = [&](Cplx lambda) -> Cplx {
    return spec.d_poly(lambda) * (k1 * k2 * spec.a_poly(lambda) +
                                  k0 * (k1 + k2) * spec.a_poly(lambda + spec.eta));
  };
  for (int a = 1; a <= spec.N; ++a) ref.t1_nodes.push_back(t10(spec.xi[a - 1]));
  ref.t1 = t1_interp(spec, ref.t1_nodes);
  ref.t2 = t2_from_t1_nodes(spec, ref.t1_nodes);

  VecC local = VecC::Zero(3);
  local(0) = 1;
  VecC v = w_jordan * local;
  ref.vec = v;
  for (int a = 1; a < spec.N; ++a) {
    VecC next(ref.vec.size() * 3);
    VecC site = w_jordan * local;
    for (Eigen::Index i = 0; i < ref.vec.size(); ++i)
      for (int j = 0; j < 3; ++j) next(i * 3 + j) = ref.vec(i) * site(j);
    ref.vec = next;
  }

  double worst = 0;
  for (int rep = 0; rep < 3; ++rep) {
    Cplx lambda = rng.complex_in_disc(1.4);
    MatC top1 = transfer1(spec, lambda), top2 = transfer2(spec, lambda);
    worst = std::max(worst, (top1 * ref.vec - t10(lambda) * ref.vec).norm() /
                                std::max(frob_norm(top1) * ref.vec.norm(), 1e-300));
    worst = std::max(worst, (top2 * ref.vec - t20(lambda) * ref.vec).norm() /
                                std::max(frob_norm(top2) * ref.vec.norm(), 1e-300));
  }
  ref.eigen_residual = worst;
  return ref;
}

/// Π_m B(λ_m) |t0> with B(λ) diagonal in the SoV basis with eigenvalues
/// Π_a (λ-ξ_a)^{2-h_a} (λ-ξ_a+η)^{h_a}.
inline VecC aba_state_gl3(const ModelSpecC& spec, const SovBasis<Cplx>& basis,
                          const std::vector<Cplx>& phi_roots, const VecC& reference) {
  const Eigen::Index d = spec.dim();
  VecC ref_coords = basis.rows * reference;
  VecC coords(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    std::vector<int> h = basis.h_of(i);
    Cplx acc = 1;
    for (const Cplx& root : phi_roots)
      for (int a = 1; a <= spec.N; ++a) {
        for (int k = 0; k < 2 - h[a - 1]; ++k) acc *= (root - spec.xi[a - 1]);
        for (int k = 0; k < h[a - 1]; ++k) acc *= (root - spec.xi[a - 1] + spec.eta);
      }
    coords(i) = acc * ref_coords(i);
  }
  return solve_refined(basis.rows, coords);
}

}  // namespace sov
