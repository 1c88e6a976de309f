#include <catch2/catch_amalgamated.hpp>

#include "sov/draws.hpp"
#include "sov/spectrum_gl3.hpp"

using namespace sov;

namespace {

/// Diagonalizable twist with a healthy simple spectrum plus its eigen data.
struct TwistData {
  MatC k, w;
  std::vector<Cplx> eigs;  // largest modulus first
};

TwistData draw_diagonalizable_twist(Rng& rng) {
  while (true) {
    MatC k = draw_twist_float(rng, 3, false);
    EigenPairs ep = eigen_decompose(k);
    if (ep.min_gap < 0.15) continue;
    std::vector<int> order{0, 1, 2};
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return std::abs(ep.values[a]) > std::abs(ep.values[b]); });
    if (std::abs(ep.values[order[0]]) < 0.2) continue;
    TwistData out;
    out.k = k;
    out.w.resize(3, 3);
    for (int j = 0; j < 3; ++j) {
      out.w.col(j) = ep.right.col(order[j]);
      out.eigs.push_back(ep.values[order[j]]);
    }
    return out;
  }
}

}  // namespace

TEST_CASE("gl3 N=1 oracle records are the twist eigenvalues scaled by eta") {
  Rng rng(121);
  MatC k = draw_twist_simple_spectrum(rng, 3);
  auto spec = make_gl_rational(3, 1, Cplx(1.0, 0.2), {Cplx(0)}, k);
  auto records = brute_force_spectrum_gl3(spec, rng);
  REQUIRE(records.size() == 3);
  // T1(0) = η K at N=1, ξ=0
  auto kep = eigen_decompose(k);
  std::vector<Cplx> expected;
  for (const Cplx& v : kep.values) expected.push_back(spec.eta * v);
  std::sort(expected.begin(), expected.end(), [](Cplx a, Cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  for (int i = 0; i < 3; ++i) CHECK(std::abs(records[i].t1_nodes[0] - expected[i]) < 1e-10);
}

TEST_CASE("gl3 N=2 oracle yields nine distinct records satisfying the cubic system") {
  Rng rng(122);
  auto spec = draw_float_spec(rng, 3, 2);
  auto records = brute_force_spectrum_gl3(spec, rng);
  REQUIRE(records.size() == 9);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(cubic_system_residual(spec, records[i].t1_nodes) <= 1e-9);
    for (std::size_t j = i + 1; j < records.size(); ++j) {
      double dist = 0;
      for (int a = 0; a < 2; ++a)
        dist = std::max(dist, std::abs(records[i].t1_nodes[a] - records[j].t1_nodes[a]));
      CHECK(dist > 1e-8);
    }
  }
  // perturbed nodes are detected
  auto bad = records[0].t1_nodes;
  bad[0] += Cplx(1e-3, 0);
  CHECK(cubic_system_residual(spec, bad) > 1e-4);
}

TEST_CASE("t2 interpolation matches the fused oracle on records") {
  Rng rng(123);
  auto spec = draw_float_spec(rng, 3, 2);
  auto records = brute_force_spectrum_gl3(spec, rng);
  for (const auto& rec : {records[0], records[4], records[8]}) {
    InterpPoly<Cplx> t2 = t2_from_t1_nodes(spec, rec.t1_nodes);
    // zeros at the ξ_a
    for (int a = 1; a <= spec.N; ++a)
      CHECK(std::abs(t2(spec.xi[a - 1])) < 1e-10 * std::abs(t2(spec.xi[a - 1] + Cplx(1))));
    for (int rep = 0; rep < 5; ++rep) {
      Cplx lambda = rng.complex_in_disc(1.3);
      Cplx oracle = rec.left_covec * transfer2(spec, lambda) * rec.right_vec;
      CHECK(std::abs(t2(lambda) - oracle) <= 1e-9 * std::max(1.0, std::abs(oracle)));
    }
    // defining relations t2(ξ_n - η) = t1(ξ_n - η) t1(ξ_n)
    InterpPoly<Cplx> t1 = t1_interp(spec, rec.t1_nodes);
    for (int a = 1; a <= spec.N; ++a) {
      Cplx shifted = spec.xi[a - 1] - spec.eta;
      CHECK(std::abs(t2(shifted) - t1(shifted) * rec.t1_nodes[a - 1]) <=
            1e-11 * std::max(1.0, std::abs(t2(shifted))));
    }
  }
}

TEST_CASE("gl3 N=1 cubic system closed form") {
  Rng rng(124);
  MatC k = draw_twist_simple_spectrum(rng, 3);
  auto spec = make_gl_rational(3, 1, Cplx(1.0, 0.1), {Cplx(0.2, -0.1)}, k);
  auto records = brute_force_spectrum_gl3(spec, rng);
  for (const auto& rec : records) CHECK(cubic_system_residual(spec, rec.t1_nodes) < 1e-11);
}

TEST_CASE("factorized gl3 eigenvectors match the oracle") {
  Rng rng(125);
  auto spec = draw_float_spec(rng, 3, 2);
  auto basis = build_basis(spec, draw_covector_float(rng, spec.dim()));
  auto records = brute_force_spectrum_gl3(spec, rng);
  for (const auto& rec : records) {
    double wave = 0;
    VecC v = factorized_eigenvector_gl3(spec, basis, rec.t1_nodes, rng, &wave);
    CHECK(wave <= 1e-8);
    CHECK(line_angle(v, rec.right_vec) < 1e-7);
  }
  auto bad = records[0].t1_nodes;
  bad[1] += Cplx(0.05, -0.03);
  CHECK_THROWS_AS(factorized_eigenvector_gl3(spec, basis, bad, rng), RejectedCandidate);
}

TEST_CASE("reference state is a joint eigenstate with the displayed eigenvalues") {
  Rng rng(126);
  auto twist = draw_diagonalizable_twist(rng);
  ModelSpecC spec = draw_float_spec(rng, 3, 2);
  spec.twist = twist.k;
  auto ref = reference_state(spec, twist.w, twist.eigs, rng);
  CHECK(ref.eigen_residual <= 1e-10);
  // t_{1,0}(ξ_a) = γ(ξ_a) with γ0 = k0
  for (int a = 1; a <= spec.N; ++a)
    CHECK(std::abs(ref.t1_nodes[a - 1] - twist.eigs[0] * spec.a_poly(spec.xi[a - 1])) <=
          1e-10 * std::abs(ref.t1_nodes[a - 1]));
  // asymptotics: leading coefficients tr K and ((trK)^2 - trK^2)/2
  CHECK(std::abs(*ref.t1.asym() - spec.twist.trace()) < 1e-12 * std::abs(spec.twist.trace()));
  CHECK(std::abs(*ref.t2.asym() - t2_leading(spec)) < 1e-10 * std::max(1.0, std::abs(t2_leading(spec))));
  // φ ≡ 1 with γ0 = k0
  auto curve = spectral_curve_gl3(spec, ref.t1_nodes, twist.eigs[0], rng);
  CHECK(curve.degree == 0);
  CHECK(curve.curve_residual <= 1e-7);
}

TEST_CASE("spectral curve across the N=2 spectrum") {
  Rng rng(127);
  auto twist = draw_diagonalizable_twist(rng);
  ModelSpecC spec = draw_float_spec(rng, 3, 2);
  spec.twist = twist.k;
  auto records = brute_force_spectrum_gl3(spec, rng);
  Cplx gamma0 = nonzero_twist_eigenvalues(spec)[0];
  CHECK(std::abs(gamma0 - twist.eigs[0]) < 1e-10);
  for (const auto& rec : records) {
    // system-second refinement keeps Lagrange amplification off the nodes
    auto nodes = solve_cubic_system(spec, rec.t1_nodes);
    double moved = 0;
    for (int a = 0; a < spec.N; ++a) moved = std::max(moved, std::abs(nodes[a] - rec.t1_nodes[a]));
    CHECK(moved <= 1e-8);
    auto curve = spectral_curve_gl3(spec, nodes, gamma0, rng);
    CHECK(curve.degree <= spec.N);
    CHECK(curve.curve_residual <= 1e-7);
    CHECK(curve.min_lattice_distance >= 1e-6);
  }
  // replacing γ0 by a non-eigenvalue destroys the leading cancellation
  const auto& rec = records[4];
  bool failed_cleanly = false;
  try {
    auto bad = spectral_curve_gl3(spec, rec.t1_nodes, gamma0 + Cplx(0.37, 0.21), rng);
    failed_cleanly = bad.curve_residual > 1e-2;
  } catch (const std::runtime_error&) {
    failed_cleanly = true;  // no admissible degree: the conditions cannot be met
  }
  CHECK(failed_cleanly);
}

TEST_CASE("curve trivially vanishes at lambda = xi_a - eta") {
  Rng rng(128);
  auto spec = draw_float_spec(rng, 3, 2);
  // all four coefficient functions vanish there
  for (int a = 1; a <= spec.N; ++a) {
    Cplx lambda = spec.xi[a - 1] - spec.eta;
    Cplx g = spec.a_poly(lambda);                         // contains (λ+η-ξ_a) = 0
    Cplx qd = qdet3_scalar(spec, lambda - Cplx(2) * spec.eta);
    CHECK(std::abs(g) < 1e-12);
    CHECK(std::abs(qd) < 1e-9);
  }
}

TEST_CASE("wavefunction and phi-rewriting agree entrywise") {
  Rng rng(129);
  auto twist = draw_diagonalizable_twist(rng);
  ModelSpecC spec = draw_float_spec(rng, 3, 2);
  spec.twist = twist.k;
  auto records = brute_force_spectrum_gl3(spec, rng);
  Cplx gamma0 = twist.eigs[0];
  for (const auto& rec : {records[1], records[5]}) {
    auto curve = spectral_curve_gl3(spec, rec.t1_nodes, gamma0, rng);
    Cplx phi_sq = 1;
    for (int a = 1; a <= spec.N; ++a) {
      Cplx p = curve.eval(spec.xi[a - 1]);
      phi_sq *= p * p;
    }
    const Eigen::Index d = spec.dim();
    SovBasis<Cplx> dummy;  // only h_of is needed
    dummy.spec = spec;
    for (Eigen::Index i = 0; i < d; ++i) {
      std::vector<int> h = dummy.h_of(i);
      Cplx lhs = phi_sq, rhs = 1;
      for (int a = 1; a <= spec.N; ++a) {
        for (int k = 0; k < h[a - 1]; ++k) {
          lhs *= rec.t1_nodes[a - 1];
          rhs *= gamma0 * spec.a_poly(spec.xi[a - 1]) * curve.eval(spec.xi[a - 1] - spec.eta);
        }
        for (int k = 0; k < 2 - h[a - 1]; ++k) rhs *= curve.eval(spec.xi[a - 1]);
      }
      CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max({std::abs(lhs), std::abs(rhs), 1e-30}));
    }
  }
}

TEST_CASE("ABA product rebuilds gl3 eigenvectors from the reference state") {
  Rng rng(130);
  auto twist = draw_diagonalizable_twist(rng);
  ModelSpecC spec = draw_float_spec(rng, 3, 2);
  spec.twist = twist.k;
  auto basis = build_basis(spec, draw_covector_float(rng, spec.dim()));
  auto ref = reference_state(spec, twist.w, twist.eigs, rng);
  auto records = brute_force_spectrum_gl3(spec, rng);
  Cplx gamma0 = twist.eigs[0];
  int nontrivial = 0;
  for (const auto& rec : records) {
    auto curve = spectral_curve_gl3(spec, rec.t1_nodes, gamma0, rng);
    double wave = 0;
    VecC direct = factorized_eigenvector_gl3(spec, basis, rec.t1_nodes, rng, &wave);
    VecC aba = aba_state_gl3(spec, basis, curve.roots, ref.vec);
    CHECK(line_angle(direct, aba) <= 1e-8);
    if (curve.degree == 0) CHECK(line_angle(aba, ref.vec) < 1e-10);
    if (curve.degree > 0) ++nontrivial;
  }
  CHECK(nontrivial > 0);
}

TEST_CASE("gamma0 branch experiment: each nonzero branch solves its own curve") {
  Rng rng(131);
  auto twist = draw_diagonalizable_twist(rng);
  ModelSpecC spec = draw_float_spec(rng, 3, 2);
  spec.twist = twist.k;
  auto records = brute_force_spectrum_gl3(spec, rng);
  const auto& rec = records[3];
  auto branches = nonzero_twist_eigenvalues(spec);
  REQUIRE(branches.size() == 3);
  auto refined = solve_cubic_system(spec, rec.t1_nodes);
  for (const Cplx& gamma0 : branches) {
    auto curve = spectral_curve_gl3(spec, refined, gamma0, rng);
    CHECK(curve.curve_residual <= 1e-6);
  }
}

TEST_CASE("gl3 pairing nonvanishing for simple-spectrum twists") {
  Rng rng(132);
  for (int rep = 0; rep < 3; ++rep) {
    auto twist = draw_diagonalizable_twist(rng);
    ModelSpecC spec = draw_float_spec(rng, 3, 2);
    spec.twist = twist.k;
    auto records = brute_force_spectrum_gl3(spec, rng);
    for (const auto& rec : records) CHECK(rec.pairing > 1e-10);
  }
}
