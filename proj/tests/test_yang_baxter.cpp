#include <catch2/catch_amalgamated.hpp>

#include "sov/model.hpp"
#include "sov/rmatrix.hpp"
#include "sov/rng.hpp"

using namespace sov;

TEST_CASE("rational R at the regularity point is eta P") {
  MatR r = rational_r<Rat>(2, Rat(0), Rat(3, 2));
  MatR p = permutation_op<Rat>(2);
  CHECK(rel_deviation<Rat>(r, Rat(3, 2) * p) == 0);
}

TEST_CASE("rational R n=2 display at lambda=1, eta=1") {
  MatR r = rational_r<Rat>(2, Rat(1), Rat(1));
  MatR expected(4, 4);
  expected << 2, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 2;
  CHECK(rel_deviation(r, expected) == 0);
}

TEST_CASE("rational R n=3 block pattern") {
  Rat lambda(5, 3), eta(1, 2);
  MatR r = rational_r<Rat>(3, lambda, eta);
  // block (i,j) in the first leg is λ δ_ij Id + η E_ji: the a_j / b_i / c_i layout
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      MatR expected = MatR::Zero(3, 3);
      if (i == j) expected = lambda * identity<Rat>(3);
      expected(j, i) += eta;
      CHECK(rel_deviation<Rat>(r.block(i * 3, j * 3, 3, 3), expected) == 0);
    }
}

TEST_CASE("trig R basics") {
  Cplx eta(0.3, 0.0);
  MatC r0 = trig_r(Cplx(0), eta);
  CHECK(rel_deviation<Cplx>(r0, std::sinh(eta) * permutation_op<Cplx>(2)) < 1e-15);
  CHECK(std::abs(trig_r(Cplx(1), eta)(0, 0) - std::sinh(Cplx(1.3))) < 1e-14);
}

TEST_CASE("trig R degenerates to the rational R under rescaling") {
  const double eps = 1e-4;
  Cplx lambda(0.7, 0.2), eta(0.45, -0.1);
  MatC scaled = trig_r(eps * lambda, eps * eta) / eps;
  MatC rational = rational_r<Cplx>(2, lambda, eta);
  CHECK(rel_deviation(scaled, rational) < 1e-6);
}

TEST_CASE("YBE holds exactly for rational draws") {
  Rng rng(31);
  for (int n : {2, 3, 4}) {
    for (int rep = 0; rep < 5; ++rep) {
      Rat lambda = rng.rational(), mu = rng.rational(), eta = rng.nonzero_rational();
      CHECK(ybe_residual_rational<Rat>(n, lambda, mu, eta) == 0);
    }
  }
}

TEST_CASE("YBE float residuals, rational n=3") {
  Rng rng(32);
  double worst = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Cplx l = rng.complex_in_disc(2.0), m = rng.complex_in_disc(2.0), e = rng.complex_in_disc(1.0);
    worst = std::max(worst, ybe_residual_rational<Cplx>(3, l, m, e));
  }
  CHECK(worst <= 1e-13);
}

TEST_CASE("YBE float residuals, trig") {
  Rng rng(33);
  double worst = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Cplx l = rng.complex_in_disc(2.0), m = rng.complex_in_disc(2.0);
    Cplx e = rng.complex_in_disc(1.0) + Cplx(0.2, 0);
    worst = std::max(worst, ybe_residual_trig(l, m, e));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("any K is a symmetry of the rational R") {
  Rng rng(34);
  for (int n : {2, 3}) {
    for (int rep = 0; rep < 50; ++rep) {
      MatR k(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) k(i, j) = rng.rational(8, 3);
      CHECK(scalar_ybe_residual_rational<Rat>(n, k, rng.rational(), rng.nonzero_rational()) == 0);
    }
  }
}

TEST_CASE("trig twist family members are symmetries, generic K is not") {
  Rng rng(35);
  Cplx eta(0.35, 0.15), lambda(0.8, -0.4);
  for (int a : {0, 1}) {
    MatC k = twist_trig(a, Cplx(0.6, 0.25));
    CHECK(scalar_ybe_residual_trig(k, lambda, eta) <= 1e-14);
  }
  MatC dense(2, 2);
  dense << Cplx(1.0, 0.1), Cplx(0.7, -0.2), Cplx(0.4, 0.3), Cplx(-0.9, 0.6);
  CHECK(scalar_ybe_residual_trig(dense, lambda, eta) > 1e-2);
}

TEST_CASE("twist_trig special values") {
  CHECK(rel_deviation<Cplx>(twist_trig(0, Cplx(0)), identity<Cplx>(2)) < 1e-15);
  MatC sx(2, 2);
  sx << 0, 1, 1, 0;
  CHECK(rel_deviation(twist_trig(1, Cplx(0)), sx) < 1e-15);
  MatC k = twist_trig(0, Cplx(0, M_PI / 2));
  CHECK(std::abs(k(0, 0) - Cplx(0, 1)) < 1e-15);
  CHECK(std::abs(k(1, 1) - Cplx(0, -1)) < 1e-15);
}

TEST_CASE("unitarity-type factor of the rational R") {
  // R(λ) Rbar(-λ) ∝ Id with factor (η² - λ²), from the 4x4 symbolic expansion:
  // (λ + ηP)(-λ + ηP) = η² P² - λ² = (η² - λ²) Id
  Rng rng(36);
  Rat lambda = rng.rational(), eta = rng.nonzero_rational();
  MatR prod = rational_r<Rat>(2, lambda, eta) * rational_r<Rat>(2, -lambda, eta);
  CHECK(rel_deviation<Rat>(prod, (eta * eta - lambda * lambda) * identity<Rat>(4)) == 0);
}

TEST_CASE("inhomogeneity validation") {
  MatR k(2, 2);
  k << 2, 0, 0, 3;
  CHECK_THROWS_AS(make_gl_rational_exact(2, 2, Rat(1), {Rat(0), Rat(1)}, k),
                  std::invalid_argument);
  CHECK_NOTHROW(make_gl_rational_exact(2, 2, Rat(1), {Rat(0), Rat(3)}, k));
  CHECK_THROWS_AS(make_trig(2, Cplx(0.5), {Cplx(0.1), Cplx(0.1, M_PI)}, 0, Cplx(0.3)),
                  std::invalid_argument);
}
