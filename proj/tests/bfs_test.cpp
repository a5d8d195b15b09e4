#include <doctest.h>

#include <cmath>

#include "pidual/kothe_duality.hpp"
#include "pidual/optimize.hpp"

using namespace pidual;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

PiOptions light_options(std::uint64_t seed = 1) {
  PiOptions opt;
  opt.restarts = 4;
  opt.subgradient_iters = 300;
  opt.seed = seed;
  return opt;
}

}  // namespace

TEST_SUITE("bfs") {

TEST_CASE("product norm of the square split") {
  FiniteMeasure mu = FiniteMeasure::uniform(2);
  NormedSpace L2 = NormedSpace::lattice_lp(mu, Exponent::two());
  PiProductSpace pp = make_pi_product(L2, L2, light_options());
  NormBracket b = product_norm(pp, vec2(4, 9));
  CHECK(b.lower == doctest::Approx(13.0).epsilon(1e-9));
  CHECK(b.upper == doctest::Approx(13.0).epsilon(1e-9));

  NormBracket zero = product_norm(pp, Vector::Zero(2));
  CHECK(zero.lower == 0.0);
  CHECK(zero.upper == 0.0);
}

TEST_CASE("conjugate powers of L1 recover the L1 norm") {
  SplitRng rng(42);
  for (Exponent p : {Exponent::of(4, 3), Exponent::two(), Exponent::of(4)}) {
    FiniteMeasure mu(rng.uniform_vector(3, 0.5, 2.0));
    NormedSpace X1 = NormedSpace::lattice_lp(mu, Exponent::one());
    NormedSpace E = pth_power(X1, 1.0 / p.value());
    NormedSpace F = pth_power(X1, 1.0 / p.conjugate().value());
    PiProductSpace pp = make_pi_product(E, F, light_options());
    for (int k = 0; k < 4; ++k) {
      Vector h = rng.gaussian_vector(3);
      NormBracket b = product_norm(pp, h);
      double l1 = X1.norm(h);
      CHECK(std::abs(b.midpoint() - l1) <= 1e-9 * (1.0 + l1));
      CHECK(b.upper - b.lower <= 1e-9 * (1.0 + l1));
    }
  }
}

TEST_CASE("multiplication operator norms") {
  FiniteMeasure mu = FiniteMeasure::uniform(2);
  NormedSpace L2 = NormedSpace::lattice_lp(mu, Exponent::two());
  NormedSpace L1 = NormedSpace::lattice_lp(mu, Exponent::one());
  CHECK(mult_space_norm(L2, L1, vec2(3, 4)) == doctest::Approx(5.0).epsilon(1e-12));

  // Brute force over the L2 sphere.
  double brute = grid_oracle(
      [&](const Vector& t) {
        Vector f = vec2(std::cos(t[0]), std::sin(t[0]));
        f /= L2.norm(f);
        return L1.norm((f.array() * vec2(3, 4).array()).matrix());
      },
      1, 0.0, 6.2832, 1e-4);
  CHECK(std::abs(brute - 5.0) <= 1e-3);

  NormedSpace L3a = NormedSpace::lattice_lp(mu, Exponent::of(3));
  CHECK(mult_space_norm(L3a, L3a, vec2(3, -4)) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(mult_space_norm(L2, L1, Vector::Zero(2)) == 0.0);

  FiniteMeasure other(vec2(1, 3));
  NormedSpace mismatched = NormedSpace::lattice_lp(other, Exponent::two());
  CHECK_THROWS_AS((void)mult_space_norm(L2, mismatched, vec2(1, 1)), Error);
}

TEST_CASE("kothe product duality on exponent instances") {
  SplitRng rng(7);
  struct Case {
    Exponent p, q;
  };
  for (const Case& cs : {Case{Exponent::two(), Exponent::two()},
                         Case{Exponent::of(4, 3), Exponent::of(4)},
                         Case{Exponent::of(2), Exponent::of(4)}}) {
    for (Index n : {2, 5, 6}) {
      FiniteMeasure mu(rng.uniform_vector(n, 0.5, 2.0));
      NormedSpace X = NormedSpace::lattice_lp(mu, cs.p);
      NormedSpace Y = NormedSpace::lattice_lp(mu, cs.q);
      DualityReport report = verify_kothe_product_duality(X, Y, 6, 99);
      CHECK(report.failures == 0);
      CHECK(report.max_gap <= 1e-6);
    }
  }
}

TEST_CASE("kothe duality rejects exponent pairs outside the embedding") {
  FiniteMeasure mu = FiniteMeasure::uniform(3);
  NormedSpace X = NormedSpace::lattice_lp(mu, Exponent::of(4, 3));
  NormedSpace Y = NormedSpace::lattice_lp(mu, Exponent::of(4, 3));
  // 3/4 + 3/4 > 1: X does not embed into Y'.
  CHECK_THROWS_AS((void)verify_kothe_product_duality(X, Y, 2, 1), Error);
}

TEST_CASE("half-power instance gives sup norms on both sides") {
  FiniteMeasure mu = FiniteMeasure::uniform(3);
  NormedSpace X1 = NormedSpace::lattice_lp(mu, Exponent::one());
  NormedSpace X = pth_power(X1, 0.5);  // = L^2(mu)
  NormedSpace Y = NormedSpace::lattice_lp(mu, Exponent::two());
  DualityReport report = verify_kothe_product_duality(X, Y, 6, 5);
  CHECK(report.failures == 0);
  // Both sides are the L^inf norm of the functional.
  NormedSpace Yd = kothe_dual(Y);
  SplitRng rng(3);
  for (int k = 0; k < 10; ++k) {
    Vector j = rng.gaussian_vector(3);
    CHECK(std::abs(mult_space_norm(X, Yd, j) - j.cwiseAbs().maxCoeff()) <=
          1e-10 * (1.0 + j.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("factorization splits") {
  NormedSpace l1 = NormedSpace::lp(Exponent::one(), 2);
  FactorSplit fs = factorization_split(l1, 2.0, vec2(4, 9));
  CHECK((fs.g - vec2(2, 3)).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK((fs.h - vec2(2, 3)).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(fs.cost == doctest::Approx(13.0).epsilon(1e-10));

  FactorSplit zero = factorization_split(l1, 2.0, Vector::Zero(2));
  CHECK(zero.cost == 0.0);

  FactorSplit quart = factorization_split(l1, 4.0, vec2(16, 81));
  CHECK((quart.g - vec2(2, 3)).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK((quart.h - vec2(8, 27)).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(quart.cost == doctest::Approx(97.0).epsilon(1e-10));

  CHECK_THROWS_AS((void)factorization_split(l1, 1.0, vec2(1, 1)), Error);
  CHECK_THROWS_AS(
      (void)factorization_split(l1, std::numeric_limits<double>::infinity(), vec2(1, 1)),
      Error);
}

TEST_CASE("the single split is optimal for conjugate powers") {
  SplitRng rng(12);
  FiniteMeasure mu(rng.uniform_vector(2, 0.5, 1.5));
  NormedSpace X1 = NormedSpace::lattice_lp(mu, Exponent::one());
  for (double p : {1.5, 2.0, 3.0}) {
    NormedSpace E = pth_power(X1, 1.0 / p);
    NormedSpace F = pth_power(X1, 1.0 - 1.0 / p);
    PiProductSpace pp = make_pi_product(E, F, light_options());
    for (int k = 0; k < 4; ++k) {
      Vector f = rng.gaussian_vector(2);
      FactorSplit fs = factorization_split(X1, p, f);
      NormBracket b = product_norm(pp, f);
      CHECK(b.upper <= fs.cost + 1e-10 * (1.0 + fs.cost));
      CHECK(b.lower >= fs.cost - 1e-6 * (1.0 + fs.cost));
    }
  }
}

TEST_CASE("product norm is monotone in the modulus") {
  FiniteMeasure mu = FiniteMeasure::uniform(2);
  NormedSpace L2 = NormedSpace::lattice_lp(mu, Exponent::two());
  PiProductSpace pp = make_pi_product(L2, L2, light_options());
  SplitRng rng(88);
  for (int k = 0; k < 20; ++k) {
    Vector h = rng.gaussian_vector(2);
    Vector shrink = rng.uniform_vector(2, 0.0, 1.0);
    Vector smaller = (h.array() * shrink.array()).matrix();
    CHECK(product_norm(pp, smaller).upper <=
          product_norm(pp, h).upper + 1e-9 * (1.0 + product_norm(pp, h).upper));
  }
}

}  // TEST_SUITE
