#include <doctest.h>

#include <cmath>

#include "pidual/duality.hpp"

using namespace pidual;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// The scalar-factor map c(r, y) = r y as a custom coefficient array.
BilinearMap scalar_factor(const NormedSpace& F) {
  NormedSpace E = NormedSpace::lp(Exponent::two(), 1);
  std::vector<Matrix> coeff;
  for (Index g = 0; g < F.dim(); ++g) {
    Matrix A = Matrix::Zero(1, F.dim());
    A(0, g) = 1.0;
    coeff.push_back(A);
  }
  return BilinearMap::custom(E, F, F, std::move(coeff));
}

}  // namespace

TEST_SUITE("dualgate") {

TEST_CASE("scalar factor collapses to the dual norm") {
  NormedSpace F = NormedSpace::lp(Exponent::two(), 2);
  BilinearMap c = scalar_factor(F);
  NormedSpace X = NormedSpace::lp(Exponent::two(), 1);
  Matrix T(1, 2);
  T << 3, 4;
  NormBracket phi = phi_norm(c, T, X);
  CHECK(phi.lower == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(phi.upper == doctest::Approx(5.0).epsilon(1e-9));
  NormBracket mult = mult_norm(c, T, X);
  CHECK(mult.lower == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(mult.upper == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("pointwise identity operator has norm one") {
  NormedSpace l2 = NormedSpace::lp(Exponent::two(), 2);
  NormedSpace l1 = NormedSpace::lp(Exponent::one(), 2);
  BilinearMap c = BilinearMap::pointwise(l2, l2, l1);
  Matrix T = Matrix::Identity(2, 2);
  NormBracket phi = phi_norm(c, T, l1);
  CHECK(phi.lower == doctest::Approx(1.0).epsilon(1e-9));
  NormBracket mult = mult_norm(c, T, l1);
  CHECK(mult.lower == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(phi.midpoint() - mult.midpoint()) <= 1e-9);

  Matrix zero = Matrix::Zero(2, 2);
  CHECK(phi_norm(c, zero, l1).upper == 0.0);
  CHECK(mult_norm(c, zero, l1).upper == 0.0);
}

TEST_CASE("scalar-factor family: one hundred functionals, zero gap") {
  SplitRng rng(1001);
  for (Exponent p : {Exponent::one(), Exponent::of(3, 2), Exponent::two(),
                     Exponent::infinity()}) {
    NormedSpace F = NormedSpace::lp(p, 3);
    BilinearMap c = scalar_factor(F);
    OperatorClass V{{}, NormedSpace::lp(Exponent::two(), 1)};
    for (int t = 0; t < 25; ++t) V.members.push_back(rng.gaussian_vector(3).transpose());
    DualityReport report = verify_duality("trivial", "inst", c, V, {});
    CHECK(report.failures == 0);
    CHECK(report.max_gap <= 1e-10);
  }
}

TEST_CASE("pointwise diagonal class verifies the isometry") {
  NormedSpace l2 = NormedSpace::lp(Exponent::two(), 2);
  NormedSpace l1 = NormedSpace::lp(Exponent::one(), 2);
  BilinearMap c = BilinearMap::pointwise(l2, l2, l1);
  OperatorClass V{{}, l1};
  SplitRng rng(17);
  for (int t = 0; t < 8; ++t) {
    Matrix T = Matrix::Zero(2, 2);
    T.diagonal() = rng.gaussian_vector(2);
    V.members.push_back(T);
  }
  DualityReport report = verify_duality("pointwise", "inst", c, V, {});
  CHECK(report.failures == 0);
  CHECK(report.max_gap <= 1e-7);
}

TEST_CASE("product ball samples stay inside and reach the phi norm") {
  NormedSpace l1 = NormedSpace::lp(Exponent::one(), 2);
  BilinearMap c = BilinearMap::tensor(l1, l1, NormedSpace::lp(Exponent::two(), 4));
  NormedSpace X = NormedSpace::lp(Exponent::two(), 1);
  SplitRng rng(3);
  for (int t = 0; t < 6; ++t) {
    Matrix T = rng.gaussian_vector(4).transpose();
    NormBracket phi = phi_norm(c, T, X);
    double sampled = phi_product_ball(c, T, X);
    CHECK(sampled <= phi.upper + 1e-8 * (1.0 + phi.upper));
    CHECK(sampled >= phi.lower - 1e-3 * (1.0 + phi.lower));
  }
}

TEST_CASE("mult norm never exceeds the T times c bound") {
  NormedSpace l2 = NormedSpace::lp(Exponent::two(), 2);
  NormedSpace l1 = NormedSpace::lp(Exponent::one(), 2);
  BilinearMap c = BilinearMap::pointwise(l2, l2, l1);
  NormBracket cb = estimate_bound(c);
  SplitRng rng(5);
  for (int t = 0; t < 20; ++t) {
    Matrix T(2, 2);
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j) T(i, j) = rng.gaussian();
    NormBracket mult = mult_norm(c, T, l1);
    OperatorNorm tn = operator_norm(T, l1, l1);
    CHECK(mult.lower <= tn.upper * cb.upper + 1e-9 * (1.0 + mult.lower));
  }
}

TEST_CASE("the zero operator class") {
  NormedSpace l2 = NormedSpace::lp(Exponent::two(), 2);
  NormedSpace l1 = NormedSpace::lp(Exponent::one(), 2);
  BilinearMap c = BilinearMap::pointwise(l2, l2, l1);
  OperatorClass V{{Matrix::Zero(2, 2)}, l1};
  DualityReport report = verify_duality("zero", "inst", c, V, {});
  REQUIRE(report.records.size() == 1);
  CHECK(report.records[0].lhs_upper == 0.0);
  CHECK(report.records[0].rhs_upper == 0.0);
  CHECK(report.failures == 0);
}

TEST_CASE("phi and mult run deliberately different routes yet agree") {
  // Mixed polyhedral/smooth pairs across kinds; the isometry must hold at
  // certified tolerance whenever both sides certify.
  SplitRng rng(90);
  std::vector<BilinearMap> maps;
  maps.push_back(BilinearMap::tensor(NormedSpace::lp(Exponent::one(), 2),
                                     NormedSpace::lp(Exponent::two(), 3),
                                     NormedSpace::lp(Exponent::two(), 6)));
  maps.push_back(BilinearMap::scalar_pairing(NormedSpace::lp(Exponent::infinity(), 3),
                                             NormedSpace::lp(Exponent::one(), 3),
                                             NormedSpace::lp(Exponent::two(), 1)));
  for (const BilinearMap& c : maps) {
    OperatorClass V{{}, NormedSpace::lp(Exponent::two(), 1)};
    for (int t = 0; t < 6; ++t)
      V.members.push_back(rng.gaussian_vector(c.codomain().dim()).transpose());
    DualityReport report = verify_duality("mixed", "inst", c, V, {});
    CHECK(report.failures == 0);
    CHECK(report.max_certified_gap <= 1e-7);
    CHECK(report.max_heuristic_gap <= 1e-4);
  }
}

}  // TEST_SUITE
