#include <doctest.h>

#include <cmath>

#include "pidual/free_lipschitz.hpp"

using namespace pidual;

namespace {

FiniteMetricSpace two_points(double d) {
  Matrix dist(2, 2);
  dist << 0, d, d, 0;
  return FiniteMetricSpace::from_distances(dist);
}

FiniteMetricSpace chain_three() {
  // 0 - a - b with d(0,a) = d(a,b) = 1 and d(0,b) = 2.
  Matrix dist(3, 3);
  dist << 0, 1, 2, 1, 0, 1, 2, 1, 0;
  return FiniteMetricSpace::from_distances(dist);
}

}  // namespace

TEST_SUITE("freelip") {

TEST_CASE("metric validation") {
  Matrix bad(2, 2);
  bad << 0, 1, 2, 0;
  CHECK_THROWS_AS((void)FiniteMetricSpace::from_distances(bad), Error);
  Matrix violates(3, 3);
  violates << 0, 1, 5, 1, 0, 1, 5, 1, 0;  // 5 > 1 + 1
  CHECK_THROWS_AS((void)FiniteMetricSpace::from_distances(violates), Error);

  // Closure of an edge list always satisfies the triangle inequality.
  FiniteMetricSpace closed =
      FiniteMetricSpace::from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 5.0}});
  CHECK(closed.distance(0, 2) == doctest::Approx(2.0));
}

TEST_CASE("molecule norms on the worked instances") {
  FiniteMetricSpace two = two_points(3.0);
  CHECK(molecule_norm(two, elementary_molecule(two, 1, 0)) ==
        doctest::Approx(3.0).epsilon(1e-12));
  Molecule zero{Vector::Zero(2)};
  CHECK(molecule_norm(two, zero) == 0.0);

  FiniteMetricSpace chain = chain_three();
  CHECK(molecule_norm(chain, elementary_molecule(chain, 2, 0)) ==
        doctest::Approx(2.0).epsilon(1e-12));

  Molecule bad{Vector::Ones(2)};
  CHECK_THROWS_AS((void)molecule_norm(two, bad), Error);
}

TEST_CASE("dual LP agrees by strong duality") {
  FiniteMetricSpace two = two_points(3.0);
  CHECK(lipschitz_dual_norm(two, elementary_molecule(two, 1, 0)) ==
        doctest::Approx(3.0).epsilon(1e-12));
  FiniteMetricSpace chain = chain_three();
  CHECK(lipschitz_dual_norm(chain, elementary_molecule(chain, 2, 0)) ==
        doctest::Approx(2.0).epsilon(1e-12));

  SplitRng rng(7);
  for (int trial = 0; trial < 24; ++trial) {
    Index n = 3 + trial % 6;
    FiniteMetricSpace A = FiniteMetricSpace::random(n, rng);
    Vector r = rng.gaussian_vector(n - 1);
    Molecule z = reduced_to_molecule(r);
    double primal = molecule_norm(A, z);
    double dual = lipschitz_dual_norm(A, z);
    CHECK(std::abs(primal - dual) <= 1e-8 * (1.0 + primal));
  }
}

TEST_CASE("the base-point embedding is an isometry") {
  SplitRng rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    FiniteMetricSpace A = FiniteMetricSpace::random(5, rng);
    for (Index x = 1; x < A.size(); ++x) {
      CHECK(molecule_norm(A, elementary_molecule(A, x, 0)) ==
            doctest::Approx(A.distance(x, 0)).epsilon(1e-10));
    }
    // Elementary molecules attain their single-edge representation.
    for (Index i = 0; i < A.size(); ++i)
      for (Index j = i + 1; j < A.size(); ++j)
        CHECK(molecule_norm(A, elementary_molecule(A, i, j)) ==
              doctest::Approx(A.distance(i, j)).epsilon(1e-10));
  }
}

TEST_CASE("bilinearization identities") {
  FiniteMetricSpace A = two_points(2.0);
  FiniteMetricSpace D = two_points(3.0);
  Matrix values = Matrix::Zero(2, 2);
  values(1, 1) = 6.0;
  LipschitzBiForm T = make_biform(values);
  CHECK(bilinearize(T, elementary_molecule(A, 1, 0), elementary_molecule(D, 1, 0)) ==
        doctest::Approx(6.0));
  Molecule zero{Vector::Zero(2)};
  CHECK(bilinearize(T, zero, elementary_molecule(D, 1, 0)) == 0.0);

  // Rank-one forms factor.
  SplitRng rng(5);
  FiniteMetricSpace A5 = FiniteMetricSpace::random(5, rng);
  FiniteMetricSpace D4 = FiniteMetricSpace::random(4, rng);
  Vector f = rng.gaussian_vector(5), g = rng.gaussian_vector(4);
  f[0] = 0.0;
  g[0] = 0.0;
  LipschitzBiForm rank_one = make_biform(f * g.transpose());
  for (int k = 0; k < 20; ++k) {
    Molecule u = reduced_to_molecule(rng.gaussian_vector(4));
    Molecule v = reduced_to_molecule(rng.gaussian_vector(3));
    double expect = f.dot(u.weights) * g.dot(v.weights);
    CHECK(bilinearize(rank_one, u, v) == doctest::Approx(expect).epsilon(1e-11));
  }
}

TEST_CASE("bi-form norms") {
  FiniteMetricSpace A = two_points(2.0);
  FiniteMetricSpace D = two_points(3.0);
  Matrix values = Matrix::Zero(2, 2);
  values(1, 1) = 6.0;
  NormBracket single = biform_norm(make_biform(values), A, D);
  CHECK(single.lower == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(biform_norm(make_biform(Matrix::Zero(2, 2)), A, D).upper == 0.0);

  // Rank-one forms: the norm splits into the two Lipschitz constants.
  SplitRng rng(5);
  FiniteMetricSpace A5 = FiniteMetricSpace::random(5, rng);
  FiniteMetricSpace D4 = FiniteMetricSpace::random(4, rng);
  for (int k = 0; k < 8; ++k) {
    Vector f = rng.gaussian_vector(5), g = rng.gaussian_vector(4);
    f[0] = 0.0;
    g[0] = 0.0;
    NormBracket b = biform_norm(make_biform(f * g.transpose()), A5, D4);
    double expect = lipschitz_constant(A5, f) * lipschitz_constant(D4, g);
    CHECK(b.lower == doctest::Approx(expect).epsilon(1e-8));
  }
}

TEST_CASE("ascent never exceeds enumeration and usually matches") {
  SplitRng rng(27);
  for (int trial = 0; trial < 12; ++trial) {
    FiniteMetricSpace A = FiniteMetricSpace::random(5, rng);
    FiniteMetricSpace D = FiniteMetricSpace::random(5, rng);
    LipschitzBiForm T = random_biform(A, D, rng);
    double enumerated = biform_norm(T, A, D).lower;
    double ascent = biform_norm_ascent(T, A, D, 8, trial);
    CHECK(ascent <= enumerated + 1e-9 * (1.0 + enumerated));
    CHECK(std::abs(ascent - enumerated) <= 1e-9 * (1.0 + enumerated));
  }
}

TEST_CASE("duality between bi-forms and operators into the Lipschitz dual") {
  SplitRng rng(1);
  for (int trial = 0; trial < 6; ++trial) {
    FiniteMetricSpace A = FiniteMetricSpace::random(4 + trial % 3, rng);
    FiniteMetricSpace D = FiniteMetricSpace::random(3 + trial % 4, rng);
    DualityReport report = verify_lipschitz_duality(A, D, 8, 100 + trial);
    CHECK(report.failures == 0);
    CHECK(report.max_gap <= 1e-6);
  }
}

TEST_CASE("molecule ball vertices support the dual norm") {
  // Sampled cross-validation of the extreme-point description: the support
  // function computed from the claimed vertices must match the Lipschitz
  // constant for arbitrary functionals.
  SplitRng rng(14);
  for (int trial = 0; trial < 6; ++trial) {
    FiniteMetricSpace A = FiniteMetricSpace::random(4, rng);
    NormedSpace mol = molecule_space(A);
    for (int k = 0; k < 10; ++k) {
      Vector phi = rng.gaussian_vector(3);
      Vector f(4);
      f[0] = 0.0;
      f.tail(3) = phi;
      double via_vertices = dual_norm(mol, phi).value;
      CHECK(via_vertices == doctest::Approx(lipschitz_constant(A, f)).epsilon(1e-10));
    }
  }
}

}  // TEST_SUITE
