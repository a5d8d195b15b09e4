#include <doctest.h>

#include <cmath>

#include "pidual/vector_measure.hpp"

using namespace pidual;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

VectorMeasure scalar_measure() {
  Matrix atoms(2, 1);
  atoms << 1, -2;
  return VectorMeasure(atoms, NormedSpace::lp(Exponent::two(), 1));
}

VectorMeasure basis_measure_linf() {
  Matrix atoms(2, 2);
  atoms << 1, 0, 0, 1;
  return VectorMeasure(atoms, NormedSpace::lp(Exponent::infinity(), 2));
}

VectorMeasure random_measure(Index n, Index k, Exponent value_p, SplitRng& rng) {
  NormedSpace X = NormedSpace::lp(value_p, k);
  Matrix atoms(n, k);
  for (Index i = 0; i < n; ++i) {
    Vector row = rng.gaussian_vector(k);
    while (X.norm(row) < 1e-2) row = rng.gaussian_vector(k);
    atoms.row(i) = row.transpose();
  }
  return VectorMeasure(std::move(atoms), std::move(X));
}

}  // namespace

TEST_SUITE("vecmeas") {

TEST_CASE("semivariation basics") {
  VectorMeasure scalar = scalar_measure();
  CHECK(semivariation(scalar, {0, 1}) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(semivariation(scalar, {}) == 0.0);

  VectorMeasure basis = basis_measure_linf();
  CHECK(semivariation(basis, {0, 1}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("semivariation is monotone and subadditive") {
  SplitRng rng(21);
  VectorMeasure m = random_measure(6, 3, Exponent::two(), rng);
  std::vector<Index> all = {0, 1, 2, 3, 4, 5};
  std::vector<Index> part_a = {0, 2, 4}, part_b = {1, 3, 5}, sub = {0, 2};
  double whole = semivariation(m, all);
  CHECK(semivariation(m, sub) <= semivariation(m, part_a) + 1e-12);
  CHECK(semivariation(m, part_a) <= whole + 1e-12);
  CHECK(whole <= semivariation(m, part_a) + semivariation(m, part_b) + 1e-10);
}

TEST_CASE("null atoms are rejected") {
  Matrix atoms(2, 2);
  atoms << 1, 0, 0, 0;
  CHECK_THROWS_AS((void)VectorMeasure(atoms, NormedSpace::lp(Exponent::two(), 2)), Error);
}

TEST_CASE("rybakov selection") {
  VectorMeasure scalar = scalar_measure();
  RybakovData r = choose_rybakov(scalar, 1);
  CHECK(std::abs(std::abs(r.functional[0]) - 1.0) <= 1e-12);
  CHECK(r.masses[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.masses[1] == doctest::Approx(2.0).epsilon(1e-12));

  VectorMeasure basis = basis_measure_linf();
  RybakovData rb = choose_rybakov(basis, 1);
  CHECK(rb.masses.minCoeff() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK((rb.masses.array() > 0.0).all());
}

TEST_CASE("lp_m norms") {
  VectorMeasure basis = basis_measure_linf();
  CHECK(lp_m_norm(basis, Exponent::two(), vec2(3, 4)) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(lp_m_norm(basis, Exponent::infinity(), vec2(3, -4)) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK(lp_m_norm(basis, Exponent::two(), Vector::Zero(2)) == 0.0);

  SplitRng rng(33);
  VectorMeasure m = random_measure(4, 2, Exponent::two(), rng);
  for (Index i = 0; i < 4; ++i) {
    Vector chi = Vector::Zero(4);
    chi[i] = 1.0;
    CHECK(lp_m_norm(m, Exponent::one(), chi) ==
          doctest::Approx(m.value_space().norm(m.atom(i))).epsilon(1e-10));
  }
}

TEST_CASE("lp_m norm axioms and lattice property") {
  SplitRng rng(55);
  VectorMeasure m = random_measure(5, 3, Exponent::two(), rng);
  for (Exponent p : {Exponent::of(4, 3), Exponent::two(), Exponent::of(4)}) {
    for (int k = 0; k < 200; ++k) {
      Vector f = rng.gaussian_vector(5), g = rng.gaussian_vector(5);
      double alpha = rng.uniform(-2, 2);
      double nf = lp_m_norm(m, p, f), ng = lp_m_norm(m, p, g);
      CHECK(std::abs(lp_m_norm(m, p, alpha * f) - std::abs(alpha) * nf) <=
            1e-10 * (1.0 + std::abs(alpha) * nf));
      CHECK(lp_m_norm(m, p, f + g) <= nf + ng + 1e-10 * (1.0 + nf + ng));
      Vector shrink = rng.uniform_vector(5, 0.0, 1.0);
      CHECK(lp_m_norm(m, p, (f.array() * shrink.array()).matrix()) <= nf + 1e-12 * (1 + nf));
    }
  }
}

TEST_CASE("integration is the atom sum") {
  Matrix atoms(2, 2);
  atoms << 1, 0, 0, 1;
  VectorMeasure m(atoms, NormedSpace::lp(Exponent::two(), 2));
  CHECK((integrate(m, vec2(1, 1)) - vec2(1, 1)).norm() == 0.0);
  CHECK(integrate(m, Vector::Zero(2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((integrate(m, vec2(2, 3)) - vec2(2, 3)).norm() == 0.0);
}

TEST_CASE("rn derivatives") {
  VectorMeasure scalar = scalar_measure();
  RybakovData r = choose_rybakov(scalar, 1);
  Vector h0 = rn_derivative(scalar, r, r.functional);
  CHECK(std::abs(h0[0]) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(h0[1]) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rn_derivative(scalar, r, Vector::Zero(1)).cwiseAbs().maxCoeff() == 0.0);

  RybakovData unit{Vector::Ones(1), vec2(1, 2)};
  Vector z(1);
  z << 2.0;
  Vector h = rn_derivative(scalar, unit, z);
  CHECK(h[0] == doctest::Approx(2.0));
  CHECK(h[1] == doctest::Approx(-2.0));
}

TEST_CASE("rn derivatives are feasible in the Koethe dual of L1(m)") {
  SplitRng rng(77);
  for (Exponent value_p : {Exponent::one(), Exponent::two(), Exponent::infinity()}) {
    VectorMeasure m = random_measure(4, 2, value_p, rng);
    RybakovData ryb = choose_rybakov(m, 9);
    for (int k = 0; k < 6; ++k) {
      Vector z = rng.gaussian_vector(2);
      double zn = dual_norm(m.value_space(), z).value;
      if (zn == 0.0) continue;
      Vector h = rn_derivative(m, ryb, z);
      CHECK(l1m_kothe_dual_norm(m, ryb, h) <= zn + 1e-9 * (1.0 + zn));
    }
  }
}

TEST_CASE("duality norm formula") {
  SplitRng rng(101);
  int idx = 0;
  for (Exponent p : {Exponent::of(4, 3), Exponent::two(), Exponent::of(4)}) {
    for (Index k : {1, 2, 3}) {
      VectorMeasure m = random_measure(4, k, k == 2 ? Exponent::infinity() : Exponent::two(),
                                       rng);
      DualityReport report = verify_lp_duality_norm(m, p, 8, 500 + idx++);
      CHECK(report.failures == 0);
      CHECK(report.max_gap <= 1e-6);
    }
  }
}

TEST_CASE("sup-norm identification") {
  SplitRng rng(202);
  VectorMeasure m = random_measure(5, 2, Exponent::two(), rng);
  DualityReport report = verify_linf_identification(m, Exponent::two(), 10, 7);
  CHECK(report.failures == 0);
  CHECK(report.max_gap <= 1e-6);

  // Worked example: two atoms, h0 = (2, 5) gives 5.
  VectorMeasure basis = basis_measure_linf();
  DualityReport r2 = verify_linf_identification(basis, Exponent::two(), 3, 7);
  CHECK(r2.failures == 0);
}

TEST_CASE("predual identity") {
  SplitRng rng(303);
  int idx = 0;
  for (Exponent p : {Exponent::of(4, 3), Exponent::two(), Exponent::of(4)}) {
    VectorMeasure m = random_measure(4, 2, Exponent::two(), rng);
    DualityReport report = verify_predual(m, p, 6, 900 + idx++);
    CHECK(report.failures == 0);
    CHECK(report.max_gap <= 1e-6);
  }
  VectorMeasure linf_m = random_measure(5, 3, Exponent::infinity(), rng);
  DualityReport report = verify_predual(linf_m, Exponent::two(), 6, 1000);
  CHECK(report.failures == 0);
}

TEST_CASE("L^p(m) plugs into the space machinery") {
  SplitRng rng(505);
  VectorMeasure m = random_measure(4, 2, Exponent::two(), rng);
  NormedSpace Lp = lp_m_space(m, Exponent::two());
  CHECK(Lp.is_lattice());
  for (int k = 0; k < 50; ++k) {
    Vector f = rng.gaussian_vector(4);
    CHECK(Lp.norm(f) == doctest::Approx(lp_m_norm(m, Exponent::two(), f)).epsilon(1e-14));
    Vector z = norming_functional(Lp, f);
    CHECK(std::abs(z.dot(f) - Lp.norm(f)) <= 1e-9 * (1.0 + Lp.norm(f)));
  }
}

TEST_CASE("hoelder chain on samples") {
  SplitRng rng(404);
  VectorMeasure m = random_measure(4, 2, Exponent::two(), rng);
  RybakovData ryb = choose_rybakov(m, 11);
  Exponent p = Exponent::two();
  for (int k = 0; k < 40; ++k) {
    Vector f = rng.gaussian_vector(4), g = rng.gaussian_vector(4);
    Vector z = rng.gaussian_vector(2);
    double zn = dual_norm(m.value_space(), z).value;
    if (zn == 0.0) continue;
    Vector h = rn_derivative(m, ryb, z / zn);
    double pairing =
        std::abs((f.array() * g.array() * h.array() * ryb.masses.array()).sum());
    double fg_l1 = lp_m_norm(m, Exponent::one(), (f.array() * g.array()).matrix());
    double hk = l1m_kothe_dual_norm(m, ryb, h);
    CHECK(pairing <= fg_l1 * hk + 1e-9 * (1.0 + pairing));
    CHECK(fg_l1 <= lp_m_norm(m, p, f) * lp_m_norm(m, p.conjugate(), g) +
                       1e-9 * (1.0 + fg_l1));
  }
}

}  // TEST_SUITE
