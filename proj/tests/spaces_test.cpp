#include <doctest.h>

#include <cmath>

#include "pidual/optimize.hpp"
#include "pidual/space.hpp"

using namespace pidual;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

// Brute-force dual norm over the unit sphere of a planar space.
double planar_dual_oracle(const NormedSpace& space, const Vector& lambda, double resolution) {
  return grid_oracle(
      [&](const Vector& t) {
        Vector dir = vec2(std::cos(t[0]), std::sin(t[0]));
        return lambda.dot(dir) / space.norm(dir);
      },
      1, 0.0, 6.2832, resolution);
}

}  // namespace

TEST_SUITE("spaces") {

TEST_CASE("euclidean norm") {
  NormedSpace l2 = NormedSpace::lp(Exponent::two(), 2);
  CHECK(l2.norm(vec2(3, 4)) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("half power of l1 is the euclidean norm") {
  NormedSpace l1 = NormedSpace::lp(Exponent::one(), 2);
  NormedSpace half = pth_power(l1, 0.5);
  CHECK(half.norm(vec2(3, 4)) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(half.lp_form().has_value());
  CHECK(half.lp_form()->p == Exponent::two());

  SplitRng rng(41);
  NormedSpace l2 = NormedSpace::lp(Exponent::two(), 2);
  for (int k = 0; k < 200; ++k) {
    Vector x = rng.gaussian_vector(2);
    CHECK(std::abs(half.norm(x) - l2.norm(x)) <= 1e-12 * (1.0 + l2.norm(x)));
  }
}

TEST_CASE("weighted l1") {
  NormedSpace w = NormedSpace::weighted_lp(Exponent::one(), vec2(2, 1));
  CHECK(w.norm(vec2(1, 1)) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("norm errors") {
  NormedSpace l2 = NormedSpace::lp(Exponent::two(), 2);
  CHECK_THROWS_AS((void)l2.norm(vec3(1, 2, 3)), Error);
  Vector bad = vec2(1, std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS((void)l2.norm(bad), Error);
}

TEST_CASE("dual norm closed forms") {
  NormedSpace l1 = NormedSpace::lp(Exponent::one(), 3);
  CHECK(dual_norm(l1, vec3(1, -2, 1)).value == doctest::Approx(2.0).epsilon(1e-14));

  NormedSpace l2 = NormedSpace::lp(Exponent::two(), 2);
  DualValue d = dual_norm(l2, vec2(3, 4));
  CHECK(d.value == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(l2.norm(d.attaining) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.attaining.dot(vec2(3, 4)) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("dual norm of a p-th power against the grid oracle") {
  NormedSpace half = pth_power(NormedSpace::lp(Exponent::one(), 2), 0.5);
  DualValue d = dual_norm(half, vec2(3, 4));
  CHECK(d.value == doctest::Approx(5.0).epsilon(1e-12));
  double oracle = planar_dual_oracle(half, vec2(3, 4), 1e-4);
  CHECK(std::abs(d.value - oracle) <= 1e-3);
}

TEST_CASE("kothe dual norms") {
  FiniteMeasure mu = FiniteMeasure::uniform(2);
  NormedSpace L2 = NormedSpace::lattice_lp(mu, Exponent::two());
  CHECK(kothe_dual_norm(L2, vec2(3, 4)) == doctest::Approx(5.0).epsilon(1e-12));

  // Brute force: sup of sum |f g| dmu over the L2(mu) sphere.
  double brute = grid_oracle(
      [&](const Vector& t) {
        Vector f = vec2(std::cos(t[0]), std::sin(t[0]));
        f /= L2.norm(f);
        return std::abs(f[0] * 3.0) + std::abs(f[1] * 4.0);
      },
      1, 0.0, 6.2832, 1e-4);
  CHECK(std::abs(kothe_dual_norm(L2, vec2(3, 4)) - brute) <= 1e-3);

  NormedSpace L1 = NormedSpace::lattice_lp(FiniteMeasure(vec2(0.5, 2.5)), Exponent::one());
  CHECK(kothe_dual_norm(L1, vec2(3, -4)) == doctest::Approx(4.0).epsilon(1e-14));

  NormedSpace Linf = NormedSpace::lattice_lp(FiniteMeasure(vec2(1, 2)), Exponent::infinity());
  CHECK(kothe_dual_norm(Linf, vec2(1, 1)) == doctest::Approx(3.0).epsilon(1e-14));

  NormedSpace plain = NormedSpace::custom(2, [](const Vector& x) { return x.norm(); });
  CHECK_THROWS_AS((void)kothe_dual_norm(plain, vec2(1, 1)), Error);
}

TEST_CASE("p-th power composition and rejection") {
  FiniteMeasure mu(vec2(0.7, 1.3));
  NormedSpace L2 = NormedSpace::lattice_lp(mu, Exponent::two());
  NormedSpace L4 = NormedSpace::lattice_lp(mu, Exponent::of(4));
  NormedSpace half = pth_power(L2, 0.5);
  SplitRng rng(7);
  for (int k = 0; k < 200; ++k) {
    Vector x = rng.gaussian_vector(2);
    CHECK(std::abs(half.norm(x) - L4.norm(x)) <= 1e-12 * (1.0 + L4.norm(x)));
  }

  NormedSpace same = pth_power(L2, 1.0);
  for (int k = 0; k < 50; ++k) {
    Vector x = rng.gaussian_vector(2);
    CHECK(std::abs(same.norm(x) - L2.norm(x)) <= 1e-13 * (1.0 + L2.norm(x)));
  }

  CHECK_THROWS_AS((void)pth_power(L2, 0.0), Error);
  CHECK_THROWS_AS((void)pth_power(L2, 1.5), Error);
  NormedSpace nonlattice = NormedSpace::custom(2, [](const Vector& x) { return x.norm(); });
  CHECK_THROWS_AS((void)pth_power(nonlattice, 0.5), Error);
}

TEST_CASE("iterated powers compose multiplicatively") {
  NormedSpace l1 = NormedSpace::lp(Exponent::one(), 3);
  NormedSpace twice = pth_power(pth_power(l1, 0.5), 0.5);
  NormedSpace direct = pth_power(l1, 0.25);
  SplitRng rng(11);
  for (int k = 0; k < 300; ++k) {
    Vector x = rng.gaussian_vector(3);
    CHECK(std::abs(twice.norm(x) - direct.norm(x)) <= 1e-10 * (1.0 + direct.norm(x)));
  }
}

TEST_CASE("norm axioms on a space zoo") {
  std::vector<NormedSpace> zoo;
  zoo.push_back(NormedSpace::lp(Exponent::one(), 4));
  zoo.push_back(NormedSpace::lp(Exponent::two(), 4));
  zoo.push_back(NormedSpace::lp(Exponent::of(4, 3), 4));
  zoo.push_back(NormedSpace::lp(Exponent::infinity(), 4));
  zoo.push_back(NormedSpace::weighted_lp(Exponent::of(3), vec3(0.5, 1.5, 2.0)));
  zoo.push_back(pth_power(NormedSpace::lp(Exponent::one(), 4), 0.5));
  zoo.push_back(kothe_dual(NormedSpace::lattice_lp(FiniteMeasure(vec3(1, 2, 0.5)),
                                                   Exponent::of(4, 3))));
  SplitRng rng(99);
  for (const NormedSpace& space : zoo) {
    for (int k = 0; k < 1000; ++k) {
      Vector x = rng.gaussian_vector(space.dim());
      Vector y = rng.gaussian_vector(space.dim());
      double alpha = rng.uniform(-2.0, 2.0);
      double nx = space.norm(x), ny = space.norm(y);
      CHECK(std::abs(space.norm(alpha * x) - std::abs(alpha) * nx) <=
            1e-12 * (1.0 + std::abs(alpha) * nx));
      CHECK(space.norm(x + y) <= nx + ny + 1e-10 * (1.0 + nx + ny));
    }
  }
}

TEST_CASE("bidual round trip for closed-form duals") {
  std::vector<NormedSpace> zoo;
  zoo.push_back(NormedSpace::lp(Exponent::one(), 3));
  zoo.push_back(NormedSpace::lp(Exponent::of(3, 2), 3));
  zoo.push_back(NormedSpace::weighted_lp(Exponent::two(), vec3(2, 1, 0.25)));
  zoo.push_back(NormedSpace::lp(Exponent::infinity(), 3));
  SplitRng rng(123);
  for (const NormedSpace& space : zoo) {
    NormedSpace bidual = dual_space(dual_space(space));
    for (int k = 0; k < 200; ++k) {
      Vector x = rng.gaussian_vector(3);
      CHECK(std::abs(bidual.norm(x) - space.norm(x)) <= 1e-10 * (1.0 + space.norm(x)));
    }
    // dual_norm agrees with the dual space's norm.
    for (int k = 0; k < 50; ++k) {
      Vector lam = rng.gaussian_vector(3);
      CHECK(std::abs(dual_norm(space, lam).value - dual_space(space).norm(lam)) <=
            1e-10 * (1.0 + dual_norm(space, lam).value));
    }
  }
}

TEST_CASE("kothe dual of Lp matches the conjugate closed form") {
  SplitRng rng(5);
  for (Exponent p : {Exponent::of(4, 3), Exponent::two(), Exponent::of(4)}) {
    FiniteMeasure mu(rng.uniform_vector(3, 0.25, 2.0));
    NormedSpace Lp = NormedSpace::lattice_lp(mu, p);
    NormedSpace Lq = NormedSpace::lattice_lp(mu, p.conjugate());
    for (int k = 0; k < 200; ++k) {
      Vector g = rng.gaussian_vector(3);
      CHECK(std::abs(kothe_dual_norm(Lp, g) - Lq.norm(g)) <= 1e-8 * (1.0 + Lq.norm(g)));
    }
  }
}

TEST_CASE("lattice ideal property") {
  std::vector<NormedSpace> zoo;
  zoo.push_back(NormedSpace::weighted_lp(Exponent::of(5, 4), vec3(1, 2, 0.5)));
  zoo.push_back(pth_power(NormedSpace::lp(Exponent::one(), 3), 0.5));
  SplitRng rng(17);
  for (const NormedSpace& space : zoo) {
    REQUIRE(space.is_lattice());
    for (int k = 0; k < 1000; ++k) {
      Vector y = rng.gaussian_vector(3);
      Vector shrink = rng.uniform_vector(3, 0.0, 1.0);
      Vector x = (y.array() * shrink.array()).matrix();
      CHECK(space.norm(x) <= space.norm(y) + 1e-12 * (1.0 + space.norm(y)));
    }
  }
}

TEST_CASE("unit balls and coordinate boxes") {
  NormedSpace l1 = NormedSpace::weighted_lp(Exponent::one(), vec2(2, 1));
  UnitBall ball = unit_ball(l1);
  REQUIRE(ball.polyhedral);
  CHECK(ball.extremes.size() == 2);
  for (const Vector& e : ball.extremes)
    CHECK(l1.norm(e) == doctest::Approx(1.0).epsilon(1e-12));

  NormedSpace linf = NormedSpace::lp(Exponent::infinity(), 3);
  UnitBall box = unit_ball(linf);
  REQUIRE(box.polyhedral);
  CHECK(box.extremes.size() == 4);  // one per antipodal pair

  Vector cb = coordinate_box(l1);
  CHECK(cb[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cb[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("custom norms validate at registration") {
  CHECK_THROWS_AS((void)NormedSpace::custom(2, [](const Vector& x) { return x.squaredNorm(); }),
                  Error);  // fails homogeneity
  CHECK_THROWS_AS((void)NormedSpace::custom(2, [](const Vector& x) { return x[0]; }), Error);
  NormedSpace ok = NormedSpace::custom(2, [](const Vector& x) { return 2.0 * x.norm(); });
  CHECK(ok.norm(vec2(3, 4)) == doctest::Approx(10.0).epsilon(1e-14));
}

TEST_CASE("norming functionals pair exactly") {
  std::vector<NormedSpace> zoo;
  zoo.push_back(NormedSpace::lp(Exponent::one(), 3));
  zoo.push_back(NormedSpace::lp(Exponent::of(7, 4), 3));
  zoo.push_back(NormedSpace::lp(Exponent::infinity(), 3));
  zoo.push_back(NormedSpace::weighted_lp(Exponent::two(), vec3(0.5, 2, 1)));
  SplitRng rng(3);
  for (const NormedSpace& space : zoo) {
    for (int k = 0; k < 100; ++k) {
      Vector v = rng.gaussian_vector(3);
      Vector z = norming_functional(space, v);
      CHECK(std::abs(z.dot(v) - space.norm(v)) <= 1e-10 * (1.0 + space.norm(v)));
      CHECK(dual_norm(space, z).value <= 1.0 + 1e-9);
    }
  }
}

}  // TEST_SUITE
