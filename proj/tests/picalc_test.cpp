#include <doctest.h>

#include <cmath>

#include "pidual/product_norm.hpp"

using namespace pidual;

namespace {

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

BilinearMap pointwise_l2(Index n) {
  NormedSpace l2 = NormedSpace::lp(Exponent::two(), n);
  NormedSpace l1 = NormedSpace::lp(Exponent::one(), n);
  return BilinearMap::pointwise(l2, l2, l1);
}

BilinearMap pairing_l1(Index n) {
  NormedSpace l1 = NormedSpace::lp(Exponent::one(), n);
  return BilinearMap::scalar_pairing(l1, l1, NormedSpace::lp(Exponent::two(), 1));
}

PiOptions light_options(std::uint64_t seed = 1) {
  PiOptions opt;
  opt.restarts = 4;
  opt.subgradient_iters = 400;
  opt.seed = seed;
  return opt;
}

}  // namespace

TEST_SUITE("picalc") {

TEST_CASE("upper bound on the signed pointwise instance") {
  BilinearMap c = pointwise_l2(2);
  auto [cost, decomp] = pi_c_upper(c, vec2(1, -1), light_options());
  CHECK(cost == doctest::Approx(2.0).epsilon(1e-9));
  Vector image = Vector::Zero(2);
  for (const auto& [x, y] : decomp.terms) image += c.evaluate(x, y);
  CHECK((image - vec2(1, -1)).norm() <= 1e-9 * 2.0);
}

TEST_CASE("upper bound on the scalar pairing") {
  BilinearMap c = pairing_l1(2);
  auto [cost, decomp] = pi_c_upper(c, vec1(5), light_options());
  CHECK(cost == doctest::Approx(5.0).epsilon(1e-9));
  (void)decomp;
}

TEST_CASE("zero target") {
  BilinearMap c = pointwise_l2(2);
  auto [cost, decomp] = pi_c_upper(c, Vector::Zero(2), light_options());
  CHECK(cost == 0.0);
  CHECK(decomp.terms.empty());
  DualCertificate cert = pi_c_lower(c, Vector::Zero(2), light_options());
  CHECK(cert.bound == 0.0);
  NormBracket b = pi_c_bracket(c, Vector::Zero(2), light_options());
  CHECK(b.lower == 0.0);
  CHECK(b.upper == 0.0);
}

TEST_CASE("lower bounds with certified functionals") {
  BilinearMap c = pointwise_l2(2);
  DualCertificate cert = pi_c_lower(c, vec2(1, -1), light_options());
  CHECK(cert.bound == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(cert.provenance == Provenance::Exact);
  // The certificate is feasible: |lambda(c(x,y))| <= 1 on sampled unit pairs.
  SplitRng rng(64);
  for (int k = 0; k < 200; ++k) {
    Vector x = random_unit_vector(c.left(), rng);
    Vector y = random_unit_vector(c.right(), rng);
    CHECK(std::abs(cert.lambda.dot(c.evaluate(x, y))) <= 1.0 + 1e-9);
  }

  BilinearMap pair = pairing_l1(2);
  DualCertificate pc = pi_c_lower(pair, vec1(5), light_options());
  CHECK(pc.bound == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("brackets on the worked instances") {
  BilinearMap c = pointwise_l2(2);
  NormBracket b = pi_c_bracket(c, vec2(1, -1), light_options());
  CHECK(b.upper - b.lower <= 1e-6 * (1.0 + b.upper));
  CHECK(b.midpoint() == doctest::Approx(2.0).epsilon(1e-8));

  FiniteMeasure mu = FiniteMeasure::uniform(2);
  NormedSpace L2 = NormedSpace::lattice_lp(mu, Exponent::two());
  NormedSpace L1 = NormedSpace::lattice_lp(mu, Exponent::one());
  BilinearMap cw = BilinearMap::pointwise(L2, L2, L1);
  NormBracket bw = pi_c_bracket(cw, vec2(4, 9), light_options());
  CHECK(bw.lower == doctest::Approx(13.0).epsilon(1e-9));
  CHECK(bw.upper == doctest::Approx(13.0).epsilon(1e-9));
}

TEST_CASE("grid oracle agrees with the bracket") {
  BilinearMap c = pointwise_l2(2);
  double oracle = pi_c_oracle(c, vec2(1, -1), 0.01);
  NormBracket b = pi_c_bracket(c, vec2(1, -1), light_options());
  CHECK(std::abs(oracle - b.midpoint()) <= 1e-3);

  BilinearMap pair = pairing_l1(2);
  CHECK(std::abs(pi_c_oracle(pair, vec1(1), 0.01) - 1.0) <= 1e-3);
  CHECK(pi_c_oracle(pair, Vector::Zero(1)) == 0.0);
}

TEST_CASE("bracket soundness against the oracle on an instance zoo") {
  SplitRng rng(2718);
  std::vector<BilinearMap> zoo;
  zoo.push_back(pointwise_l2(2));
  zoo.push_back(pairing_l1(2));
  {
    FiniteMeasure mu(vec2(0.5, 1.5));
    NormedSpace E = NormedSpace::lattice_lp(mu, Exponent::of(4, 3));
    NormedSpace F = NormedSpace::lattice_lp(mu, Exponent::of(4));
    zoo.push_back(BilinearMap::pointwise(E, F, NormedSpace::lattice_lp(mu, Exponent::one())));
  }
  zoo.push_back(BilinearMap::tensor(NormedSpace::lp(Exponent::one(), 2),
                                    NormedSpace::lp(Exponent::two(), 2),
                                    NormedSpace::lp(Exponent::two(), 4)));
  for (const BilinearMap& c : zoo) {
    for (int trial = 0; trial < 3; ++trial) {
      Vector x = rng.gaussian_vector(c.left().dim());
      Vector y = rng.gaussian_vector(c.right().dim());
      Vector target = c.evaluate(x, y);  // guaranteed in range
      if (target.lpNorm<Eigen::Infinity>() < 1e-9) continue;
      NormBracket b = pi_c_bracket(c, target, light_options(trial + 10));
      double oracle = pi_c_oracle(c, target, 0.02);
      CHECK(b.lower <= oracle + 1e-6 * (1.0 + oracle));
      CHECK(oracle <= b.upper + 0.05 * (1.0 + b.upper));
      CHECK(b.lower <= b.upper + 1e-12);
    }
  }
}

TEST_CASE("seminorm axioms on computed upper bounds") {
  FiniteMeasure mu = FiniteMeasure::uniform(3);
  NormedSpace E = NormedSpace::lattice_lp(mu, Exponent::of(4, 3));
  NormedSpace F = NormedSpace::lattice_lp(mu, Exponent::of(4));
  BilinearMap c = BilinearMap::pointwise(E, F, NormedSpace::lattice_lp(mu, Exponent::one()));
  SplitRng rng(31415);
  for (int trial = 0; trial < 20; ++trial) {
    Vector z = rng.gaussian_vector(3);
    Vector w = rng.gaussian_vector(3);
    PiOptions opt = light_options(trial);
    auto [cz, dz] = pi_c_upper(c, z, opt);
    auto [cw, dw] = pi_c_upper(c, w, opt);
    PiOptions merged = opt;
    merged.rank_cap = static_cast<int>(dz.terms.size() + dw.terms.size() + 3);
    Decomposition seed;
    seed.terms = dz.terms;
    seed.terms.insert(seed.terms.end(), dw.terms.begin(), dw.terms.end());
    seed.cost = cz + cw;
    merged.seed_decompositions.push_back(seed);
    auto [czw, dzw] = pi_c_upper(c, z + w, merged);
    (void)dzw;
    CHECK(czw <= cz + cw + 1e-8 * (1.0 + cz + cw));

    // Homogeneity through scaled certificates: the scaled decomposition stays
    // feasible with exactly scaled cost, and the dual certificate scales too.
    double alpha = rng.uniform(0.25, 3.0);
    PiOptions scaled = opt;
    Decomposition seed_scaled;
    for (const auto& [x, y] : dz.terms) seed_scaled.terms.emplace_back(alpha * x, y);
    seed_scaled.cost = alpha * cz;
    scaled.seed_decompositions.push_back(seed_scaled);
    auto [ca, da] = pi_c_upper(c, alpha * z, scaled);
    (void)da;
    CHECK(ca <= alpha * cz + 1e-10 * (1.0 + alpha * cz));
    DualCertificate lz = pi_c_lower(c, z, opt);
    CHECK(ca >= alpha * lz.bound - 1e-8 * (1.0 + alpha * lz.bound));
  }
}

TEST_CASE("single tensors dominate the product norm") {
  BilinearMap c = pointwise_l2(2);
  SplitRng rng(115);
  PiOptions opt = light_options();
  opt.restarts = 1;
  opt.subgradient_iters = 120;
  opt.max_sweeps = 6;
  for (int k = 0; k < 1000; ++k) {
    Vector x = rng.gaussian_vector(2);
    Vector y = rng.gaussian_vector(2);
    Vector target = c.evaluate(x, y);
    Decomposition seed;
    seed.terms.emplace_back(x, y);
    seed.cost = c.left().norm(x) * c.right().norm(y);
    PiOptions local = opt;
    local.seed_decompositions.push_back(seed);
    auto [cost, d] = pi_c_upper(c, target, local);
    (void)d;
    CHECK(cost <= c.left().norm(x) * c.right().norm(y) + 1e-12 * (1.0 + cost));
  }
}

TEST_CASE("the bracket is a function of the image") {
  BilinearMap c = pointwise_l2(2);
  // Two tensor expressions with the same image under the linearization:
  // e1 (x) e1 + e1 (x) e2 maps to e1, and so does e1 (x) e1 alone.
  Vector e1 = vec2(1, 0), e2 = vec2(0, 1);
  Vector image_a = c.evaluate(e1, e1) + c.evaluate(e1, e2);
  Vector image_b = c.evaluate(e1, e1);
  CHECK((image_a - image_b).norm() == 0.0);
  NormBracket ba = pi_c_bracket(c, image_a, light_options());
  NormBracket bb = pi_c_bracket(c, image_b, light_options());
  CHECK(ba.lower == bb.lower);
  CHECK(ba.upper == bb.upper);
  CHECK(ba.midpoint() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("range and infeasibility errors") {
  NormedSpace l2 = NormedSpace::lp(Exponent::two(), 2);
  std::vector<Matrix> coeff(2, Matrix::Zero(2, 2));
  coeff[0] << 1, 0, 0, 1;  // c(x,y) = (x.y, 0): range is the first axis
  BilinearMap c = BilinearMap::custom(l2, l2, NormedSpace::lp(Exponent::two(), 2), coeff);
  CHECK_THROWS_AS((void)pi_c_upper(c, vec2(0, 1), light_options()), Error);
  try {
    (void)pi_c_upper(c, vec2(0, 1), light_options());
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Range);
  }

  // A rank-two tensor target cannot be reached with rank_cap one.
  BilinearMap tens = BilinearMap::tensor(l2, l2, NormedSpace::lp(Exponent::two(), 4));
  Vector identity(4);
  identity << 1, 0, 0, 1;
  PiOptions capped = light_options();
  capped.rank_cap = 1;
  try {
    (void)pi_c_upper(tens, identity, capped);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Infeasible);
  }
}

TEST_CASE("heuristic lower bounds stay inside the certified upper") {
  // Smooth non-Hilbert pair under a generic map: no exact feasibility route
  // exists, so the lower certificate is labeled heuristic.
  NormedSpace l3 = NormedSpace::lp(Exponent::of(3), 2);
  std::vector<Matrix> coeff(2, Matrix::Zero(2, 2));
  coeff[0] << 1, 0.5, -0.25, 1;
  coeff[1] << 0, 1, 1, -0.5;
  BilinearMap c = BilinearMap::custom(l3, l3, NormedSpace::lp(Exponent::two(), 2), coeff);
  SplitRng rng(77);
  for (int trial = 0; trial < 3; ++trial) {
    Vector target = c.evaluate(rng.gaussian_vector(2), rng.gaussian_vector(2));
    if (target.lpNorm<Eigen::Infinity>() < 1e-6) continue;
    PiOptions opt = light_options(trial);
    NormBracket b = pi_c_bracket(c, target, opt);
    CHECK(b.lower <= b.upper + 1e-12);
    CHECK(b.provenance == Provenance::Heuristic);
    double oracle = pi_c_oracle(c, target, 0.02);
    CHECK(oracle <= b.upper + 0.05 * (1.0 + b.upper));
  }
}

TEST_CASE("oracle tractability guard") {
  NormedSpace l2 = NormedSpace::lp(Exponent::two(), 4);
  BilinearMap c = BilinearMap::pointwise(l2, l2, NormedSpace::lp(Exponent::one(), 4));
  CHECK_THROWS_AS((void)pi_c_oracle(c, Vector::Ones(4), 0.01), Error);
}

}  // TEST_SUITE
