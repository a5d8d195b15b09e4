#include "pidual/kothe_duality.hpp"

#include <cmath>

namespace pidual {

namespace {

void require_shared_measure(const NormedSpace& X, const NormedSpace& Y) {
  require(X.dim() == Y.dim(), ErrorKind::Dimension, "spaces live on different atom counts");
  require(X.is_lattice() && Y.is_lattice(), ErrorKind::UnsupportedStructure,
          "pi-products are defined for lattice spaces");
  require(X.measure().has_value() && Y.measure().has_value(),
          ErrorKind::UnsupportedStructure, "spaces carry no measure");
  require((X.measure()->masses() - Y.measure()->masses()).lpNorm<Eigen::Infinity>() <=
              1e-14 * std::max(1.0, X.measure()->masses().lpNorm<Eigen::Infinity>()),
          ErrorKind::UnsupportedStructure, "incompatible measures");
}

NormedSpace ambient_product_space(const NormedSpace& X, const NormedSpace& Y,
                                  const FiniteMeasure& mu) {
  if (auto fill = coordinatewise_fill(X, Y)) return *fill;
  return NormedSpace::lattice_lp(mu, Exponent::one());
}

}  // namespace

PiProductSpace make_pi_product(NormedSpace X, NormedSpace Y, PiOptions engine) {
  require_shared_measure(X, Y);
  FiniteMeasure mu = *X.measure();
  return PiProductSpace{std::move(X), std::move(Y), std::move(mu), std::move(engine)};
}

NormBracket product_norm(const PiProductSpace& pp, const Vector& h) {
  require(h.size() == pp.left.dim(), ErrorKind::Dimension,
          "product_norm: target has wrong atom count");
  NormedSpace G = ambient_product_space(pp.left, pp.right, pp.mu);
  BilinearMap c = BilinearMap::pointwise(pp.left, pp.right, G);
  return pi_c_bracket(c, h, pp.engine);
}

double mult_space_norm(const NormedSpace& X, const NormedSpace& Y, const Vector& g) {
  require_shared_measure(X, Y);
  require(g.size() == X.dim(), ErrorKind::Dimension, "mult_space_norm: bad multiplier");
  if (X.lp_form() && Y.lp_form()) {
    const LpForm& fx = *X.lp_form();
    const LpForm& fy = *Y.lp_form();
    auto transform = [](const LpForm& f) {
      if (f.p.is_infinite()) return f.weights;
      return Vector(f.weights.array().pow(f.p.reciprocal()).matrix());
    };
    Vector d = (g.cwiseAbs().array() * transform(fy).array() / transform(fx).array()).matrix();
    return diagonal_lp_opnorm(d, fx.p, fy.p);
  }
  Matrix D = Matrix::Zero(X.dim(), X.dim());
  D.diagonal() = g;
  return operator_norm(D, X, Y).lower;
}

FactorSplit factorization_split(const NormedSpace& X, double p, const Vector& f) {
  require(p > 1.0 && std::isfinite(p), ErrorKind::Config,
          "factorization_split: p must lie in (1, inf)");
  require(X.is_lattice(), ErrorKind::UnsupportedStructure,
          "factorization_split: X must be a lattice");
  require(f.size() == X.dim(), ErrorKind::Dimension, "factorization_split: bad vector");
  FactorSplit out;
  const double pc = p / (p - 1.0);
  out.g = (f.array().sign() * f.array().abs().pow(1.0 / p)).matrix();
  out.h = f.array().abs().pow(1.0 / pc).matrix();
  if (f.lpNorm<Eigen::Infinity>() == 0.0) {
    out.cost = 0.0;
    return out;
  }
  NormedSpace Xp = pth_power(X, 1.0 / p);
  NormedSpace Xpc = pth_power(X, 1.0 / pc);
  out.cost = Xp.norm(out.g) * Xpc.norm(out.h);
  return out;
}

DualityReport verify_kothe_product_duality(const NormedSpace& X, const NormedSpace& Y,
                                           int samples, std::uint64_t seed) {
  require_shared_measure(X, Y);
  const Vector& mu = X.measure()->masses();
  const Index n = X.dim();

  // Precondition X <= Y' as sets; at the Lebesgue-exponent level this is
  // 1/p + 1/q <= 1, and a sampled norm comparison backs it up.
  std::optional<Exponent> oracle_exponent;
  if (X.lp_form() && Y.lp_form()) {
    ProductExponent t = product_exponent(X.lp_form()->p, Y.lp_form()->p);
    require(!t.sub_one, ErrorKind::UnsupportedStructure,
            "verify_kothe_product_duality: requires 1/p + 1/q <= 1 (X inside Y')");
    oracle_exponent = t.clamped.conjugate();
  }
  {
    SplitRng probe(seed ^ 0xFACEull);
    NormedSpace Yd = kothe_dual(Y);
    for (int k = 0; k < 16; ++k) {
      Vector fx = random_unit_vector(X, probe);
      require(Yd.norm(fx) <= 1e6, ErrorKind::UnsupportedStructure,
              "verify_kothe_product_duality: X does not embed into Y'");
    }
  }

  NormedSpace G = ambient_product_space(X, Y, *X.measure());
  BilinearMap c = BilinearMap::pointwise(X, Y, G);
  NormedSpace scalar = NormedSpace::lp(Exponent::two(), 1);
  NormedSpace Ydual = kothe_dual(Y);

  DualityReport report;
  SplitRng rng(seed);
  for (int s = 0; s < samples; ++s) {
    SplitRng sub = rng.stream(static_cast<std::uint64_t>(s));
    Vector j = s == 0 ? Vector(Vector::Zero(n)) : sub.gaussian_vector(n);

    DualityRecord rec;
    rec.family = "bfs_kothe";
    rec.instance_id = "j" + std::to_string(s);
    rec.seed = seed;

    // Product route: the Koethe functional j acts as the plain functional
    // j * mu on the product space; its norm is the bi-sup of Theorem-style
    // simple tensors.
    Vector lambda = (j.array() * mu.array()).matrix();
    Matrix T(1, n);
    T.row(0) = lambda.transpose();
    NormBracket lhs = phi_norm(c, T, scalar);

    // Certified product-unit sampling can only fall below the sup.
    double sampled = 0.0;
    for (int k = 0; k < 8; ++k) {
      Vector fx = random_unit_vector(X, sub);
      Vector fy = random_unit_vector(Y, sub);
      sampled = std::max(sampled, std::abs(lambda.dot(c.evaluate(fx, fy))));
    }

    double rhs = mult_space_norm(X, Ydual, j);
    rec.lhs_lower = lhs.lower;
    rec.lhs_upper = lhs.upper;
    rec.rhs_lower = rec.rhs_upper = rhs;
    rec.gap = std::abs(lhs.midpoint() - rhs);
    rec.provenance = lhs.provenance;

    double scale = std::max(1.0, rhs);
    rec.failure = rec.gap > 1e-6 * scale || sampled > lhs.upper + 1e-8 * scale;
    if (oracle_exponent.has_value()) {
      double oracle = NormedSpace::lattice_lp(*X.measure(), *oracle_exponent).norm(j);
      rec.note = "oracle=" + format_double(oracle) + ";sampled=" + format_double(sampled);
      if (std::abs(lhs.midpoint() - oracle) > 1e-6 * scale ||
          std::abs(rhs - oracle) > 1e-6 * scale) {
        rec.failure = true;
      }
    }
    if (lhs.primal_witness.has_value() && !lhs.primal_witness->terms.empty()) {
      rec.witness = witness_pair(lhs.primal_witness->terms[0].first,
                                 lhs.primal_witness->terms[0].second);
    }
    report.add(std::move(rec));
  }
  return report;
}

}  // namespace pidual
