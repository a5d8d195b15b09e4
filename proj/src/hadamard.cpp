#include "pidual/hadamard.hpp"

#include <cmath>

namespace pidual {

TruncatedSeries hadamard_product(const TruncatedSeries& f, const TruncatedSeries& g) {
  require(f.coeffs.size() == g.coeffs.size(), ErrorKind::Dimension,
          "hadamard_product: truncation degrees differ");
  return TruncatedSeries{(f.coeffs.array() * g.coeffs.array()).matrix()};
}

NormBracket multiplier_norm(const TruncatedSeries& lambda, const NormedSpace& X,
                            const NormedSpace& Y) {
  require(lambda.coeffs.size() == X.dim() && X.dim() == Y.dim(), ErrorKind::Dimension,
          "multiplier_norm: truncation degrees differ");
  Matrix D = Matrix::Zero(X.dim(), X.dim());
  D.diagonal() = lambda.coeffs;
  OperatorNorm on = operator_norm(D, X, Y);
  NormBracket b;
  b.lower = on.lower;
  b.upper = on.upper;
  b.provenance = on.provenance;
  return b;
}

double lp_multiplier_oracle(const Vector& lambda, const Exponent& p, const Exponent& q,
                            const Exponent& s) {
  // Product space of l^p and l^q coefficients is l^t, 1/t = 1/p + 1/q,
  // convexified to l^1 when t < 1; the multiplier norm into l^s is then the
  // l^u norm of lambda with 1/u = 1/s - 1/t (sup norm when s >= t).
  ProductExponent t = product_exponent(p, q);
  Exponent tc = t.clamped;
  if (!(s < tc)) return lambda.cwiseAbs().maxCoeff();
  Exponent u = *holder_gap(s, tc);
  if (u.is_infinite()) return lambda.cwiseAbs().maxCoeff();
  if (u.is_one()) return lambda.cwiseAbs().sum();
  double uv = u.value();
  return std::pow(lambda.array().abs().pow(uv).sum(), 1.0 / uv);
}

DualityReport verify_triple_identity(const NormedSpace& X, const NormedSpace& Y,
                                     const NormedSpace& Z, int samples, std::uint64_t seed) {
  require(X.dim() == Y.dim() && Y.dim() == Z.dim(), ErrorKind::Dimension,
          "verify_triple_identity: truncation degrees differ");
  const Index n = X.dim();

  auto fill = coordinatewise_fill(X, Y);
  require(fill.has_value(), ErrorKind::UnsupportedStructure,
          "verify_triple_identity: the X (x) Y product norm needs an lp reduction");
  BilinearMap c = BilinearMap::hadamard(X, Y, *fill);

  bool unit_weight_lp =
      X.lp_form() && Y.lp_form() && Z.lp_form() &&
      (X.lp_form()->weights.array() == 1.0).all() &&
      (Y.lp_form()->weights.array() == 1.0).all() &&
      (Z.lp_form()->weights.array() == 1.0).all();

  DualityReport report;
  SplitRng rng(seed);
  for (int k = 0; k < samples; ++k) {
    SplitRng sub = rng.stream(static_cast<std::uint64_t>(k));
    Vector lam;
    if (k == 0) lam = Vector::Zero(n);
    else if (k == 1) lam = Vector::Ones(n);
    else if (k == 2) lam = Vector::Unit(n, 0);
    else lam = sub.gaussian_vector(n);

    Matrix T = Matrix::Zero(n, n);
    T.diagonal() = lam;

    DualityRecord rec;
    rec.family = "hadamard_triple";
    rec.instance_id = "lam" + std::to_string(k);
    rec.seed = seed;

    // Left: multiplier norm measured against the product space (the bi-sup
    // over simple Hadamard tensors). Right: the nested multiplier norm.
    NormBracket lhs = phi_norm(c, T, Z);
    NormBracket rhs = mult_norm(c, T, Z);
    rec.lhs_lower = lhs.lower;
    rec.lhs_upper = lhs.upper;
    rec.rhs_lower = rhs.lower;
    rec.rhs_upper = rhs.upper;
    rec.gap = std::abs(lhs.midpoint() - rhs.midpoint());
    rec.provenance = weaker(lhs.provenance, rhs.provenance);

    double scale = std::max(1.0, std::max(lhs.midpoint(), rhs.midpoint()));
    rec.failure = rec.gap > 1e-6 * scale;
    if (unit_weight_lp) {
      double oracle =
          lp_multiplier_oracle(lam, X.lp_form()->p, Y.lp_form()->p, Z.lp_form()->p);
      rec.note = "oracle=" + format_double(oracle);
      if (std::abs(lhs.midpoint() - oracle) > 1e-6 * scale ||
          std::abs(rhs.midpoint() - oracle) > 1e-6 * scale) {
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
