#include "pidual/duality.hpp"

#include <cmath>

namespace pidual {

namespace {

bool diagonal_matrix(const Matrix& M) {
  if (M.rows() != M.cols()) return false;
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j)
      if (i != j && M(i, j) != 0.0) return false;
  return true;
}

Vector transform_weights(const LpForm& form) {
  if (form.p.is_infinite()) return form.weights;
  return form.weights.array().pow(form.p.reciprocal()).matrix();
}

NormBracket bracket_from_bisup(const BilinearMap& c, const BisupResult& r) {
  NormBracket b;
  b.lower = r.lower;
  b.upper = r.upper;
  b.provenance = r.provenance;
  if (r.x.size() > 0 && r.y.size() > 0) {
    Decomposition d;
    d.terms.emplace_back(r.x, r.y);
    d.cost = c.left().norm(r.x) * c.right().norm(r.y);
    b.primal_witness = d;
  }
  return b;
}

}  // namespace

NormBracket phi_norm(const BilinearMap& c, const Matrix& T, const NormedSpace& X,
                     PhiMethod method, const AscentOptions& options) {
  require(T.cols() == c.codomain().dim() && T.rows() == X.dim(), ErrorKind::Dimension,
          "phi_norm: operator shape does not match");
  if (method == PhiMethod::ProductBall) {
    double v = phi_product_ball(c, T, X, ProductBallOptions{});
    NormBracket b;
    b.lower = b.upper = v;
    b.provenance = Provenance::Heuristic;
    return b;
  }
  return bracket_from_bisup(c, bisup_operator(c, T, X, options));
}

double phi_product_ball(const BilinearMap& c, const Matrix& T, const NormedSpace& X,
                        const ProductBallOptions& options) {
  require(T.cols() == c.codomain().dim() && T.rows() == X.dim(), ErrorKind::Dimension,
          "phi_product_ball: operator shape does not match");
  double best = 0.0;
  auto consider = [&](const Vector& z) { best = std::max(best, X.norm(T * z)); };

  // Simple tensors of unit vectors are certified pi_c-unit vectors outright.
  UnitBall be = unit_ball(c.left(), 256);
  UnitBall bf = unit_ball(c.right(), 256);
  if (be.polyhedral && bf.polyhedral &&
      be.extremes.size() * bf.extremes.size() <= 65536) {
    for (const Vector& e : be.extremes)
      for (const Vector& f : bf.extremes) consider(c.evaluate(e, f));
  }
  SplitRng rng(options.seed);
  for (int k = 0; k < options.tensor_samples; ++k) {
    SplitRng sub = rng.stream(static_cast<std::uint64_t>(k));
    consider(c.evaluate(random_unit_vector(c.left(), sub),
                        random_unit_vector(c.right(), sub)));
  }
  // Random range elements scaled by a certified upper bound.
  for (int k = 0; k < options.range_samples; ++k) {
    SplitRng sub = rng.stream(0x1000ull + static_cast<std::uint64_t>(k));
    Vector g = c.evaluate(sub.gaussian_vector(c.left().dim()),
                          sub.gaussian_vector(c.right().dim()));
    if (g.lpNorm<Eigen::Infinity>() == 0.0) continue;
    PiOptions pi = options.pi;
    pi.restarts = std::min(pi.restarts, 8);
    pi.seed = options.seed ^ (k + 1);
    auto [upper, decomp] = pi_c_upper(c, g, pi);
    (void)decomp;
    if (upper > 0.0) consider(g / upper);
  }
  return best;
}

NormBracket mult_norm(const BilinearMap& c, const Matrix& T, const NormedSpace& X,
                      const AscentOptions& options) {
  require(T.cols() == c.codomain().dim() && T.rows() == X.dim(), ErrorKind::Dimension,
          "mult_norm: operator shape does not match");
  const NormedSpace& E = c.left();
  const NormedSpace& F = c.right();

  if (T.lpNorm<Eigen::Infinity>() == 0.0) return exact_bracket(0.0);

  // Coordinatewise map, diagonal T, weighted-Lp spaces everywhere: the inner
  // operator norm is a diagonal closed form whose dependence on x is again
  // diagonal, so the nested supremum collapses to exponent arithmetic.
  if (c.coordinatewise() && diagonal_matrix(T) && E.lp_form() && F.lp_form() &&
      X.lp_form() && X.dim() == E.dim()) {
    const LpForm& fe = *E.lp_form();
    const LpForm& ff = *F.lp_form();
    const LpForm& fx = *X.lp_form();
    Vector ct = transform_weights(fx);
    Vector dtF = transform_weights(ff);
    Vector dtE = transform_weights(fe);
    Vector b = (T.diagonal().cwiseAbs().array() * ct.array() / dtF.array()).matrix();
    Exponent rho = Exponent::infinity();
    if (fx.p < ff.p) rho = *holder_gap(fx.p, ff.p);
    double value = diagonal_lp_opnorm((b.array() / dtE.array()).matrix(), fe.p, rho);
    NormBracket out = exact_bracket(value);
    return out;
  }

  // Scalar target: S_T(x) is the functional M^T x on F, so the outer problem
  // is the operator norm of M^T from E into the dual of F.
  if (X.dim() == 1) {
    Vector e1(1);
    e1[0] = 1.0;
    double scale = X.norm(e1);
    Matrix M = c.form_matrix(T.row(0).transpose());
    if (F.lp_form()) {
      OperatorNorm on = operator_norm(Matrix(M.transpose()), E, dual_space(F),
                                      OpNormOptions{options.restarts, options.seed,
                                                    options.extreme_cap, 200000, 1e-14});
      NormBracket out;
      out.lower = scale * on.lower;
      out.upper = scale * on.upper;
      out.provenance = on.provenance;
      return out;
    }
    // No closed dual for F: enumerate or ascend over the E ball with the
    // inner value computed as a dual norm on F.
    UnitBall be = unit_ball(E, options.extreme_cap);
    if (be.polyhedral) {
      NormBracket out;
      out.provenance = Provenance::ExtremeEnumeration;
      for (const Vector& e : be.extremes) {
        DualValue dv = dual_norm(F, M.transpose() * e);
        out.provenance = weaker(out.provenance, dv.provenance);
        out.lower = std::max(out.lower, scale * dv.value);
      }
      out.upper = out.lower;
      return out;
    }
    NormBracket out;
    out.provenance = Provenance::Heuristic;
    SplitRng rng(options.seed ^ 0x5117ull);
    for (int restart = 0; restart < options.restarts; ++restart) {
      SplitRng sub = rng.stream(static_cast<std::uint64_t>(restart));
      Vector x = random_unit_vector(E, sub);
      double value = scale * dual_norm(F, M.transpose() * x).value;
      for (int round = 0; round < options.max_rounds; ++round) {
        DualValue inner = dual_norm(F, M.transpose() * x);
        DualValue dx = dual_norm(E, M * inner.attaining);
        if (dx.attaining.size() == 0) break;
        double next = scale * dual_norm(F, M.transpose() * dx.attaining).value;
        if (next <= value * (1.0 + 1e-13)) break;
        value = next;
        x = dx.attaining;
      }
      out.lower = std::max(out.lower, value);
    }
    Vector bx = coordinate_box(E), by = coordinate_box(F);
    out.upper = std::max(out.lower, scale * bx.dot(M.cwiseAbs() * by));
    return out;
  }

  // Outer supremum over the E ball; the value is convex in x, so polyhedral
  // balls reduce to vertex scans with exact inner operator norms.
  OpNormOptions inner_opt{options.restarts, options.seed, options.extreme_cap, 200000,
                          1e-14};
  UnitBall be = unit_ball(E, options.extreme_cap);
  if (be.polyhedral) {
    NormBracket out;
    out.provenance = Provenance::ExtremeEnumeration;
    for (const Vector& e : be.extremes) {
      OperatorNorm on = operator_norm(Matrix(T * c.left_linearization(e)), F, X, inner_opt);
      out.provenance = weaker(out.provenance, on.provenance);
      if (on.lower > out.lower) out.lower = on.lower;
      out.upper = std::max(out.upper, on.upper);
    }
    out.upper = std::max(out.upper, out.lower);
    return out;
  }

  // Alternating ascent: linearize at the inner witness pair and take the
  // exact dual-attaining step in x.
  NormBracket out;
  out.provenance = Provenance::Heuristic;
  SplitRng rng(options.seed ^ 0xD0D0ull);
  for (int restart = 0; restart < options.restarts; ++restart) {
    SplitRng sub = rng.stream(static_cast<std::uint64_t>(restart));
    Vector x = random_unit_vector(E, sub);
    OperatorNorm inner = operator_norm(Matrix(T * c.left_linearization(x)), F, X, inner_opt);
    double value = inner.lower;
    for (int round = 0; round < options.max_rounds; ++round) {
      if (inner.attaining.size() == 0) break;
      Vector y = inner.attaining;
      Vector z = norming_functional(X, T * c.evaluate(x, y));
      Vector gx = (T * c.right_linearization(y)).transpose() * z;
      DualValue dx = dual_norm(E, gx);
      if (dx.attaining.size() == 0) break;
      OperatorNorm next =
          operator_norm(Matrix(T * c.left_linearization(dx.attaining)), F, X, inner_opt);
      if (next.lower <= value * (1.0 + 1e-13)) break;
      value = next.lower;
      x = dx.attaining;
      inner = next;
    }
    out.lower = std::max(out.lower, value);
  }
  Vector bound = c.absolute_bound(coordinate_box(E), coordinate_box(F));
  Vector abs_bound = T.cwiseAbs() * bound;
  double upper = X.is_lattice() ? X.norm(abs_bound) : abs_bound.sum();
  out.upper = std::max(out.lower, upper);
  return out;
}

DualityReport verify_duality(const std::string& family, const std::string& instance_prefix,
                             const BilinearMap& c, const OperatorClass& V,
                             const VerifyOptions& options) {
  DualityReport report;
  NormBracket c_bound = estimate_bound(c, BoundOptions{options.ascent.restarts,
                                                       options.ascent.seed,
                                                       options.ascent.extreme_cap,
                                                       options.ascent.pair_cap});
  for (size_t k = 0; k < V.members.size(); ++k) {
    const Matrix& T = V.members[k];
    DualityRecord rec;
    rec.family = family;
    rec.instance_id = instance_prefix + "/T" + std::to_string(k);
    rec.seed = options.seed;

    NormBracket lhs = phi_norm(c, T, V.target, PhiMethod::BiSup, options.ascent);
    NormBracket rhs = mult_norm(c, T, V.target, options.ascent);
    rec.lhs_lower = lhs.lower;
    rec.lhs_upper = lhs.upper;
    rec.rhs_lower = rhs.lower;
    rec.rhs_upper = rhs.upper;
    rec.gap = std::abs(lhs.midpoint() - rhs.midpoint());
    rec.provenance = weaker(lhs.provenance, rhs.provenance);

    double tol = rec.provenance == Provenance::Heuristic ? options.heuristic_tol
                                                         : options.certified_tol;
    double scale = std::max(1.0, std::max(lhs.midpoint(), rhs.midpoint()));
    bool disjoint = lhs.lower > rhs.upper + tol * scale ||
                    rhs.lower > lhs.upper + tol * scale;
    rec.failure = disjoint || rec.gap > tol * scale;

    // ||S_T|| <= ||T|| ||c||, with ||T|| measured G -> X.
    OperatorNorm t_norm = operator_norm(T, c.codomain(), V.target,
                                        OpNormOptions{8, options.seed, 1024, 50000, 1e-12});
    if (rhs.lower > t_norm.upper * c_bound.upper + 1e-9 * scale) {
      rec.failure = true;
      rec.note += "mult_exceeds_T_times_c;";
    }

    if (options.product_ball_check) {
      ProductBallOptions ball = options.ball;
      ball.seed = options.seed ^ (0xBA11ull + k);
      double sampled = phi_product_ball(c, T, V.target, ball);
      if (sampled > lhs.upper + 1e-8 * scale) {
        rec.failure = true;
        rec.note += "product_ball_exceeds_phi;";
      }
      if (rec.provenance != Provenance::Heuristic &&
          sampled < lhs.lower - 1e-3 * scale) {
        rec.note += "product_ball_slack;";
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
