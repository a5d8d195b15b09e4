#include "pidual/opnorm.hpp"

#include <cmath>

namespace pidual {

double diagonal_lp_opnorm(const Vector& d_abs, const Exponent& p, const Exponent& q) {
  if (d_abs.size() == 0) return 0.0;
  if (!(q < p)) return d_abs.maxCoeff();
  Exponent r = *holder_gap(q, p);  // 1/r = 1/q - 1/p > 0
  if (r.is_infinite()) return d_abs.maxCoeff();
  double rv = r.value();
  if (r.is_one()) return d_abs.sum();
  return std::pow(d_abs.array().pow(rv).sum(), 1.0 / rv);
}

namespace {

// Weight transforms that reduce weighted-Lp norms to unweighted ones:
// for finite p substitute u = w^{1/p} x; for the weighted sup norm u = w x.
Vector domain_transform(const LpForm& form) {
  if (form.p.is_infinite()) return form.weights;
  return form.weights.array().pow(form.p.reciprocal()).matrix();
}

Vector codomain_transform(const LpForm& form) { return domain_transform(form); }

OperatorNorm exact_result(double value, Provenance prov, Vector attaining = {}) {
  OperatorNorm out;
  out.lower = out.upper = value;
  out.provenance = prov;
  out.attaining = std::move(attaining);
  return out;
}

bool is_diagonal(const Matrix& M) {
  if (M.rows() != M.cols()) return false;
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j)
      if (i != j && M(i, j) != 0.0) return false;
  return true;
}

// Interval upper bound: |(Mx)_g| <= sum_j |M_gj| box_j over the domain ball,
// then the codomain norm of that box (lattice norms are monotone; otherwise
// fall back to the triangle inequality coordinate by coordinate).
double box_upper(const Matrix& M, const NormedSpace& domain, const NormedSpace& codomain) {
  Vector box = coordinate_box(domain);
  Vector bound = M.cwiseAbs() * box;
  if (codomain.is_lattice()) return codomain.norm(bound);
  double total = 0.0;
  Vector e = Vector::Zero(codomain.dim());
  for (Index g = 0; g < codomain.dim(); ++g) {
    e[g] = 1.0;
    total += bound[g] * codomain.norm(e);
    e[g] = 0.0;
  }
  return total;
}

}  // namespace

OperatorNorm operator_norm(const Matrix& M, const NormedSpace& domain,
                           const NormedSpace& codomain, const OpNormOptions& options) {
  require(M.cols() == domain.dim() && M.rows() == codomain.dim(), ErrorKind::Dimension,
          "operator_norm: matrix shape does not match the spaces");
  const Index ne = domain.dim();

  if (M.lpNorm<Eigen::Infinity>() == 0.0)
    return exact_result(0.0, Provenance::Exact, Vector::Zero(ne));

  const auto& dom_lp = domain.lp_form();
  const auto& cod_lp = codomain.lp_form();

  // Diagonal closed form.
  if (dom_lp && cod_lp && is_diagonal(M)) {
    Vector dt = domain_transform(*dom_lp);
    Vector ct = codomain_transform(*cod_lp);
    Vector d = (M.diagonal().cwiseAbs().array() * ct.array() / dt.array()).matrix();
    double value = diagonal_lp_opnorm(d, dom_lp->p, cod_lp->p);
    // Attaining vector: q >= p concentrates on the best coordinate; q < p
    // spreads mass with the Hoelder profile. Both are cheap to materialize.
    Vector x = Vector::Zero(ne);
    if (!(cod_lp->p < dom_lp->p)) {
      Index j = 0;
      d.maxCoeff(&j);
      x[j] = 1.0;
    } else {
      Exponent r = *holder_gap(cod_lp->p, dom_lp->p);
      if (r.is_infinite() || value == 0.0) {
        Index j = 0;
        d.maxCoeff(&j);
        x[j] = 1.0;
      } else if (dom_lp->p.is_infinite()) {
        x = dt.array().inverse().matrix();  // the ball corner
      } else {
        // Hoelder profile u_i ~ d_i^{r/p} in transformed coordinates.
        double rv = r.value(), pv = dom_lp->p.value();
        x = (d.array().pow(rv / pv) / dt.array()).matrix();
      }
    }
    double nx = domain.norm(x);
    if (nx > 0.0) x /= nx;
    return exact_result(value, Provenance::Exact, x);
  }

  // Hilbert-to-Hilbert: power iteration on the Gram matrix of the transformed
  // operator. The Rayleigh value is accurate even when the top singular pair
  // is nearly degenerate.
  if (dom_lp && cod_lp && dom_lp->p == Exponent::two() && cod_lp->p == Exponent::two()) {
    Vector dt = domain_transform(*dom_lp);
    Vector ct = codomain_transform(*cod_lp);
    Matrix Mt = ct.asDiagonal() * M * dt.array().inverse().matrix().asDiagonal();
    Matrix G = Mt.transpose() * Mt;
    SplitRng rng(options.seed ^ 0xA11CEull);
    Vector v = rng.gaussian_vector(ne);
    v.normalize();
    double value = 0.0;
    for (int it = 0; it < options.power_iterations; ++it) {
      Vector w = G * v;
      double nw = w.norm();
      if (nw == 0.0) break;
      w /= nw;
      double next = std::sqrt(w.dot(G * w));
      if (std::abs(next - value) <= options.power_tol * std::max(1.0, next) && it > 2) {
        value = next;
        v = w;
        break;
      }
      value = next;
      v = w;
    }
    Vector x = dt.array().inverse().matrix().asDiagonal() * v;
    double nx = domain.norm(x);
    if (nx > 0.0) x /= nx;
    return exact_result(value, Provenance::Exact, x);
  }

  // Polyhedral domain: the norm is convex, so the maximum sits at a vertex.
  UnitBall dom_ball = unit_ball(domain, options.extreme_cap);
  if (dom_ball.polyhedral) {
    OperatorNorm out;
    out.provenance = Provenance::ExtremeEnumeration;
    for (const Vector& e : dom_ball.extremes) {
      double v = codomain.norm(M * e);
      if (v > out.lower) {
        out.lower = v;
        out.attaining = e;
      }
    }
    out.upper = out.lower;
    return out;
  }

  // Polyhedral codomain dual ball: ||Mx|| = max over dual vertices z of
  // <z, Mx>, and each inner problem is a closed-form dual norm on the domain.
  if (cod_lp && (cod_lp->p.is_infinite() || cod_lp->p.is_one()) &&
      (domain.has_closed_form_dual() || dom_lp)) {
    const Index ng = codomain.dim();
    OperatorNorm out;
    out.provenance = Provenance::Exact;
    if (cod_lp->p.is_infinite()) {
      for (Index g = 0; g < ng; ++g) {
        DualValue dv = dual_norm(domain, M.row(g).transpose());
        double v = cod_lp->weights[g] * dv.value;
        if (v > out.lower) {
          out.lower = v;
          out.attaining = dv.attaining;
        }
      }
      out.upper = out.lower;
      return out;
    }
    if (ng <= 20 && (1LL << (ng - 1)) <= options.extreme_cap) {
      for (std::int64_t mask = 0; mask < (1LL << (ng - 1)); ++mask) {
        Vector z(ng);
        z[0] = cod_lp->weights[0];
        for (Index g = 1; g < ng; ++g)
          z[g] = ((mask >> (g - 1)) & 1 ? -1.0 : 1.0) * cod_lp->weights[g];
        DualValue dv = dual_norm(domain, M.transpose() * z);
        if (dv.value > out.lower) {
          out.lower = dv.value;
          out.attaining = dv.attaining;
        }
      }
      out.upper = out.lower;
      out.provenance = Provenance::ExtremeEnumeration;
      return out;
    }
  }

  // Alternating ascent: x maximizes the linearization at the current norming
  // functional, which never decreases ||Mx||.
  OperatorNorm out;
  out.provenance = Provenance::Heuristic;
  SplitRng rng(options.seed);
  for (int restart = 0; restart < options.restarts; ++restart) {
    SplitRng sub = rng.stream(static_cast<std::uint64_t>(restart));
    Vector x;
    if (restart == 0) {
      Vector box = coordinate_box(domain);
      double nb = domain.norm(box);
      x = nb > 0 ? Vector(box / nb) : random_unit_vector(domain, sub);
    } else {
      x = random_unit_vector(domain, sub);
    }
    double value = codomain.norm(M * x);
    for (int round = 0; round < 200; ++round) {
      Vector z = norming_functional(codomain, M * x);
      DualValue dv = dual_norm(domain, M.transpose() * z);
      if (dv.attaining.size() == 0) break;
      double next = codomain.norm(M * dv.attaining);
      if (next <= value * (1.0 + 1e-13)) break;
      value = next;
      x = dv.attaining;
    }
    if (value > out.lower) {
      out.lower = value;
      out.attaining = x;
    }
  }
  out.upper = std::max(out.lower, box_upper(M, domain, codomain));
  return out;
}

}  // namespace pidual
