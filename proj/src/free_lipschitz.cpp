#include "pidual/free_lipschitz.hpp"

#include <cmath>

namespace pidual {

namespace {

void validate_metric(const Matrix& d) {
  const Index n = d.rows();
  require(n >= 1 && d.cols() == n, ErrorKind::Dimension, "distance matrix must be square");
  for (Index i = 0; i < n; ++i) {
    require(d(i, i) == 0.0, ErrorKind::Invariant, "distance matrix has a nonzero diagonal");
    for (Index j = 0; j < n; ++j) {
      require(std::isfinite(d(i, j)), ErrorKind::Invariant, "non-finite distance");
      require(std::abs(d(i, j) - d(j, i)) <= 1e-12 * std::max(1.0, d(i, j)),
              ErrorKind::Invariant, "distance matrix is not symmetric");
      if (i != j)
        require(d(i, j) > 0.0, ErrorKind::Invariant, "off-diagonal distances must be positive");
    }
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k)
        require(d(i, k) <= d(i, j) + d(j, k) + 1e-12 * std::max(1.0, d(i, k)),
                ErrorKind::Invariant, "triangle inequality fails");
}

void check_molecule(const FiniteMetricSpace& A, const Molecule& z) {
  require(z.weights.size() == A.size(), ErrorKind::Dimension,
          "molecule has wrong point count");
  require(std::abs(z.weights.sum()) <=
              1e-14 * std::max(1.0, z.weights.cwiseAbs().maxCoeff()),
          ErrorKind::Invariant, "molecule weights must sum to zero");
}

}  // namespace

FiniteMetricSpace FiniteMetricSpace::from_distances(Matrix dist) {
  validate_metric(dist);
  return FiniteMetricSpace(std::move(dist));
}

FiniteMetricSpace FiniteMetricSpace::from_edges(
    Index n, const std::vector<std::tuple<Index, Index, double>>& edges) {
  require(n >= 1, ErrorKind::Dimension, "need at least the base point");
  const double inf = std::numeric_limits<double>::infinity();
  Matrix d = Matrix::Constant(n, n, inf);
  for (Index i = 0; i < n; ++i) d(i, i) = 0.0;
  for (const auto& [i, j, w] : edges) {
    require(i >= 0 && i < n && j >= 0 && j < n && i != j, ErrorKind::Dimension,
            "edge endpoints out of range");
    require(w > 0.0 && std::isfinite(w), ErrorKind::Invariant, "edge weights must be positive");
    d(i, j) = std::min(d(i, j), w);
    d(j, i) = d(i, j);
  }
  for (Index k = 0; k < n; ++k)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      require(std::isfinite(d(i, j)), ErrorKind::Invariant,
              "edge list does not connect the space");
  return from_distances(std::move(d));
}

FiniteMetricSpace FiniteMetricSpace::random(Index n, SplitRng& rng) {
  if (rng.next_double() < 0.5) {
    // Euclidean point cloud in dimension 2 or 3.
    Index dim = rng.uniform_int(2, 3);
    Matrix pts(n, dim);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < dim; ++j) pts(i, j) = rng.uniform(-1.0, 1.0);
    Matrix d(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) d(i, j) = (pts.row(i) - pts.row(j)).norm();
    // Nudge coincident points apart.
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (i != j && d(i, j) < 1e-6) d(i, j) = d(j, i) = 1e-6;
    return from_distances(std::move(d));
  }
  // Dense random edges, closed under shortest paths.
  std::vector<std::tuple<Index, Index, double>> edges;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      edges.emplace_back(i, j, rng.uniform(0.2, 2.0));
  return from_edges(n, edges);
}

Molecule elementary_molecule(const FiniteMetricSpace& A, Index i, Index j) {
  require(i >= 0 && i < A.size() && j >= 0 && j < A.size() && i != j, ErrorKind::Dimension,
          "elementary_molecule: bad point indices");
  Vector w = Vector::Zero(A.size());
  w[i] = 1.0;
  w[j] = -1.0;
  return Molecule{w};
}

namespace {

struct FlowLp {
  LpSolution solution;
  std::vector<std::pair<Index, Index>> pairs;
};

// min sum d_e |lambda_e| over signed flows reproducing z; the base-point row
// is dropped (it is implied by the zero-sum invariant).
FlowLp solve_flow_lp(const FiniteMetricSpace& A, const Molecule& z) {
  const Index n = A.size();
  FlowLp out;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) out.pairs.emplace_back(i, j);
  const Index m = n - 1;
  const Index cols = 2 * static_cast<Index>(out.pairs.size());
  if (m == 0) {
    out.solution.status = LpStatus::Optimal;
    out.solution.value = 0.0;
    return out;
  }
  Matrix K = Matrix::Zero(m, cols);
  Vector cost(cols);
  for (size_t e = 0; e < out.pairs.size(); ++e) {
    auto [i, j] = out.pairs[e];
    Vector col = Vector::Zero(m);
    if (i > 0) col[i - 1] += 1.0;
    if (j > 0) col[j - 1] -= 1.0;
    K.col(2 * static_cast<Index>(e)) = col;
    K.col(2 * static_cast<Index>(e) + 1) = -col;
    cost[2 * static_cast<Index>(e)] = A.distance(i, j);
    cost[2 * static_cast<Index>(e) + 1] = A.distance(i, j);
  }
  out.solution = solve_standard_lp(K, z.weights.tail(m), cost);
  return out;
}

}  // namespace

double molecule_norm(const FiniteMetricSpace& A, const Molecule& z) {
  check_molecule(A, z);
  FlowLp lp = solve_flow_lp(A, z);
  require(lp.solution.status == LpStatus::Optimal, ErrorKind::Infeasible,
          "molecule_norm: flow LP did not reach optimality");
  return lp.solution.value;
}

double lipschitz_dual_norm(const FiniteMetricSpace& A, const Molecule& z) {
  check_molecule(A, z);
  const Index n = A.size();
  if (n == 1) return 0.0;
  LpProblem lp;
  std::vector<int> f;
  for (Index i = 1; i < n; ++i)
    f.push_back(lp.add_variable(-LpProblem::kInf, LpProblem::kInf, z.weights[i]));
  auto var = [&](Index i) { return i == 0 ? -1 : f[static_cast<size_t>(i - 1)]; };
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      int row = lp.add_constraint(-A.distance(i, j), A.distance(i, j));
      if (var(i) >= 0) lp.set_coefficient(row, var(i), 1.0);
      if (var(j) >= 0) lp.set_coefficient(row, var(j), -1.0);
    }
  }
  LpSolution sol = lp.maximize();
  require(sol.status == LpStatus::Optimal, ErrorKind::Infeasible,
          "lipschitz_dual_norm: LP did not reach optimality");
  return sol.value;
}

double lipschitz_constant(const FiniteMetricSpace& A, const Vector& f) {
  require(f.size() == A.size(), ErrorKind::Dimension, "lipschitz_constant: bad function");
  double best = 0.0;
  for (Index i = 0; i < A.size(); ++i)
    for (Index j = i + 1; j < A.size(); ++j)
      best = std::max(best, std::abs(f[i] - f[j]) / A.distance(i, j));
  return best;
}

LipschitzBiForm make_biform(Matrix values) {
  require(values.rows() >= 1 && values.cols() >= 1, ErrorKind::Dimension,
          "biform needs at least the base points");
  for (Index i = 0; i < values.rows(); ++i)
    require(std::abs(values(i, 0)) <= 1e-12, ErrorKind::Invariant,
            "biform must vanish on the base column");
  for (Index j = 0; j < values.cols(); ++j)
    require(std::abs(values(0, j)) <= 1e-12, ErrorKind::Invariant,
            "biform must vanish on the base row");
  return LipschitzBiForm{std::move(values)};
}

LipschitzBiForm random_biform(const FiniteMetricSpace& A, const FiniteMetricSpace& D,
                              SplitRng& rng) {
  Matrix values(A.size(), D.size());
  for (Index i = 0; i < A.size(); ++i)
    for (Index j = 0; j < D.size(); ++j) values(i, j) = rng.gaussian();
  values.row(0).setZero();
  values.col(0).setZero();
  return LipschitzBiForm{std::move(values)};
}

double bilinearize(const LipschitzBiForm& T, const Molecule& u, const Molecule& v) {
  require(u.weights.size() == T.values.rows() && v.weights.size() == T.values.cols(),
          ErrorKind::Dimension, "bilinearize: dimensions do not match the form");
  require(std::abs(u.weights.sum()) <= 1e-14 * std::max(1.0, u.weights.cwiseAbs().maxCoeff()),
          ErrorKind::Invariant, "bilinearize: left molecule is not zero-sum");
  require(std::abs(v.weights.sum()) <= 1e-14 * std::max(1.0, v.weights.cwiseAbs().maxCoeff()),
          ErrorKind::Invariant, "bilinearize: right molecule is not zero-sum");
  return u.weights.dot(T.values * v.weights);
}

NormBracket biform_norm(const LipschitzBiForm& T, const FiniteMetricSpace& A,
                        const FiniteMetricSpace& D) {
  require(T.values.rows() == A.size() && T.values.cols() == D.size(), ErrorKind::Dimension,
          "biform_norm: form does not match the spaces");
  // Exact: the molecule balls are polytopes whose vertices are normalized
  // elementary molecules, so the bi-sup is the maximal rectangle quotient.
  double best = 0.0;
  Index bi = 1, bj = 0, bk = 1, bl = 0;
  for (Index i = 0; i < A.size(); ++i)
    for (Index j = i + 1; j < A.size(); ++j)
      for (Index k = 0; k < D.size(); ++k)
        for (Index l = k + 1; l < D.size(); ++l) {
          double rect = T.values(i, k) - T.values(i, l) - T.values(j, k) + T.values(j, l);
          double quot = std::abs(rect) / (A.distance(i, j) * D.distance(k, l));
          if (quot > best) {
            best = quot;
            bi = i;
            bj = j;
            bk = k;
            bl = l;
          }
        }
  NormBracket b = exact_bracket(best, Provenance::ExtremeEnumeration);
  if (A.size() > 1 && D.size() > 1) {
    Decomposition d;
    Vector u = elementary_molecule(A, bi, bj).weights / A.distance(bi, bj);
    Vector v = elementary_molecule(D, bk, bl).weights / D.distance(bk, bl);
    d.terms.emplace_back(u, v);
    d.cost = 1.0;
    b.primal_witness = d;
  }
  return b;
}

Vector molecule_to_reduced(const Molecule& z) { return z.weights.tail(z.weights.size() - 1); }

Molecule reduced_to_molecule(const Vector& r) {
  Vector w(r.size() + 1);
  w[0] = -r.sum();
  w.tail(r.size()) = r;
  return Molecule{w};
}

NormedSpace molecule_space(const FiniteMetricSpace& A) {
  require(A.size() >= 2, ErrorKind::Dimension,
          "molecule_space: need at least one non-base point");
  const Index n = A.size();
  FiniteMetricSpace space = A;
  auto norm_fn = [space](const Vector& r) {
    return molecule_norm(space, reduced_to_molecule(r));
  };
  auto norming_fn = [space](const Vector& r) {
    FlowLp lp = solve_flow_lp(space, reduced_to_molecule(r));
    if (lp.solution.status != LpStatus::Optimal) return Vector(Vector::Zero(r.size()));
    return Vector(lp.solution.row_duals);  // the optimal Lipschitz potential
  };
  CustomNormOptions opts;
  opts.lattice = false;
  opts.name = "molecules[" + std::to_string(n) + "]";
  opts.norming = norming_fn;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      Molecule m = elementary_molecule(A, i, j);
      opts.ball_extremes.push_back(molecule_to_reduced(m) / A.distance(i, j));
    }
  return NormedSpace::custom(n - 1, norm_fn, opts);
}

double biform_norm_ascent(const LipschitzBiForm& T, const FiniteMetricSpace& A,
                          const FiniteMetricSpace& D, int restarts, std::uint64_t seed) {
  // Alternating maximization over the two molecule balls: for a frozen v the
  // objective is linear in u, so the exact step lands on a ball vertex.
  std::vector<Vector> ua, vd;
  for (Index i = 0; i < A.size(); ++i)
    for (Index j = i + 1; j < A.size(); ++j)
      ua.push_back(elementary_molecule(A, i, j).weights / A.distance(i, j));
  for (Index k = 0; k < D.size(); ++k)
    for (Index l = k + 1; l < D.size(); ++l)
      vd.push_back(elementary_molecule(D, k, l).weights / D.distance(k, l));
  if (ua.empty() || vd.empty()) return 0.0;

  SplitRng rng(seed);
  double best = 0.0;
  for (int r = 0; r < restarts; ++r) {
    Vector v = vd[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(vd.size()) - 1))];
    double value = 0.0;
    for (int round = 0; round < 50; ++round) {
      Vector tv = T.values * v;
      double bu = 0.0;
      Vector u_best;
      for (const Vector& u : ua) {
        double val = std::abs(u.dot(tv));
        if (val > bu) {
          bu = val;
          u_best = u;
        }
      }
      if (u_best.size() == 0) break;
      Vector tu = T.values.transpose() * u_best;
      double bv = 0.0;
      Vector v_best;
      for (const Vector& w : vd) {
        double val = std::abs(w.dot(tu));
        if (val > bv) {
          bv = val;
          v_best = w;
        }
      }
      if (v_best.size() == 0) break;
      if (bv <= value * (1.0 + 1e-15)) {
        value = std::max(value, bv);
        break;
      }
      value = bv;
      v = v_best;
    }
    best = std::max(best, value);
  }
  return best;
}

DualityReport verify_lipschitz_duality(const FiniteMetricSpace& A,
                                       const FiniteMetricSpace& D, int samples,
                                       std::uint64_t seed) {
  DualityReport report;
  SplitRng rng(seed);

  NormedSpace dom = molecule_space(A);
  FiniteMetricSpace d_space = D;
  auto lip_norm = [d_space](const Vector& phi) {
    Vector f(phi.size() + 1);
    f[0] = 0.0;
    f.tail(phi.size()) = phi;
    return lipschitz_constant(d_space, f);
  };
  CustomNormOptions lip_opts;
  lip_opts.name = "lip_dual[" + std::to_string(D.size()) + "]";
  NormedSpace cod = NormedSpace::custom(D.size() - 1, lip_norm, lip_opts);

  for (int s = 0; s < samples; ++s) {
    SplitRng sub = rng.stream(static_cast<std::uint64_t>(s));
    LipschitzBiForm T = s == 0 ? make_biform(Matrix::Zero(A.size(), D.size()))
                               : random_biform(A, D, sub);

    DualityRecord rec;
    rec.family = "freelip";
    rec.instance_id = "T" + std::to_string(s);
    rec.seed = seed;

    NormBracket lhs = biform_norm(T, A, D);

    // Nested route: the linearization AE_A -> AE_D^* in reduced coordinates
    // is the transposed interior block of T.
    Matrix M = T.values.block(1, 1, A.size() - 1, D.size() - 1).transpose();
    OperatorNorm on = operator_norm(M, dom, cod);

    rec.lhs_lower = lhs.lower;
    rec.lhs_upper = lhs.upper;
    rec.rhs_lower = on.lower;
    rec.rhs_upper = on.upper;
    rec.gap = std::abs(lhs.midpoint() - 0.5 * (on.lower + on.upper));
    rec.provenance = weaker(lhs.provenance, on.provenance);
    double scale = std::max(1.0, lhs.midpoint());
    rec.failure = rec.gap > 1e-6 * scale;
    if (lhs.primal_witness.has_value() && !lhs.primal_witness->terms.empty()) {
      rec.witness = witness_pair(lhs.primal_witness->terms[0].first,
                                 lhs.primal_witness->terms[0].second);
    }
    report.add(std::move(rec));
  }
  return report;
}

}  // namespace pidual
