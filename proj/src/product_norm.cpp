#include "pidual/product_norm.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <string>

#include "pidual/lp.hpp"

namespace pidual {

double range_residual(const BilinearMap& c, const Vector& target) {
  require(target.size() == c.codomain().dim(), ErrorKind::Dimension,
          "range_residual: target dimension mismatch");
  if (target.lpNorm<Eigen::Infinity>() == 0.0) return 0.0;
  Matrix S = c.range_span();
  Vector coef = S.completeOrthogonalDecomposition().solve(target);
  return (S * coef - target).norm() / std::max(1.0, target.norm());
}

namespace {

using TermList = std::vector<std::pair<Vector, Vector>>;

double list_cost(const BilinearMap& c, const TermList& terms) {
  double cost = 0.0;
  for (const auto& [x, y] : terms) cost += c.left().norm(x) * c.right().norm(y);
  return cost;
}

Vector list_image(const BilinearMap& c, const TermList& terms) {
  Vector g = Vector::Zero(c.codomain().dim());
  for (const auto& [x, y] : terms) g += c.evaluate(x, y);
  return g;
}

void drop_null_terms(const BilinearMap& c, TermList& terms) {
  TermList keep;
  for (auto& t : terms) {
    if (c.left().norm(t.first) * c.right().norm(t.second) > 1e-300) keep.push_back(std::move(t));
  }
  terms.swap(keep);
}

void rescale_balanced(const BilinearMap& c, TermList& terms) {
  for (auto& [x, y] : terms) {
    double nx = c.left().norm(x), ny = c.right().norm(y);
    if (nx <= 0.0 || ny <= 0.0) continue;
    double t = std::sqrt(ny / nx);
    x *= t;
    y /= t;
  }
}

std::string serialize_terms(const TermList& terms) {
  std::string s;
  char buf[40];
  for (const auto& [x, y] : terms) {
    for (Index i = 0; i < x.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,", x[i]);
      s += buf;
    }
    s += '|';
    for (Index i = 0; i < y.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,", y[i]);
      s += buf;
    }
    s += ';';
  }
  return s;
}

// One convex half-step: with the other side frozen, minimize
// sum_i a_i ||v_i|| subject to sum_i M_i v_i = target. Exact LP over the
// vertex cone for polyhedral norms, projected subgradient otherwise.
// Returns false when the step could not produce a feasible update.
bool convex_step(const BilinearMap& c, const Vector& target, TermList& terms,
                 bool update_left, const PiOptions& opt) {
  const NormedSpace& var_space = update_left ? c.left() : c.right();
  const NormedSpace& fixed_space = update_left ? c.right() : c.left();
  const Index ns = var_space.dim();
  const Index ng = c.codomain().dim();

  std::vector<Index> active;
  std::vector<double> a;
  std::vector<Matrix> mats;
  for (Index i = 0; i < static_cast<Index>(terms.size()); ++i) {
    const Vector& fixed = update_left ? terms[static_cast<size_t>(i)].second
                                      : terms[static_cast<size_t>(i)].first;
    double w = fixed_space.norm(fixed);
    if (w <= 1e-300) continue;
    active.push_back(i);
    a.push_back(w);
    mats.push_back(update_left ? c.right_linearization(fixed) : c.left_linearization(fixed));
  }
  if (active.empty()) return target.lpNorm<Eigen::Infinity>() == 0.0;
  const Index r = static_cast<Index>(active.size());

  UnitBall ball = unit_ball(var_space, 64);
  if (ball.polyhedral && !ball.extremes.empty()) {
    const Index ext = static_cast<Index>(ball.extremes.size());
    Matrix K(ng, 2 * r * ext);
    Vector cost(2 * r * ext);
    for (Index ii = 0; ii < r; ++ii) {
      for (Index k = 0; k < ext; ++k) {
        Vector col = mats[static_cast<size_t>(ii)] * ball.extremes[static_cast<size_t>(k)];
        K.col(2 * (ii * ext + k)) = col;
        K.col(2 * (ii * ext + k) + 1) = -col;
        cost[2 * (ii * ext + k)] = a[static_cast<size_t>(ii)];
        cost[2 * (ii * ext + k) + 1] = a[static_cast<size_t>(ii)];
      }
    }
    LpSolution sol = solve_standard_lp(K, target, cost);
    if (sol.status != LpStatus::Optimal) return false;
    for (Index ii = 0; ii < r; ++ii) {
      Vector v = Vector::Zero(ns);
      for (Index k = 0; k < ext; ++k) {
        double theta = sol.x[2 * (ii * ext + k)] - sol.x[2 * (ii * ext + k) + 1];
        if (theta != 0.0) v += theta * ball.extremes[static_cast<size_t>(k)];
      }
      auto& term = terms[static_cast<size_t>(active[static_cast<size_t>(ii)])];
      (update_left ? term.first : term.second) = v;
    }
    return true;
  }

  // Projected subgradient on the stacked variables; every iterate stays on
  // the affine reconstruction set.
  Matrix A(ng, r * ns);
  for (Index ii = 0; ii < r; ++ii) A.middleCols(ii * ns, ns) = mats[static_cast<size_t>(ii)];
  auto cod = A.completeOrthogonalDecomposition();

  Vector X(r * ns);
  for (Index ii = 0; ii < r; ++ii) {
    const auto& term = terms[static_cast<size_t>(active[static_cast<size_t>(ii)])];
    X.segment(ii * ns, ns) = update_left ? term.first : term.second;
  }
  auto project = [&](const Vector& Z) -> Vector {
    Vector resid = A * Z - target;
    return Z - cod.solve(resid);
  };
  X = project(X);
  if ((A * X - target).norm() > 1e-7 * std::max(1.0, target.norm())) {
    X = cod.solve(target);  // min-norm feasible start
  }

  auto objective = [&](const Vector& Z) {
    double f = 0.0;
    for (Index ii = 0; ii < r; ++ii)
      f += a[static_cast<size_t>(ii)] * var_space.norm(Z.segment(ii * ns, ns));
    return f;
  };
  auto subgradient = [&](const Vector& Z) {
    Vector g(r * ns);
    for (Index ii = 0; ii < r; ++ii) {
      Vector v = Z.segment(ii * ns, ns);
      if (var_space.norm(v) <= 0.0) {
        g.segment(ii * ns, ns).setZero();
      } else {
        g.segment(ii * ns, ns) =
            a[static_cast<size_t>(ii)] * norming_functional(var_space, v);
      }
    }
    return g;
  };

  double best_f = objective(X);
  Vector best_X = X;
  Vector g0 = subgradient(X);
  double step0 = 0.25 * std::max(X.norm(), 1.0) / std::max(g0.norm(), 1e-12);
  for (int it = 1; it <= opt.subgradient_iters; ++it) {
    Vector g = subgradient(X);
    double step = step0 / std::sqrt(static_cast<double>(it));
    X = project(X - step * g);
    double f = objective(X);
    if (f < best_f) {
      best_f = f;
      best_X = X;
    }
  }
  for (Index ii = 0; ii < r; ++ii) {
    auto& term = terms[static_cast<size_t>(active[static_cast<size_t>(ii)])];
    (update_left ? term.first : term.second) = best_X.segment(ii * ns, ns);
  }
  return true;
}

struct Start {
  TermList terms;
  bool y_first = false;
};

std::vector<Start> build_starts(const BilinearMap& c, const Vector& target, int rank_cap,
                                const PiOptions& opt) {
  std::vector<Start> starts;
  const Index ne = c.left().dim(), nf = c.right().dim();

  for (const Decomposition& d : opt.seed_decompositions) {
    if (!d.terms.empty()) starts.push_back({d.terms, false});
  }

  if (c.coordinatewise() && c.product_fill_space().has_value()) {
    Decomposition d = fill_split(c, target);
    if (!d.terms.empty()) starts.push_back({d.terms, false});
  }

  if (c.kind() == BilinearMap::Kind::TensorCoordinates) {
    Matrix Tm(ne, nf);
    for (Index i = 0; i < ne; ++i)
      for (Index j = 0; j < nf; ++j) Tm(i, j) = target[i * nf + j];
    Eigen::JacobiSVD<Matrix> svd(Tm, Eigen::ComputeThinU | Eigen::ComputeThinV);
    TermList terms;
    for (Index k = 0; k < svd.singularValues().size(); ++k) {
      double s = svd.singularValues()[k];
      if (s <= 1e-14) continue;
      terms.emplace_back(s * svd.matrixU().col(k), svd.matrixV().col(k));
    }
    if (!terms.empty()) starts.push_back({terms, false});
  }

  UnitBall bf = unit_ball(c.right(), 64);
  if (bf.polyhedral && static_cast<int>(bf.extremes.size()) <= rank_cap) {
    TermList terms;
    for (const Vector& q : bf.extremes) terms.emplace_back(Vector::Zero(ne), q);
    starts.push_back({terms, false});
  }
  UnitBall be = unit_ball(c.left(), 64);
  if (be.polyhedral && static_cast<int>(be.extremes.size()) <= rank_cap) {
    TermList terms;
    for (const Vector& p : be.extremes) terms.emplace_back(p, Vector::Zero(nf));
    starts.push_back({terms, true});
  }

  SplitRng rng(opt.seed);
  int random_starts = std::max(1, opt.restarts - static_cast<int>(starts.size()));
  for (int s = 0; s < random_starts; ++s) {
    SplitRng sub = rng.stream(static_cast<std::uint64_t>(s) + 1000);
    TermList terms;
    for (int k = 0; k < rank_cap; ++k)
      terms.emplace_back(sub.gaussian_vector(ne), sub.gaussian_vector(nf));
    starts.push_back({terms, false});
  }
  return starts;
}

}  // namespace

std::pair<double, Decomposition> pi_c_upper(const BilinearMap& c, const Vector& target,
                                            const PiOptions& options) {
  require(target.size() == c.codomain().dim(), ErrorKind::Dimension,
          "pi_c_upper: target dimension mismatch");
  Decomposition best;
  if (target.lpNorm<Eigen::Infinity>() == 0.0) return {0.0, best};

  double residual = range_residual(c, target);
  require(residual <= 1e-8, ErrorKind::Range,
          "pi_c_upper: target is not in the range of the linearization (residual " +
              std::to_string(residual) + ")");

  const int rank_cap = options.rank_cap > 0
                           ? options.rank_cap
                           : static_cast<int>(c.left().dim() * c.right().dim());
  require(rank_cap >= 1, ErrorKind::Config, "pi_c_upper: rank_cap must be positive");

  const double scale = std::max(1.0, target.norm());
  double best_cost = std::numeric_limits<double>::infinity();
  std::string best_serial;
  double best_residual = std::numeric_limits<double>::infinity();

  // For coordinatewise lattice instances the fill norm is the exact value, so
  // a start that reaches it ends the search.
  std::optional<double> certified_floor;
  if (auto fill = c.product_fill_space()) certified_floor = fill->norm(target);

  for (Start& start : build_starts(c, target, rank_cap, options)) {
    TermList terms = std::move(start.terms);
    if (static_cast<int>(terms.size()) > rank_cap) continue;

    double cost = std::numeric_limits<double>::infinity();
    TermList snapshot;
    double snapshot_cost = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
      bool ok1 = convex_step(c, target, terms, !start.y_first, options);
      bool ok2 = convex_step(c, target, terms, start.y_first, options);
      if (!ok1 && !ok2) break;
      rescale_balanced(c, terms);
      double now = list_cost(c, terms);
      double resid = (list_image(c, terms) - target).norm() / scale;
      if (resid <= options.reconstruction_tol && now < snapshot_cost) {
        snapshot_cost = now;
        snapshot = terms;
      }
      if (now > cost - options.sweep_tol * std::max(1.0, cost)) break;
      cost = now;
    }
    if (snapshot.empty()) {
      double resid = (list_image(c, terms) - target).norm() / scale;
      best_residual = std::min(best_residual, resid);
      continue;
    }
    drop_null_terms(c, snapshot);
    double final_cost = list_cost(c, snapshot);
    double resid = (list_image(c, snapshot) - target).norm() / scale;
    best_residual = std::min(best_residual, resid);
    if (resid > options.reconstruction_tol) continue;

    bool better = !std::isfinite(best_cost) ||
                  final_cost < best_cost - 1e-12 * (1.0 + best_cost);
    if (!better && final_cost < best_cost + 1e-12 * (1.0 + best_cost)) {
      // Ties: fewer terms, then the lexicographically smallest serialization.
      if (snapshot.size() < best.terms.size()) {
        better = true;
      } else if (snapshot.size() == best.terms.size()) {
        std::string serial = serialize_terms(snapshot);
        if (best_serial.empty()) best_serial = serialize_terms(best.terms);
        better = serial < best_serial;
        if (better) best_serial = serial;
      }
    }
    if (better) {
      best_cost = final_cost;
      best.terms = snapshot;
      best.cost = final_cost;
      best_serial.clear();
    }
    if (certified_floor.has_value() &&
        best_cost <= *certified_floor * (1.0 + 1e-12) + 1e-300) {
      break;
    }
  }

  require(std::isfinite(best_cost), ErrorKind::Infeasible,
          "pi_c_upper: no start reached the reconstruction tolerance (best residual " +
              std::to_string(best_residual) + ")");
  return {best_cost, best};
}

namespace {

struct FeasibilityCheck {
  double sup = 0.0;
  Provenance provenance = Provenance::Heuristic;
  Vector x, y;  // pair attaining (or nearly attaining) the sup
};

// Exact feasibility value sup |lambda(c(x,y))| when the structure allows it.
std::optional<FeasibilityCheck> exact_feasibility(const BilinearMap& c, const Vector& lambda,
                                                  const PiOptions& opt) {
  if (auto fill = c.product_fill_space()) {
    DualValue dv = dual_norm(*fill, lambda);
    if (dv.provenance == Provenance::Exact) {
      FeasibilityCheck fc;
      fc.sup = dv.value;
      fc.provenance = Provenance::Exact;
      if (dv.attaining.size() > 0 && dv.value > 0) {
        Decomposition d = fill_split(c, dv.attaining);
        if (d.terms.size() == 1) {
          fc.x = d.terms[0].first;
          fc.y = d.terms[0].second;
        }
      }
      return fc;
    }
  }
  Matrix M = c.form_matrix(lambda);
  AscentOptions ascent{8, opt.seed, 120, opt.extreme_cap, opt.pair_cap};
  BisupResult r = bisup_bilinear_form(M, c.left(), c.right(), ascent);
  if (r.provenance == Provenance::Heuristic) return std::nullopt;
  FeasibilityCheck fc;
  fc.sup = r.lower;
  fc.provenance = r.provenance;
  fc.x = r.x;
  fc.y = r.y;
  return fc;
}

}  // namespace

DualCertificate pi_c_lower(const BilinearMap& c, const Vector& target,
                           const PiOptions& options) {
  require(target.size() == c.codomain().dim(), ErrorKind::Dimension,
          "pi_c_lower: target dimension mismatch");
  const Index ng = c.codomain().dim();
  DualCertificate cert;
  cert.lambda = Vector::Zero(ng);
  if (target.lpNorm<Eigen::Infinity>() == 0.0) {
    cert.provenance = Provenance::Exact;
    return cert;
  }
  double residual = range_residual(c, target);
  require(residual <= 1e-8, ErrorKind::Range,
          "pi_c_lower: target is not in the range of the linearization");

  // Product-fill route: the norming functional of the fill space is feasible
  // by construction and attains the product norm.
  if (auto fill = c.product_fill_space()) {
    Vector lambda = norming_functional(*fill, target);
    double s = dual_norm(*fill, lambda).value;
    if (s > 1.0) lambda /= s;
    cert.lambda = lambda;
    cert.bound = lambda.dot(target);
    cert.feasibility = std::min(s, 1.0);
    cert.provenance = Provenance::Exact;
    return cert;
  }

  // Polyhedral pairs: solve the atomic decomposition LP over vertex atoms;
  // its row duals are the optimal functional.
  UnitBall be = unit_ball(c.left(), options.extreme_cap);
  UnitBall bf = unit_ball(c.right(), options.extreme_cap);
  if (be.polyhedral && bf.polyhedral) {
    long long pairs = static_cast<long long>(be.extremes.size()) *
                      static_cast<long long>(bf.extremes.size());
    if (pairs > 0 && 2 * pairs <= options.pair_cap) {
      Matrix K(ng, 2 * pairs);
      Index col = 0;
      for (const Vector& e : be.extremes) {
        for (const Vector& f : bf.extremes) {
          Vector g = c.evaluate(e, f);
          K.col(col++) = g;
          K.col(col++) = -g;
        }
      }
      LpSolution sol = solve_standard_lp(K, target, Vector::Ones(2 * pairs));
      if (sol.status == LpStatus::Optimal) {
        Vector lambda = sol.row_duals;
        double feas = 0.0;
        for (const Vector& e : be.extremes)
          for (const Vector& f : bf.extremes)
            feas = std::max(feas, std::abs(lambda.dot(c.evaluate(e, f))));
        if (feas > 1.0) lambda /= feas;
        cert.lambda = lambda;
        cert.bound = lambda.dot(target);
        cert.feasibility = std::min(feas, 1.0);
        cert.provenance = Provenance::ExtremeEnumeration;
        return cert;
      }
    }
  }

  // Cutting planes on the feasibility region { sup |lambda(c(x,y))| <= 1 },
  // available whenever the feasibility sup has a certified evaluator. Even
  // without convergence the final normalized functional is a certificate.
  {
    Vector probe = Vector::Ones(ng);
    if (exact_feasibility(c, probe, options).has_value()) {
      std::vector<std::pair<Vector, Vector>> cuts;
      SplitRng rng(options.seed ^ 0xCA7ull);
      for (int k = 0; k < 8; ++k) {
        SplitRng sub = rng.stream(static_cast<std::uint64_t>(k));
        cuts.emplace_back(random_unit_vector(c.left(), sub),
                          random_unit_vector(c.right(), sub));
      }
      Vector best_lambda;
      double best_bound = 0.0;
      Provenance prov = Provenance::Exact;
      for (int round = 0; round < 60; ++round) {
        LpProblem lp;
        std::vector<int> vars;
        for (Index g = 0; g < ng; ++g)
          vars.push_back(lp.add_variable(-1e9, 1e9, -target[g]));  // maximize via min -obj
        for (const auto& [cx, cy] : cuts) {
          Vector g = c.evaluate(cx, cy);
          int row = lp.add_constraint(-1.0, 1.0);
          for (Index gg = 0; gg < ng; ++gg)
            if (g[gg] != 0.0) lp.set_coefficient(row, vars[static_cast<size_t>(gg)], g[gg]);
        }
        LpSolution sol = lp.minimize();
        if (sol.status != LpStatus::Optimal) break;
        Vector lambda = sol.x;
        auto fc = exact_feasibility(c, lambda, options);
        if (!fc.has_value()) break;
        prov = weaker(prov, fc->provenance);
        double s = fc->sup;
        if (s > 0.0) {
          Vector scaled = lambda / std::max(1.0, s);
          double bound = scaled.dot(target);
          if (bound > best_bound) {
            best_bound = bound;
            best_lambda = scaled;
          }
        }
        if (s <= 1.0 + 1e-10) break;
        if (fc->x.size() > 0) cuts.emplace_back(fc->x, fc->y);
        else break;
      }
      if (best_lambda.size() > 0) {
        cert.lambda = best_lambda;
        cert.bound = best_bound;
        cert.feasibility = 1.0;
        cert.provenance = prov;
        return cert;
      }
    }
  }

  // Heuristic: candidate functionals normalized by an ascent estimate of the
  // feasibility sup. The estimate is a lower bound of the true sup, so the
  // result is labeled heuristic and never claimed as certified.
  SplitRng rng(options.seed ^ 0x9Dull);
  std::vector<Vector> candidates;
  candidates.push_back(target / std::max(1e-12, target.norm()));
  candidates.push_back(target.array().sign().matrix());
  for (int k = 0; k < 24; ++k) candidates.push_back(rng.gaussian_vector(ng));
  AscentOptions ascent{16, options.seed ^ 0x77ull, 200, options.extreme_cap,
                       options.pair_cap};
  for (const Vector& lambda : candidates) {
    BisupResult r = bisup_bilinear_form(c.form_matrix(lambda), c.left(), c.right(), ascent);
    double s = std::max(r.lower, 1e-12);
    double bound = std::abs(lambda.dot(target)) / s;
    if (bound > cert.bound) {
      cert.bound = bound;
      cert.lambda = (lambda.dot(target) >= 0 ? 1.0 : -1.0) / s * lambda;
      cert.feasibility = r.lower / s;
    }
  }
  cert.provenance = Provenance::Heuristic;
  return cert;
}

NormBracket pi_c_bracket(const BilinearMap& c, const Vector& target,
                         const PiOptions& options) {
  auto [upper, decomp] = pi_c_upper(c, target, options);
  DualCertificate cert = pi_c_lower(c, target, options);

  NormBracket b;
  b.upper = upper;
  b.lower = cert.bound;
  b.provenance = cert.provenance;
  b.primal_witness = decomp;
  b.dual_witness = cert.lambda;
  if (b.lower > b.upper) {
    if (cert.provenance != Provenance::Heuristic &&
        b.lower > b.upper * (1.0 + 1e-7) + 1e-9) {
      fail(ErrorKind::Invariant,
           "pi_c_bracket: certified lower bound exceeds the feasible upper bound");
    }
    b.lower = b.upper;
  }
  return b;
}

double pi_c_oracle(const BilinearMap& c, const Vector& target, double resolution) {
  require(c.left().dim() <= 3 && c.right().dim() <= 3, ErrorKind::Tractability,
          "pi_c_oracle: grid oracle requires dim(E), dim(F) <= 3");
  require(target.size() == c.codomain().dim(), ErrorKind::Dimension,
          "pi_c_oracle: target dimension mismatch");
  if (target.lpNorm<Eigen::Infinity>() == 0.0) return 0.0;

  std::vector<Vector> dirs_e = sphere_directions(c.left().dim(), resolution);
  std::vector<Vector> dirs_f = sphere_directions(c.right().dim(), resolution);
  for (Vector& u : dirs_e) u /= c.left().norm(u);
  for (Vector& v : dirs_f) v /= c.right().norm(v);

  long long atoms = 2LL * static_cast<long long>(dirs_e.size()) *
                    static_cast<long long>(dirs_f.size());
  require(atoms <= 2500000, ErrorKind::Tractability,
          "pi_c_oracle: grid would need " + std::to_string(atoms) + " atoms");

  const Index ng = c.codomain().dim();
  Matrix K(ng, atoms);
  Index col = 0;
  for (const Vector& u : dirs_e) {
    for (const Vector& v : dirs_f) {
      Vector g = c.evaluate(u, v);
      K.col(col++) = g;
      K.col(col++) = -g;
    }
  }
  SimplexOptions sopt;
  sopt.feas_tol = 1e-8;
  LpSolution sol = solve_standard_lp(K, target, Vector::Ones(atoms), sopt);
  if (sol.status == LpStatus::Infeasible) {
    fail(ErrorKind::Range, "pi_c_oracle: target not reachable from grid atoms");
  }
  require(sol.status == LpStatus::Optimal, ErrorKind::Tractability,
          "pi_c_oracle: simplex hit the iteration limit");
  return sol.value;
}

}  // namespace pidual
