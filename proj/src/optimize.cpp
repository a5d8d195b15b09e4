#include "pidual/optimize.hpp"

#include <cmath>

namespace pidual {

namespace {

// Witness split for a fill-ball element: x, y with c(x, y) = h and
// ||x|| ||y|| equal to the fill norm of h. Assumes h is a valid target
// (coordinatewise map, fill space available).
std::pair<Vector, Vector> single_split(const NormedSpace& E, const NormedSpace& F,
                                       const Vector& h) {
  const LpForm& fe = *E.lp_form();
  const LpForm& ff = *F.lp_form();
  const Index n = h.size();
  if (fe.p.is_infinite()) {
    Vector x(n), y(n);
    for (Index i = 0; i < n; ++i) {
      double s = h[i] > 0 ? 1.0 : (h[i] < 0 ? -1.0 : 0.0);
      x[i] = s / fe.weights[i];
      y[i] = std::abs(h[i]) * fe.weights[i];
    }
    return {x, y};
  }
  if (ff.p.is_infinite()) {
    auto [y, x] = single_split(F, E, h);
    return {x, y};
  }
  ProductExponent t = product_exponent(fe.p, ff.p);
  double tp = t.t_value / fe.p.value();
  double tq = t.t_value / ff.p.value();
  Vector x(n), y(n);
  for (Index i = 0; i < n; ++i) {
    double a = std::abs(h[i]);
    double s = h[i] > 0 ? 1.0 : (h[i] < 0 ? -1.0 : 0.0);
    x[i] = s * std::pow(a, tp);
    y[i] = std::pow(a, tq);
  }
  return {x, y};
}

}  // namespace

Decomposition fill_split(const BilinearMap& c, const Vector& target) {
  require(c.coordinatewise(), ErrorKind::UnsupportedStructure,
          "fill_split: map is not coordinatewise");
  auto fill = c.product_fill_space();
  require(fill.has_value(), ErrorKind::UnsupportedStructure,
          "fill_split: no product-fill reduction for these spaces");
  Decomposition d;
  if (target.lpNorm<Eigen::Infinity>() == 0.0) return d;

  const NormedSpace& E = c.left();
  const NormedSpace& F = c.right();
  const LpForm& fe = *E.lp_form();
  const LpForm& ff = *F.lp_form();
  bool atomwise = false;
  if (!fe.p.is_infinite() && !ff.p.is_infinite())
    atomwise = product_exponent(fe.p, ff.p).sub_one;

  if (atomwise) {
    // Below the convexity threshold the optimal decomposition is atom by atom.
    for (Index i = 0; i < target.size(); ++i) {
      if (target[i] == 0.0) continue;
      Vector ei = Vector::Zero(target.size());
      ei[i] = target[i];
      auto [x, y] = single_split(E, F, ei);
      d.cost += E.norm(x) * F.norm(y);
      d.terms.emplace_back(std::move(x), std::move(y));
    }
    return d;
  }
  auto [x, y] = single_split(E, F, target);
  d.cost = E.norm(x) * F.norm(y);
  d.terms.emplace_back(std::move(x), std::move(y));
  return d;
}

namespace {

BisupResult exact_bisup(double value, Provenance prov, Vector x, Vector y) {
  BisupResult r;
  r.lower = r.upper = value;
  r.provenance = prov;
  r.x = std::move(x);
  r.y = std::move(y);
  return r;
}

bool diagonal_matrix(const Matrix& Q) {
  if (Q.rows() != Q.cols()) return false;
  for (Index i = 0; i < Q.rows(); ++i)
    for (Index j = 0; j < Q.cols(); ++j)
      if (i != j && Q(i, j) != 0.0) return false;
  return true;
}

}  // namespace

BisupResult bisup_bilinear_form(const Matrix& Q, const NormedSpace& E,
                                const NormedSpace& F, const AscentOptions& options) {
  require(Q.rows() == E.dim() && Q.cols() == F.dim(), ErrorKind::Dimension,
          "bisup_bilinear_form: shape mismatch");
  if (Q.lpNorm<Eigen::Infinity>() == 0.0)
    return exact_bisup(0.0, Provenance::Exact, Vector::Zero(E.dim()), Vector::Zero(F.dim()));

  // Diagonal forms over lattice pairs: products fill the unit ball of the
  // product space, so the bi-sup is a closed-form dual norm there.
  if (diagonal_matrix(Q)) {
    if (auto fill = coordinatewise_fill(E, F)) {
      DualValue dv = dual_norm(*fill, Q.diagonal());
      if (dv.provenance == Provenance::Exact) {
        Vector h = dv.attaining;
        auto [x, y] = [&] {
          BilinearMap pw = BilinearMap::pointwise(E, F, *fill);
          Decomposition d = fill_split(pw, h);
          if (d.terms.size() == 1) return d.terms[0];
          // Sub-one exponent: the attaining vector is a single atom, but be
          // robust and fall back to the largest term.
          size_t best = 0;
          double bc = -1.0;
          for (size_t k = 0; k < d.terms.size(); ++k) {
            double c0 = E.norm(d.terms[k].first) * F.norm(d.terms[k].second);
            if (c0 > bc) {
              bc = c0;
              best = k;
            }
          }
          return d.terms[best];
        }();
        double nx = E.norm(x), ny = F.norm(y);
        if (nx > 0) x /= nx;
        if (ny > 0) y /= ny;
        return exact_bisup(dv.value, Provenance::Exact, x, y);
      }
    }
  }

  // Hilbert-Hilbert pairs: the bi-sup is the top singular value of the
  // weight-transformed matrix.
  if (E.lp_form() && F.lp_form() && E.lp_form()->p == Exponent::two() &&
      F.lp_form()->p == Exponent::two()) {
    Vector we = E.lp_form()->weights.array().sqrt().matrix();
    Vector wf = F.lp_form()->weights.array().sqrt().matrix();
    Matrix Qt = we.array().inverse().matrix().asDiagonal() * Q *
                wf.array().inverse().matrix().asDiagonal();
    Matrix G = Qt.transpose() * Qt;
    SplitRng rng(options.seed ^ 0x51D5ull);
    Vector v = rng.gaussian_vector(F.dim());
    v.normalize();
    double value = 0.0;
    for (int it = 0; it < 200000; ++it) {
      Vector w = G * v;
      double nw = w.norm();
      if (nw == 0.0) break;
      w /= nw;
      double next = std::sqrt(w.dot(G * w));
      bool done = std::abs(next - value) <= 1e-14 * std::max(1.0, next) && it > 2;
      value = next;
      v = w;
      if (done) break;
    }
    Vector y = (v.array() / wf.array()).matrix();
    double ny = F.norm(y);
    if (ny > 0) y /= ny;
    Vector x;
    Vector qy = Q * y;
    DualValue dx = dual_norm(E, qy);
    x = dx.attaining;
    return exact_bisup(value, Provenance::Exact, x, y);
  }

  UnitBall be = unit_ball(E, options.extreme_cap);
  UnitBall bf = unit_ball(F, options.extreme_cap);

  if (be.polyhedral && bf.polyhedral &&
      static_cast<long long>(be.extremes.size()) *
              static_cast<long long>(bf.extremes.size()) <=
          options.pair_cap) {
    BisupResult out;
    out.provenance = Provenance::ExtremeEnumeration;
    for (const Vector& e : be.extremes) {
      Vector Qe = Q.transpose() * e;
      for (const Vector& f : bf.extremes) {
        double v = std::abs(Qe.dot(f));
        if (v > out.lower) {
          out.lower = v;
          out.x = (Qe.dot(f) >= 0) ? e : Vector(-e);
          out.y = f;
        }
      }
    }
    out.upper = out.lower;
    return out;
  }

  // One polyhedral side with an exact dual on the other: enumerate vertices.
  auto one_sided = [&](const UnitBall& ball, bool e_side) -> std::optional<BisupResult> {
    BisupResult out;
    Provenance worst = Provenance::ExtremeEnumeration;
    for (const Vector& e : ball.extremes) {
      Vector lin = e_side ? Vector(Q.transpose() * e) : Vector(Q * e);
      DualValue dv = e_side ? dual_norm(F, lin) : dual_norm(E, lin);
      if (dv.provenance == Provenance::Heuristic) return std::nullopt;
      worst = weaker(worst, dv.provenance);
      if (dv.value > out.lower) {
        out.lower = dv.value;
        out.x = e_side ? e : dv.attaining;
        out.y = e_side ? dv.attaining : e;
      }
    }
    out.upper = out.lower;
    out.provenance = worst;
    return out;
  };
  if (be.polyhedral) {
    if (auto res = one_sided(be, true)) return *res;
  }
  if (bf.polyhedral) {
    if (auto res = one_sided(bf, false)) return *res;
  }

  // Alternating ascent: each half-step solves its linear maximization
  // exactly, so the value is nondecreasing.
  BisupResult out;
  out.provenance = Provenance::Heuristic;
  SplitRng rng(options.seed);
  for (int restart = 0; restart < options.restarts; ++restart) {
    SplitRng sub = rng.stream(static_cast<std::uint64_t>(restart));
    Vector x = random_unit_vector(E, sub);
    Vector y = random_unit_vector(F, sub);
    double value = std::abs(x.dot(Q * y));
    for (int round = 0; round < options.max_rounds; ++round) {
      DualValue dy = dual_norm(F, Q.transpose() * x);
      if (dy.attaining.size() > 0) y = dy.attaining;
      DualValue dx = dual_norm(E, Q * y);
      if (dx.attaining.size() > 0) x = dx.attaining;
      double next = std::abs(x.dot(Q * y));
      if (next <= value * (1.0 + 1e-13)) {
        value = std::max(value, next);
        break;
      }
      value = next;
    }
    if (value > out.lower) {
      out.lower = value;
      out.x = x;
      out.y = y;
    }
  }
  // Interval upper bound from the coordinate boxes.
  Vector bx = coordinate_box(E), by = coordinate_box(F);
  out.upper = std::max(out.lower, bx.dot(Q.cwiseAbs() * by));
  return out;
}

BisupResult bisup_operator(const BilinearMap& c, const Matrix& T, const NormedSpace& X,
                           const AscentOptions& options) {
  require(T.cols() == c.codomain().dim() && T.rows() == X.dim(), ErrorKind::Dimension,
          "bisup_operator: T shape does not match");
  const NormedSpace& E = c.left();
  const NormedSpace& F = c.right();

  if (T.lpNorm<Eigen::Infinity>() == 0.0)
    return exact_bisup(0.0, Provenance::Exact, Vector::Zero(E.dim()), Vector::Zero(F.dim()));

  // Scalar target: the value is a bilinear-form norm, scaled by the length of
  // the basis vector of X.
  if (X.dim() == 1) {
    Vector e1(1);
    e1[0] = 1.0;
    double scale = X.norm(e1);
    BisupResult r = bisup_bilinear_form(c.form_matrix(T.row(0).transpose()), E, F, options);
    r.lower *= scale;
    r.upper *= scale;
    return r;
  }

  // Product-fill reduction: sup over products equals the operator norm from
  // the fill space.
  if (auto fill = c.product_fill_space()) {
    OperatorNorm on = operator_norm(T, *fill, X,
                                    OpNormOptions{options.restarts, options.seed,
                                                  options.extreme_cap, 200000, 1e-14});
    if (on.provenance != Provenance::Heuristic) {
      BisupResult r;
      r.lower = on.lower;
      r.upper = on.upper;
      r.provenance = on.provenance;
      if (on.attaining.size() > 0) {
        Decomposition d = fill_split(c, on.attaining);
        if (d.terms.size() == 1) {
          r.x = d.terms[0].first;
          r.y = d.terms[0].second;
          double nx = E.norm(r.x), ny = F.norm(r.y);
          if (nx > 0) r.x /= nx;
          if (ny > 0) r.y /= ny;
        }
      }
      return r;
    }
  }

  UnitBall be = unit_ball(E, options.extreme_cap);
  UnitBall bf = unit_ball(F, options.extreme_cap);

  // The map x -> ||T c(x, y)|| is convex for fixed y (and symmetrically), so
  // polyhedral balls reduce to vertex scans with exact inner operator norms.
  auto enumerate_side = [&](const UnitBall& ball, bool left_side)
      -> std::optional<BisupResult> {
    BisupResult out;
    Provenance worst = Provenance::ExtremeEnumeration;
    for (const Vector& e : ball.extremes) {
      Matrix inner = left_side ? Matrix(T * c.left_linearization(e))
                               : Matrix(T * c.right_linearization(e));
      OperatorNorm on = operator_norm(inner, left_side ? F : E, X,
                                      OpNormOptions{options.restarts, options.seed,
                                                    options.extreme_cap, 200000, 1e-14});
      if (on.provenance == Provenance::Heuristic) return std::nullopt;
      worst = weaker(worst, on.provenance);
      if (on.lower > out.lower) {
        out.lower = on.lower;
        out.x = left_side ? e : on.attaining;
        out.y = left_side ? on.attaining : e;
      }
    }
    out.upper = out.lower;
    out.provenance = worst;
    return out;
  };
  if (be.polyhedral && static_cast<int>(be.extremes.size()) <= options.extreme_cap) {
    if (auto res = enumerate_side(be, true)) return *res;
  }
  if (bf.polyhedral && static_cast<int>(bf.extremes.size()) <= options.extreme_cap) {
    if (auto res = enumerate_side(bf, false)) return *res;
  }

  // Alternating ascent through the norming functional of the image.
  BisupResult out;
  out.provenance = Provenance::Heuristic;
  SplitRng rng(options.seed ^ 0xB15Bull);
  for (int restart = 0; restart < options.restarts; ++restart) {
    SplitRng sub = rng.stream(static_cast<std::uint64_t>(restart));
    Vector x = random_unit_vector(E, sub);
    Vector y = random_unit_vector(F, sub);
    double value = X.norm(T * c.evaluate(x, y));
    for (int round = 0; round < options.max_rounds; ++round) {
      Vector z = norming_functional(X, T * c.evaluate(x, y));
      Vector gx = (T * c.right_linearization(y)).transpose() * z;
      DualValue dx = dual_norm(E, gx);
      if (dx.attaining.size() > 0) x = dx.attaining;
      Vector gy = (T * c.left_linearization(x)).transpose() * z;
      DualValue dy = dual_norm(F, gy);
      if (dy.attaining.size() > 0) y = dy.attaining;
      double next = X.norm(T * c.evaluate(x, y));
      if (next <= value * (1.0 + 1e-13)) {
        value = std::max(value, next);
        break;
      }
      value = next;
    }
    if (value > out.lower) {
      out.lower = value;
      out.x = x;
      out.y = y;
    }
  }
  Vector bound = c.absolute_bound(coordinate_box(E), coordinate_box(F));
  Vector abs_bound = T.cwiseAbs() * bound;
  double upper;
  if (X.is_lattice()) {
    upper = X.norm(abs_bound);
  } else {
    upper = 0.0;
    Vector e = Vector::Zero(X.dim());
    for (Index g = 0; g < X.dim(); ++g) {
      e[g] = 1.0;
      upper += abs_bound[g] * X.norm(e);
      e[g] = 0.0;
    }
  }
  out.upper = std::max(out.lower, upper);
  return out;
}

NormBracket estimate_bound(const BilinearMap& map, const BoundOptions& options) {
  Matrix identity = Matrix::Identity(map.codomain().dim(), map.codomain().dim());
  AscentOptions ascent{options.restarts, options.seed, 300, options.extreme_cap,
                       options.pair_cap};
  BisupResult r = bisup_operator(map, identity, map.codomain(), ascent);
  NormBracket b;
  b.lower = r.lower;
  b.upper = r.upper;
  b.provenance = r.provenance;
  if (r.x.size() > 0 && r.y.size() > 0) {
    Decomposition d;
    d.terms.emplace_back(r.x, r.y);
    d.cost = map.left().norm(r.x) * map.right().norm(r.y);
    b.primal_witness = d;
  }
  return b;
}

double grid_oracle(const std::function<double(const Vector&)>& objective, Index dims,
                   double lo, double hi, double resolution) {
  require(resolution > 0.0 && hi > lo, ErrorKind::Config, "grid_oracle: bad grid");
  double steps_d = std::floor((hi - lo) / resolution) + 1.0;
  require(std::pow(steps_d, static_cast<double>(dims)) <= 1e8, ErrorKind::Tractability,
          "grid_oracle: grid would exceed 1e8 points");
  Index steps = static_cast<Index>(steps_d);
  Vector point(dims);
  std::vector<Index> idx(static_cast<size_t>(dims), 0);
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    for (Index d = 0; d < dims; ++d)
      point[d] = lo + resolution * static_cast<double>(idx[static_cast<size_t>(d)]);
    best = std::max(best, objective(point));
    Index d = 0;
    while (d < dims) {
      if (++idx[static_cast<size_t>(d)] < steps) break;
      idx[static_cast<size_t>(d)] = 0;
      ++d;
    }
    if (d == dims) break;
  }
  return best;
}

std::vector<Vector> sphere_directions(Index dims, double resolution) {
  require(dims >= 1 && dims <= 3, ErrorKind::Tractability,
          "sphere_directions: only dimensions 1..3 are supported");
  std::vector<Vector> dirs;
  if (dims == 1) {
    Vector v(1);
    v[0] = 1.0;
    dirs.push_back(v);
    return dirs;
  }
  if (dims == 2) {
    Index count = static_cast<Index>(std::ceil(3.14159265358979323846 / resolution));
    dirs.reserve(static_cast<size_t>(count));
    for (Index k = 0; k < count; ++k) {
      double theta = (static_cast<double>(k) + 0.5) * 3.14159265358979323846 /
                     static_cast<double>(count);
      Vector v(2);
      v[0] = std::cos(theta);
      v[1] = std::sin(theta);
      dirs.push_back(v);
    }
    return dirs;
  }
  // Half sphere in 3-D: latitude bands with proportional longitude counts.
  Index bands = static_cast<Index>(std::ceil(1.5707963267948966 / resolution));
  for (Index b = 0; b < bands; ++b) {
    double phi = (static_cast<double>(b) + 0.5) * 1.5707963267948966 /
                 static_cast<double>(bands);  // polar angle in [0, pi/2)
    double ring = std::sin(phi);
    Index count = std::max<Index>(
        1, static_cast<Index>(std::ceil(2.0 * 3.14159265358979323846 * ring / resolution)));
    for (Index k = 0; k < count; ++k) {
      double theta = (static_cast<double>(k) + 0.5) * 2.0 * 3.14159265358979323846 /
                     static_cast<double>(count);
      Vector v(3);
      v[0] = std::cos(phi);
      v[1] = ring * std::cos(theta);
      v[2] = ring * std::sin(theta);
      dirs.push_back(v);
    }
  }
  return dirs;
}

}  // namespace pidual
