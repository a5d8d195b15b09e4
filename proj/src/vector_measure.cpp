#include "pidual/vector_measure.hpp"

#include <cmath>

#include "pidual/lp.hpp"

namespace pidual {

VectorMeasure::VectorMeasure(Matrix atoms, NormedSpace value_space)
    : atoms_(std::move(atoms)), value_space_(std::move(value_space)) {
  require(atoms_.rows() >= 1, ErrorKind::Invariant, "vector measure needs atoms");
  require(atoms_.cols() == value_space_.dim(), ErrorKind::Dimension,
          "atom values do not live in the value space");
  for (Index i = 0; i < atoms_.rows(); ++i) {
    require(value_space_.norm(atoms_.row(i).transpose()) > 0.0, ErrorKind::Invariant,
            "vector measure has a null atom (index " + std::to_string(i) + ")");
  }
}

namespace {

// Vertices of the dual unit ball when they are enumerable: the crosspolytope
// dual of a weighted sup norm and the sign box dual of a weighted l^1 norm.
std::vector<Vector> dual_ball_vertices(const NormedSpace& X, int cap) {
  std::vector<Vector> out;
  if (!X.lp_form().has_value()) return out;
  const LpForm& form = *X.lp_form();
  const Index k = X.dim();
  if (form.p.is_infinite()) {
    for (Index j = 0; j < k; ++j) {
      Vector z = Vector::Zero(k);
      z[j] = form.weights[j];
      out.push_back(z);
    }
    return out;
  }
  if (form.p.is_one() && k <= 20 && (1LL << (k - 1)) <= cap) {
    for (std::int64_t mask = 0; mask < (1LL << (k - 1)); ++mask) {
      Vector z(k);
      z[0] = form.weights[0];
      for (Index j = 1; j < k; ++j)
        z[j] = ((mask >> (j - 1)) & 1 ? -1.0 : 1.0) * form.weights[j];
      out.push_back(z);
    }
  }
  return out;
}

struct AbsSup {
  double value = 0.0;
  Vector xstar;  // attaining dual vector
  Provenance provenance = Provenance::Heuristic;
};

// sup over the dual unit ball of sum_i |<rows_i, x*>|. The objective is
// convex, so dual vertices (when enumerable) or sign patterns are exact;
// the bidual identity sup <v, x*> = ||v|| closes the sign route.
AbsSup abs_scalarization_sup(const Matrix& rows, const NormedSpace& X) {
  AbsSup out;
  const Index n = rows.rows();
  std::vector<Vector> vertices = dual_ball_vertices(X, 4096);
  if (!vertices.empty()) {
    for (const Vector& z : vertices) {
      double v = (rows * z).cwiseAbs().sum();
      if (v > out.value) {
        out.value = v;
        out.xstar = z;
      }
    }
    out.provenance = Provenance::ExtremeEnumeration;
    return out;
  }
  if (n <= 20) {
    const std::int64_t reps = 1LL << (n - 1);
    for (std::int64_t mask = 0; mask < reps; ++mask) {
      Vector combo = rows.row(0).transpose();
      for (Index i = 1; i < n; ++i) {
        double s = ((mask >> (i - 1)) & 1) ? -1.0 : 1.0;
        combo += s * rows.row(i).transpose();
      }
      double v = X.norm(combo);
      if (v > out.value) {
        out.value = v;
        out.xstar = norming_functional(X, combo);
      }
    }
    out.provenance = Provenance::Exact;
    return out;
  }
  // Heuristic ascent on signs with random restarts.
  SplitRng rng(0xAB5ull ^ static_cast<std::uint64_t>(n));
  for (int restart = 0; restart < 32; ++restart) {
    Vector s(n);
    for (Index i = 0; i < n; ++i) s[i] = rng.next_double() < 0.5 ? -1.0 : 1.0;
    bool improved = true;
    while (improved) {
      improved = false;
      for (Index i = 0; i < n; ++i) {
        Vector combo = rows.transpose() * s;
        s[i] = -s[i];
        Vector flipped = rows.transpose() * s;
        if (X.norm(flipped) > X.norm(combo)) {
          improved = true;
        } else {
          s[i] = -s[i];
        }
      }
    }
    Vector combo = rows.transpose() * s;
    double v = X.norm(combo);
    if (v > out.value) {
      out.value = v;
      out.xstar = norming_functional(X, combo);
    }
  }
  out.provenance = Provenance::Heuristic;
  return out;
}

}  // namespace

double semivariation(const VectorMeasure& m, const std::vector<Index>& atom_subset) {
  if (atom_subset.empty()) return 0.0;
  Matrix rows(static_cast<Index>(atom_subset.size()), m.value_dim());
  for (size_t r = 0; r < atom_subset.size(); ++r) {
    Index i = atom_subset[r];
    require(i >= 0 && i < m.atom_count(), ErrorKind::Dimension,
            "semivariation: atom index out of range");
    rows.row(static_cast<Index>(r)) = m.atoms().row(i);
  }
  return abs_scalarization_sup(rows, m.value_space()).value;
}

RybakovData choose_rybakov(const VectorMeasure& m, std::uint64_t seed) {
  const NormedSpace& X = m.value_space();
  const Index k = m.value_dim();
  std::vector<Vector> candidates = dual_ball_vertices(X, 64);

  // Sign mixtures normalized on the dual sphere keep every atom visible.
  if (k <= 16) {
    for (std::int64_t mask = 0; mask < (1LL << (k - 1)); ++mask) {
      Vector v(k);
      v[0] = 1.0;
      for (Index j = 1; j < k; ++j) v[j] = ((mask >> (j - 1)) & 1) ? -1.0 : 1.0;
      double dn = dual_norm(X, v).value;
      if (dn > 0.0) candidates.push_back(v / dn);
    }
  }
  SplitRng rng(seed);
  for (int r = 0; r < 64; ++r) {
    Vector v = rng.gaussian_vector(k);
    double dn = dual_norm(X, v).value;
    if (dn > 0.0) candidates.push_back(v / dn);
  }

  double best_score = -1.0;
  Vector best;
  for (const Vector& cand : candidates) {
    double score = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m.atom_count(); ++i)
      score = std::min(score, std::abs(m.atom(i).dot(cand)));
    if (score > best_score) {
      best_score = score;
      best = cand;
    }
  }
  double floor_scale = 0.0;
  for (Index i = 0; i < m.atom_count(); ++i)
    floor_scale = std::max(floor_scale, X.norm(m.atom(i)));
  if (best_score <= 1e-12 * floor_scale) {
    Index worst = 0;
    double val = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m.atom_count(); ++i) {
      double v = std::abs(m.atom(i).dot(best));
      if (v < val) {
        val = v;
        worst = i;
      }
    }
    fail(ErrorKind::Exhausted,
         "choose_rybakov: every candidate annihilates atom " + std::to_string(worst));
  }
  RybakovData out;
  out.functional = best;
  out.masses = (m.atoms() * best).cwiseAbs();
  return out;
}

double lp_m_norm(const VectorMeasure& m, const Exponent& p, const Vector& f) {
  require(f.size() == m.atom_count(), ErrorKind::Dimension,
          "lp_m_norm: f is not a function on the atoms");
  if (p.is_infinite()) return f.cwiseAbs().maxCoeff();
  double pv = p.value();
  Matrix rows = f.array().abs().pow(pv).matrix().asDiagonal() * m.atoms();
  double sup = abs_scalarization_sup(rows, m.value_space()).value;
  return std::pow(sup, 1.0 / pv);
}

Vector integrate(const VectorMeasure& m, const Vector& f) {
  require(f.size() == m.atom_count(), ErrorKind::Dimension,
          "integrate: f is not a function on the atoms");
  return m.atoms().transpose() * f;
}

Vector rn_derivative(const VectorMeasure& m, const RybakovData& rybakov, const Vector& zstar) {
  require(zstar.size() == m.value_dim(), ErrorKind::Dimension,
          "rn_derivative: functional has wrong dimension");
  require((rybakov.masses.array() > 0.0).all(), ErrorKind::Invariant,
          "rn_derivative: Rybakov masses must be positive");
  return ((m.atoms() * zstar).array() / rybakov.masses.array()).matrix();
}

double l1m_kothe_dual_norm(const VectorMeasure& m, const RybakovData& rybakov,
                           const Vector& h) {
  require(h.size() == m.atom_count(), ErrorKind::Dimension,
          "l1m_kothe_dual_norm: h is not a function on the atoms");
  const Index n = m.atom_count();
  if (h.lpNorm<Eigen::Infinity>() == 0.0) return 0.0;

  // maximize sum u_i |h_i| mu_i over u >= 0 with the L^1(m) ball constraint
  // sup_{x*} sum u_i |<m_i, x*>| <= 1, by cutting planes: each cut x* is the
  // exact separation maximizer for the current iterate.
  Vector objective = (h.cwiseAbs().array() * rybakov.masses.array()).matrix();
  std::vector<Vector> cuts;
  cuts.push_back(rybakov.functional);
  for (Index i = 0; i < n; ++i)
    cuts.push_back(norming_functional(m.value_space(), m.atom(i)));

  double value = 0.0;
  for (int round = 0; round < 100; ++round) {
    LpProblem lp;
    std::vector<int> u;
    for (Index i = 0; i < n; ++i)
      u.push_back(lp.add_variable(0.0, LpProblem::kInf, -objective[i]));
    for (const Vector& x : cuts) {
      int row = lp.add_constraint(-LpProblem::kInf, 1.0);
      Vector coeff = (m.atoms() * x).cwiseAbs();
      for (Index i = 0; i < n; ++i)
        if (coeff[i] != 0.0) lp.set_coefficient(row, u[static_cast<size_t>(i)], coeff[i]);
    }
    LpSolution sol = lp.minimize();
    require(sol.status == LpStatus::Optimal, ErrorKind::Infeasible,
            "l1m_kothe_dual_norm: relaxation LP failed");
    Vector uv = sol.x.cwiseMax(0.0);
    Matrix rows = uv.asDiagonal() * m.atoms();
    AbsSup sep = abs_scalarization_sup(rows, m.value_space());
    value = objective.dot(uv);
    if (sep.value <= 1.0 + 1e-10) return value;
    cuts.push_back(sep.xstar);
    value /= sep.value;  // feasible fallback if the loop runs out
  }
  return value;
}

NormedSpace lp_m_space(const VectorMeasure& m, const Exponent& p) {
  VectorMeasure copy = m;
  Exponent pc = p;
  auto norm_fn = [copy, pc](const Vector& f) { return lp_m_norm(copy, pc, f); };
  auto norming_fn = [copy, pc](const Vector& f) -> Vector {
    const Index n = copy.atom_count();
    if (f.lpNorm<Eigen::Infinity>() == 0.0) return Vector::Zero(n);
    if (pc.is_infinite()) {
      Index j = 0;
      f.cwiseAbs().maxCoeff(&j);
      Vector phi = Vector::Zero(n);
      phi[j] = f[j] >= 0 ? 1.0 : -1.0;
      return phi;
    }
    double pv = pc.value();
    Matrix rows = f.array().abs().pow(pv).matrix().asDiagonal() * copy.atoms();
    AbsSup sup = abs_scalarization_sup(rows, copy.value_space());
    double nf = std::pow(sup.value, 1.0 / pv);
    if (nf == 0.0) return Vector::Zero(n);
    Vector scal = (copy.atoms() * sup.xstar).cwiseAbs();
    return (f.array().sign() * f.array().abs().pow(pv - 1.0) * scal.array() /
            std::pow(nf, pv - 1.0))
        .matrix();
  };
  CustomNormOptions opts;
  opts.lattice = true;
  opts.norming = norming_fn;
  opts.name = "L" + p.str() + "(m)[" + std::to_string(m.atom_count()) + "]";
  return NormedSpace::custom(m.atom_count(), norm_fn, opts);
}

namespace {

// Analytic witness for the duality norm: g aligned with |f|^{p-1} and the
// signs of the optimal scalarization. Feasible by construction and attaining.
Vector duality_witness(const VectorMeasure& m, const Exponent& p, const Vector& f) {
  const Index n = m.atom_count();
  double pv = p.value();
  Matrix rows = f.array().abs().pow(pv).matrix().asDiagonal() * m.atoms();
  AbsSup sup = abs_scalarization_sup(rows, m.value_space());
  if (sup.xstar.size() == 0) return Vector::Zero(n);
  Vector scal_sign = (m.atoms() * sup.xstar).array().sign().matrix();
  Vector raw =
      (f.array().sign() * f.array().abs().pow(pv - 1.0) * scal_sign.array()).matrix();
  double nu = lp_m_norm(m, p.conjugate(), raw);
  if (nu == 0.0) return Vector::Zero(n);
  return raw / nu;
}

// sup { ||int F g dm|| : ||g||_{L^{p'}(m)} <= 1 }: the analytic witness plus
// a supergradient polish. Never exceeds the true supremum.
double duality_sup(const VectorMeasure& m, const Exponent& p, const Vector& F) {
  if (F.lpNorm<Eigen::Infinity>() == 0.0) return 0.0;
  Exponent pc = p.conjugate();
  Vector g = duality_witness(m, p, F);
  if (g.lpNorm<Eigen::Infinity>() == 0.0) return 0.0;
  double best = m.value_space().norm(integrate(m, (F.array() * g.array()).matrix()));
  for (int it = 0; it < 30; ++it) {
    Vector img = integrate(m, (F.array() * g.array()).matrix());
    Vector z = norming_functional(m.value_space(), img);
    Vector grad = (F.array() * (m.atoms() * z).array()).matrix();
    Vector trial = g + 0.25 * grad / std::max(1e-12, grad.norm());
    double nt = lp_m_norm(m, pc, trial);
    if (nt == 0.0) break;
    trial /= nt;
    double val = m.value_space().norm(integrate(m, (F.array() * trial.array()).matrix()));
    if (val <= best * (1.0 + 1e-14)) break;
    best = val;
    g = trial;
  }
  return best;
}

}  // namespace

DualityReport verify_lp_duality_norm(const VectorMeasure& m, const Exponent& p, int samples,
                                     std::uint64_t seed) {
  require(!p.is_one() && !p.is_infinite(), ErrorKind::Config,
          "verify_lp_duality_norm: requires 1 < p < inf");
  DualityReport report;
  SplitRng rng(seed);
  const Index n = m.atom_count();
  Exponent pc = p.conjugate();
  for (int s = 0; s < samples; ++s) {
    SplitRng sub = rng.stream(static_cast<std::uint64_t>(s));
    Vector f;
    if (s == 0) f = Vector::Zero(n);
    else if (s == 1) f = Vector::Unit(n, 0);
    else f = sub.gaussian_vector(n);

    DualityRecord rec;
    rec.family = "vecmeas";
    rec.instance_id = "lpdual/f" + std::to_string(s);
    rec.seed = seed;

    double rhs = lp_m_norm(m, p, f);
    double best = 0.0;
    Vector g = duality_witness(m, p, f);
    if (g.lpNorm<Eigen::Infinity>() > 0.0) {
      best = m.value_space().norm(integrate(m, (f.array() * g.array()).matrix()));
      // Supergradient polish with normalization; cannot exceed the true sup.
      for (int it = 0; it < 40; ++it) {
        Vector img = integrate(m, (f.array() * g.array()).matrix());
        Vector z = norming_functional(m.value_space(), img);
        Vector grad = (f.array() * (m.atoms() * z).array()).matrix();
        Vector trial = g + 0.25 * grad / std::max(1e-12, grad.norm());
        double nt = lp_m_norm(m, pc, trial);
        if (nt == 0.0) break;
        trial /= nt;
        double val = m.value_space().norm(integrate(m, (f.array() * trial.array()).matrix()));
        if (val <= best * (1.0 + 1e-14)) break;
        best = val;
        g = trial;
      }
    }
    rec.lhs_lower = rec.lhs_upper = best;
    rec.rhs_lower = rec.rhs_upper = rhs;
    rec.gap = std::abs(best - rhs);
    rec.provenance = Provenance::Heuristic;
    rec.failure = rec.gap > 1e-6 * std::max(1.0, rhs);
    if (g.size() > 0 && g.lpNorm<Eigen::Infinity>() > 0.0)
      rec.witness = witness_lambda(g);
    report.add(std::move(rec));
  }
  return report;
}

DualityReport verify_linf_identification(const VectorMeasure& m, const Exponent& p,
                                         int samples, std::uint64_t seed) {
  require(!p.is_one() && !p.is_infinite(), ErrorKind::Config,
          "verify_linf_identification: requires 1 < p < inf");
  DualityReport report;
  SplitRng rng(seed);
  const Index n = m.atom_count();
  Exponent pc = p.conjugate();
  NormedSpace X = m.value_space();

  for (int s = 0; s < samples; ++s) {
    SplitRng sub = rng.stream(static_cast<std::uint64_t>(s));
    Vector h0;
    if (s == 0) h0 = Vector::Zero(n);
    else if (s == 1) h0 = Vector::Ones(n);
    else h0 = sub.gaussian_vector(n);

    DualityRecord rec;
    rec.family = "vecmeas";
    rec.instance_id = "linf/h" + std::to_string(s);
    rec.seed = seed;

    double rhs = h0.cwiseAbs().maxCoeff();

    // Single-atom witness attains the sup exactly.
    double best = 0.0;
    Vector bf, bg;
    {
      Index istar = 0;
      h0.cwiseAbs().maxCoeff(&istar);
      Vector chi = Vector::Zero(n);
      chi[istar] = 1.0;
      double np = lp_m_norm(m, p, chi);
      double nq = lp_m_norm(m, pc, chi);
      if (np > 0 && nq > 0) {
        bf = chi / np;
        bg = chi / nq;
        best = X.norm(integrate(m, (h0.array() * bf.array() * bg.array()).matrix()));
      }
    }
    // Alternating supergradient ascent over the two balls.
    Vector f = bf.size() > 0 ? bf : Vector(Vector::Ones(n) / std::max(1e-12, lp_m_norm(m, p, Vector::Ones(n))));
    Vector g = bg.size() > 0 ? bg : f;
    for (int it = 0; it < 30; ++it) {
      Vector img = integrate(m, (h0.array() * f.array() * g.array()).matrix());
      Vector z = norming_functional(X, img);
      Vector scal = m.atoms() * z;
      Vector gf = (h0.array() * g.array() * scal.array()).matrix();
      Vector tf = f + 0.3 * gf / std::max(1e-12, gf.norm());
      double nf = lp_m_norm(m, p, tf);
      if (nf > 0) {
        tf /= nf;
        Vector gg = (h0.array() * tf.array() * scal.array()).matrix();
        Vector tg = g + 0.3 * gg / std::max(1e-12, gg.norm());
        double ng = lp_m_norm(m, pc, tg);
        if (ng > 0) {
          tg /= ng;
          double val =
              X.norm(integrate(m, (h0.array() * tf.array() * tg.array()).matrix()));
          if (val > best) {
            best = val;
            f = tf;
            g = tg;
            continue;
          }
        }
      }
      break;
    }

    // Nested route for ||S_T||: the outer supremum over f of the inner
    // duality supremum over g, seeded with atoms and the bi-sup witness.
    double nested = 0.0;
    {
      std::vector<Vector> candidates;
      for (Index i = 0; i < n; ++i) {
        Vector chi = Vector::Zero(n);
        chi[i] = 1.0;
        double np = lp_m_norm(m, p, chi);
        if (np > 0) candidates.push_back(chi / np);
      }
      if (bf.size() > 0) candidates.push_back(bf);
      if (f.size() > 0) candidates.push_back(f);
      for (int r = 0; r < 6; ++r) {
        Vector cand = sub.gaussian_vector(n);
        double np = lp_m_norm(m, p, cand);
        if (np > 0) candidates.push_back(cand / np);
      }
      for (const Vector& cand : candidates)
        nested = std::max(nested, duality_sup(m, p, (h0.array() * cand.array()).matrix()));
    }

    rec.lhs_lower = rec.lhs_upper = best;
    rec.rhs_lower = rec.rhs_upper = nested;
    rec.gap = std::abs(best - nested);
    rec.provenance = Provenance::Heuristic;
    double scale = std::max(1.0, rhs);
    rec.note = "sup_oracle=" + format_double(rhs);
    rec.failure = rec.gap > 1e-6 * scale || std::abs(best - rhs) > 1e-6 * scale ||
                  std::abs(nested - rhs) > 1e-6 * scale;
    if (bf.size() > 0) rec.witness = witness_pair(bf, bg);
    report.add(std::move(rec));
  }
  return report;
}

DualityReport verify_predual(const VectorMeasure& m, const Exponent& p, int samples,
                             std::uint64_t seed) {
  require(!p.is_one() && !p.is_infinite(), ErrorKind::Config,
          "verify_predual: requires 1 < p < inf");
  DualityReport report;
  SplitRng rng(seed);
  const Index n = m.atom_count();
  Exponent pc = p.conjugate();
  RybakovData ryb = choose_rybakov(m, seed ^ 0x5Bull);

  for (int s = 0; s < samples; ++s) {
    SplitRng sub = rng.stream(static_cast<std::uint64_t>(s));
    Vector g;
    if (s == 0) g = Vector::Zero(n);
    else if (s == 1) g = Vector::Unit(n, 0);
    else g = sub.gaussian_vector(n);

    DualityRecord rec;
    rec.family = "vecmeas";
    rec.instance_id = "predual/g" + std::to_string(s);
    rec.seed = seed;

    double rhs = lp_m_norm(m, pc, g);

    // Witness chain: the optimal scalarization x* of ||g||_{L^{p'}(m)} gives
    // both the f-witness (conjugate profile) and the RN(m) element h_{x*},
    // which is feasible because ||h_{z*}||_{(L^1(m))'} <= ||z*||.
    double best = 0.0;
    Vector bf, bh;
    if (g.lpNorm<Eigen::Infinity>() > 0.0) {
      double qv = pc.value();
      Matrix rows = g.array().abs().pow(qv).matrix().asDiagonal() * m.atoms();
      AbsSup sup = abs_scalarization_sup(rows, m.value_space());
      if (sup.xstar.size() > 0) {
        Vector scal_sign = (m.atoms() * sup.xstar).array().sign().matrix();
        Vector raw =
            (g.array().sign() * g.array().abs().pow(qv - 1.0) * scal_sign.array()).matrix();
        double nu = lp_m_norm(m, p, raw);
        if (nu > 0.0) {
          bf = raw / nu;
          bh = rn_derivative(m, ryb, sup.xstar);
          double feas = l1m_kothe_dual_norm(m, ryb, bh);
          if (feas > 1.0) bh /= feas;
          best = std::abs(
              (g.array() * bf.array() * bh.array() * ryb.masses.array()).sum());
        }
      }
    }
    rec.lhs_lower = rec.lhs_upper = best;
    rec.rhs_lower = rec.rhs_upper = rhs;
    rec.gap = std::abs(best - rhs);
    rec.provenance = Provenance::Heuristic;
    rec.failure = rec.gap > 1e-6 * std::max(1.0, rhs);
    if (bf.size() > 0) rec.witness = witness_pair(bf, bh);
    report.add(std::move(rec));
  }
  return report;
}

}  // namespace pidual
