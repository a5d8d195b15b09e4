#include "pidual/space.hpp"

#include <cmath>

namespace pidual {

struct NormedSpace::Impl {
  Index dim = 0;
  Kind kind = Kind::Custom;

  // WeightedLp payload.
  Exponent p;
  Vector weights;

  // PthPower / KotheDual payload.
  std::shared_ptr<const NormedSpace> base;
  double s = 1.0;

  // Custom payload.
  std::function<double(const Vector&)> custom;
  std::function<Vector(const Vector&)> custom_norming;
  std::vector<Vector> custom_extremes;

  std::optional<FiniteMeasure> measure;
  std::optional<LpForm> lp;

  bool lattice = false;
  bool polyhedral = false;
  bool closed_dual = false;
  std::string name;
};

namespace {

double weighted_lp_norm(const Exponent& p, const Vector& w, const Vector& x) {
  if (p.is_infinite()) return (w.array() * x.array().abs()).maxCoeff();
  if (p.is_one()) return (w.array() * x.array().abs()).sum();
  double pv = p.value();
  if (p == Exponent::two()) return std::sqrt((w.array() * x.array().square()).sum());
  return std::pow((w.array() * x.array().abs().pow(pv)).sum(), 1.0 / pv);
}

void check_vector(const NormedSpace& space, const Vector& x, const char* who) {
  require(x.size() == space.dim(), ErrorKind::Dimension,
          std::string(who) + ": vector has dimension " + std::to_string(x.size()) +
              ", space " + space.name() + " has dimension " + std::to_string(space.dim()));
  require(x.allFinite(), ErrorKind::Invariant,
          std::string(who) + ": vector has non-finite coordinates");
}

void validate_custom(const NormedSpace& space, const CustomNormOptions& options) {
  SplitRng rng(0xC0FFEEull);
  const Index n = space.dim();
  for (int k = 0; k < options.validation_samples; ++k) {
    Vector x = rng.gaussian_vector(n);
    Vector y = rng.gaussian_vector(n);
    double nx = space.norm(x), ny = space.norm(y);
    require(std::isfinite(nx) && std::isfinite(ny), ErrorKind::Invariant,
            "custom norm produced a non-finite value");
    if (x.lpNorm<Eigen::Infinity>() > 1e-9) {
      require(nx > 0.0, ErrorKind::Invariant, "custom norm fails definiteness");
    }
    double alpha = rng.uniform(-3.0, 3.0);
    double homog = std::abs(space.norm(alpha * x) - std::abs(alpha) * nx);
    require(homog <= 1e-12 * std::max(1.0, std::abs(alpha) * nx), ErrorKind::Invariant,
            "custom norm fails homogeneity");
    double tri = space.norm(x + y) - nx - ny;
    require(tri <= 1e-10 * std::max(1.0, nx + ny), ErrorKind::Invariant,
            "custom norm fails the triangle inequality");
    if (options.lattice) {
      Vector shrink = rng.uniform_vector(n, 0.0, 1.0);
      Vector xs = (y.array() * shrink.array()).matrix();
      require(space.norm(xs) <= ny + 1e-12 * std::max(1.0, ny), ErrorKind::Invariant,
              "custom norm fails the lattice ideal property");
    }
  }
  for (const Vector& e : options.ball_extremes) {
    require(e.size() == n, ErrorKind::Dimension, "ball extreme has wrong dimension");
    require(std::abs(space.norm(e) - 1.0) <= 1e-12, ErrorKind::Invariant,
            "listed ball extreme does not have norm one");
  }
}

}  // namespace

NormedSpace NormedSpace::lp(Exponent p, Index dim) {
  return weighted_lp(p, Vector::Ones(dim));
}

NormedSpace NormedSpace::weighted_lp(Exponent p, Vector weights) {
  require(weights.size() > 0, ErrorKind::Dimension, "weighted_lp: empty weight vector");
  require((weights.array() > 0.0).all(), ErrorKind::Invariant,
          "weighted_lp: weights must be strictly positive");
  auto impl = std::make_shared<Impl>();
  impl->dim = weights.size();
  impl->kind = Kind::WeightedLp;
  impl->p = p;
  impl->weights = weights;
  impl->lp = LpForm{p, weights};
  impl->lattice = true;
  impl->polyhedral = p.is_one() || p.is_infinite() || impl->dim == 1;
  impl->closed_dual = true;
  // Koethe pairing defaults to the weights for finite p, counting measure for sup.
  impl->measure = FiniteMeasure(p.is_infinite() ? Vector::Ones(weights.size()) : weights);
  impl->name = "l" + p.str() + "[" + std::to_string(weights.size()) + "]";
  return NormedSpace(std::move(impl));
}

NormedSpace NormedSpace::lattice_lp(const FiniteMeasure& mu, Exponent p) {
  NormedSpace s = p.is_infinite() ? weighted_lp(p, Vector::Ones(mu.atom_count()))
                                  : weighted_lp(p, mu.masses());
  auto impl = std::make_shared<Impl>(*s.impl_);
  impl->measure = mu;
  impl->name = "L" + p.str() + "(mu)[" + std::to_string(mu.atom_count()) + "]";
  return NormedSpace(std::move(impl));
}

NormedSpace NormedSpace::pth_power(const NormedSpace& base, double s) {
  require(s > 0.0 && s <= 1.0, ErrorKind::Config,
          "pth_power: s must lie in (0, 1], got " + std::to_string(s));
  require(base.is_lattice(), ErrorKind::UnsupportedStructure,
          "pth_power: base space must be a lattice");
  auto impl = std::make_shared<Impl>();
  impl->dim = base.dim();
  impl->kind = Kind::PthPower;
  impl->base = std::make_shared<const NormedSpace>(base);
  impl->s = s;
  impl->lattice = true;
  impl->measure = base.measure();
  impl->name = base.name() + "^[" + std::to_string(s) + "]";
  if (base.lp_form().has_value()) {
    // || |x|^{1/s} ||_{L^p(w)}^s = ||x||_{L^{p/s}(w)} for finite p;
    // the sup-norm case rescales the weights instead.
    const LpForm& form = *base.lp_form();
    if (form.p.is_infinite()) {
      impl->lp = LpForm{Exponent::infinity(), form.weights.array().pow(s).matrix()};
    } else if (auto srat = Exponent::from_double(1.0 / s)) {
      impl->lp = LpForm{form.p.scaled(srat->num(), srat->den()), form.weights};
    }
  }
  if (impl->lp.has_value()) {
    impl->polyhedral = impl->lp->p.is_one() || impl->lp->p.is_infinite() || impl->dim == 1;
    impl->closed_dual = true;
  }
  return NormedSpace(std::move(impl));
}

NormedSpace NormedSpace::kothe_dual(const NormedSpace& base) {
  require(base.is_lattice(), ErrorKind::UnsupportedStructure,
          "kothe_dual: base space must be a lattice");
  require(base.measure().has_value(), ErrorKind::UnsupportedStructure,
          "kothe_dual: base space carries no measure");
  auto impl = std::make_shared<Impl>();
  impl->dim = base.dim();
  impl->kind = Kind::KotheDual;
  impl->base = std::make_shared<const NormedSpace>(base);
  impl->lattice = true;
  impl->measure = base.measure();
  impl->name = base.name() + "'";
  if (base.lp_form().has_value()) {
    const LpForm& form = *base.lp_form();
    const Vector& mu = base.measure()->masses();
    const Vector& w = form.weights;
    if (form.p.is_infinite()) {
      impl->lp = LpForm{Exponent::one(), (mu.array() / w.array()).matrix()};
    } else if (form.p.is_one()) {
      impl->lp = LpForm{Exponent::infinity(), (mu.array() / w.array()).matrix()};
    } else {
      Exponent pc = form.p.conjugate();
      double pcv = pc.value();
      double pv = form.p.value();
      Vector weights =
          (mu.array().pow(pcv) * w.array().pow(-pcv / pv)).matrix();
      impl->lp = LpForm{pc, weights};
    }
  }
  if (impl->lp.has_value()) {
    impl->polyhedral = impl->lp->p.is_one() || impl->lp->p.is_infinite() || impl->dim == 1;
    impl->closed_dual = true;
  }
  return NormedSpace(std::move(impl));
}

NormedSpace NormedSpace::custom(Index dim, std::function<double(const Vector&)> norm_fn,
                                CustomNormOptions options) {
  require(dim > 0, ErrorKind::Dimension, "custom: dimension must be positive");
  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  impl->kind = Kind::Custom;
  impl->custom = std::move(norm_fn);
  impl->custom_norming = options.norming;
  impl->custom_extremes = options.ball_extremes;
  impl->lattice = options.lattice;
  impl->polyhedral = !options.ball_extremes.empty();
  impl->closed_dual = false;
  impl->name = options.name;
  NormedSpace space(std::move(impl));
  validate_custom(space, options);
  return space;
}

Index NormedSpace::dim() const { return impl_->dim; }
NormedSpace::Kind NormedSpace::kind() const { return impl_->kind; }
bool NormedSpace::is_lattice() const { return impl_->lattice; }
bool NormedSpace::has_polyhedral_ball() const { return impl_->polyhedral; }
bool NormedSpace::has_closed_form_dual() const { return impl_->closed_dual; }
const std::string& NormedSpace::name() const { return impl_->name; }
const std::optional<FiniteMeasure>& NormedSpace::measure() const { return impl_->measure; }
const std::optional<LpForm>& NormedSpace::lp_form() const { return impl_->lp; }
const NormedSpace* NormedSpace::base() const { return impl_->base.get(); }
double NormedSpace::power() const { return impl_->s; }
const std::vector<Vector>& NormedSpace::custom_extremes() const {
  return impl_->custom_extremes;
}

double NormedSpace::norm(const Vector& x) const {
  check_vector(*this, x, "norm");
  switch (impl_->kind) {
    case Kind::WeightedLp:
      return weighted_lp_norm(impl_->p, impl_->weights, x);
    case Kind::PthPower: {
      Vector lifted = x.array().abs().pow(1.0 / impl_->s).matrix();
      return std::pow(impl_->base->norm(lifted), impl_->s);
    }
    case Kind::KotheDual:
      return kothe_dual_norm(*impl_->base, x);
    case Kind::Custom:
      return impl_->custom(x);
  }
  return 0.0;
}

double norm_value(const NormedSpace& space, const Vector& x) { return space.norm(x); }

namespace {

// Dual norm of a weighted-Lp space under the plain pairing. With
// a_i = lambda_i * w_i^{-1/p} the value is the unweighted l^{p'} norm of a.
DualValue lp_dual(const LpForm& form, const Vector& lambda) {
  DualValue out;
  out.provenance = Provenance::Exact;
  const Index n = lambda.size();
  if (form.p.is_infinite()) {
    // Ball { max w|x| <= 1 }: coordinates decouple.
    out.value = (lambda.array().abs() / form.weights.array()).sum();
    out.attaining = (lambda.array().sign() / form.weights.array()).matrix();
    return out;
  }
  double pv = form.p.value();
  Vector a = (lambda.array() * form.weights.array().pow(-1.0 / pv)).matrix();
  if (form.p.is_one()) {
    // a_i = lambda_i / w_i; the ball vertices are +/- e_i / w_i.
    Index j = 0;
    double best = a.array().abs().maxCoeff(&j);
    out.value = best;
    out.attaining = Vector::Zero(n);
    if (best > 0.0) out.attaining[j] = (lambda[j] >= 0 ? 1.0 : -1.0) / form.weights[j];
    return out;
  }
  Exponent pc = form.p.conjugate();
  double pcv = pc.value();
  double val = std::pow(a.array().abs().pow(pcv).sum(), 1.0 / pcv);
  out.value = val;
  if (val > 0.0) {
    Vector u = (a.array().sign() * (a.array().abs() / val).pow(pcv - 1.0)).matrix();
    out.attaining = (u.array() * form.weights.array().pow(-1.0 / pv)).matrix();
  } else {
    out.attaining = Vector::Zero(n);
  }
  return out;
}

}  // namespace

DualValue dual_norm(const NormedSpace& space, const Vector& functional) {
  check_vector(space, functional, "dual_norm");
  const Index n = space.dim();
  if (functional.lpNorm<Eigen::Infinity>() == 0.0) {
    return DualValue{0.0, space.has_closed_form_dual() ? Provenance::Exact
                                                       : Provenance::Heuristic,
                     Vector::Zero(n)};
  }
  if (space.lp_form().has_value()) return lp_dual(*space.lp_form(), functional);

  UnitBall ball = unit_ball(space);
  if (ball.polyhedral) {
    DualValue out;
    out.provenance = Provenance::ExtremeEnumeration;
    out.value = 0.0;
    out.attaining = Vector::Zero(n);
    for (const Vector& e : ball.extremes) {
      double v = functional.dot(e);
      if (std::abs(v) > out.value) {
        out.value = std::abs(v);
        out.attaining = v >= 0 ? e : Vector(-e);
      }
    }
    return out;
  }

  // Heuristic: certified-lower witnesses from sampling, collapsed to the best
  // found value and labeled as such.
  DualValue out;
  out.provenance = Provenance::Heuristic;
  SplitRng rng(0x5EEDFACEull ^ static_cast<std::uint64_t>(n));
  auto consider = [&](const Vector& candidate) {
    double nv = space.norm(candidate);
    if (nv <= 0.0) return;
    double v = functional.dot(candidate) / nv;
    if (std::abs(v) > out.value) {
      out.value = std::abs(v);
      out.attaining = (v >= 0 ? 1.0 : -1.0) / nv * candidate;
    }
  };
  consider(functional);
  consider(functional.array().sign().matrix());
  consider(coordinate_box(space).array().matrix().cwiseProduct(
      functional.array().sign().matrix()));
  for (int k = 0; k < 512; ++k) consider(rng.gaussian_vector(n));
  // Local polish around the incumbent.
  for (int k = 0; k < 256; ++k) {
    Vector probe = out.attaining + 0.05 * rng.gaussian_vector(n);
    consider(probe);
  }
  return out;
}

double kothe_dual_norm(const NormedSpace& space, const Vector& g) {
  check_vector(space, g, "kothe_dual_norm");
  require(space.is_lattice(), ErrorKind::UnsupportedStructure,
          "kothe_dual_norm: space " + space.name() + " is not a lattice");
  require(space.measure().has_value(), ErrorKind::UnsupportedStructure,
          "kothe_dual_norm: space " + space.name() + " carries no measure");
  // sup over the solid ball of sum |f g| dmu equals the dual norm of the
  // positive functional |g| dmu.
  Vector lam = (g.array().abs() * space.measure()->masses().array()).matrix();
  return dual_norm(space, lam).value;
}

NormedSpace pth_power(const NormedSpace& space, double s) {
  return NormedSpace::pth_power(space, s);
}

NormedSpace kothe_dual(const NormedSpace& space) { return NormedSpace::kothe_dual(space); }

NormedSpace dual_space(const NormedSpace& space) {
  require(space.lp_form().has_value(), ErrorKind::UnsupportedStructure,
          "dual_space: only weighted-Lp reductions have closed-form duals");
  const LpForm& form = *space.lp_form();
  const Vector& w = form.weights;
  if (form.p.is_infinite())
    return NormedSpace::weighted_lp(Exponent::one(), w.array().inverse().matrix());
  if (form.p.is_one())
    return NormedSpace::weighted_lp(Exponent::infinity(), w.array().inverse().matrix());
  Exponent pc = form.p.conjugate();
  Vector weights = w.array().pow(-pc.value() / form.p.value()).matrix();
  return NormedSpace::weighted_lp(pc, weights);
}

UnitBall unit_ball(const NormedSpace& space, int extreme_cap) {
  UnitBall ball;
  const Index n = space.dim();
  if (n == 1) {
    Vector e = Vector::Ones(1);
    double nv = space.norm(e);
    if (nv > 0.0) {
      ball.polyhedral = true;
      ball.extremes.push_back(e / nv);
    }
    return ball;
  }
  if (space.lp_form().has_value()) {
    const LpForm& form = *space.lp_form();
    if (form.p.is_one()) {
      if (n <= extreme_cap) {
        ball.polyhedral = true;
        for (Index i = 0; i < n; ++i) {
          Vector e = Vector::Zero(n);
          e[i] = 1.0 / form.weights[i];
          ball.extremes.push_back(std::move(e));
        }
      }
      return ball;
    }
    if (form.p.is_infinite()) {
      // Vertices s / w for sign patterns s; fix the first sign to +1.
      if (n <= 20 && (1LL << (n - 1)) <= extreme_cap) {
        ball.polyhedral = true;
        for (std::int64_t mask = 0; mask < (1LL << (n - 1)); ++mask) {
          Vector e(n);
          e[0] = 1.0 / form.weights[0];
          for (Index i = 1; i < n; ++i)
            e[i] = ((mask >> (i - 1)) & 1 ? -1.0 : 1.0) / form.weights[i];
          ball.extremes.push_back(std::move(e));
        }
      }
      return ball;
    }
    return ball;  // smooth
  }
  if (space.has_polyhedral_ball() && space.kind() == NormedSpace::Kind::Custom) {
    UnitBall b;
    b.extremes = space.custom_extremes();
    b.polyhedral = static_cast<int>(b.extremes.size()) <= extreme_cap;
    if (!b.polyhedral) b.extremes.clear();
    return b;
  }
  return ball;
}

Vector coordinate_box(const NormedSpace& space) {
  const Index n = space.dim();
  UnitBall ball = unit_ball(space);
  if (ball.polyhedral) {
    Vector box = Vector::Zero(n);
    for (const Vector& e : ball.extremes)
      box = box.cwiseMax(e.cwiseAbs());
    return box;
  }
  Vector box(n);
  for (Index i = 0; i < n; ++i) {
    Vector e = Vector::Zero(n);
    e[i] = 1.0;
    box[i] = 1.0 / space.norm(e);
  }
  return box;
}

Vector random_unit_vector(const NormedSpace& space, SplitRng& rng) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    Vector g = rng.gaussian_vector(space.dim());
    double nv = space.norm(g);
    if (nv > 1e-12) return g / nv;
  }
  fail(ErrorKind::Invariant, "random_unit_vector: norm vanished on all samples");
}

Vector norming_functional(const NormedSpace& space, const Vector& v) {
  check_vector(space, v, "norming_functional");
  const Index n = space.dim();
  if (v.lpNorm<Eigen::Infinity>() == 0.0) return Vector::Zero(n);
  if (space.lp_form().has_value()) {
    const LpForm& form = *space.lp_form();
    if (form.p.is_infinite()) {
      Index j = 0;
      (form.weights.array() * v.array().abs()).maxCoeff(&j);
      Vector z = Vector::Zero(n);
      z[j] = form.weights[j] * (v[j] >= 0 ? 1.0 : -1.0);
      return z;
    }
    double pv = form.p.value();
    double nv = space.norm(v);
    if (form.p.is_one()) return (form.weights.array() * v.array().sign()).matrix();
    return (form.weights.array() * v.array().sign() *
            (v.array().abs() / nv).pow(pv - 1.0))
        .matrix();
  }
  if (space.impl_->custom_norming) return space.impl_->custom_norming(v);
  // Finite-difference gradient of the norm; for smooth norms this is a
  // norming functional by homogeneity. Rescale so the pairing is exact.
  const double h = 1e-6 * std::max(1.0, v.lpNorm<Eigen::Infinity>());
  Vector grad(n);
  for (Index i = 0; i < n; ++i) {
    Vector vp = v, vm = v;
    vp[i] += h;
    vm[i] -= h;
    grad[i] = (space.norm(vp) - space.norm(vm)) / (2.0 * h);
  }
  double pairing = grad.dot(v);
  if (pairing > 0.0) grad *= space.norm(v) / pairing;
  return grad;
}

}  // namespace pidual
