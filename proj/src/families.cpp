#include "pidual/families.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "pidual/free_lipschitz.hpp"
#include "pidual/hadamard.hpp"
#include "pidual/kothe_duality.hpp"
#include "pidual/product_norm.hpp"
#include "pidual/vector_measure.hpp"

namespace pidual {

namespace {

void run_parallel(size_t count, int threads, const std::function<void(size_t)>& fn) {
  threads = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (threads <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= count) break;
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (size_t i = 0; i < count; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);
}

// --- shared witness plumbing ------------------------------------------------

struct WitnessSections {
  std::optional<std::pair<Vector, Vector>> pair;
  std::optional<Decomposition> decomp;
  std::optional<Vector> lambda;
  std::optional<Vector> target;
};

WitnessSections parse_witness(const std::string& witness) {
  WitnessSections out;
  std::istringstream in(witness);
  std::string section;
  while (std::getline(in, section, '+')) {
    auto colon = section.find(':');
    if (colon == std::string::npos) continue;
    std::string kind = section.substr(0, colon);
    std::string payload = section.substr(colon + 1);
    if (kind == "pair") {
      auto bar = payload.find('|');
      if (bar == std::string::npos) continue;
      out.pair = {parse_vector(payload.substr(0, bar)), parse_vector(payload.substr(bar + 1))};
    } else if (kind == "lambda") {
      out.lambda = parse_vector(payload);
    } else if (kind == "target") {
      out.target = parse_vector(payload);
    } else if (kind == "decomp") {
      Decomposition d;
      std::istringstream terms(payload);
      std::string term;
      while (std::getline(terms, term, ';')) {
        if (term.rfind("cost=", 0) == 0) {
          d.cost = std::stod(term.substr(5));
          continue;
        }
        auto bar = term.find('|');
        if (bar == std::string::npos) continue;
        d.terms.emplace_back(parse_vector(term.substr(0, bar)),
                             parse_vector(term.substr(bar + 1)));
      }
      out.decomp = d;
    }
  }
  return out;
}

// Feasibility of a unit pair against the two domain balls.
bool check_unit_pair(const BilinearMap& c, const Vector& x, const Vector& y,
                     std::string& msg) {
  if (c.left().norm(x) > 1.0 + 1e-9 || c.right().norm(y) > 1.0 + 1e-9) {
    msg = "witness pair leaves the unit balls";
    return false;
  }
  return true;
}

bool check_lambda_feasible(const BilinearMap& c, const Vector& lambda, std::string& msg) {
  UnitBall be = unit_ball(c.left(), 512);
  UnitBall bf = unit_ball(c.right(), 512);
  double sup = 0.0;
  if (be.polyhedral && bf.polyhedral &&
      be.extremes.size() * bf.extremes.size() <= 65536) {
    for (const Vector& e : be.extremes)
      for (const Vector& f : bf.extremes)
        sup = std::max(sup, std::abs(lambda.dot(c.evaluate(e, f))));
  } else {
    SplitRng rng(0xC1ull);
    for (int k = 0; k < 256; ++k) {
      Vector x = random_unit_vector(c.left(), rng);
      Vector y = random_unit_vector(c.right(), rng);
      sup = std::max(sup, std::abs(lambda.dot(c.evaluate(x, y))));
    }
  }
  if (sup > 1.0 + 1e-9) {
    msg = "dual witness infeasible (sup " + format_double(sup) + ")";
    return false;
  }
  return true;
}

bool check_decomposition(const BilinearMap& c, const Decomposition& d, const Vector& target,
                         std::string& msg) {
  Vector img = Vector::Zero(c.codomain().dim());
  double cost = 0.0;
  for (const auto& [x, y] : d.terms) {
    img += c.evaluate(x, y);
    cost += c.left().norm(x) * c.right().norm(y);
  }
  if ((img - target).norm() > 1e-9 * (1.0 + target.norm())) {
    msg = "decomposition does not reconstruct the target";
    return false;
  }
  if (std::abs(cost - d.cost) > 1e-10 * (1.0 + cost)) {
    msg = "decomposition cost mismatch";
    return false;
  }
  return true;
}

using Checker = std::function<bool(const DualityRecord&, std::string&)>;

struct BuiltInstance {
  std::string id_prefix;
  BilinearMap c;
  OperatorClass V;
};

struct FamilyPlan {
  std::string family;
  std::uint64_t seed = 1;
  std::vector<BuiltInstance> duality;
  std::vector<std::function<DualityReport()>> jobs;
  std::vector<Checker> checkers;  // tried in order until one claims the record
};

Checker duality_checker(std::shared_ptr<std::vector<BuiltInstance>> instances) {
  return [instances](const DualityRecord& rec, std::string& msg) -> bool {
    for (const BuiltInstance& inst : *instances) {
      if (rec.instance_id.rfind(inst.id_prefix + "/", 0) != 0) continue;
      WitnessSections w = parse_witness(rec.witness);
      if (w.pair.has_value())
        return check_unit_pair(inst.c, w.pair->first, w.pair->second, msg);
      return true;
    }
    msg = "no instance matches id " + rec.instance_id;
    return false;
  };
}

const std::vector<std::string> kCommonKeys = {"family", "seed", "samples",
                                              "output",  "threads", "report."};

std::vector<std::string> with_common(std::vector<std::string> keys) {
  keys.insert(keys.end(), kCommonKeys.begin(), kCommonKeys.end());
  return keys;
}

NormedSpace scalar_space() { return NormedSpace::lp(Exponent::two(), 1); }

Exponent cycle_exponent(int k) {
  switch (k % 5) {
    case 0: return Exponent::one();
    case 1: return Exponent::of(4, 3);
    case 2: return Exponent::two();
    case 3: return Exponent::of(3);
    default: return Exponent::infinity();
  }
}

// --- family: trivial (scalar factor) ----------------------------------------

FamilyPlan build_trivial(const Config& cfg) {
  cfg.require_known_keys(with_common({"trivial.n", "trivial.p", "trivial.count"}));
  FamilyPlan plan;
  plan.family = "trivial";
  plan.seed = cfg.get_seed("seed", 1);
  const Index n = cfg.get_int("trivial.n", 4);
  const int count = static_cast<int>(cfg.get_int("trivial.count", 8));
  const int functionals = static_cast<int>(cfg.get_int("samples", 4));
  SplitRng rng(plan.seed);

  for (int k = 0; k < count; ++k) {
    SplitRng sub = rng.stream(static_cast<std::uint64_t>(k));
    Exponent p = cfg.has("trivial.p") ? cfg.get_exponent("trivial.p", Exponent::two())
                                      : cycle_exponent(k);
    NormedSpace F = (k % 2 == 0)
                        ? NormedSpace::lp(p, n)
                        : NormedSpace::weighted_lp(p, sub.uniform_vector(n, 0.5, 2.0));
    NormedSpace E = scalar_space();
    std::vector<Matrix> coeff;
    for (Index g = 0; g < n; ++g) {
      Matrix A = Matrix::Zero(1, n);
      A(0, g) = 1.0;
      coeff.push_back(A);
    }
    BilinearMap c = BilinearMap::custom(E, F, F, std::move(coeff));
    OperatorClass V{{}, scalar_space()};
    V.members.push_back(Matrix::Zero(1, n));
    for (int t = 1; t < functionals; ++t)
      V.members.push_back(sub.gaussian_vector(n).transpose());
    plan.duality.push_back({"inst" + std::to_string(k), std::move(c), std::move(V)});
  }
  return plan;
}

// --- family: tensor_dual (projective tensor duality) ------------------------

FamilyPlan build_tensor_dual(const Config& cfg) {
  cfg.require_known_keys(with_common(
      {"tensor.ne", "tensor.nf", "tensor.p", "tensor.q", "tensor.count"}));
  FamilyPlan plan;
  plan.family = "tensor_dual";
  plan.seed = cfg.get_seed("seed", 2);
  const Index ne = cfg.get_int("tensor.ne", 2);
  const Index nf = cfg.get_int("tensor.nf", 3);
  const int count = static_cast<int>(cfg.get_int("tensor.count", 6));
  const int functionals = static_cast<int>(cfg.get_int("samples", 4));
  SplitRng rng(plan.seed);

  for (int k = 0; k < count; ++k) {
    SplitRng sub = rng.stream(static_cast<std::uint64_t>(k));
    Exponent p = cfg.has("tensor.p") ? cfg.get_exponent("tensor.p", Exponent::one())
                                     : (k % 3 == 0 ? Exponent::one()
                                                   : (k % 3 == 1 ? Exponent::infinity()
                                                                 : Exponent::two()));
    Exponent q = cfg.has("tensor.q") ? cfg.get_exponent("tensor.q", Exponent::one())
                                     : (k % 2 == 0 ? Exponent::one() : Exponent::two());
    NormedSpace E = NormedSpace::lp(p, ne);
    NormedSpace F = NormedSpace::lp(q, nf);
    NormedSpace G = NormedSpace::lp(Exponent::two(), ne * nf);
    BilinearMap c = BilinearMap::tensor(E, F, G);
    OperatorClass V{{}, scalar_space()};
    for (int t = 0; t < functionals; ++t)
      V.members.push_back(sub.gaussian_vector(ne * nf).transpose());
    plan.duality.push_back({"inst" + std::to_string(k), std::move(c), std::move(V)});
  }
  return plan;
}

// --- families: bfs_pth_power and bfs_kothe ----------------------------------

FiniteMeasure measure_from_config(const Config& cfg, const std::string& key, Index n,
                                  SplitRng& rng) {
  if (cfg.has(key)) {
    std::string text = cfg.get_string(key);
    if (text != "random") return FiniteMeasure(parse_vector(text));
  }
  return FiniteMeasure(rng.uniform_vector(n, 0.25, 2.0));
}

FamilyPlan build_bfs_pth_power(const Config& cfg) {
  cfg.require_known_keys(with_common({"bfs.n", "bfs.p", "bfs.measure", "bfs.count"}));
  FamilyPlan plan;
  plan.family = "bfs_pth_power";
  plan.seed = cfg.get_seed("seed", 3);
  const Index n = cfg.get_int("bfs.n", 4);
  const int count = static_cast<int>(cfg.get_int("bfs.count", 4));
  const int functionals = static_cast<int>(cfg.get_int("samples", 4));
  SplitRng rng(plan.seed);

  auto instances = std::make_shared<std::vector<BuiltInstance>>();
  for (int k = 0; k < count; ++k) {
    SplitRng sub = rng.stream(static_cast<std::uint64_t>(k));
    Exponent p = cfg.has("bfs.p") ? cfg.get_exponent("bfs.p", Exponent::two())
                                  : (k % 3 == 0 ? Exponent::of(4, 3)
                                                : (k % 3 == 1 ? Exponent::two()
                                                              : Exponent::of(4)));
    FiniteMeasure mu = measure_from_config(cfg, "bfs.measure", n, sub);
    NormedSpace X1 = NormedSpace::lattice_lp(mu, Exponent::one());
    NormedSpace E = pth_power(X1, 1.0 / p.value());
    NormedSpace F = pth_power(X1, 1.0 / p.conjugate().value());
    auto fill = coordinatewise_fill(E, F);
    NormedSpace G = fill.has_value() ? *fill : X1;
    BilinearMap c = BilinearMap::pointwise(E, F, G);
    OperatorClass V{{}, scalar_space()};
    for (int t = 0; t < functionals; ++t) {
      Vector j = sub.gaussian_vector(n);
      V.members.push_back((j.array() * mu.masses().array()).matrix().transpose());
    }
    plan.duality.push_back({"inst" + std::to_string(k), c, V});
    instances->push_back({"inst" + std::to_string(k), c, V});

    // Product norm of the p-th power factorization equals the base L^1 norm.
    std::uint64_t seed = plan.seed;
    plan.jobs.push_back([c, X1, n, k, seed]() {
      DualityReport report;
      SplitRng job_rng(seed ^ (0xF00Dull + static_cast<std::uint64_t>(k)));
      Vector h = job_rng.gaussian_vector(n);
      PiOptions opt;
      opt.seed = seed;
      NormBracket bracket = pi_c_bracket(c, h, opt);
      double base = X1.norm(h);
      DualityRecord rec;
      rec.family = "bfs_pth_power";
      rec.instance_id = "inst" + std::to_string(k) + "/product_norm";
      rec.seed = seed;
      rec.lhs_lower = bracket.lower;
      rec.lhs_upper = bracket.upper;
      rec.rhs_lower = rec.rhs_upper = base;
      rec.gap = std::abs(bracket.midpoint() - base);
      rec.provenance = bracket.provenance;
      rec.failure = rec.gap > 1e-9 * std::max(1.0, base);
      std::string w;
      if (bracket.primal_witness.has_value())
        w = witness_decomposition(*bracket.primal_witness);
      if (bracket.dual_witness.has_value()) {
        if (!w.empty()) w += "+";
        w += witness_lambda(*bracket.dual_witness);
      }
      rec.witness = w + "+" + witness_target(h);
      report.add(std::move(rec));
      return report;
    });
  }
  plan.checkers.push_back(duality_checker(instances));
  plan.checkers.push_back([instances](const DualityRecord& rec, std::string& msg) -> bool {
    for (const BuiltInstance& inst : *instances) {
      if (rec.instance_id != inst.id_prefix + "/product_norm") continue;
      WitnessSections w = parse_witness(rec.witness);
      if (!w.target.has_value()) {
        msg = "product norm record lacks a target";
        return false;
      }
      if (w.decomp.has_value() &&
          !check_decomposition(inst.c, *w.decomp, *w.target, msg))
        return false;
      if (w.lambda.has_value() && !check_lambda_feasible(inst.c, *w.lambda, msg))
        return false;
      return true;
    }
    msg = "no instance matches id " + rec.instance_id;
    return false;
  });
  return plan;
}

FamilyPlan build_bfs_kothe(const Config& cfg) {
  cfg.require_known_keys(with_common({"bfs.p", "bfs.q", "bfs.n", "bfs.measure"}));
  FamilyPlan plan;
  plan.family = "bfs_kothe";
  plan.seed = cfg.get_seed("seed", 4);
  const Index n = cfg.get_int("bfs.n", 4);
  const int samples = static_cast<int>(cfg.get_int("samples", 8));
  SplitRng rng(plan.seed);
  Exponent p = cfg.get_exponent("bfs.p", Exponent::two());
  Exponent q = cfg.get_exponent("bfs.q", Exponent::of(4));
  FiniteMeasure mu = measure_from_config(cfg, "bfs.measure", n, rng);
  NormedSpace X = NormedSpace::lattice_lp(mu, p);
  NormedSpace Y = NormedSpace::lattice_lp(mu, q);
  std::uint64_t seed = plan.seed;
  plan.jobs.push_back(
      [X, Y, samples, seed]() { return verify_kothe_product_duality(X, Y, samples, seed); });
  plan.checkers.push_back([X, Y](const DualityRecord& rec, std::string& msg) -> bool {
    WitnessSections w = parse_witness(rec.witness);
    if (!w.pair.has_value()) return true;
    if (X.norm(w.pair->first) > 1.0 + 1e-9 || Y.norm(w.pair->second) > 1.0 + 1e-9) {
      msg = "witness pair leaves the unit balls";
      return false;
    }
    return true;
  });
  return plan;
}

// --- family: hadamard_triple -------------------------------------------------

FamilyPlan build_hadamard_triple(const Config& cfg) {
  cfg.require_known_keys(
      with_common({"hadamard.N", "hadamard.p", "hadamard.q", "hadamard.s"}));
  FamilyPlan plan;
  plan.family = "hadamard_triple";
  plan.seed = cfg.get_seed("seed", 5);
  const Index N = cfg.get_int("hadamard.N", 3);
  const int samples = static_cast<int>(cfg.get_int("samples", 10));
  Exponent p = cfg.get_exponent("hadamard.p", Exponent::two());
  Exponent q = cfg.get_exponent("hadamard.q", Exponent::two());
  Exponent s = cfg.get_exponent("hadamard.s", Exponent::one());
  NormedSpace X = NormedSpace::lp(p, N + 1);
  NormedSpace Y = NormedSpace::lp(q, N + 1);
  NormedSpace Z = NormedSpace::lp(s, N + 1);
  std::uint64_t seed = plan.seed;
  plan.jobs.push_back(
      [X, Y, Z, samples, seed]() { return verify_triple_identity(X, Y, Z, samples, seed); });
  plan.checkers.push_back([X, Y](const DualityRecord& rec, std::string& msg) -> bool {
    WitnessSections w = parse_witness(rec.witness);
    if (!w.pair.has_value()) return true;
    if (X.norm(w.pair->first) > 1.0 + 1e-9 || Y.norm(w.pair->second) > 1.0 + 1e-9) {
      msg = "witness pair leaves the unit balls";
      return false;
    }
    return true;
  });
  return plan;
}

// --- family: freelip ----------------------------------------------------------

// Metric spaces load either as explicit distance matrices (row-major csv,
// validated) or as shortest-path closures of weighted edge lists
// ("i,j,w;i,j,w;..."), which guarantee the triangle inequality.
std::optional<FiniteMetricSpace> metric_from_config(const Config& cfg,
                                                    const std::string& prefix) {
  if (cfg.has(prefix + ".distances")) {
    Vector flat = cfg.get_vector(prefix + ".distances");
    Index n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(flat.size()))));
    require(n * n == flat.size(), ErrorKind::Config,
            prefix + ".distances must hold a square row-major matrix");
    Matrix d(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) d(i, j) = flat[i * n + j];
    return FiniteMetricSpace::from_distances(std::move(d));
  }
  if (cfg.has(prefix + ".edges")) {
    std::vector<std::tuple<Index, Index, double>> edges;
    Index n = 0;
    std::istringstream in(cfg.get_string(prefix + ".edges"));
    std::string item;
    while (std::getline(in, item, ';')) {
      Vector e = parse_vector(item);
      require(e.size() == 3, ErrorKind::Config, prefix + ".edges entries are i,j,w");
      Index i = static_cast<Index>(e[0]), j = static_cast<Index>(e[1]);
      edges.emplace_back(i, j, e[2]);
      n = std::max(n, std::max(i, j) + 1);
    }
    return FiniteMetricSpace::from_edges(n, edges);
  }
  return std::nullopt;
}

FamilyPlan build_freelip(const Config& cfg) {
  cfg.require_known_keys(
      with_common({"freelip.na", "freelip.nd", "freelip.count", "freelip.molecules",
                   "freelip.A.distances", "freelip.A.edges", "freelip.D.distances",
                   "freelip.D.edges"}));
  FamilyPlan plan;
  plan.family = "freelip";
  plan.seed = cfg.get_seed("seed", 6);
  const Index na = cfg.get_int("freelip.na", 5);
  const Index nd = cfg.get_int("freelip.nd", 4);
  std::optional<FiniteMetricSpace> fixed_a = metric_from_config(cfg, "freelip.A");
  std::optional<FiniteMetricSpace> fixed_d = metric_from_config(cfg, "freelip.D");
  const int count = (fixed_a.has_value() || fixed_d.has_value())
                        ? 1
                        : static_cast<int>(cfg.get_int("freelip.count", 3));
  const int samples = static_cast<int>(cfg.get_int("samples", 6));
  const int molecules = static_cast<int>(cfg.get_int("freelip.molecules", 6));
  SplitRng rng(plan.seed);

  auto spaces =
      std::make_shared<std::vector<std::pair<FiniteMetricSpace, FiniteMetricSpace>>>();
  for (int k = 0; k < count; ++k) {
    SplitRng sub = rng.stream(static_cast<std::uint64_t>(k));
    FiniteMetricSpace A = fixed_a.has_value() ? *fixed_a : FiniteMetricSpace::random(na, sub);
    FiniteMetricSpace D = fixed_d.has_value() ? *fixed_d : FiniteMetricSpace::random(nd, sub);
    spaces->emplace_back(A, D);
    std::uint64_t seed = plan.seed ^ static_cast<std::uint64_t>(k);
    int idx = k;

    plan.jobs.push_back([A, D, samples, seed, idx]() {
      DualityReport report = verify_lipschitz_duality(A, D, samples, seed);
      for (DualityRecord& rec : report.records)
        rec.instance_id = "space" + std::to_string(idx) + "/" + rec.instance_id;
      return report;
    });
    plan.jobs.push_back([A, molecules, seed, idx]() {
      // LP strong duality and the isometry of x -> m_{x,0}.
      DualityReport report;
      SplitRng job_rng(seed ^ 0xF10ull);
      for (int s = 0; s < molecules; ++s) {
        Vector r = job_rng.gaussian_vector(A.size() - 1);
        Molecule z = reduced_to_molecule(r);
        double primal = molecule_norm(A, z);
        double dual = lipschitz_dual_norm(A, z);
        DualityRecord rec;
        rec.family = "freelip";
        rec.instance_id = "space" + std::to_string(idx) + "/lp" + std::to_string(s);
        rec.seed = seed;
        rec.lhs_lower = rec.lhs_upper = primal;
        rec.rhs_lower = rec.rhs_upper = dual;
        rec.gap = std::abs(primal - dual);
        rec.provenance = Provenance::Exact;
        rec.failure = rec.gap > 1e-8 * std::max(1.0, primal);
        report.add(std::move(rec));
      }
      for (Index x = 1; x < A.size(); ++x) {
        double norm = molecule_norm(A, elementary_molecule(A, x, 0));
        DualityRecord rec;
        rec.family = "freelip";
        rec.instance_id = "space" + std::to_string(idx) + "/isometry" + std::to_string(x);
        rec.seed = seed;
        rec.lhs_lower = rec.lhs_upper = norm;
        rec.rhs_lower = rec.rhs_upper = A.distance(x, 0);
        rec.gap = std::abs(norm - A.distance(x, 0));
        rec.provenance = Provenance::Exact;
        rec.failure = rec.gap > 1e-10 * std::max(1.0, A.distance(x, 0));
        report.add(std::move(rec));
      }
      return report;
    });
  }
  plan.checkers.push_back([spaces](const DualityRecord& rec, std::string& msg) -> bool {
    WitnessSections w = parse_witness(rec.witness);
    if (!w.pair.has_value()) return true;
    for (size_t k = 0; k < spaces->size(); ++k) {
      if (rec.instance_id.rfind("space" + std::to_string(k) + "/", 0) != 0) continue;
      const auto& [A, D] = (*spaces)[k];
      if (molecule_norm(A, Molecule{w.pair->first}) > 1.0 + 1e-9 ||
          molecule_norm(D, Molecule{w.pair->second}) > 1.0 + 1e-9) {
        msg = "witness molecules leave the unit balls";
        return false;
      }
      return true;
    }
    msg = "no instance matches id " + rec.instance_id;
    return false;
  });
  return plan;
}

// --- families: vecmeas_linf and vecmeas_predual -------------------------------

VectorMeasure random_measure(Index n, Index k, const std::string& value_norm,
                             SplitRng& rng) {
  NormedSpace X = value_norm == "l1"   ? NormedSpace::lp(Exponent::one(), k)
                  : value_norm == "linf" ? NormedSpace::lp(Exponent::infinity(), k)
                                         : NormedSpace::lp(Exponent::two(), k);
  Matrix atoms(n, k);
  for (Index i = 0; i < n; ++i) {
    Vector row = rng.gaussian_vector(k);
    while (X.norm(row) < 1e-3) row = rng.gaussian_vector(k);
    atoms.row(i) = row.transpose();
  }
  return VectorMeasure(std::move(atoms), std::move(X));
}

FamilyPlan build_vecmeas(const Config& cfg, bool predual) {
  cfg.require_known_keys(with_common(
      {"vecmeas.k", "vecmeas.n", "vecmeas.p", "vecmeas.value_norm", "vecmeas.atoms"}));
  FamilyPlan plan;
  plan.family = predual ? "vecmeas_predual" : "vecmeas_linf";
  plan.seed = cfg.get_seed("seed", predual ? 8 : 7);
  const Index k = cfg.get_int("vecmeas.k", 2);
  const Index n = cfg.get_int("vecmeas.n", 4);
  const int samples = static_cast<int>(cfg.get_int("samples", 8));
  Exponent p = cfg.get_exponent("vecmeas.p", Exponent::two());
  std::string value_norm = cfg.get_string("vecmeas.value_norm", "l2");
  SplitRng rng(plan.seed);

  VectorMeasure m = cfg.has("vecmeas.atoms")
                        ? VectorMeasure(
                              [&] {
                                Vector flat = cfg.get_vector("vecmeas.atoms");
                                require(flat.size() == n * k, ErrorKind::Config,
                                        "vecmeas.atoms must hold n*k entries");
                                Matrix a(n, k);
                                for (Index i = 0; i < n; ++i)
                                  for (Index j = 0; j < k; ++j) a(i, j) = flat[i * k + j];
                                return a;
                              }(),
                              value_norm == "l1"
                                  ? NormedSpace::lp(Exponent::one(), k)
                                  : (value_norm == "linf"
                                         ? NormedSpace::lp(Exponent::infinity(), k)
                                         : NormedSpace::lp(Exponent::two(), k)))
                        : random_measure(n, k, value_norm, rng);

  std::uint64_t seed = plan.seed;
  if (predual) {
    plan.jobs.push_back([m, p, samples, seed]() { return verify_predual(m, p, samples, seed); });
    VectorMeasure mc = m;
    Exponent pc = p;
    plan.checkers.push_back([mc, pc](const DualityRecord& rec, std::string& msg) -> bool {
      WitnessSections w = parse_witness(rec.witness);
      if (!w.pair.has_value()) return true;
      if (lp_m_norm(mc, pc, w.pair->first) > 1.0 + 1e-9) {
        msg = "predual witness f leaves the L^p(m) ball";
        return false;
      }
      RybakovData ryb = choose_rybakov(mc, rec.seed ^ 0x5Bull);
      if (l1m_kothe_dual_norm(mc, ryb, w.pair->second) > 1.0 + 1e-9) {
        msg = "predual witness h leaves the (L^1(m))' ball";
        return false;
      }
      return true;
    });
  } else {
    plan.jobs.push_back(
        [m, p, samples, seed]() { return verify_linf_identification(m, p, samples, seed); });
    plan.jobs.push_back(
        [m, p, samples, seed]() { return verify_lp_duality_norm(m, p, samples, seed); });
    VectorMeasure mc = m;
    Exponent pc = p;
    plan.checkers.push_back([mc, pc](const DualityRecord& rec, std::string& msg) -> bool {
      WitnessSections w = parse_witness(rec.witness);
      if (w.pair.has_value()) {
        if (lp_m_norm(mc, pc, w.pair->first) > 1.0 + 1e-9 ||
            lp_m_norm(mc, pc.conjugate(), w.pair->second) > 1.0 + 1e-9) {
          msg = "witness pair leaves the L^p(m) balls";
          return false;
        }
      }
      if (w.lambda.has_value()) {
        if (lp_m_norm(mc, pc.conjugate(), *w.lambda) > 1.0 + 1e-9) {
          msg = "duality witness g leaves the L^{p'}(m) ball";
          return false;
        }
      }
      return true;
    });
  }
  return plan;
}

// --- family: custom_pic --------------------------------------------------------

NormedSpace parse_space(const Config& cfg, const std::string& name,
                        std::vector<std::string>& visiting) {
  for (const std::string& seen : visiting)
    require(seen != name, ErrorKind::Config, "space definition cycle at '" + name + "'");
  visiting.push_back(name);
  std::string prefix = "space." + name + ".";
  std::string kind = cfg.get_string(prefix + "kind");
  NormedSpace result = [&]() -> NormedSpace {
    if (kind == "lp" || kind == "weighted_lp" || kind == "lattice_lp") {
      Exponent p = cfg.get_exponent(prefix + "p", Exponent::two());
      if (cfg.has(prefix + "weights")) {
        Vector w = cfg.get_vector(prefix + "weights");
        if (kind == "lattice_lp") return NormedSpace::lattice_lp(FiniteMeasure(w), p);
        return NormedSpace::weighted_lp(p, w);
      }
      Index dim = cfg.get_int(prefix + "dim", 0);
      require(dim > 0, ErrorKind::Config, "space." + name + " needs dim or weights");
      return NormedSpace::lp(p, dim);
    }
    if (kind == "pth_power") {
      NormedSpace base = parse_space(cfg, cfg.get_string(prefix + "base"), visiting);
      return pth_power(base, cfg.get_double(prefix + "s", 0.5));
    }
    if (kind == "kothe_dual") {
      NormedSpace base = parse_space(cfg, cfg.get_string(prefix + "base"), visiting);
      return kothe_dual(base);
    }
    fail(ErrorKind::Config, "unknown space kind '" + kind + "'");
  }();
  visiting.pop_back();
  return result;
}

BilinearMap parse_bilinear(const Config& cfg) {
  std::vector<std::string> visiting;
  NormedSpace E = parse_space(cfg, "E", visiting);
  NormedSpace F = parse_space(cfg, "F", visiting);
  std::string kind = cfg.get_string("bilinear.kind", "pointwise");
  if (kind == "pointwise" || kind == "hadamard") {
    NormedSpace G = cfg.has("space.G.kind")
                        ? parse_space(cfg, "G", visiting)
                        : [&] {
                            auto fill = coordinatewise_fill(E, F);
                            return fill.has_value()
                                       ? *fill
                                       : NormedSpace::lp(Exponent::one(), E.dim());
                          }();
    return kind == "pointwise" ? BilinearMap::pointwise(E, F, G)
                               : BilinearMap::hadamard(E, F, G);
  }
  if (kind == "scalar_pairing") {
    NormedSpace G = cfg.has("space.G.kind") ? parse_space(cfg, "G", visiting)
                                            : NormedSpace::lp(Exponent::two(), 1);
    return BilinearMap::scalar_pairing(E, F, G);
  }
  if (kind == "tensor") {
    NormedSpace G = cfg.has("space.G.kind")
                        ? parse_space(cfg, "G", visiting)
                        : NormedSpace::lp(Exponent::two(), E.dim() * F.dim());
    return BilinearMap::tensor(E, F, G);
  }
  fail(ErrorKind::Config, "unknown bilinear kind '" + kind + "'");
}

FamilyPlan build_custom_pic(const Config& cfg) {
  cfg.require_known_keys(with_common({"space.", "bilinear.", "target", "picalc.",
                                      "oracle.resolution"}));
  FamilyPlan plan;
  plan.family = "custom_pic";
  plan.seed = cfg.get_seed("seed", 9);
  BilinearMap c = parse_bilinear(cfg);
  Vector target = cfg.get_vector("target");
  PiOptions opt;
  opt.rank_cap = static_cast<int>(cfg.get_int("picalc.rank_cap", -1));
  opt.restarts = static_cast<int>(cfg.get_int("picalc.restarts", 32));
  opt.seed = cfg.get_seed("picalc.seed", plan.seed);
  opt.reconstruction_tol = cfg.get_double("picalc.tolerances.reconstruction", 1e-9);
  opt.sweep_tol = cfg.get_double("picalc.tolerances.sweep", 1e-10);
  double resolution = cfg.get_double("oracle.resolution", 0.0);

  std::uint64_t seed = plan.seed;
  plan.jobs.push_back([c, target, opt, resolution, seed]() {
    DualityReport report;
    NormBracket bracket = pi_c_bracket(c, target, opt);
    DualityRecord rec;
    rec.family = "custom_pic";
    rec.instance_id = "target0";
    rec.seed = seed;
    rec.lhs_lower = bracket.lower;
    rec.lhs_upper = bracket.upper;
    bool have_oracle = resolution > 0.0 && c.left().dim() <= 3 && c.right().dim() <= 3;
    if (have_oracle) {
      double oracle = pi_c_oracle(c, target, resolution);
      rec.rhs_lower = rec.rhs_upper = oracle;
      rec.gap = std::abs(bracket.midpoint() - oracle);
      // Grid restriction can only overestimate; beyond the grid modulus it
      // must stay inside the certified bracket.
      double grid_tol = 2.0 * resolution * std::max(1.0, bracket.upper);
      rec.failure = oracle < bracket.lower - 1e-9 * std::max(1.0, bracket.lower) ||
                    oracle > bracket.upper + grid_tol;
    } else {
      rec.rhs_lower = bracket.lower;
      rec.rhs_upper = bracket.upper;
      rec.gap = bracket.width();
      rec.failure = false;
    }
    rec.provenance = bracket.provenance;
    std::string w;
    if (bracket.primal_witness.has_value())
      w = witness_decomposition(*bracket.primal_witness);
    if (bracket.dual_witness.has_value()) {
      if (!w.empty()) w += "+";
      w += witness_lambda(*bracket.dual_witness);
    }
    rec.witness = w + "+" + witness_target(target);
    report.add(std::move(rec));
    return report;
  });

  BilinearMap cc = c;
  plan.checkers.push_back([cc](const DualityRecord& rec, std::string& msg) -> bool {
    WitnessSections w = parse_witness(rec.witness);
    if (!w.target.has_value()) {
      msg = "custom_pic record lacks a target";
      return false;
    }
    if (w.decomp.has_value() && !check_decomposition(cc, *w.decomp, *w.target, msg))
      return false;
    if (w.lambda.has_value() && !check_lambda_feasible(cc, *w.lambda, msg)) return false;
    return true;
  });
  return plan;
}

FamilyPlan build_plan(const Config& cfg) {
  std::string family = cfg.get_string("family");
  if (family == "trivial") return build_trivial(cfg);
  if (family == "tensor_dual") return build_tensor_dual(cfg);
  if (family == "bfs_pth_power") return build_bfs_pth_power(cfg);
  if (family == "bfs_kothe") return build_bfs_kothe(cfg);
  if (family == "hadamard_triple") return build_hadamard_triple(cfg);
  if (family == "freelip") return build_freelip(cfg);
  if (family == "vecmeas_linf") return build_vecmeas(cfg, false);
  if (family == "vecmeas_predual") return build_vecmeas(cfg, true);
  if (family == "custom_pic") return build_custom_pic(cfg);
  fail(ErrorKind::Config, "unknown family '" + family + "'");
}

}  // namespace

const std::vector<FamilyInfo>& family_registry() {
  static const std::vector<FamilyInfo> registry = {
      {"trivial", "scalar factor: the dual space as a product dual",
       {"trivial.n", "trivial.p", "trivial.count", "samples"}},
      {"tensor_dual", "projective tensor duality: bilinear forms vs operators",
       {"tensor.ne", "tensor.nf", "tensor.p", "tensor.q", "tensor.count", "samples"}},
      {"bfs_pth_power", "p-th power factorization of a function lattice",
       {"bfs.n", "bfs.p", "bfs.measure", "bfs.count", "samples"}},
      {"bfs_kothe", "Koethe duality of pointwise products of function lattices",
       {"bfs.p", "bfs.q", "bfs.n", "bfs.measure", "samples"}},
      {"hadamard_triple", "coefficient multipliers of Hadamard products",
       {"hadamard.N", "hadamard.p", "hadamard.q", "hadamard.s", "samples"}},
      {"freelip", "molecule norms and Lipschitz bi-form duality",
       {"freelip.na", "freelip.nd", "freelip.count", "freelip.molecules",
        "freelip.A.distances", "freelip.A.edges", "freelip.D.distances",
        "freelip.D.edges", "samples"}},
      {"vecmeas_linf", "vector-measure products: the sup-norm identification",
       {"vecmeas.k", "vecmeas.n", "vecmeas.p", "vecmeas.value_norm", "vecmeas.atoms",
        "samples"}},
      {"vecmeas_predual", "vector-measure products: the predual identity",
       {"vecmeas.k", "vecmeas.n", "vecmeas.p", "vecmeas.value_norm", "vecmeas.atoms",
        "samples"}},
      {"custom_pic", "user-defined product-norm bracket with grid oracle",
       {"space.", "bilinear.", "target", "picalc.", "oracle.resolution"}},
  };
  return registry;
}

RunResult run_family(const Config& config, int threads) {
  FamilyPlan plan = build_plan(config);

  std::vector<std::function<DualityReport()>> jobs;
  for (const BuiltInstance& inst : plan.duality) {
    VerifyOptions opts;
    opts.seed = plan.seed;
    opts.ascent.seed = plan.seed ^ 0xA5ull;
    BuiltInstance copy = inst;
    std::string family = plan.family;
    jobs.push_back([copy, opts, family]() {
      return verify_duality(family, copy.id_prefix, copy.c, copy.V, opts);
    });
  }
  for (auto& job : plan.jobs) jobs.push_back(job);

  std::vector<DualityReport> slots(jobs.size());
  run_parallel(jobs.size(), threads, [&](size_t i) { slots[i] = jobs[i](); });

  RunResult out;
  for (DualityReport& slot : slots) {
    for (DualityRecord& rec : slot.records) {
      rec.family = plan.family;
      out.report.add(std::move(rec));
    }
  }
  out.config_echo = config.echo_lines();
  return out;
}

RecheckResult recheck_report(const ParsedReport& parsed) {
  RecheckResult out;
  Config cfg = Config::from_lines(parsed.config_echo);
  FamilyPlan plan = build_plan(cfg);
  auto instances = std::make_shared<std::vector<BuiltInstance>>(plan.duality);
  std::vector<Checker> checkers = plan.checkers;
  checkers.insert(checkers.begin(), duality_checker(instances));

  for (const DualityRecord& rec : parsed.report.records) {
    if (rec.witness.empty()) continue;
    ++out.checked;
    std::string msg;
    bool ok = false;
    for (const Checker& checker : checkers) {
      msg.clear();
      if (checker(rec, msg)) {
        ok = true;
        break;
      }
      if (msg.rfind("no instance", 0) != 0) break;  // a real verification failure
    }
    if (!ok) {
      ++out.failures;
      out.messages.push_back(rec.instance_id + ": " + (msg.empty() ? "unverified" : msg));
    }
  }
  return out;
}

int thread_count_from_env() {
  const char* env = std::getenv("PIDUAL_THREADS");
  if (env == nullptr) return 1;
  int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

}  // namespace pidual
