#pragma once

#include <optional>
#include <vector>

#include "pidual/bilinear.hpp"
#include "pidual/bracket.hpp"
#include "pidual/optimize.hpp"

namespace pidual {

struct PiOptions {
  int rank_cap = -1;          // default dim(E) * dim(F)
  int restarts = 32;
  std::uint64_t seed = 1;
  double reconstruction_tol = 1e-9;  // relative
  double sweep_tol = 1e-10;
  int max_sweeps = 60;
  int extreme_cap = 4096;
  int pair_cap = 250000;
  int subgradient_iters = 1500;
  // Extra starting decompositions (merged candidates, single tensors, ...).
  std::vector<Decomposition> seed_decompositions;
};

struct DualCertificate {
  double bound = 0.0;
  Vector lambda;  // scaled so sup |lambda(c(x,y))| over the balls is (at most) one
  Provenance provenance = Provenance::Heuristic;
  double feasibility = 0.0;  // the verified (or estimated) sup for `lambda`
};

// Feasible-decomposition upper bound for the product norm of `target`.
// Deterministic given the seed; throws Range when the target is not in the
// image of the linearization, Infeasible when no start reaches the
// reconstruction tolerance.
std::pair<double, Decomposition> pi_c_upper(const BilinearMap& c, const Vector& target,
                                            const PiOptions& options = {});

// Certified lower bound via a functional lambda with
// sup { |lambda(c(x,y))| : x, y unit } <= 1; bound = lambda(target).
DualCertificate pi_c_lower(const BilinearMap& c, const Vector& target,
                           const PiOptions& options = {});

NormBracket pi_c_bracket(const BilinearMap& c, const Vector& target,
                         const PiOptions& options = {});

// Independent verification oracle: the restriction of the decomposition
// problem to grid atoms c(u, v) over both unit spheres, solved as an exact
// linear program. The value is within a resolution-dependent tolerance of the
// product norm. Requires dim(E), dim(F) <= 3.
double pi_c_oracle(const BilinearMap& c, const Vector& target, double resolution = 0.01);

// Relative least-squares residual of the target against the range of the
// linearization; the range precondition is residual <= 1e-8.
double range_residual(const BilinearMap& c, const Vector& target);

}  // namespace pidual
