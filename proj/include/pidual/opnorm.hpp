#pragma once

#include "pidual/exponent.hpp"
#include "pidual/space.hpp"

namespace pidual {

struct OperatorNorm {
  double lower = 0.0;
  double upper = 0.0;
  Provenance provenance = Provenance::Heuristic;
  Vector attaining;  // unit domain vector realizing `lower` (when known)
};

struct OpNormOptions {
  int restarts = 16;
  std::uint64_t seed = 11;
  int extreme_cap = 4096;
  int power_iterations = 200000;
  double power_tol = 1e-14;
};

// Exact norm of the diagonal map diag(d) : l^p -> l^q between the unweighted
// sequence norms. For q >= p the mass concentrates on one coordinate; for
// q < p the value is the l^r norm of d with 1/r = 1/q - 1/p.
double diagonal_lp_opnorm(const Vector& d_abs, const Exponent& p, const Exponent& q);

// Certified bracket for ||M : domain -> codomain||. Routes, strongest first:
// diagonal closed forms, Hilbert-Hilbert power iteration, extreme enumeration
// of the domain ball, enumeration of a polyhedral codomain dual ball, and an
// alternating-ascent fallback with an interval-arithmetic upper bound.
OperatorNorm operator_norm(const Matrix& M, const NormedSpace& domain,
                           const NormedSpace& codomain, const OpNormOptions& options = {});

}  // namespace pidual
