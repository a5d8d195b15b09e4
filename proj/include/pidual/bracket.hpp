#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pidual/types.hpp"

namespace pidual {

// A finite decomposition sum_i c(x_i, y_i) = target together with its cost
// sum_i ||x_i|| ||y_i||. An empty term list encodes the zero vector.
struct Decomposition {
  std::vector<std::pair<Vector, Vector>> terms;
  double cost = 0.0;
};

// Certified interval [lower, upper] for a norm value. The dual witness is a
// functional scaled so that its feasibility constant is one; the primal
// witness is a decomposition whose cost equals `upper`.
struct NormBracket {
  double lower = 0.0;
  double upper = 0.0;
  Provenance provenance = Provenance::Heuristic;
  std::optional<Vector> dual_witness;
  std::optional<Decomposition> primal_witness;

  double midpoint() const { return 0.5 * (lower + upper); }
  double width() const { return upper - lower; }
};

inline NormBracket exact_bracket(double value, Provenance provenance = Provenance::Exact) {
  NormBracket b;
  b.lower = b.upper = value;
  b.provenance = provenance;
  return b;
}

}  // namespace pidual
