#pragma once

#include <functional>
#include <vector>

#include "pidual/bilinear.hpp"
#include "pidual/opnorm.hpp"
#include "pidual/space.hpp"

namespace pidual {

struct AscentOptions {
  int restarts = 64;
  std::uint64_t seed = 17;
  int max_rounds = 300;
  int extreme_cap = 4096;
  int pair_cap = 250000;
};

// Result of a bi-supremum over two unit balls. `lower` is always realized by
// the stored witness pair; `upper` matches it on exact routes and carries an
// interval bound on heuristic ones.
struct BisupResult {
  double lower = 0.0;
  double upper = 0.0;
  Provenance provenance = Provenance::Heuristic;
  Vector x, y;
};

// sup { |x^T Q y| : x in B_E, y in B_F }. Exact for diagonal forms on
// weighted-Lp lattices (product-fill reduction), for polyhedral pairs
// (vertex enumeration), and whenever one ball is polyhedral and the other
// space has a closed-form dual; alternating ascent otherwise.
BisupResult bisup_bilinear_form(const Matrix& Q, const NormedSpace& E,
                                const NormedSpace& F, const AscentOptions& options = {});

// sup { ||T c(x, y)||_X : x in B_E, y in B_F } for a matrix T : G -> X.
BisupResult bisup_operator(const BilinearMap& c, const Matrix& T, const NormedSpace& X,
                           const AscentOptions& options = {});

// Splits a target in the image of a coordinatewise product into a
// decomposition whose cost equals the product-fill norm (the single split of
// lattice instances, atom by atom when the product exponent drops below one).
Decomposition fill_split(const BilinearMap& c, const Vector& target);

// Exhaustive maximization of `objective` over the grid with step `resolution`
// on [lo, hi]^dims. Refuses grids beyond 1e8 points.
double grid_oracle(const std::function<double(const Vector&)>& objective, Index dims,
                   double lo, double hi, double resolution);

// Directions covering half of the Euclidean unit sphere (antipodes omitted)
// with angular spacing about `resolution`; dims must be 1, 2 or 3.
std::vector<Vector> sphere_directions(Index dims, double resolution);

}  // namespace pidual
