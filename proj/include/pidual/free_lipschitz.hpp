#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "pidual/duality.hpp"
#include "pidual/lp.hpp"

namespace pidual {

// A finite pointed metric space; index 0 is the distinguished base point.
class FiniteMetricSpace {
 public:
  static FiniteMetricSpace from_distances(Matrix dist);
  // Shortest-path closure of a weighted edge list; the closure guarantees the
  // triangle inequality. Edges are (i, j, weight) with positive weights.
  static FiniteMetricSpace from_edges(Index n,
                                      const std::vector<std::tuple<Index, Index, double>>& edges);
  // Random instances: Euclidean point clouds and random-graph closures.
  static FiniteMetricSpace random(Index n, SplitRng& rng);

  Index size() const { return dist_.rows(); }
  double distance(Index i, Index j) const { return dist_(i, j); }
  const Matrix& distances() const { return dist_; }

 private:
  explicit FiniteMetricSpace(Matrix dist) : dist_(std::move(dist)) {}
  Matrix dist_;
};

// A zero-sum weight vector over the points of a pointed metric space.
struct Molecule {
  Vector weights;
};

Molecule elementary_molecule(const FiniteMetricSpace& A, Index i, Index j);

// The optimal-transport norm L_A(z) = inf sum |lambda_k| d(x_k, y_k), solved
// as an exact flow LP with a certified dual potential.
double molecule_norm(const FiniteMetricSpace& A, const Molecule& z);

// The dual LP: max sum z(w) f(w) over 1-Lipschitz f with f(0) = 0. Equal to
// molecule_norm by strong duality; solved by an independent formulation.
double lipschitz_dual_norm(const FiniteMetricSpace& A, const Molecule& z);

// Best Lipschitz quotient max |f_i - f_j| / d(i, j); the dual norm on molecules.
double lipschitz_constant(const FiniteMetricSpace& A, const Vector& f);

// A two-variable form vanishing on the base point in either slot.
struct LipschitzBiForm {
  Matrix values;
};
LipschitzBiForm make_biform(Matrix values);
LipschitzBiForm random_biform(const FiniteMetricSpace& A, const FiniteMetricSpace& D,
                              SplitRng& rng);

// T_B(u, v) = sum_{x,y} u(x) v(y) T(x, y).
double bilinearize(const LipschitzBiForm& T, const Molecule& u, const Molecule& v);

// The bi-sup of T_B over the two molecule unit balls: the maximal rectangle
// quotient, certified by enumeration over normalized elementary molecules.
NormBracket biform_norm(const LipschitzBiForm& T, const FiniteMetricSpace& A,
                        const FiniteMetricSpace& D);

// Secondary route: alternating maximization over the molecule balls, with
// exact vertex steps. Never exceeds the enumeration value.
double biform_norm_ascent(const LipschitzBiForm& T, const FiniteMetricSpace& A,
                          const FiniteMetricSpace& D, int restarts = 8,
                          std::uint64_t seed = 23);

// B(AE_A x AE_D) = (AE_A)^{AE_D*}: rectangle enumeration against the operator
// norm of the linearization into the Lipschitz dual, per sampled bi-form.
DualityReport verify_lipschitz_duality(const FiniteMetricSpace& A,
                                       const FiniteMetricSpace& D, int samples,
                                       std::uint64_t seed);

// The molecule space in reduced coordinates (weights of the non-base points)
// as a normed space with a polyhedral ball; plugs into the generic duality
// machinery.
NormedSpace molecule_space(const FiniteMetricSpace& A);
Vector molecule_to_reduced(const Molecule& z);
Molecule reduced_to_molecule(const Vector& r);

}  // namespace pidual
