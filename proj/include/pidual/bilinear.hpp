#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "pidual/bracket.hpp"
#include "pidual/space.hpp"

namespace pidual {

// For coordinatewise products of weighted-Lp lattices, the image of the two
// unit balls { c(x,y) : ||x|| ||y|| <= 1 } fills the unit ball of another
// weighted-Lp space (the product exponent; convexified to a weighted L^1 ball
// when the exponent drops below one). Empty when no such reduction applies.
std::optional<NormedSpace> coordinatewise_fill(const NormedSpace& E, const NormedSpace& F);

// A bounded bilinear map c : E x F -> G. Structured kinds evaluate in O(n);
// the custom kind stores one dense coefficient matrix per output coordinate.
class BilinearMap {
 public:
  enum class Kind { PointwiseProduct, Hadamard, ScalarPairing, TensorCoordinates, Custom };

  static BilinearMap pointwise(NormedSpace E, NormedSpace F, NormedSpace G);
  static BilinearMap hadamard(NormedSpace E, NormedSpace F, NormedSpace G);
  static BilinearMap scalar_pairing(NormedSpace E, NormedSpace F, NormedSpace G);
  static BilinearMap tensor(NormedSpace E, NormedSpace F, NormedSpace G);
  // coeff[g](i, j) is the coefficient of x_i y_j in coordinate g of c(x, y).
  static BilinearMap custom(NormedSpace E, NormedSpace F, NormedSpace G,
                            std::vector<Matrix> coeff);

  Kind kind() const { return kind_; }
  const NormedSpace& left() const { return E_; }
  const NormedSpace& right() const { return F_; }
  const NormedSpace& codomain() const { return G_; }
  bool coordinatewise() const {
    return kind_ == Kind::PointwiseProduct || kind_ == Kind::Hadamard;
  }

  Vector evaluate(const Vector& x, const Vector& y) const;

  // Matrix of y -> c(x, y), shape dim(G) x dim(F).
  Matrix left_linearization(const Vector& x) const;
  // Matrix of x -> c(x, y), shape dim(G) x dim(E).
  Matrix right_linearization(const Vector& y) const;

  // M with x^T M y = <lambda, c(x, y)>.
  Matrix form_matrix(const Vector& lambda) const;

  // Columns c(e_i, e_j); spans the range of the linearization.
  Matrix range_span() const;

  // Evaluates the coefficient-absolute bound: coordinate g of the result
  // dominates |c(x, y)_g| whenever |x| <= bx and |y| <= by.
  Vector absolute_bound(const Vector& bx, const Vector& by) const;

  std::optional<NormedSpace> product_fill_space() const;

 private:
  BilinearMap(Kind kind, NormedSpace E, NormedSpace F, NormedSpace G,
              std::vector<Matrix> coeff);

  Kind kind_;
  NormedSpace E_, F_, G_;
  std::shared_ptr<const std::vector<Matrix>> coeff_;
};

struct BoundOptions {
  int restarts = 32;
  std::uint64_t seed = 7;
  int extreme_cap = 4096;
  int pair_cap = 250000;
};

// Certified bracket for ||c|| = sup { ||c(x,y)||_G : ||x||_E <= 1, ||y||_F <= 1 }.
NormBracket estimate_bound(const BilinearMap& map, const BoundOptions& options = {});

}  // namespace pidual
