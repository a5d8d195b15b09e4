#pragma once

#include <string>
#include <vector>

#include "pidual/bilinear.hpp"
#include "pidual/optimize.hpp"
#include "pidual/product_norm.hpp"
#include "pidual/report.hpp"

namespace pidual {

// A finite class of operators T : G -> X sharing the target space X.
struct OperatorClass {
  std::vector<Matrix> members;
  NormedSpace target;
};

enum class PhiMethod { BiSup, ProductBall };

struct ProductBallOptions {
  int tensor_samples = 16;
  int range_samples = 4;
  std::uint64_t seed = 5;
  PiOptions pi;
};

// ||phi_T|| = sup { ||T c(x,y)||_X : x, y in the unit balls }, the defining
// bi-supremum. The product-ball method instead samples certified pi_c-unit
// vectors; it is a cross-check and never the primary value.
NormBracket phi_norm(const BilinearMap& c, const Matrix& T, const NormedSpace& X,
                     PhiMethod method = PhiMethod::BiSup, const AscentOptions& options = {});

double phi_product_ball(const BilinearMap& c, const Matrix& T, const NormedSpace& X,
                        const ProductBallOptions& options = {});

// ||S_T|| = sup_{x in B_E} || y -> T c(x, y) ||_{F -> X}, computed as a
// nested operator-norm problem (never through the bi-sup path, so the
// isometry check against phi_norm is a genuine cross-validation).
NormBracket mult_norm(const BilinearMap& c, const Matrix& T, const NormedSpace& X,
                      const AscentOptions& options = {});

struct VerifyOptions {
  AscentOptions ascent;
  bool product_ball_check = true;
  ProductBallOptions ball;
  double certified_tol = 1e-7;
  double heuristic_tol = 1e-4;
  std::uint64_t seed = 0;
};

// Per-T comparison of the two norms, with the ||S_T|| <= ||T|| ||c|| bound and
// the product-ball cross-check; failures are recorded, never thrown.
DualityReport verify_duality(const std::string& family, const std::string& instance_prefix,
                             const BilinearMap& c, const OperatorClass& V,
                             const VerifyOptions& options = {});

}  // namespace pidual
