#pragma once

#include "pidual/duality.hpp"

namespace pidual {

// A formal series truncated at degree N, stored as its N+1 coefficients.
struct TruncatedSeries {
  Vector coeffs;
  Index degree() const { return coeffs.size() - 1; }
};

// Coefficientwise product; degrees must match.
TruncatedSeries hadamard_product(const TruncatedSeries& f, const TruncatedSeries& g);

// ||lambda||_{(X,Y)} = sup { ||lambda * f||_Y : ||f||_X <= 1 }, the norm of
// the diagonal map between the coefficient spaces.
NormBracket multiplier_norm(const TruncatedSeries& lambda, const NormedSpace& X,
                            const NormedSpace& Y);

// Closed-form multiplier exponent for unit-weight lp coefficient spaces:
// the (X (x) Y, Z) norm of lambda via exact exponent arithmetic. Test oracle.
double lp_multiplier_oracle(const Vector& lambda, const Exponent& p, const Exponent& q,
                            const Exponent& s);

// (X (x) Y, Z) = (X, (Y, Z)): multiplier norms against the product space
// versus the nested multiplier norm, per sampled lambda.
DualityReport verify_triple_identity(const NormedSpace& X, const NormedSpace& Y,
                                     const NormedSpace& Z, int samples, std::uint64_t seed);

}  // namespace pidual
