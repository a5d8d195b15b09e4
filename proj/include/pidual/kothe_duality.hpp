#pragma once

#include "pidual/duality.hpp"
#include "pidual/product_norm.hpp"

namespace pidual {

// Pointwise pi-product X(mu) pi Y(mu) of two lattice spaces over a shared
// finite atomic measure, normed through the finite-decomposition engine.
struct PiProductSpace {
  NormedSpace left;
  NormedSpace right;
  FiniteMeasure mu;
  PiOptions engine;
};

PiProductSpace make_pi_product(NormedSpace X, NormedSpace Y, PiOptions engine = {});

NormBracket product_norm(const PiProductSpace& pp, const Vector& h);

// sup { ||f g||_Y : ||f||_X <= 1 }. Closed form for weighted-Lp pairs over the
// shared measure (Hoelder gap exponent); operator-norm fallback otherwise.
double mult_space_norm(const NormedSpace& X, const NormedSpace& Y, const Vector& g);

// |f| = |g||h| with |g| = |f|^{1/p}, |h| = |f|^{1/p'}; the cost
// ||g||_{X_[1/p]} ||h||_{X_[1/p']} equals ||f||_X.
struct FactorSplit {
  Vector g, h;
  double cost = 0.0;
};
FactorSplit factorization_split(const NormedSpace& X, double p, const Vector& f);

// (X pi Y)' = X^{Y'}: for sampled functionals j, the Koethe dual norm of j
// against the product space (bi-sup route plus certified product-unit
// sampling) against mult_space_norm(X, Y', j), with the Lebesgue-exponent
// closed form as oracle where available.
DualityReport verify_kothe_product_duality(const NormedSpace& X, const NormedSpace& Y,
                                           int samples, std::uint64_t seed);

}  // namespace pidual
