#pragma once

#include <vector>

#include "pidual/duality.hpp"

namespace pidual {

// A finitely atomic countably additive measure with values in a normed R^k.
// Row i of `atoms` is the value m_i of atom i; all atoms are non-null.
class VectorMeasure {
 public:
  VectorMeasure(Matrix atoms, NormedSpace value_space);

  Index atom_count() const { return atoms_.rows(); }
  Index value_dim() const { return atoms_.cols(); }
  const Matrix& atoms() const { return atoms_; }
  Vector atom(Index i) const { return atoms_.row(i).transpose(); }
  const NormedSpace& value_space() const { return value_space_; }

 private:
  Matrix atoms_;
  NormedSpace value_space_;
};

struct RybakovData {
  Vector functional;  // z0* on the dual unit sphere
  Vector masses;      // mu_i = |<m_i, z0*>|, all positive
};

// sup over the dual unit ball of sum_{i in A} |<m_i, x*>|. Exact through dual
// vertex enumeration or sign-pattern enumeration (|A| <= 20); heuristic
// ascent above that.
double semivariation(const VectorMeasure& m, const std::vector<Index>& atom_subset);

// A scalarization equivalent to m, chosen to maximize the smallest atom mass
// over a seeded candidate set. Deterministic given the seed.
RybakovData choose_rybakov(const VectorMeasure& m, std::uint64_t seed);

// ||f||_{L^p(m)} = ( sup_{x* in B} sum |f_i|^p |<m_i, x*>| )^{1/p}; the sup
// norm over atoms when p is infinite.
double lp_m_norm(const VectorMeasure& m, const Exponent& p, const Vector& f);

// integral of f against m: sum_i f_i m_i.
Vector integrate(const VectorMeasure& m, const Vector& f);

// h = d<m, z*>/dmu against the Rybakov masses: h_i = <m_i, z*> / mu_i.
Vector rn_derivative(const VectorMeasure& m, const RybakovData& rybakov, const Vector& zstar);

// The (L^1(m))' norm of h: sup { sum |v_i h_i| mu_i : ||v||_{L^1(m)} <= 1 },
// solved by cutting planes with an exact separation oracle.
double l1m_kothe_dual_norm(const VectorMeasure& m, const RybakovData& rybakov,
                           const Vector& h);

// L^p(m) as a normed space (custom lattice norm with a closed-form norming
// functional); plugs into the generic duality machinery.
NormedSpace lp_m_space(const VectorMeasure& m, const Exponent& p);

// ||f||_{L^p(m)} = sup { ||int f g dm|| : ||g||_{L^{p'}(m)} <= 1 }.
DualityReport verify_lp_duality_norm(const VectorMeasure& m, const Exponent& p, int samples,
                                     std::uint64_t seed);

// sup { ||int h0 f g dm|| : f, g unit } = ||h0||_inf (the integration-map
// product identifies the generalized dual with L^inf(m)).
DualityReport verify_linf_identification(const VectorMeasure& m, const Exponent& p,
                                         int samples, std::uint64_t seed);

// ||S_g|| over L^p(m) x RN(m) equals ||g||_{L^{p'}(m)} (the predual identity).
DualityReport verify_predual(const VectorMeasure& m, const Exponent& p, int samples,
                             std::uint64_t seed);

}  // namespace pidual
