#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pidual/exponent.hpp"
#include "pidual/measure.hpp"
#include "pidual/rng.hpp"
#include "pidual/types.hpp"

namespace pidual {

// Canonical weighted-Lp reduction of a norm. For finite p the norm reads
// (sum_i w_i |x_i|^p)^(1/p); for p = inf it reads max_i w_i |x_i|.
struct LpForm {
  Exponent p;
  Vector weights;
};

struct DualValue {
  double value = 0.0;
  Provenance provenance = Provenance::Heuristic;
  Vector attaining;  // unit vector x with <functional, x> = value (when known)
};

// Unit-ball description. When polyhedral, `extremes` holds one representative
// per antipodal pair (every ball here is symmetric, so -e is also extreme).
struct UnitBall {
  bool polyhedral = false;
  std::vector<Vector> extremes;
};

struct CustomNormOptions {
  bool lattice = false;
  // Complete vertex list of the unit ball (up to sign) when it is a known
  // polytope; enables exact dual norms and extreme-pair enumeration.
  std::vector<Vector> ball_extremes;
  // Optional closed-form norming functional: v -> z* with <v, z*> = ||v|| and
  // dual norm of z* at most one.
  std::function<Vector(const Vector&)> norming;
  int validation_samples = 128;
  std::string name = "custom";
};

// An immutable finite-dimensional normed space. Copies are cheap (shared
// payload); all evaluations are pure.
class NormedSpace {
 public:
  enum class Kind { WeightedLp, PthPower, KotheDual, Custom };

  // (sum |x_i|^p)^(1/p) with unit weights.
  static NormedSpace lp(Exponent p, Index dim);
  // Finite p: (sum w_i |x_i|^p)^(1/p). p = inf: max_i w_i |x_i|.
  static NormedSpace weighted_lp(Exponent p, Vector weights);
  // L^p(mu) over a finite atomic measure; p = inf is the plain sup norm.
  static NormedSpace lattice_lp(const FiniteMeasure& mu, Exponent p);
  // Norm x -> || |x|^(1/s) ||_base^s for s in (0, 1]; base must be a lattice.
  static NormedSpace pth_power(const NormedSpace& base, double s);
  // Koethe dual over the base's measure: ||g|| = sup { sum |f g| dmu : ||f||_base <= 1 }.
  static NormedSpace kothe_dual(const NormedSpace& base);
  // User norm, validated by seeded sampling at registration; rejects
  // functionals that fail definiteness/homogeneity/triangle (or the lattice
  // ideal property when claimed).
  static NormedSpace custom(Index dim, std::function<double(const Vector&)> norm_fn,
                            CustomNormOptions options = {});

  Index dim() const;
  Kind kind() const;
  bool is_lattice() const;
  bool has_polyhedral_ball() const;
  bool has_closed_form_dual() const;
  const std::string& name() const;
  const std::optional<FiniteMeasure>& measure() const;
  const std::optional<LpForm>& lp_form() const;
  // PthPower / KotheDual payloads.
  const NormedSpace* base() const;
  double power() const;
  // Registration-time vertex list for custom polyhedral balls (may be empty).
  const std::vector<Vector>& custom_extremes() const;

  double norm(const Vector& x) const;

 private:
  struct Impl;
  explicit NormedSpace(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;

  friend double norm_value(const NormedSpace&, const Vector&);
  friend DualValue dual_norm(const NormedSpace&, const Vector&);
  friend Vector norming_functional(const NormedSpace&, const Vector&);
};

// --- expression-friendly free functions -----------------------------------

double norm_value(const NormedSpace& space, const Vector& x);

// sup { <functional, x> : ||x|| <= 1 } under the plain coordinate pairing.
// Closed form for weighted-Lp reductions, extreme enumeration for polyhedral
// balls, sampled ascent (flagged heuristic) otherwise.
DualValue dual_norm(const NormedSpace& space, const Vector& functional);

// sup { sum_i |f_i g_i| mu_i : ||f|| <= 1 }; requires a lattice with a measure.
double kothe_dual_norm(const NormedSpace& space, const Vector& g);

NormedSpace pth_power(const NormedSpace& space, double s);
NormedSpace kothe_dual(const NormedSpace& space);

// The dual space as a normed space (closed-form weighted-Lp duals only).
NormedSpace dual_space(const NormedSpace& space);

// Extreme-point description when the ball is polyhedral and small enough;
// otherwise a sampler-backed description (polyhedral = false).
UnitBall unit_ball(const NormedSpace& space, int extreme_cap = 4096);

// Per-coordinate sup of |x_i| over the unit ball. Exact for lattices and
// polyhedral balls; a lattice-style estimate otherwise.
Vector coordinate_box(const NormedSpace& space);

Vector random_unit_vector(const NormedSpace& space, SplitRng& rng);

// z* with <v, z*> = ||v|| and dual norm <= 1 (the norming functional of v).
// Closed form for weighted-Lp; uses the custom callback when provided.
Vector norming_functional(const NormedSpace& space, const Vector& v);

}  // namespace pidual
