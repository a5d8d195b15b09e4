#pragma once

#include "pidual/types.hpp"

namespace pidual {

// A finite, saturated, purely atomic measure: strictly positive atom masses.
class FiniteMeasure {
 public:
  explicit FiniteMeasure(Vector masses) : masses_(std::move(masses)) {
    require(masses_.size() > 0, ErrorKind::Invariant, "measure needs at least one atom");
    require(masses_.allFinite(), ErrorKind::Invariant, "atom masses must be finite");
    require((masses_.array() > 0.0).all(), ErrorKind::Invariant,
            "atom masses must be strictly positive (saturation)");
  }

  static FiniteMeasure uniform(Index n, double mass = 1.0) {
    return FiniteMeasure(Vector::Constant(n, mass));
  }

  Index atom_count() const { return masses_.size(); }
  double total() const { return masses_.sum(); }
  const Vector& masses() const { return masses_; }
  double mass(Index i) const { return masses_[i]; }

 private:
  Vector masses_;
};

}  // namespace pidual
