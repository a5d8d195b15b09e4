#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include "pidual/types.hpp"

namespace pidual {

// Exponent p in [1, inf], kept as an exact rational so that conjugates and
// product exponents do not drift in oracle comparisons. Infinity is a tag,
// never a large float.
class Exponent {
 public:
  Exponent() = default;

  static Exponent one() { return of(1); }
  static Exponent two() { return of(2); }

  static Exponent infinity() {
    Exponent e;
    e.infinite_ = true;
    return e;
  }

  static Exponent of(std::int64_t num, std::int64_t den = 1) {
    require(den > 0 && num > 0, ErrorKind::Config, "exponent must be positive");
    std::int64_t g = std::gcd(num, den);
    Exponent e;
    e.num_ = num / g;
    e.den_ = den / g;
    require(e.num_ >= e.den_, ErrorKind::Config, "exponent must be >= 1");
    return e;
  }

  // Accepts "2", "4/3", "inf". Used by the config loader and tests.
  static Exponent parse(const std::string& text);

  // Snaps a double to a small rational if one matches to 1e-12; empty otherwise.
  static std::optional<Exponent> from_double(double p);

  bool is_infinite() const { return infinite_; }
  bool is_one() const { return !infinite_ && num_ == den_; }

  double value() const {
    return infinite_ ? std::numeric_limits<double>::infinity()
                     : static_cast<double>(num_) / static_cast<double>(den_);
  }
  // 1/p, with 1/inf = 0.
  double reciprocal() const {
    return infinite_ ? 0.0 : static_cast<double>(den_) / static_cast<double>(num_);
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  // 1/p + 1/p' = 1; conjugate of 1 is inf and vice versa.
  Exponent conjugate() const {
    if (infinite_) return of(1);
    if (is_one()) return infinity();
    return of(num_, num_ - den_);
  }

  // p * (mul_num / mul_den); used for p-th powers of lattice spaces.
  Exponent scaled(std::int64_t mul_num, std::int64_t mul_den) const {
    if (infinite_) return infinity();
    return of(num_ * mul_num, den_ * mul_den);
  }

  std::string str() const {
    if (infinite_) return "inf";
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend bool operator==(const Exponent& a, const Exponent& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Exponent& a, const Exponent& b) { return !(a == b); }
  // Compares by value; inf is the largest.
  friend bool operator<(const Exponent& a, const Exponent& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.num_ * b.den_ < b.num_ * a.den_;
  }
  friend bool operator<=(const Exponent& a, const Exponent& b) { return a < b || a == b; }

 private:
  std::int64_t num_ = 1;
  std::int64_t den_ = 1;
  bool infinite_ = false;
};

// The exponent of the pointwise product of L^p and L^q: 1/t = 1/p + 1/q.
// When 1/p + 1/q > 1 the product quasi-norm has t < 1 and its convex hull is
// a weighted L^1 ball; callers get the raw value of t alongside the clamp.
struct ProductExponent {
  bool sub_one = false;   // true when 1/p + 1/q > 1
  Exponent clamped;       // max(t, 1)
  double t_value = 1.0;   // raw t (may be < 1; inf when p = q = inf)
};

ProductExponent product_exponent(const Exponent& p, const Exponent& q);

// The Hoelder gap 1/r = 1/q - 1/p, defined when q < p (diagonal operators
// L^p -> L^q concentrate otherwise). Empty when 1/q <= 1/p.
std::optional<Exponent> holder_gap(const Exponent& q, const Exponent& p);

}  // namespace pidual
