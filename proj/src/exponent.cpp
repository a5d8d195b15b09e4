#include "pidual/exponent.hpp"

#include <cmath>
#include <cstdlib>

namespace pidual {

Exponent Exponent::parse(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "infinity") return infinity();
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      // Allow "2" as well as "2.5" (snapped to a rational).
      if (text.find('.') != std::string::npos) {
        auto snapped = from_double(std::stod(text));
        require(snapped.has_value(), ErrorKind::Config,
                "exponent '" + text + "' is not a small rational");
        return *snapped;
      }
      return of(std::stoll(text));
    }
    return of(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  } catch (const std::invalid_argument&) {
    fail(ErrorKind::Config, "cannot parse exponent '" + text + "'");
  } catch (const std::out_of_range&) {
    fail(ErrorKind::Config, "exponent '" + text + "' is out of range");
  }
}

std::optional<Exponent> Exponent::from_double(double p) {
  if (std::isinf(p) && p > 0) return infinity();
  if (!(p >= 1.0) || !std::isfinite(p)) return std::nullopt;
  // Continued-fraction search over small denominators.
  for (std::int64_t den = 1; den <= 1 << 20; den *= 2) {
    double num = p * static_cast<double>(den);
    double rounded = std::round(num);
    if (std::abs(num - rounded) <= 1e-12 * std::max(1.0, std::abs(num)) && rounded >= 1.0) {
      return of(static_cast<std::int64_t>(rounded), den);
    }
  }
  for (std::int64_t den = 3; den <= 1024; ++den) {
    double num = p * static_cast<double>(den);
    double rounded = std::round(num);
    if (std::abs(num - rounded) <= 1e-12 * std::max(1.0, std::abs(num)) && rounded >= 1.0) {
      return of(static_cast<std::int64_t>(rounded), den);
    }
  }
  return std::nullopt;
}

ProductExponent product_exponent(const Exponent& p, const Exponent& q) {
  ProductExponent out;
  if (p.is_infinite() && q.is_infinite()) {
    out.clamped = Exponent::infinity();
    out.t_value = std::numeric_limits<double>::infinity();
    return out;
  }
  if (p.is_infinite()) {
    out.clamped = q;
    out.t_value = q.value();
    return out;
  }
  if (q.is_infinite()) {
    out.clamped = p;
    out.t_value = p.value();
    return out;
  }
  // 1/t = den_p/num_p + den_q/num_q  =>  t = (num_p num_q) / (den_p num_q + den_q num_p)
  std::int64_t tn = p.num() * q.num();
  std::int64_t td = p.den() * q.num() + q.den() * p.num();
  std::int64_t g = std::gcd(tn, td);
  tn /= g;
  td /= g;
  out.t_value = static_cast<double>(tn) / static_cast<double>(td);
  if (tn < td) {
    out.sub_one = true;
    out.clamped = Exponent::one();
  } else {
    out.clamped = Exponent::of(tn, td);
  }
  return out;
}

std::optional<Exponent> holder_gap(const Exponent& q, const Exponent& p) {
  // 1/r = 1/q - 1/p, requires q < p.
  if (!(q < p)) return std::nullopt;
  if (p.is_infinite()) return q;
  // 1/r = den_q/num_q - den_p/num_p = (den_q num_p - den_p num_q) / (num_q num_p)
  std::int64_t rd = q.den() * p.num() - p.den() * q.num();
  std::int64_t rn = q.num() * p.num();
  return Exponent::of(rn, rd);
}

}  // namespace pidual
