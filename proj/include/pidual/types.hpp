#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>
#include <string>

namespace pidual {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Certificate strength, ordered strongest first. "exact" means a closed form
// or an LP with verified complementary slackness backs the value;
// "extreme_enumeration" means a complete scan of polytope vertices;
// "heuristic" means the value comes from ascent/sampling and is not certified.
enum class Provenance { Exact, ExtremeEnumeration, Heuristic };

inline const char* to_cstring(Provenance p) {
  switch (p) {
    case Provenance::Exact: return "exact";
    case Provenance::ExtremeEnumeration: return "extreme_enumeration";
    default: return "heuristic";
  }
}

inline Provenance weaker(Provenance a, Provenance b) {
  return static_cast<Provenance>(std::max(static_cast<int>(a), static_cast<int>(b)));
}

enum class ErrorKind {
  Dimension,
  UnsupportedStructure,
  Range,
  Infeasible,
  Tractability,
  Config,
  Invariant,
  Exhausted,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace pidual
