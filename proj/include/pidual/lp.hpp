#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "pidual/types.hpp"

namespace pidual {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_cstring(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    default: return "iteration_limit";
  }
}

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  double value = 0.0;
  Vector x;          // primal solution in the caller's variables
  Vector row_duals;  // one multiplier per constraint row
  double primal_residual = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
};

struct SimplexOptions {
  double pivot_tol = 1e-9;
  double feas_tol = 1e-9;
  int max_iterations = 200000;
  int refactor_every = 64;
};

// Standard form: min c.x subject to A x = b, x >= 0. Two-phase dense revised
// simplex with an explicit basis inverse; Dantzig pricing switches to Bland's
// rule on objective stalls, so degenerate instances cannot cycle. The row
// duals and duality gap come back for certification.
LpSolution solve_standard_lp(const Matrix& A, const Vector& b, const Vector& c,
                             const SimplexOptions& options = {});

// General-form builder. Variables may be free or bounded on either side; rows
// are lo <= a.x <= hi with lo == hi meaning equality. Converted to standard
// form internally; duals for the declared rows come back in declaration order.
class LpProblem {
 public:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  int add_variable(double lo, double hi, double objective);
  int add_constraint(double lo, double hi);
  void set_coefficient(int row, int var, double value);

  LpSolution minimize(const SimplexOptions& options = {}) const;
  LpSolution maximize(const SimplexOptions& options = {}) const;

  int variable_count() const { return static_cast<int>(vars_.size()); }
  int constraint_count() const { return static_cast<int>(rows_.size()); }

 private:
  struct Var {
    double lo, hi, obj;
  };
  struct Row {
    double lo, hi;
    std::vector<std::pair<int, double>> entries;
  };
  std::vector<Var> vars_;
  std::vector<Row> rows_;
};

}  // namespace pidual
