#include "pidual/lp.hpp"

#include <cmath>
#include <vector>

namespace pidual {

namespace {

struct Tableau {
  // Columns 0..n-1 are structural, n..n+m-1 artificial (identity).
  const Matrix& A;
  Index m, n;

  Vector col(Index j) const {
    if (j < n) return A.col(j);
    Vector e = Vector::Zero(m);
    e[j - n] = 1.0;
    return e;
  }
};

struct SimplexState {
  std::vector<Index> basis;  // basis[i] = variable in row i
  std::vector<char> is_basic;
  Matrix Binv;
  Vector xB;
  int iterations = 0;
};

void refactorize(const Tableau& tab, SimplexState& st, const Vector& b) {
  Matrix B(tab.m, tab.m);
  for (Index i = 0; i < tab.m; ++i) B.col(i) = tab.col(st.basis[i]);
  st.Binv = B.partialPivLu().inverse();
  st.xB = st.Binv * b;
  for (Index i = 0; i < tab.m; ++i)
    if (st.xB[i] < 0.0 && st.xB[i] > -1e-11) st.xB[i] = 0.0;
}

// One simplex phase. `cost` prices structural columns, `artificial_cost`
// prices the artificials, which may enter only while `allow_artificial`.
// Dantzig pricing switches to Bland's rule on objective stalls, so degenerate
// instances cannot cycle.
LpStatus run_simplex(const Tableau& tab, SimplexState& st, const Vector& b,
                     const Vector& cost, double artificial_cost, bool allow_artificial,
                     bool phase_two, const SimplexOptions& opt) {
  const Index m = tab.m, n = tab.n;
  Vector cB(m);
  bool bland = false;
  int stall = 0;
  double last_obj = std::numeric_limits<double>::infinity();
  int since_refactor = 0;

  while (st.iterations < opt.max_iterations) {
    for (Index i = 0; i < m; ++i) {
      Index v = st.basis[i];
      cB[i] = v < n ? cost[v] : artificial_cost;
    }
    Vector y = st.Binv.transpose() * cB;
    Vector d = cost - tab.A.transpose() * y;  // structural reduced costs

    Index enter = -1;
    if (bland) {
      for (Index j = 0; j < n; ++j) {
        if (!st.is_basic[j] && d[j] < -opt.pivot_tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0 && allow_artificial) {
        for (Index j = 0; j < m; ++j) {
          if (!st.is_basic[n + j] && artificial_cost - y[j] < -opt.pivot_tol) {
            enter = n + j;
            break;
          }
        }
      }
    } else {
      double best = -opt.pivot_tol;
      for (Index j = 0; j < n; ++j) {
        if (!st.is_basic[j] && d[j] < best) {
          best = d[j];
          enter = j;
        }
      }
      if (allow_artificial) {
        for (Index j = 0; j < m; ++j) {
          double dj = artificial_cost - y[j];
          if (!st.is_basic[n + j] && dj < best) {
            best = dj;
            enter = n + j;
          }
        }
      }
    }
    if (enter < 0) return LpStatus::Optimal;

    Vector u = st.Binv * tab.col(enter);

    // Ratio test with Bland tie-breaking. Basic artificials sitting at zero
    // are forced out as soon as the entering column touches their row.
    Index leave = -1;
    double theta = std::numeric_limits<double>::infinity();
    Index leave_var = std::numeric_limits<Index>::max();
    for (Index i = 0; i < m; ++i) {
      double ratio;
      if (u[i] > opt.pivot_tol) {
        ratio = std::max(0.0, st.xB[i]) / u[i];
      } else if (phase_two && st.basis[i] >= n && std::abs(u[i]) > opt.pivot_tol &&
                 st.xB[i] <= opt.feas_tol) {
        ratio = 0.0;
      } else {
        continue;
      }
      if (ratio < theta - 1e-12 || (ratio < theta + 1e-12 && st.basis[i] < leave_var)) {
        theta = ratio;
        leave = i;
        leave_var = st.basis[i];
      }
    }
    if (leave < 0) return LpStatus::Unbounded;

    theta = st.xB[leave] / u[leave];
    st.xB -= theta * u;
    st.xB[leave] = theta;
    for (Index i = 0; i < m; ++i)
      if (st.xB[i] < 0.0 && st.xB[i] > -1e-10) st.xB[i] = 0.0;

    double pivot = u[leave];
    st.Binv.row(leave) /= pivot;
    for (Index i = 0; i < m; ++i) {
      if (i == leave) continue;
      double factor = u[i];
      if (factor != 0.0) st.Binv.row(i) -= factor * st.Binv.row(leave);
    }
    st.is_basic[st.basis[leave]] = 0;
    st.is_basic[enter] = 1;
    st.basis[leave] = enter;
    ++st.iterations;

    if (++since_refactor >= opt.refactor_every) {
      refactorize(tab, st, b);
      since_refactor = 0;
    }

    double obj = 0.0;
    for (Index i = 0; i < m; ++i) {
      Index v = st.basis[i];
      obj += (v < n ? cost[v] : artificial_cost) * st.xB[i];
    }
    if (obj > last_obj - 1e-13 * (1.0 + std::abs(last_obj))) {
      if (++stall > 30) bland = true;
    } else {
      stall = 0;
    }
    last_obj = obj;
  }
  return LpStatus::IterationLimit;
}

}  // namespace

LpSolution solve_standard_lp(const Matrix& A_in, const Vector& b_in, const Vector& c,
                             const SimplexOptions& options) {
  const Index m = A_in.rows();
  const Index n = A_in.cols();
  require(b_in.size() == m && c.size() == n, ErrorKind::Dimension,
          "solve_standard_lp: inconsistent dimensions");

  LpSolution sol;
  if (m == 0) {
    sol.x = Vector::Zero(n);
    sol.row_duals = Vector();
    sol.status = (n == 0 || (c.array() >= 0.0).all()) ? LpStatus::Optimal
                                                      : LpStatus::Unbounded;
    sol.value = 0.0;
    return sol;
  }

  // Flip rows so b >= 0; remember the signs to restore duals.
  Matrix A = A_in;
  Vector b = b_in;
  Vector flip = Vector::Ones(m);
  for (Index i = 0; i < m; ++i) {
    if (b[i] < 0.0) {
      A.row(i) *= -1.0;
      b[i] *= -1.0;
      flip[i] = -1.0;
    }
  }

  Tableau tab{A, m, n};
  SimplexState st;
  st.basis.resize(static_cast<size_t>(m));
  st.is_basic.assign(static_cast<size_t>(n + m), 0);
  for (Index i = 0; i < m; ++i) {
    st.basis[static_cast<size_t>(i)] = n + i;
    st.is_basic[static_cast<size_t>(n + i)] = 1;
  }
  st.Binv = Matrix::Identity(m, m);
  st.xB = b;

  const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());

  // Phase one: drive the artificial mass to zero.
  LpStatus status = run_simplex(tab, st, b, Vector::Zero(n), 1.0, true, false, options);
  sol.iterations = st.iterations;
  if (status == LpStatus::IterationLimit || status == LpStatus::Unbounded) {
    sol.status = LpStatus::IterationLimit;
    return sol;
  }
  double artificial_mass = 0.0;
  for (Index i = 0; i < m; ++i)
    if (st.basis[static_cast<size_t>(i)] >= n) artificial_mass += std::max(0.0, st.xB[i]);
  if (artificial_mass > options.feas_tol * scale) {
    sol.status = LpStatus::Infeasible;
    sol.value = artificial_mass;
    return sol;
  }

  // Phase two on the true costs; artificials may not re-enter.
  status = run_simplex(tab, st, b, c, 0.0, false, true, options);
  sol.status = status;
  sol.iterations = st.iterations;
  if (status != LpStatus::Optimal) return sol;

  sol.x = Vector::Zero(n);
  for (Index i = 0; i < m; ++i) {
    Index v = st.basis[static_cast<size_t>(i)];
    if (v < n) sol.x[v] = std::max(0.0, st.xB[i]);
  }
  sol.value = c.dot(sol.x);

  Vector cB(m);
  for (Index i = 0; i < m; ++i) {
    Index v = st.basis[static_cast<size_t>(i)];
    cB[i] = v < n ? c[v] : 0.0;
  }
  Vector y = st.Binv.transpose() * cB;
  sol.row_duals = (y.array() * flip.array()).matrix();
  sol.primal_residual = (A_in * sol.x - b_in).lpNorm<Eigen::Infinity>();
  sol.duality_gap = std::abs(sol.value - b_in.dot(sol.row_duals));
  return sol;
}

int LpProblem::add_variable(double lo, double hi, double objective) {
  require(lo <= hi, ErrorKind::Config, "add_variable: lower bound exceeds upper bound");
  vars_.push_back({lo, hi, objective});
  return static_cast<int>(vars_.size()) - 1;
}

int LpProblem::add_constraint(double lo, double hi) {
  require(lo <= hi, ErrorKind::Config, "add_constraint: lower bound exceeds upper bound");
  rows_.push_back({lo, hi, {}});
  return static_cast<int>(rows_.size()) - 1;
}

void LpProblem::set_coefficient(int row, int var, double value) {
  require(row >= 0 && row < constraint_count(), ErrorKind::Dimension, "bad row index");
  require(var >= 0 && var < variable_count(), ErrorKind::Dimension, "bad variable index");
  rows_[static_cast<size_t>(row)].entries.emplace_back(var, value);
}

LpSolution LpProblem::minimize(const SimplexOptions& options) const {
  const int nv = variable_count();
  const int nr = constraint_count();

  // Variable mapping to nonnegative standard variables:
  //   free        -> x = u - v
  //   [lo, inf)   -> x = lo + u
  //   (-inf, hi]  -> x = hi - u
  //   [lo, hi]    -> x = lo + u plus a budget row u + s = hi - lo
  struct Mapping {
    int pos = -1, neg = -1;
    double shift = 0.0, sign = 1.0;
  };
  std::vector<Mapping> map(static_cast<size_t>(nv));
  int cols = 0;
  int bound_rows = 0;
  for (int j = 0; j < nv; ++j) {
    const Var& v = vars_[static_cast<size_t>(j)];
    Mapping& mp = map[static_cast<size_t>(j)];
    if (std::isinf(v.lo) && std::isinf(v.hi)) {
      mp.pos = cols++;
      mp.neg = cols++;
    } else if (std::isinf(v.hi)) {
      mp.pos = cols++;
      mp.shift = v.lo;
    } else if (std::isinf(v.lo)) {
      mp.pos = cols++;
      mp.shift = v.hi;
      mp.sign = -1.0;
    } else {
      mp.pos = cols++;
      mp.shift = v.lo;
      ++bound_rows;
    }
  }
  int slack_cols = 0;
  for (const Row& r : rows_) {
    if (r.lo == r.hi) continue;
    if (std::isinf(r.lo) || std::isinf(r.hi)) {
      ++slack_cols;
    } else {
      slack_cols += 2;
      ++bound_rows;
    }
  }
  const int total_rows = nr + bound_rows;
  const int total_cols = cols + slack_cols + bound_rows;

  Matrix A = Matrix::Zero(total_rows, total_cols);
  Vector b = Vector::Zero(total_rows);
  Vector c = Vector::Zero(total_cols);

  for (int j = 0; j < nv; ++j) {
    const Var& v = vars_[static_cast<size_t>(j)];
    const Mapping& mp = map[static_cast<size_t>(j)];
    c[mp.pos] += v.obj * mp.sign;
    if (mp.neg >= 0) c[mp.neg] -= v.obj;
  }

  int next_extra_col = cols;
  int next_bound_row = nr;
  auto emit_entry = [&](int row, int var, double value) {
    const Mapping& mp = map[static_cast<size_t>(var)];
    A(row, mp.pos) += value * mp.sign;
    if (mp.neg >= 0) A(row, mp.neg) -= value;
    b[row] -= value * mp.shift;
  };

  for (int i = 0; i < nr; ++i) {
    const Row& r = rows_[static_cast<size_t>(i)];
    for (const auto& [var, value] : r.entries) emit_entry(i, var, value);
    if (r.lo == r.hi) {
      b[i] += r.lo;
    } else if (std::isinf(r.lo)) {
      A(i, next_extra_col++) = 1.0;  // slack: a.x + s = hi
      b[i] += r.hi;
    } else if (std::isinf(r.hi)) {
      A(i, next_extra_col++) = -1.0;  // surplus: a.x - s = lo
      b[i] += r.lo;
    } else {
      int surplus = next_extra_col++;
      A(i, surplus) = -1.0;
      b[i] += r.lo;
      int budget = next_bound_row++;
      A(budget, surplus) = 1.0;
      A(budget, next_extra_col++) = 1.0;
      b[budget] = r.hi - r.lo;
    }
  }
  for (int j = 0; j < nv; ++j) {
    const Var& v = vars_[static_cast<size_t>(j)];
    const Mapping& mp = map[static_cast<size_t>(j)];
    if (!std::isinf(v.lo) && !std::isinf(v.hi)) {
      int budget = next_bound_row++;
      A(budget, mp.pos) = 1.0;
      A(budget, next_extra_col++) = 1.0;
      b[budget] = v.hi - v.lo;
    }
  }

  LpSolution inner = solve_standard_lp(A, b, c, options);
  LpSolution out;
  out.status = inner.status;
  out.iterations = inner.iterations;
  out.duality_gap = inner.duality_gap;
  out.primal_residual = inner.primal_residual;
  if (inner.status != LpStatus::Optimal) {
    out.value = inner.value;
    return out;
  }
  out.x = Vector::Zero(nv);
  for (int j = 0; j < nv; ++j) {
    const Mapping& mp = map[static_cast<size_t>(j)];
    double u = inner.x[mp.pos];
    double v = mp.neg >= 0 ? inner.x[mp.neg] : 0.0;
    out.x[j] = mp.shift + mp.sign * u - v;
  }
  double value = 0.0;
  for (int j = 0; j < nv; ++j) value += vars_[static_cast<size_t>(j)].obj * out.x[j];
  out.value = value;
  out.row_duals = inner.row_duals.head(nr);
  return out;
}

LpSolution LpProblem::maximize(const SimplexOptions& options) const {
  LpProblem negated = *this;
  for (Var& v : negated.vars_) v.obj = -v.obj;
  LpSolution sol = negated.minimize(options);
  sol.value = -sol.value;
  if (sol.row_duals.size() > 0) sol.row_duals = -sol.row_duals;
  return sol;
}

}  // namespace pidual
