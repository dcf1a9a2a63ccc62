#pragma once

#include <vector>

#include "ftfl/instance.hpp"

namespace ftfl {

enum class RowSense { le, ge };

// Dense LP in the form  min obj.v  subject to row constraints and v >= 0.
// Variable order is pinned: y_0..y_{m-1}, then x_{j,i} grouped by client
// (client-major).  Row order is pinned too: n coverage rows
// (sum_i x_ji >= r_j), then n*m linkage rows (x_ji - y_i <= 0, client-major),
// then m upper bounds (y_i <= 1).
struct LpProblem {
  int m = 0, n = 0;
  int num_vars = 0;
  std::vector<double> obj;

  struct Row {
    std::vector<double> a;  // dense, size num_vars
    RowSense sense = RowSense::le;
    double rhs = 0.0;
  };
  std::vector<Row> rows;

  int y_var(int i) const { return i; }
  int x_var(int j, int i) const { return m + j * m + i; }
};

LpProblem build_lp(const Instance& inst);

struct LpResult {
  std::vector<double> v;      // one value per variable
  double objective = 0.0;
  std::vector<double> duals;  // one multiplier per row (sign: ge rows >= 0, le rows <= 0)
  int iterations = 0;
};

// Pluggable solver seam; the default is the self-contained simplex below.
struct LpSolver {
  virtual ~LpSolver() = default;
  virtual LpResult solve(const LpProblem& lp, double tol) const = 0;
};

// Dense revised primal simplex: two phases, explicit basis inverse with
// periodic refactorization, Dantzig pricing with Bland's rule as the
// anti-cycling fallback.  Deterministic: all ties break on the lowest index.
struct DenseSimplexSolver final : LpSolver {
  LpResult solve(const LpProblem& lp, double tol) const override;
};

const LpSolver& default_solver();

struct FractionalSolution {
  std::vector<std::vector<double>> x;  // n rows of size m
  std::vector<double> y;               // size m
  double objective = 0.0;
};

// Solves to a basic optimal solution; throws InfeasibleError / SolverError.
FractionalSolution solve_lp(const LpProblem& lp, double tol = 1e-9,
                            const LpSolver& solver = default_solver());

// Snaps values within `threshold` of 0/1, then rebuilds each client's row
// greedily by (distance, index): x_ji = y_i until the remaining requirement
// is smaller than y_i, the remainder goes to the next facility, zeros after.
// Leaves at most one facility per client with 0 < x_ji < y_i, and that
// facility is the farthest one used.  Never increases the objective;
// idempotent.  Throws InfeasibleError if sum(y) cannot cover some r_j.
FractionalSolution canonicalize(const Instance& inst, FractionalSolution sol,
                                double threshold = 1e-9);

}  // namespace ftfl
