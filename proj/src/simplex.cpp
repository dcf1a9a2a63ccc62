#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ftfl/errors.hpp"
#include "ftfl/lp.hpp"

namespace ftfl {

namespace {

constexpr double kPivotEps = 1e-9;    // ratio-test eligibility
constexpr double kDropEps = 1e-11;    // treat as zero when updating
constexpr double kPhase1Eps = 1e-7;   // residual infeasibility threshold
constexpr int kRefactorEvery = 128;   // rebuild the basis inverse periodically
constexpr int kBlandAfter = 30;       // consecutive degenerate steps

// Dense simplex working state.  Columns: structural variables first, then one
// slack per row (+1 for <=, -1 for >=), then one artificial per >= row.
// The artificials give a trivial feasible start for phase one.
struct Tableau {
  int rows = 0;
  int structurals = 0;
  int cols = 0;  // structurals + slacks + artificials
  int first_artificial = 0;

  std::vector<double> a;     // column-major, cols * rows
  std::vector<double> b;     // rhs, >= 0
  std::vector<double> cost;  // current phase costs
  std::vector<double> binv;  // rows x rows, row-major
  std::vector<double> xb;    // basic values
  std::vector<int> basis;    // basic column per row
  std::vector<char> in_basis;
  std::vector<char> enterable;

  double& A(int col, int row) { return a[std::size_t(col) * rows + row]; }
  double Av(int col, int row) const { return a[std::size_t(col) * rows + row]; }
  double& Binv(int r, int k) { return binv[std::size_t(r) * rows + k]; }
  double Binvv(int r, int k) const { return binv[std::size_t(r) * rows + k]; }
};

Tableau make_tableau(const LpProblem& lp) {
  Tableau t;
  t.rows = int(lp.rows.size());
  t.structurals = lp.num_vars;
  int n_art = 0;
  for (const auto& row : lp.rows)
    if ((row.rhs >= 0 && row.sense == RowSense::ge) ||
        (row.rhs < 0 && row.sense == RowSense::le))
      ++n_art;
  t.first_artificial = t.structurals + t.rows;
  t.cols = t.first_artificial + n_art;
  t.a.assign(std::size_t(t.cols) * t.rows, 0.0);
  t.b.resize(std::size_t(t.rows));
  t.basis.resize(std::size_t(t.rows));
  t.in_basis.assign(std::size_t(t.cols), 0);
  t.enterable.assign(std::size_t(t.cols), 1);

  int art = t.first_artificial;
  for (int r = 0; r < t.rows; ++r) {
    const auto& row = lp.rows[std::size_t(r)];
    const bool flip = row.rhs < 0;  // normalize to rhs >= 0
    const double sgn = flip ? -1.0 : 1.0;
    for (int j = 0; j < t.structurals; ++j) {
      const double v = row.a[std::size_t(j)];
      if (v != 0.0) t.A(j, r) = sgn * v;
    }
    t.b[std::size_t(r)] = sgn * row.rhs;
    const RowSense sense =
        flip ? (row.sense == RowSense::le ? RowSense::ge : RowSense::le) : row.sense;
    if (sense == RowSense::le) {
      t.A(t.structurals + r, r) = 1.0;  // slack starts basic
      t.basis[std::size_t(r)] = t.structurals + r;
    } else {
      t.A(t.structurals + r, r) = -1.0;  // surplus
      t.A(art, r) = 1.0;
      t.basis[std::size_t(r)] = art;
      ++art;
    }
    t.in_basis[std::size_t(t.basis[std::size_t(r)])] = 1;
  }

  // Initial basis is the identity.
  t.binv.assign(std::size_t(t.rows) * t.rows, 0.0);
  for (int r = 0; r < t.rows; ++r) t.Binv(r, r) = 1.0;
  t.xb = t.b;
  return t;
}

void refactorize(Tableau& t) {
  const int R = t.rows;
  // Gauss-Jordan on [B | I] with partial pivoting.
  std::vector<double> aug(std::size_t(R) * 2 * R, 0.0);
  auto at = [&](int r, int cidx) -> double& { return aug[std::size_t(r) * 2 * R + cidx]; };
  for (int r = 0; r < R; ++r) {
    for (int k = 0; k < R; ++k) at(r, k) = t.Av(t.basis[std::size_t(k)], r);
    at(r, R + r) = 1.0;
  }
  for (int col = 0; col < R; ++col) {
    int piv = col;
    double best = std::abs(at(col, col));
    for (int r = col + 1; r < R; ++r) {
      const double v = std::abs(at(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best < 1e-12) throw SolverError("simplex: singular basis during refactorization");
    if (piv != col)
      for (int k = 0; k < 2 * R; ++k) std::swap(at(piv, k), at(col, k));
    const double inv = 1.0 / at(col, col);
    for (int k = 0; k < 2 * R; ++k) at(col, k) *= inv;
    for (int r = 0; r < R; ++r) {
      if (r == col) continue;
      const double f = at(r, col);
      if (f == 0.0) continue;
      for (int k = 0; k < 2 * R; ++k) at(r, k) -= f * at(col, k);
    }
  }
  for (int r = 0; r < R; ++r)
    for (int k = 0; k < R; ++k) t.Binv(r, k) = at(r, R + k);
  // Refresh basic values from scratch.
  for (int r = 0; r < R; ++r) {
    double s = 0.0;
    for (int k = 0; k < R; ++k) s += t.Binvv(r, k) * t.b[std::size_t(k)];
    t.xb[std::size_t(r)] = s;
  }
}

void pivot(Tableau& t, int leave_row, int enter_col, const std::vector<double>& d) {
  const int R = t.rows;
  const double inv = 1.0 / d[std::size_t(leave_row)];
  double* prow = &t.binv[std::size_t(leave_row) * R];
  for (int k = 0; k < R; ++k) prow[k] *= inv;
  t.xb[std::size_t(leave_row)] *= inv;
  for (int r = 0; r < R; ++r) {
    if (r == leave_row) continue;
    const double f = d[std::size_t(r)];
    if (std::abs(f) < kDropEps) continue;
    double* row = &t.binv[std::size_t(r) * R];
    for (int k = 0; k < R; ++k) row[k] -= f * prow[k];
    t.xb[std::size_t(r)] -= f * t.xb[std::size_t(leave_row)];
  }
  t.in_basis[std::size_t(t.basis[std::size_t(leave_row)])] = 0;
  t.basis[std::size_t(leave_row)] = enter_col;
  t.in_basis[std::size_t(enter_col)] = 1;
}

// Runs one simplex phase to optimality for the costs currently in t.cost.
// Returns the iteration count consumed.
int run_phase(Tableau& t, double tol, int iter_cap) {
  const int R = t.rows;
  auto pi = std::vector<double>(std::size_t(R));
  auto d = std::vector<double>(std::size_t(R));
  int since_refactor = 0;
  int degenerate_run = 0;
  bool bland = false;

  for (int iter = 1;; ++iter) {
    if (iter > iter_cap)
      throw SolverError("simplex: iteration limit exceeded (" +
                        std::to_string(iter_cap) + ")");
    if (++since_refactor >= kRefactorEvery) {
      refactorize(t);
      since_refactor = 0;
    }

    // Duals for the current basis: pi = cost_B . Binv.
    for (int k = 0; k < R; ++k) pi[std::size_t(k)] = 0.0;
    for (int r = 0; r < R; ++r) {
      const double cb = t.cost[std::size_t(t.basis[std::size_t(r)])];
      if (cb == 0.0) continue;
      const double* row = &t.binv[std::size_t(r) * R];
      for (int k = 0; k < R; ++k) pi[std::size_t(k)] += cb * row[k];
    }

    // Pricing.  Dantzig by default; Bland (lowest eligible index) after a
    // run of degenerate steps, which breaks cycles.
    int enter = -1;
    double best_rc = -tol;
    for (int j = 0; j < t.cols; ++j) {
      if (t.in_basis[std::size_t(j)] || !t.enterable[std::size_t(j)]) continue;
      const double* col = &t.a[std::size_t(j) * R];
      double rc = t.cost[std::size_t(j)];
      for (int k = 0; k < R; ++k) rc -= pi[std::size_t(k)] * col[k];
      if (rc < best_rc) {
        enter = j;
        if (bland) break;
        best_rc = rc;
      }
    }
    if (enter < 0) return iter;  // optimal for this phase

    // Direction d = Binv . A_enter.
    const double* col = &t.a[std::size_t(enter) * R];
    for (int r = 0; r < R; ++r) {
      const double* row = &t.binv[std::size_t(r) * R];
      double s = 0.0;
      for (int k = 0; k < R; ++k) s += row[k] * col[k];
      d[std::size_t(r)] = s;
    }

    // Ratio test; ties go to the smallest basic variable index (Bland).
    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < R; ++r) {
      if (d[std::size_t(r)] <= kPivotEps) continue;
      const double num = std::max(t.xb[std::size_t(r)], 0.0);
      const double ratio = num / d[std::size_t(r)];
      if (ratio < best_ratio - 1e-12 ||
          (ratio <= best_ratio + 1e-12 &&
           (leave < 0 || t.basis[std::size_t(r)] < t.basis[std::size_t(leave)]))) {
        if (ratio < best_ratio) best_ratio = ratio;
        leave = r;
      }
    }
    if (leave < 0) throw SolverError("simplex: unbounded direction");

    if (best_ratio <= 1e-12) {
      if (++degenerate_run >= kBlandAfter) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }

    pivot(t, leave, enter, d);
  }
}

}  // namespace

LpResult DenseSimplexSolver::solve(const LpProblem& lp, double tol) const {
  if (lp.num_vars <= 0 || lp.rows.empty())
    throw InvalidInputError("simplex: empty problem");
  for (const auto& row : lp.rows)
    if (int(row.a.size()) != lp.num_vars)
      throw InvalidInputError("simplex: row width mismatch");

  Tableau t = make_tableau(lp);
  const int iter_cap = 20000 + 200 * t.rows;
  int iterations = 0;

  // Phase one: minimize the artificial total.
  if (t.cols > t.first_artificial) {
    t.cost.assign(std::size_t(t.cols), 0.0);
    for (int j = t.first_artificial; j < t.cols; ++j) t.cost[std::size_t(j)] = 1.0;
    iterations += run_phase(t, tol, iter_cap);

    double infeas = 0.0;
    for (int r = 0; r < t.rows; ++r)
      if (t.basis[std::size_t(r)] >= t.first_artificial)
        infeas += std::max(t.xb[std::size_t(r)], 0.0);
    if (infeas > kPhase1Eps)
      throw InfeasibleError("LP infeasible (phase-one residual " +
                            std::to_string(infeas) + ")");

    // Pivot leftover artificials out where possible; a row where no real
    // column has a nonzero entry is redundant and keeps its artificial at 0.
    auto d = std::vector<double>(std::size_t(t.rows));
    for (int r = 0; r < t.rows; ++r) {
      if (t.basis[std::size_t(r)] < t.first_artificial) continue;
      for (int j = 0; j < t.first_artificial; ++j) {
        if (t.in_basis[std::size_t(j)]) continue;
        const double* col = &t.a[std::size_t(j) * t.rows];
        const double* row = &t.binv[std::size_t(r) * t.rows];
        double v = 0.0;
        for (int k = 0; k < t.rows; ++k) v += row[k] * col[k];
        if (std::abs(v) > kPhase1Eps) {
          for (int rr = 0; rr < t.rows; ++rr) {
            const double* brow = &t.binv[std::size_t(rr) * t.rows];
            double s = 0.0;
            for (int k = 0; k < t.rows; ++k) s += brow[k] * col[k];
            d[std::size_t(rr)] = s;
          }
          pivot(t, r, j, d);
          break;
        }
      }
    }
    for (int j = t.first_artificial; j < t.cols; ++j) t.enterable[std::size_t(j)] = 0;
  }

  // Phase two: the real objective.
  t.cost.assign(std::size_t(t.cols), 0.0);
  for (int j = 0; j < t.structurals; ++j) t.cost[std::size_t(j)] = lp.obj[std::size_t(j)];
  iterations += run_phase(t, tol, iter_cap);

  LpResult res;
  res.iterations = iterations;
  res.v.assign(std::size_t(lp.num_vars), 0.0);
  for (int r = 0; r < t.rows; ++r) {
    const int j = t.basis[std::size_t(r)];
    if (j < lp.num_vars) res.v[std::size_t(j)] = t.xb[std::size_t(r)];
  }
  double obj = 0.0;
  for (int j = 0; j < lp.num_vars; ++j) obj += lp.obj[std::size_t(j)] * res.v[std::size_t(j)];
  res.objective = obj;

  // Row duals from the final basis (phase-two costs).
  res.duals.assign(std::size_t(t.rows), 0.0);
  for (int r = 0; r < t.rows; ++r) {
    const double cb = t.cost[std::size_t(t.basis[std::size_t(r)])];
    if (cb == 0.0) continue;
    const double* row = &t.binv[std::size_t(r) * t.rows];
    for (int k = 0; k < t.rows; ++k) res.duals[std::size_t(k)] += cb * row[k];
  }
  // Rows that were sign-flipped for normalization flip their duals back.
  for (int r = 0; r < t.rows; ++r)
    if (lp.rows[std::size_t(r)].rhs < 0) res.duals[std::size_t(r)] = -res.duals[std::size_t(r)];
  return res;
}

const LpSolver& default_solver() {
  static const DenseSimplexSolver solver;
  return solver;
}

}  // namespace ftfl
