#include "ftfl/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ftfl/errors.hpp"

namespace ftfl {

namespace {

constexpr double kSnapEps = 1e-9;

double snap01(double v, double threshold) {
  if (std::abs(v) <= threshold) return 0.0;
  if (std::abs(v - 1.0) <= threshold) return 1.0;
  return v;
}

}  // namespace

LpProblem build_lp(const Instance& inst) {
  inst.validate();
  LpProblem lp;
  lp.m = inst.m;
  lp.n = inst.n;
  lp.num_vars = inst.m + inst.n * inst.m;
  lp.obj.assign(std::size_t(lp.num_vars), 0.0);
  for (int i = 0; i < inst.m; ++i) lp.obj[std::size_t(lp.y_var(i))] = inst.f[std::size_t(i)];
  for (int j = 0; j < inst.n; ++j)
    for (int i = 0; i < inst.m; ++i)
      lp.obj[std::size_t(lp.x_var(j, i))] = inst.cost(j, i);

  lp.rows.reserve(std::size_t(inst.n) + std::size_t(inst.n) * inst.m + inst.m);

  // Coverage: sum_i x_ji >= r_j.
  for (int j = 0; j < inst.n; ++j) {
    LpProblem::Row row;
    row.a.assign(std::size_t(lp.num_vars), 0.0);
    for (int i = 0; i < inst.m; ++i) row.a[std::size_t(lp.x_var(j, i))] = 1.0;
    row.sense = RowSense::ge;
    row.rhs = double(inst.r[std::size_t(j)]);
    lp.rows.push_back(std::move(row));
  }
  // Linkage: x_ji - y_i <= 0.
  for (int j = 0; j < inst.n; ++j) {
    for (int i = 0; i < inst.m; ++i) {
      LpProblem::Row row;
      row.a.assign(std::size_t(lp.num_vars), 0.0);
      row.a[std::size_t(lp.x_var(j, i))] = 1.0;
      row.a[std::size_t(lp.y_var(i))] = -1.0;
      row.sense = RowSense::le;
      row.rhs = 0.0;
      lp.rows.push_back(std::move(row));
    }
  }
  // Bounds: y_i <= 1.
  for (int i = 0; i < inst.m; ++i) {
    LpProblem::Row row;
    row.a.assign(std::size_t(lp.num_vars), 0.0);
    row.a[std::size_t(lp.y_var(i))] = 1.0;
    row.sense = RowSense::le;
    row.rhs = 1.0;
    lp.rows.push_back(std::move(row));
  }
  return lp;
}

FractionalSolution solve_lp(const LpProblem& lp, double tol, const LpSolver& solver) {
  const LpResult res = solver.solve(lp, tol);

  FractionalSolution sol;
  sol.y.resize(std::size_t(lp.m));
  sol.x.assign(std::size_t(lp.n), std::vector<double>(std::size_t(lp.m)));
  for (int i = 0; i < lp.m; ++i) sol.y[std::size_t(i)] = res.v[std::size_t(lp.y_var(i))];
  for (int j = 0; j < lp.n; ++j)
    for (int i = 0; i < lp.m; ++i)
      sol.x[std::size_t(j)][std::size_t(i)] = res.v[std::size_t(lp.x_var(j, i))];
  sol.objective = res.objective;

  // The solver must hand back a feasible point; re-check at a loose tolerance
  // so silent corruption cannot flow downstream.
  const double feas_tol = 1e-6;
  for (int i = 0; i < lp.m; ++i) {
    const double yi = sol.y[std::size_t(i)];
    if (yi < -feas_tol || yi > 1.0 + feas_tol)
      throw InternalError("lp solution: y out of [0,1]");
  }
  for (int j = 0; j < lp.n; ++j) {
    double cover = 0.0;
    for (int i = 0; i < lp.m; ++i) {
      const double xji = sol.x[std::size_t(j)][std::size_t(i)];
      if (xji < -feas_tol) throw InternalError("lp solution: negative x");
      if (xji > sol.y[std::size_t(i)] + feas_tol)
        throw InternalError("lp solution: x exceeds y");
      cover += xji;
    }
    if (cover < lp.rows[std::size_t(j)].rhs - feas_tol)
      throw InternalError("lp solution: coverage constraint violated");
  }
  return sol;
}

FractionalSolution canonicalize(const Instance& inst, FractionalSolution sol,
                                double threshold) {
  inst.validate();
  if (int(sol.y.size()) != inst.m || int(sol.x.size()) != inst.n)
    throw InvalidInputError("canonicalize: solution shape mismatch");

  for (int i = 0; i < inst.m; ++i) {
    double yi = snap01(sol.y[std::size_t(i)], threshold);
    yi = std::clamp(yi, 0.0, 1.0);
    sol.y[std::size_t(i)] = yi;
  }

  // Stable fill order per client: by (distance, facility index).
  auto order = std::vector<int>(std::size_t(inst.m));
  for (int j = 0; j < inst.n; ++j) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double ca = inst.cost(j, a), cb = inst.cost(j, b);
      if (ca != cb) return ca < cb;
      return a < b;
    });

    auto& row = sol.x[std::size_t(j)];
    if (int(row.size()) != inst.m)
      throw InvalidInputError("canonicalize: solution shape mismatch");
    double need = double(inst.r[std::size_t(j)]);
    for (int idx : order) {
      double take = std::min(sol.y[std::size_t(idx)], need);
      take = snap01(take, kSnapEps);
      row[std::size_t(idx)] = take;
      need -= take;
      if (need < 0.0) need = 0.0;
    }
    if (need > 1e-7)
      throw InfeasibleError("canonicalize: total opening " +
                            std::to_string(double(inst.r[std::size_t(j)]) - need) +
                            " cannot cover requirement of client " + std::to_string(j));
  }

  double obj = 0.0;
  for (int i = 0; i < inst.m; ++i) obj += inst.f[std::size_t(i)] * sol.y[std::size_t(i)];
  for (int j = 0; j < inst.n; ++j)
    for (int i = 0; i < inst.m; ++i)
      obj += inst.cost(j, i) * sol.x[std::size_t(j)][std::size_t(i)];
  sol.objective = obj;
  return sol;
}

}  // namespace ftfl
