#include <catch2/catch.hpp>

#include <cmath>

#include "ftfl/errors.hpp"
#include "ftfl/instance.hpp"
#include "ftfl/lp.hpp"
#include "testers.hpp"

using ftfl::Instance;
using ftfl::LpProblem;
using ftfl::RowSense;

TEST_CASE("relaxation layout: variables, rows, senses, objective") {
  const Instance one = testers::make_instance({2.0}, {{5.0}}, {1});
  const LpProblem lp1 = ftfl::build_lp(one);
  CHECK(lp1.num_vars == 2);
  REQUIRE(lp1.rows.size() == 3);  // 1 coverage + 1 linkage + 1 upper bound
  CHECK(lp1.rows[0].sense == RowSense::ge);
  CHECK(lp1.rows[0].rhs == 1.0);
  CHECK(lp1.rows[1].sense == RowSense::le);
  CHECK(lp1.rows[1].rhs == 0.0);
  CHECK(lp1.rows[2].sense == RowSense::le);
  CHECK(lp1.rows[2].rhs == 1.0);
  CHECK(lp1.obj == std::vector<double>{2.0, 5.0});

  const Instance big = testers::make_instance(
      {1.0, 2.0}, {{3.0, 4.0}, {5.0, 6.0}, {7.0, 8.0}}, {1, 2, 1});
  const LpProblem lp2 = ftfl::build_lp(big);
  CHECK(lp2.num_vars == 8);
  CHECK(lp2.rows.size() == 3 + 6 + 2);
  CHECK(lp2.y_var(1) == 1);
  CHECK(lp2.x_var(2, 1) == 2 + 2 * 2 + 1);
  CHECK(lp2.obj == std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8});
  // coverage rows come first and carry the client requirements
  CHECK(lp2.rows[0].rhs == 1.0);
  CHECK(lp2.rows[1].rhs == 2.0);
  CHECK(lp2.rows[2].rhs == 1.0);
}

TEST_CASE("single facility, single client: the relaxation is forced") {
  const Instance inst = testers::make_instance({0.0}, {{5.0}}, {1});
  const auto sol = ftfl::solve_lp(ftfl::build_lp(inst));
  CHECK(sol.objective == Approx(5.0).margin(1e-9));
  CHECK(sol.y[0] == Approx(1.0).margin(1e-7));
  CHECK(sol.x[0][0] == Approx(1.0).margin(1e-7));
}

TEST_CASE("requirement two forces both facilities fully open") {
  const Instance inst = testers::make_instance({1.0, 1.0}, {{2.0, 3.0}}, {2});
  const auto sol = ftfl::solve_lp(ftfl::build_lp(inst));
  CHECK(sol.objective == Approx(7.0).margin(1e-9));
  CHECK(sol.y[0] == Approx(1.0).margin(1e-7));
  CHECK(sol.y[1] == Approx(1.0).margin(1e-7));
  CHECK(sol.x[0][0] == Approx(1.0).margin(1e-7));
  CHECK(sol.x[0][1] == Approx(1.0).margin(1e-7));
}

TEST_CASE("solver matches exhaustive vertex enumeration on tiny problems") {
  const auto check_against_enum = [](const Instance& inst) {
    const LpProblem lp = ftfl::build_lp(inst);
    const auto sol = ftfl::solve_lp(lp);
    const double brute = testers::vertex_enum_lp_min(lp);
    CHECK(std::isfinite(brute));
    CHECK(sol.objective == Approx(brute).margin(1e-6));
  };

  for (std::uint64_t seed : {0, 1, 2, 3, 4, 5, 6, 7}) {
    check_against_enum(ftfl::generate(ftfl::GenMode::euclidean, 2, 2, 2, seed));
    check_against_enum(ftfl::generate(ftfl::GenMode::uniform, 2, 2, 1, seed));
  }
  check_against_enum(ftfl::generate(ftfl::GenMode::euclidean, 3, 2, 2, 5));
  check_against_enum(ftfl::generate(ftfl::GenMode::uniform, 3, 2, 3, 9));
  check_against_enum(ftfl::generate(ftfl::GenMode::uniform, 2, 3, 2, 11));

  // A classic fractional optimum: three clients, each cheap at the two other
  // facilities; the relaxation opens every facility halfway for cost 1.5.
  const Instance frac = testers::make_instance(
      {1.0, 1.0, 1.0},
      {{9.0, 0.0, 0.0}, {0.0, 9.0, 0.0}, {0.0, 0.0, 9.0}},
      {1, 1, 1});
  const auto sol = ftfl::solve_lp(ftfl::build_lp(frac));
  CHECK(sol.objective == Approx(1.5).margin(1e-7));
}

TEST_CASE("solver optimum carries a feasible matching dual certificate") {
  const Instance inst = ftfl::generate(ftfl::GenMode::euclidean, 4, 4, 2, 3);
  const LpProblem lp = ftfl::build_lp(inst);
  ftfl::LpResult res = ftfl::default_solver().solve(lp, 1e-9);
  double gap = 0.0;
  CHECK(testers::dual_certificate(lp, res.duals, res.objective, 1e-6, &gap));
  CHECK(gap <= 1e-6 * std::max(1.0, std::abs(res.objective)));
}

TEST_CASE("solutions satisfy coverage, linkage and bounds on random instances") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto mode = seed % 2 ? ftfl::GenMode::uniform : ftfl::GenMode::euclidean;
    const Instance inst = ftfl::generate(mode, 5, 5, 3, seed);
    const auto sol = ftfl::solve_lp(ftfl::build_lp(inst));
    for (int i = 0; i < inst.m; ++i) {
      CHECK(sol.y[std::size_t(i)] >= -1e-9);
      CHECK(sol.y[std::size_t(i)] <= 1.0 + 1e-9);
    }
    for (int j = 0; j < inst.n; ++j) {
      double covered = 0.0;
      for (int i = 0; i < inst.m; ++i) {
        const double xj = sol.x[std::size_t(j)][std::size_t(i)];
        CHECK(xj >= -1e-9);
        CHECK(xj <= sol.y[std::size_t(i)] + 1e-7);
        covered += xj;
      }
      CHECK(covered >= double(inst.r[std::size_t(j)]) - 1e-6);
    }
  }
}

TEST_CASE("an unsatisfiable constraint system reports infeasibility") {
  LpProblem lp;
  lp.m = 1;
  lp.n = 0;
  lp.num_vars = 1;
  lp.obj = {1.0};
  lp.rows.push_back({{1.0}, RowSense::ge, 2.0});
  lp.rows.push_back({{1.0}, RowSense::le, 1.0});
  CHECK_THROWS_AS(ftfl::solve_lp(lp), ftfl::InfeasibleError);
}

TEST_CASE("canonicalize fills each client greedily by distance") {
  const Instance inst = testers::make_instance({1.0, 1.0, 1.0},
                                               {{1.0, 2.0, 3.0}}, {1});
  ftfl::FractionalSolution sol;
  sol.y = {0.8, 0.8, 0.8};
  sol.x = {{0.1, 0.2, 0.7}};  // wasteful assignment on purpose
  sol.objective = 0.0;
  const auto canon = ftfl::canonicalize(inst, sol);
  CHECK(canon.x[0][0] == Approx(0.8).margin(1e-12));
  CHECK(canon.x[0][1] == Approx(0.2).margin(1e-12));
  CHECK(canon.x[0][2] == 0.0);
  const double conn = canon.x[0][0] * 1.0 + canon.x[0][1] * 2.0;
  CHECK(canon.objective == Approx(0.8 * 3.0 + conn).margin(1e-12));
}

TEST_CASE("canonicalize is idempotent and never raises the objective") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Instance inst = ftfl::generate(ftfl::GenMode::euclidean, 5, 4, 2, seed);
    const auto sol = ftfl::solve_lp(ftfl::build_lp(inst));
    const auto once = ftfl::canonicalize(inst, sol);
    CHECK(once.objective <= sol.objective + 1e-7);
    const auto twice = ftfl::canonicalize(inst, once);
    CHECK(twice.x == once.x);
    CHECK(twice.y == once.y);

    // after canonicalization each client touches at most one facility
    // partially (0 < x < y)
    for (int j = 0; j < inst.n; ++j) {
      int partial = 0;
      for (int i = 0; i < inst.m; ++i) {
        const double x = once.x[std::size_t(j)][std::size_t(i)];
        if (x > 1e-9 && x < once.y[std::size_t(i)] - 1e-9) ++partial;
      }
      CHECK(partial <= 1);
    }
  }
}

TEST_CASE("canonicalize reports infeasible coverage") {
  const Instance inst = testers::make_instance({1.0, 1.0}, {{1.0, 2.0}}, {1});
  ftfl::FractionalSolution sol;
  sol.y = {0.4, 0.4};
  sol.x = {{0.4, 0.4}};
  sol.objective = 0.0;
  CHECK_THROWS_AS(ftfl::canonicalize(inst, sol), ftfl::InfeasibleError);
}
