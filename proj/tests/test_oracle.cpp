#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>

#include "ftfl/errors.hpp"
#include "ftfl/lp.hpp"
#include "ftfl/oracle.hpp"
#include "ftfl/pipeline.hpp"
#include "testers.hpp"

using ftfl::Instance;

TEST_CASE("exhaustive optimum: a requirement of two buys both facilities") {
  const Instance inst = testers::make_instance({10.0, 10.0}, {{1.0, 1.0}}, {2});
  const auto sol = ftfl::exact_opt(inst);
  CHECK(sol.open == std::vector<int>{0, 1});
  CHECK(sol.cost == Approx(22.0));
}

TEST_CASE("exhaustive optimum: an expensive facility stays closed") {
  const Instance inst = testers::make_instance({0.0, 100.0}, {{5.0, 1.0}}, {1});
  const auto sol = ftfl::exact_opt(inst);
  CHECK(sol.open == std::vector<int>{0});
  CHECK(sol.cost == Approx(5.0));
}

TEST_CASE("exhaustive optimum breaks cost ties toward the smallest facility set") {
  const Instance inst =
      testers::make_instance({2.0, 0.0, 0.0}, {{0.0, 2.0, 2.0}}, {1});
  // {0}, {1}, {2} and {1,2} all cost exactly 2
  const auto sol = ftfl::exact_opt(inst);
  CHECK(sol.open == std::vector<int>{0});
  CHECK(sol.cost == Approx(2.0));
}

TEST_CASE("exhaustive optimum is invariant under facility relabeling") {
  const Instance inst = ftfl::generate(ftfl::GenMode::uniform, 5, 4, 2, 23);
  Instance shuffled = inst;
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
  for (std::size_t i = 0; i < perm.size(); ++i) {
    shuffled.f[i] = inst.f[perm[i]];
    for (int j = 0; j < inst.n; ++j)
      shuffled.c[std::size_t(j)][i] = inst.c[std::size_t(j)][perm[i]];
  }
  CHECK(ftfl::exact_opt(shuffled).cost == Approx(ftfl::exact_opt(inst).cost));
}

TEST_CASE("exhaustive search is limited to twenty facilities") {
  const Instance big = testers::make_instance(
      std::vector<double>(21, 0.0),
      {std::vector<double>(21, 0.0)}, {1});
  CHECK_THROWS_AS(ftfl::exact_opt(big), ftfl::InvalidInputError);
}

TEST_CASE("the relaxation never exceeds the exhaustive optimum") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto mode = seed % 2 ? ftfl::GenMode::uniform : ftfl::GenMode::euclidean;
    const Instance inst = ftfl::generate(mode, 5, 5, 3, seed);
    const auto lp = ftfl::solve_lp(ftfl::build_lp(inst));
    const auto opt = ftfl::exact_opt(inst);
    CHECK(lp.objective <= opt.cost + 1e-6 * std::max(1.0, opt.cost));
    CHECK(ftfl::is_feasible(inst, opt));
  }
}

TEST_CASE("ratio report on an integral relaxation is exactly one") {
  const Instance inst = testers::make_instance({1.0, 1.0}, {{1.0, 9.0}}, {1});
  const auto rep = ftfl::ratio_report(inst, 50, 7, true);
  CHECK(rep.lp_cost == Approx(2.0).margin(1e-9));
  CHECK(rep.alg_mean == Approx(2.0).margin(1e-9));
  CHECK(rep.alg_stderr == 0.0);
  CHECK(rep.ratio_to_lp == Approx(1.0).margin(1e-9));
  REQUIRE(rep.opt_cost.has_value());
  CHECK(*rep.opt_cost == Approx(2.0).margin(1e-9));
  REQUIRE(rep.ratio_to_opt.has_value());
  CHECK(*rep.ratio_to_opt == Approx(1.0).margin(1e-9));
  CHECK(rep.trials == 50);
  CHECK(rep.feasibility_failures == 0);
}

TEST_CASE("ratio report handles a zero-cost relaxation") {
  const Instance inst = testers::make_instance({0.0, 0.0}, {{0.0, 9.0}}, {1});
  const auto rep = ftfl::ratio_report(inst, 10, 1, false);
  CHECK(rep.lp_cost == Approx(0.0).margin(1e-9));
  CHECK(rep.ratio_to_lp == 1.0);  // zero over zero counts as parity
  CHECK_FALSE(rep.opt_cost.has_value());
}

TEST_CASE("ratio report validates the trial count") {
  const Instance inst = testers::make_instance({1.0}, {{1.0}}, {1});
  CHECK_THROWS_AS(ftfl::ratio_report(inst, 0, 1, false), ftfl::InvalidInputError);
}

TEST_CASE("sampled mean stays within the guarantee on a fractional instance") {
  const Instance inst = testers::ring_instance(5, 1.0, 1);
  const auto rep = ftfl::ratio_report(inst, 2000, 3, true);
  CHECK(rep.feasibility_failures == 0);
  CHECK(rep.alg_mean <= 1.7245 * rep.lp_cost + 3.0 * rep.alg_stderr);
  REQUIRE(rep.opt_cost.has_value());
  CHECK(rep.lp_cost <= *rep.opt_cost + 1e-6 * std::max(1.0, *rep.opt_cost));
  CHECK(rep.alg_mean <= 1.7245 * *rep.opt_cost + 3.0 * rep.alg_stderr);
  CHECK(rep.alg_mean >= *rep.opt_cost - 3.0 * rep.alg_stderr - 1e-9);
}
