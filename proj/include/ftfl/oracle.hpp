#pragma once

#include <cstdint>
#include <optional>

#include "ftfl/instance.hpp"
#include "ftfl/pipeline.hpp"

namespace ftfl {

// Exhaustive optimum over all open-facility subsets (m <= 20); each client
// then takes its r_j cheapest open facilities, which is optimal for a fixed
// open set since nothing couples the clients.  Cost ties within 1e-12 go to
// the lexicographically smallest open set.
IntegralSolution exact_opt(const Instance& inst);

struct RatioReport {
  double lp_cost = 0.0;
  std::optional<double> opt_cost;
  double alg_mean = 0.0;
  double alg_stderr = 0.0;
  double ratio_to_lp = 0.0;
  std::optional<double> ratio_to_opt;
  long long trials = 0;
  long long feasibility_failures = 0;
};

// Monte Carlo summary of the randomized algorithm on one instance: LP cost,
// trial mean and standard error, ratios, and (optionally, for m <= 20) the
// exact optimum.  Trial t draws its own generator from (seed, t).
RatioReport ratio_report(const Instance& inst, long long trials, std::uint64_t seed,
                         bool with_exact, std::optional<double> gamma = {});

}  // namespace ftfl
