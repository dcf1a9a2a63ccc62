#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ftfl/rounding.hpp"

namespace ftfl {

struct PropertyRow {
  std::string name;
  double observed = 0.0;     // measured statistic (violation count or z-score)
  std::string relation;      // "<=", ">=", or "==" against the requirement
  double requirement = 0.0;  // bound it must respect
  bool pass = false;
};

struct PropertySuite {
  std::vector<double> v;                 // the rounded vector
  rounding::LaminarFamily family;        // the guiding family
  std::vector<int> focus_set;            // set used for the min{k,·} rows
  long long k = 0;                       // cap used for the min{k,·} rows
  long long trials = 0;
  std::vector<PropertyRow> rows;
  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }
};

// Statistical check of the rounding engine's contract on a seeded random
// fixture: exact marginals, hard total-sum preservation, hard per-set floor
// and ceiling counts, negative correlation over random index subsets, the
// coupled-beats-independent comparison of E[min{k, ones in S}], and the
// closed-form lower bound k(1 - exp(-sum/k)) for both modes.
// Counted rows must be exactly zero; z-scored rows use a 3-sigma allowance.
PropertySuite run_property_suite(int n, long long trials, std::uint64_t seed,
                                 std::optional<long long> k = {});

}  // namespace ftfl
