#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ftfl/rng.hpp"

namespace ftfl::rounding {

// Values within this distance of 0 or 1 count as integral everywhere in the
// rounding code and the pipeline built on top of it.
inline constexpr double kIntegralEps = 1e-9;

inline bool is_integral01(double v) {
  return v <= kIntegralEps || v >= 1.0 - kIntegralEps;
}

// Floor/ceil where masses within kIntegralEps of an integer count as that
// integer, so 0.9999999999 floors to 1.  Keeps accumulated float error from
// flipping count guarantees.
long long floor_snapped(double t);
long long ceil_snapped(double t);

// Nested-or-disjoint collection of index sets over ground set {0..n-1}.
// List order is creation order; strict subsets must appear before their
// supersets and the last set must be the whole ground set (the root).
struct LaminarFamily {
  std::vector<std::vector<int>> sets;

  void validate(int n) const;  // throws InternalError on any violation
  static LaminarFamily root_only(int n);
};

// One randomized step on a strictly fractional pair: moves mass so the pair
// sum is preserved exactly and at least one side lands on 0 or 1; each side
// keeps its value in expectation.  Consumes exactly one uniform draw.
// Throws InternalError if either argument is already integral.
std::pair<double, double> round_pair(double vi, double vj, Rng& rng);

// Rounds every entry to {0,1}: repeatedly takes the first set in creation
// order that still has two or more fractional entries and pairs its two
// lowest-indexed fractional entries; a last lone fractional entry anywhere
// is rounded independently.  Requires v.size() == family ground-set size.
std::vector<std::uint8_t> dependent_round(const std::vector<double>& v,
                                          const LaminarFamily& fam, Rng& rng);

// Reusable engine: validates the family once and rounds without per-call
// allocation.  Intended for Monte Carlo loops.
class DependentRounder {
 public:
  DependentRounder(LaminarFamily fam, int n);

  const LaminarFamily& family() const { return fam_; }
  void round(const std::vector<double>& v, Rng& rng, std::vector<std::uint8_t>& out);

 private:
  LaminarFamily fam_;
  int n_;
  std::vector<std::vector<int>> member_sets_;  // entry -> set ids containing it
  std::vector<double> work_;
  std::vector<int> frac_count_;  // per set
  std::vector<char> fractional_;
};

// Each entry rounds to 1 with its own probability, independently.
std::vector<std::uint8_t> independent_round(const std::vector<double>& v, Rng& rng);

// Number of ones of x inside the index set s.
int sum_in(const std::vector<std::uint8_t>& x, const std::vector<int>& s);

// Profile value lambda[count of ones in s]; lambda needs |s|+1 entries.
double g_lambda(const std::vector<std::uint8_t>& x, const std::vector<int>& s,
                const std::vector<double>& lambda);

// Discrete concavity: lambda[t] - 2*lambda[t+1] + lambda[t+2] <= tol for all t.
bool check_lambda_condition(const std::vector<double>& lambda, double tol = 0.0);

enum class RoundMode { dependent, independent };

struct EstimateReport {
  double mean = 0.0;
  double se = 0.0;
  long long trials = 0;
};

// Monte Carlo estimate of E[min(k, ones in s)] under either rounding mode.
// Trial t draws its generator from (seed, t): reproducible and independent
// of execution order.  The family is only consulted in dependent mode.
EstimateReport estimate_min_k(const std::vector<double>& v, const std::vector<int>& s,
                              int k, RoundMode mode, const LaminarFamily& fam,
                              long long trials, std::uint64_t seed);

}  // namespace ftfl::rounding
