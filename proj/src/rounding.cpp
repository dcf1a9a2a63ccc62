#include "ftfl/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ftfl/errors.hpp"
#include "ftfl/stats.hpp"

namespace ftfl::rounding {

namespace {

double snap01(double v) {
  if (std::abs(v) <= kIntegralEps) return 0.0;
  if (std::abs(v - 1.0) <= kIntegralEps) return 1.0;
  return v;
}

// Shared pair-rounding core.  eps raises vi toward 1 or drains vj to 0;
// delta drains vi to 0 or raises vj to 1.  The integral side is written as an
// exact 0 or 1 and the partner as (sum - that), which is exact here: when the
// sum s >= 1 the subtraction s - 1 is exact (Sterbenz), so vi + vj never
// drifts across a pair step.
std::pair<double, double> pair_core(double vi, double vj, Rng& rng) {
  const double eps = std::min(1.0 - vi, vj);
  const double delta = std::min(vi, 1.0 - vj);
  const double s = vi + vj;
  const bool up = rng.uniform01() * (eps + delta) < delta;  // P = delta/(eps+delta)
  double a, b;
  if (up) {
    if (1.0 - vi <= vj) {
      a = 1.0;
      b = s - 1.0;
    } else {
      b = 0.0;
      a = s;
    }
  } else {
    if (vi <= 1.0 - vj) {
      a = 0.0;
      b = s;
    } else {
      b = 1.0;
      a = s - 1.0;
    }
  }
  a = snap01(std::clamp(a, 0.0, 1.0));
  b = snap01(std::clamp(b, 0.0, 1.0));
  return {a, b};
}

}  // namespace

long long floor_snapped(double t) {
  const double r = std::nearbyint(t);
  if (std::abs(t - r) <= kIntegralEps) return (long long)r;
  return (long long)std::floor(t);
}

long long ceil_snapped(double t) {
  const double r = std::nearbyint(t);
  if (std::abs(t - r) <= kIntegralEps) return (long long)r;
  return (long long)std::ceil(t);
}

// ---------- LaminarFamily ----------

void LaminarFamily::validate(int n) const {
  if (sets.empty()) throw InternalError("laminar family: no sets");
  for (const auto& s : sets) {
    if (s.empty()) throw InternalError("laminar family: empty set");
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s[k] < 0 || s[k] >= n)
        throw InternalError("laminar family: index out of range");
      if (k > 0 && s[k] <= s[k - 1])
        throw InternalError("laminar family: set not sorted/unique");
    }
  }
  if (int(sets.back().size()) != n)
    throw InternalError("laminar family: last set must be the full ground set");

  auto relation = [](const std::vector<int>& a, const std::vector<int>& b) {
    // Returns 0 disjoint, 1 a subset of b, 2 b subset of a, 3 equal, -1 crossing.
    std::size_t ia = 0, ib = 0, common = 0;
    while (ia < a.size() && ib < b.size()) {
      if (a[ia] == b[ib]) {
        ++common;
        ++ia;
        ++ib;
      } else if (a[ia] < b[ib]) {
        ++ia;
      } else {
        ++ib;
      }
    }
    if (common == 0) return 0;
    if (common == a.size() && common == b.size()) return 3;
    if (common == a.size()) return 1;
    if (common == b.size()) return 2;
    return -1;
  };

  for (std::size_t p = 0; p < sets.size(); ++p) {
    for (std::size_t q = p + 1; q < sets.size(); ++q) {
      const int rel = relation(sets[p], sets[q]);
      if (rel == -1)
        throw InternalError("laminar family: sets cross");
      if (rel == 2)
        throw InternalError(
            "laminar family: creation order puts a superset before its subset");
    }
  }
}

LaminarFamily LaminarFamily::root_only(int n) {
  LaminarFamily fam;
  fam.sets.emplace_back(std::size_t(n));
  std::iota(fam.sets.back().begin(), fam.sets.back().end(), 0);
  return fam;
}

// ---------- pair step ----------

std::pair<double, double> round_pair(double vi, double vj, Rng& rng) {
  if (is_integral01(vi) || is_integral01(vj))
    throw InternalError("round_pair: both arguments must be strictly fractional");
  if (vi < 0.0 || vi > 1.0 || vj < 0.0 || vj > 1.0)
    throw InternalError("round_pair: arguments must lie in [0,1]");
  return pair_core(vi, vj, rng);
}

// ---------- dependent rounding ----------

DependentRounder::DependentRounder(LaminarFamily fam, int n)
    : fam_(std::move(fam)), n_(n) {
  fam_.validate(n);
  member_sets_.assign(std::size_t(n), {});
  for (std::size_t si = 0; si < fam_.sets.size(); ++si)
    for (int e : fam_.sets[si]) member_sets_[std::size_t(e)].push_back(int(si));
  work_.resize(std::size_t(n));
  frac_count_.resize(fam_.sets.size());
  fractional_.resize(std::size_t(n));
}

void DependentRounder::round(const std::vector<double>& v, Rng& rng,
                             std::vector<std::uint8_t>& out) {
  if (int(v.size()) != n_)
    throw InternalError("dependent rounding: vector/family size mismatch");
  const int n = n_;
  for (int e = 0; e < n; ++e) {
    double val = snap01(v[std::size_t(e)]);
    if (val < 0.0 || val > 1.0)
      throw InternalError("dependent rounding: entry outside [0,1]");
    work_[std::size_t(e)] = val;
    fractional_[std::size_t(e)] = !is_integral01(val);
  }
  int frac_total = 0;
  for (int e = 0; e < n; ++e) frac_total += fractional_[std::size_t(e)] ? 1 : 0;
  for (std::size_t si = 0; si < fam_.sets.size(); ++si) {
    int c = 0;
    for (int e : fam_.sets[si]) c += fractional_[std::size_t(e)] ? 1 : 0;
    frac_count_[si] = c;
  }

  auto mark_integral = [&](int e) {
    if (!fractional_[std::size_t(e)]) return;
    fractional_[std::size_t(e)] = 0;
    --frac_total;
    for (int si : member_sets_[std::size_t(e)]) --frac_count_[std::size_t(si)];
  };

  // Fractional entries only disappear over time, so a set once below two
  // fractional entries never climbs back: a single forward sweep in creation
  // order visits sets exactly as "first set with >= 2 fractional" dictates.
  for (std::size_t si = 0; si < fam_.sets.size(); ++si) {
    while (frac_count_[si] >= 2) {
      int e1 = -1, e2 = -1;
      for (int e : fam_.sets[si]) {
        if (!fractional_[std::size_t(e)]) continue;
        if (e1 < 0) {
          e1 = e;
        } else {
          e2 = e;
          break;
        }
      }
      const auto [a, b] = pair_core(work_[std::size_t(e1)], work_[std::size_t(e2)], rng);
      work_[std::size_t(e1)] = a;
      work_[std::size_t(e2)] = b;
      if (is_integral01(a)) mark_integral(e1);
      if (is_integral01(b)) mark_integral(e2);
    }
  }

  // The root covers every index, so at most one fractional entry survives.
  if (frac_total > 1)
    throw InternalError("dependent rounding: more than one fractional entry left");
  if (frac_total == 1) {
    for (int e = 0; e < n; ++e) {
      if (!fractional_[std::size_t(e)]) continue;
      work_[std::size_t(e)] = rng.uniform01() < work_[std::size_t(e)] ? 1.0 : 0.0;
      break;
    }
  }

  out.resize(std::size_t(n));
  for (int e = 0; e < n; ++e) out[std::size_t(e)] = work_[std::size_t(e)] >= 0.5 ? 1 : 0;
}

std::vector<std::uint8_t> dependent_round(const std::vector<double>& v,
                                          const LaminarFamily& fam, Rng& rng) {
  DependentRounder rounder(fam, int(v.size()));
  std::vector<std::uint8_t> out;
  rounder.round(v, rng, out);
  return out;
}

// ---------- independent rounding ----------

std::vector<std::uint8_t> independent_round(const std::vector<double>& v, Rng& rng) {
  std::vector<std::uint8_t> out(v.size());
  for (std::size_t e = 0; e < v.size(); ++e) {
    const double val = snap01(v[e]);
    if (val < 0.0 || val > 1.0)
      throw InternalError("independent rounding: entry outside [0,1]");
    out[e] = rng.uniform01() < val ? 1 : 0;
  }
  return out;
}

// ---------- counting helpers ----------

int sum_in(const std::vector<std::uint8_t>& x, const std::vector<int>& s) {
  int c = 0;
  for (int e : s) {
    if (e < 0 || e >= int(x.size()))
      throw InternalError("sum_in: index out of range");
    c += x[std::size_t(e)] ? 1 : 0;
  }
  return c;
}

double g_lambda(const std::vector<std::uint8_t>& x, const std::vector<int>& s,
                const std::vector<double>& lambda) {
  if (lambda.size() != s.size() + 1)
    throw InternalError("g_lambda: profile needs |s|+1 entries");
  return lambda[std::size_t(sum_in(x, s))];
}

bool check_lambda_condition(const std::vector<double>& lambda, double tol) {
  for (std::size_t t = 0; t + 2 < lambda.size(); ++t)
    if (lambda[t] - 2.0 * lambda[t + 1] + lambda[t + 2] > tol) return false;
  return true;
}

// ---------- Monte Carlo estimate ----------

EstimateReport estimate_min_k(const std::vector<double>& v, const std::vector<int>& s,
                              int k, RoundMode mode, const LaminarFamily& fam,
                              long long trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidInputError("estimate_min_k: trials must be >= 1");
  if (k < 0) throw InvalidInputError("estimate_min_k: k must be >= 0");

  auto samples = std::vector<double>(std::size_t(trials));
  if (mode == RoundMode::dependent) {
    DependentRounder rounder(fam, int(v.size()));
    std::vector<std::uint8_t> out;
    for (long long t = 0; t < trials; ++t) {
      Rng rng = Rng::derive(seed, std::uint64_t(t));
      rounder.round(v, rng, out);
      samples[std::size_t(t)] = double(std::min(k, sum_in(out, s)));
    }
  } else {
    for (long long t = 0; t < trials; ++t) {
      Rng rng = Rng::derive(seed, std::uint64_t(t));
      const auto out = independent_round(v, rng);
      samples[std::size_t(t)] = double(std::min(k, sum_in(out, s)));
    }
  }

  const SampleStats st = sample_stats(samples);
  return {st.mean, st.se, trials};
}

}  // namespace ftfl::rounding
