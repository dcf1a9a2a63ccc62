#include "ftfl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "ftfl/errors.hpp"
#include "ftfl/rng.hpp"
#include "ftfl/stats.hpp"

namespace ftfl {

namespace {

using rounding::ceil_snapped;
using rounding::floor_snapped;
using rounding::LaminarFamily;

std::vector<int> shuffled(int n, Rng& rng) {
  auto perm = std::vector<int>(std::size_t(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const auto j = rng.below(std::uint64_t(i) + 1);
    std::swap(perm[std::size_t(i)], perm[std::size_t(j)]);
  }
  return perm;
}

std::vector<int> sorted_range(const std::vector<int>& perm, int lo, int hi) {
  std::vector<int> s(perm.begin() + lo, perm.begin() + hi);
  std::sort(s.begin(), s.end());
  return s;
}

// Two disjoint top groups over a shuffled index order, each further halved
// when it has at least four members; children precede parents, root last.
LaminarFamily random_family(int n, Rng& rng) {
  const std::vector<int> perm = shuffled(n, rng);
  LaminarFamily fam;
  const int cut = 2 + int(rng.below(std::uint64_t(n) - 3));
  for (const auto [lo, hi] : {std::pair{0, cut}, std::pair{cut, n}}) {
    const int size = hi - lo;
    if (size >= 4) {
      const int mid = lo + 2 + int(rng.below(std::uint64_t(size) - 3));
      fam.sets.push_back(sorted_range(perm, lo, mid));
      fam.sets.push_back(sorted_range(perm, mid, hi));
    }
    fam.sets.push_back(sorted_range(perm, lo, hi));
  }
  fam.sets.push_back(sorted_range(perm, 0, n));
  fam.validate(n);
  return fam;
}

std::vector<int> random_subset(int n, Rng& rng) {
  const int max_size = std::min(8, n);
  const int size = 2 + int(rng.below(std::uint64_t(max_size) - 1));
  std::set<int> pick;
  while (int(pick.size()) < size) pick.insert(int(rng.below(std::uint64_t(n))));
  return {pick.begin(), pick.end()};
}

}  // namespace

PropertySuite run_property_suite(int n, long long trials, std::uint64_t seed,
                                 std::optional<long long> k_opt) {
  if (n < 4 || n > 64)
    throw InvalidInputError("property suite handles vector lengths 4..64");
  if (trials < 100) throw InvalidInputError("property suite needs at least 100 trials");

  PropertySuite suite;
  suite.trials = trials;

  Rng vals = Rng::derive(seed, 1001);
  suite.v.resize(std::size_t(n));
  for (double& x : suite.v) x = 0.05 + 0.90 * vals.uniform01();

  Rng shape = Rng::derive(seed, 1002);
  suite.family = random_family(n, shape);

  Rng picks = Rng::derive(seed, 1003);
  std::vector<std::vector<int>> subsets;
  for (int s = 0; s < 50; ++s) subsets.push_back(random_subset(n, picks));

  // One pass of dependent rounding feeds the marginal, sum, per-set, and
  // correlation rows.
  rounding::DependentRounder rounder(suite.family, n);
  std::vector<long long> ones(std::size_t(n), 0);
  long long sum_violations = 0;
  long long set_violations = 0;
  std::vector<long long> all_ones(subsets.size(), 0), all_zeros(subsets.size(), 0);
  const double total_mass = pairwise_sum(suite.v);
  std::vector<std::uint8_t> out;
  for (long long t = 0; t < trials; ++t) {
    Rng rng = Rng::derive(seed, std::uint64_t(t));
    rounder.round(suite.v, rng, out);
    long long total = 0;
    for (int i = 0; i < n; ++i) {
      ones[std::size_t(i)] += out[std::size_t(i)];
      total += out[std::size_t(i)];
    }
    if (total < floor_snapped(total_mass) || total > ceil_snapped(total_mass))
      ++sum_violations;
    for (const auto& s : suite.family.sets) {
      double mass = 0.0;
      long long got = 0;
      for (int i : s) {
        mass += suite.v[std::size_t(i)];
        got += out[std::size_t(i)];
      }
      if (got < floor_snapped(mass) || got > ceil_snapped(mass)) ++set_violations;
    }
    for (std::size_t s = 0; s < subsets.size(); ++s) {
      bool a1 = true, a0 = true;
      for (int i : subsets[s]) (out[std::size_t(i)] ? a0 : a1) = false;
      all_ones[s] += a1 ? 1 : 0;
      all_zeros[s] += a0 ? 1 : 0;
    }
  }

  const double T = double(trials);
  double marginal_z = 0.0;
  for (int i = 0; i < n; ++i) {
    const double p = suite.v[std::size_t(i)];
    const double emp = double(ones[std::size_t(i)]) / T;
    marginal_z = std::max(marginal_z, std::abs(emp - p) / std::sqrt(p * (1 - p) / T));
  }
  suite.rows.push_back({"marginal deviation (z)", marginal_z, "<=", 3.0, marginal_z <= 3.0});
  suite.rows.push_back({"sum preservation violations", double(sum_violations), "==", 0.0,
                        sum_violations == 0});
  suite.rows.push_back({"per-set floor/ceiling violations", double(set_violations), "==",
                        0.0, set_violations == 0});

  double corr_z = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    double p1 = 1.0, p0 = 1.0;
    for (int i : subsets[s]) {
      p1 *= suite.v[std::size_t(i)];
      p0 *= 1.0 - suite.v[std::size_t(i)];
    }
    const double z1 =
        (double(all_ones[s]) / T - p1) / std::sqrt(p1 * (1 - p1) / T);
    const double z0 =
        (double(all_zeros[s]) / T - p0) / std::sqrt(p0 * (1 - p0) / T);
    corr_z = std::max({corr_z, z1, z0});
  }
  suite.rows.push_back({"negative correlation (z)", corr_z, "<=", 3.0, corr_z <= 3.0});

  // min{k, ones in S} comparison rows on the largest non-root set.
  suite.focus_set = suite.family.sets.front();
  for (const auto& s : suite.family.sets)
    if (&s != &suite.family.sets.back() && s.size() > suite.focus_set.size())
      suite.focus_set = s;
  double focus_mass = 0.0;
  for (int i : suite.focus_set) focus_mass += suite.v[std::size_t(i)];
  suite.k = k_opt ? *k_opt : std::max(1LL, (long long)std::floor(focus_mass / 1.5));
  if (suite.k < 1 || suite.k > n)
    throw InvalidInputError("cap k must lie in [1, n]");

  const auto dep = rounding::estimate_min_k(suite.v, suite.focus_set, int(suite.k),
                                            rounding::RoundMode::dependent,
                                            suite.family, trials, seed);
  const auto ind = rounding::estimate_min_k(suite.v, suite.focus_set, int(suite.k),
                                            rounding::RoundMode::independent,
                                            suite.family, trials, seed);
  const auto z_or = [](double diff, double sigma) {
    if (sigma > 0.0) return diff / sigma;
    return diff >= 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  };
  const double pooled = std::hypot(dep.se, ind.se);
  const double z_cmp = z_or(dep.mean - ind.mean, pooled);
  suite.rows.push_back(
      {"coupled vs independent min-k gap (z)", z_cmp, ">=", -3.0, z_cmp >= -3.0});

  const double bound =
      double(suite.k) * (1.0 - std::exp(-focus_mass / double(suite.k)));
  const double z_dep = z_or(dep.mean - bound, dep.se);
  suite.rows.push_back(
      {"coupled min-k vs closed-form bound (z)", z_dep, ">=", -3.0, z_dep >= -3.0});
  const double z_ind = z_or(ind.mean - bound, ind.se);
  suite.rows.push_back(
      {"independent min-k vs closed-form bound (z)", z_ind, ">=", -3.0, z_ind >= -3.0});
  return suite;
}

}  // namespace ftfl
