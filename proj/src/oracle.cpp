#include "ftfl/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ftfl/errors.hpp"
#include "ftfl/stats.hpp"

namespace ftfl {

namespace {

constexpr double kTieEps = 1e-12;

std::vector<int> mask_members(std::uint32_t mask) {
  std::vector<int> out;
  for (int i = 0; mask != 0; ++i, mask >>= 1)
    if (mask & 1u) out.push_back(i);
  return out;
}

}  // namespace

IntegralSolution exact_opt(const Instance& inst) {
  inst.validate();
  if (inst.m > 20)
    throw InvalidInputError("exact solver handles at most 20 facilities, got " +
                            std::to_string(inst.m));
  const int m = inst.m, n = inst.n;
  int rmax = 0;
  for (int v : inst.r) rmax = std::max(rmax, v);

  // Per client, facilities by (distance, index); a mask is then served by a
  // single prefix walk.
  auto order = std::vector<std::vector<int>>(std::size_t(n));
  for (int j = 0; j < n; ++j) {
    auto& ord = order[std::size_t(j)];
    ord.resize(std::size_t(m));
    for (int i = 0; i < m; ++i) ord[std::size_t(i)] = i;
    std::sort(ord.begin(), ord.end(), [&](int a, int b) {
      const double ca = inst.cost(j, a), cb = inst.cost(j, b);
      return ca != cb ? ca < cb : a < b;
    });
  }

  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  bool found = false;
  const std::uint32_t limit = std::uint32_t(1) << m;
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    if (std::popcount(mask) < rmax) continue;
    double total = 0.0;
    for (int i = 0; i < m; ++i)
      if (mask & (std::uint32_t(1) << i)) total += inst.f[std::size_t(i)];
    if (found && total > best + kTieEps) continue;
    for (int j = 0; j < n && total <= best + kTieEps; ++j) {
      int need = inst.r[std::size_t(j)];
      for (int i : order[std::size_t(j)]) {
        if (need == 0) break;
        if (mask & (std::uint32_t(1) << i)) {
          total += inst.cost(j, i);
          --need;
        }
      }
    }
    if (!found || total < best - kTieEps) {
      best = total;
      best_mask = mask;
      found = true;
    } else if (total <= best + kTieEps &&
               mask_members(mask) < mask_members(best_mask)) {
      best = std::min(best, total);
      best_mask = mask;
    }
  }
  if (!found) throw InfeasibleError("no facility subset can satisfy the requirements");

  std::vector<std::uint8_t> open(std::size_t(m), 0);
  for (int i = 0; i < m; ++i)
    if (best_mask & (std::uint32_t(1) << i)) open[std::size_t(i)] = 1;
  return connect(inst, open);
}

RatioReport ratio_report(const Instance& inst, long long trials, std::uint64_t seed,
                         bool with_exact, std::optional<double> gamma) {
  if (trials < 1) throw InvalidInputError("ratio report needs at least one trial");
  const Prepared prep = prepare(inst, gamma);
  const std::vector<double> costs = trial_costs(prep, trials, seed);

  RatioReport rep;
  rep.trials = trials;
  rep.lp_cost = prep.diag.lp_cost;
  std::vector<double> ok;
  ok.reserve(costs.size());
  for (double c : costs) {
    if (std::isnan(c))
      ++rep.feasibility_failures;
    else
      ok.push_back(c);
  }
  const SampleStats stats = sample_stats(ok);
  rep.alg_mean = stats.mean;
  rep.alg_stderr = stats.se;
  const auto ratio_vs = [&](double denom) {
    if (denom > 0.0) return rep.alg_mean / denom;
    return rep.alg_mean == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  };
  rep.ratio_to_lp = ratio_vs(rep.lp_cost);

  if (with_exact && inst.m <= 20) {
    const IntegralSolution opt = exact_opt(inst);
    rep.opt_cost = opt.cost;
    rep.ratio_to_opt = ratio_vs(opt.cost);
    const double scale = std::max(1.0, std::abs(opt.cost));
    if (rep.lp_cost > opt.cost + 1e-6 * scale)
      throw InternalError("relaxation cost exceeds exact optimum");
    for (double c : ok)
      if (c < opt.cost - 1e-6 * scale)
        throw InternalError("a trial undercut the exact optimum");
  }
  return rep;
}

}  // namespace ftfl
