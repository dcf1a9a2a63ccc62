// Acceptance gate: every guarantee the library promises, checked end to end
// at full scale.  Each criterion prints exactly one [PASS]/[FAIL] line with
// the observed numbers; the process exits nonzero if any line fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ftfl/errors.hpp"
#include "ftfl/instance.hpp"
#include "ftfl/oracle.hpp"
#include "ftfl/pipeline.hpp"
#include "ftfl/rng.hpp"
#include "ftfl/rounding.hpp"
#include "ftfl/stats.hpp"
#include "ftfl/verify.hpp"
#include "testers.hpp"

namespace rnd = ftfl::rounding;
using ftfl::Instance;
using ftfl::Rng;

namespace {

int g_failures = 0;

struct Verdict {
  int number;
  std::string line;
};
std::vector<Verdict> g_verdicts;

void report(int number, const std::string& name, bool pass,
            const std::string& detail) {
  std::ostringstream line;
  line << (pass ? "[PASS] " : "[FAIL] ") << number << ". " << name << ": "
       << detail;
  g_verdicts.push_back({number, line.str()});
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(12);
  ss << v;
  return ss.str();
}

// ---------------------------------------------------------------------------
// 1. The scale constant: bracketed, certified by an independent iteration,
//    residual within twice the bisection tolerance, computed in under 1ms.
void criterion_gamma() {
  const auto t0 = std::chrono::steady_clock::now();
  const double g = ftfl::compute_gamma(1e-12);
  const auto t1 = std::chrono::steady_clock::now();
  const double micros =
      std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count() / 1e3;

  const double rhs =
      (1.0 / std::exp(1.0) + 2.0 * std::exp(-g)) * (1.0 + 1.0 / (g - 1.0));
  const double residual = std::abs(g - rhs);
  const double oracle = testers::fixed_point_gamma();
  const double oracle_delta = std::abs(g - oracle);

  const bool pass = g > 1.7 && g <= 1.7245 && residual <= 2e-12 &&
                    oracle_delta <= 1e-10 && micros < 1000.0;
  report(1, "scale constant", pass,
         "value=" + fmt(g) + " residual=" + fmt(residual) +
             " oracle_delta=" + fmt(oracle_delta) + " time_us=" + fmt(micros));
}

// ---------------------------------------------------------------------------
// 2-4. Distributional guarantees of the dependent rounding step, measured on
//      a 16-coordinate vector under a nested random family, 1e5 trials.
void criteria_rounding_laws() {
  const ftfl::PropertySuite suite = ftfl::run_property_suite(16, 100000, 2024);
  const auto& rows = suite.rows;

  report(2, "rounding preserves marginals", rows[0].pass,
         "max_z=" + fmt(rows[0].observed) + " allowed=3 trials=100000 n=16 sets=" +
             std::to_string(suite.family.sets.size()));

  const bool sums_ok = rows[1].pass && rows[2].pass;
  report(3, "rounding preserves sums per set", sums_ok,
         "total_violations=" + fmt(rows[1].observed) +
             " per_set_violations=" + fmt(rows[2].observed) + " required=0 of 100000");

  report(4, "rounding is negatively correlated", rows[3].pass,
         "max_z=" + fmt(rows[3].observed) + " allowed=3 subsets=50");
}

// ---------------------------------------------------------------------------
// 5-6. Capped-count estimates: the coupled rounding never trails independent
//      rounding, and both clear the closed-form exponential bound.
void criteria_capped_counts() {
  const int n = 16;
  Rng pick(5150);
  int gap_fails = 0, bound_fails = 0;
  double worst_gap_z = std::numeric_limits<double>::infinity();
  double worst_bound_z = std::numeric_limits<double>::infinity();

  for (int t = 0; t < 50; ++t) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(0.05 + 0.9 * pick.uniform01());
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (pick.bernoulli(0.45)) s.push_back(i);
    if (int(s.size()) < 2) s = {0, 1};
    const int k = 1 + int(pick.below(std::uint64_t(s.size())));

    rnd::LaminarFamily fam;
    if (t % 2 == 0) {
      fam = rnd::LaminarFamily::root_only(n);
    } else {
      std::vector<int> left, all;
      for (int i = 0; i < n / 2; ++i) left.push_back(i);
      for (int i = 0; i < n; ++i) all.push_back(i);
      fam.sets = {left, all};
    }

    const auto dep = rnd::estimate_min_k(v, s, k, rnd::RoundMode::dependent, fam,
                                         100000, 9000 + std::uint64_t(t));
    const auto ind = rnd::estimate_min_k(v, s, k, rnd::RoundMode::independent, fam,
                                         100000, 9500 + std::uint64_t(t));

    const double pooled = std::hypot(dep.se, ind.se);
    const double gap = dep.mean - ind.mean;
    const double gap_z = pooled > 0.0 ? gap / pooled : (gap >= 0.0 ? 0.0 : -99.0);
    worst_gap_z = std::min(worst_gap_z, gap_z);
    if (gap < -3.0 * pooled) ++gap_fails;

    double mass = 0.0;
    for (int i : s) mass += v[std::size_t(i)];
    const double bound = k * (1.0 - std::exp(-mass / double(k)));
    for (const auto& rep : {dep, ind}) {
      const double slack = rep.mean - bound;
      const double z = rep.se > 0.0 ? slack / rep.se : (slack >= 0.0 ? 0.0 : -99.0);
      worst_bound_z = std::min(worst_bound_z, z);
      if (slack < -3.0 * rep.se) ++bound_fails;
    }
  }

  report(5, "coupled rounding dominates independent rounding", gap_fails == 0,
         "triples=50 trials=100000 each, failures=" + std::to_string(gap_fails) +
             " worst_z=" + fmt(worst_gap_z) + " allowed>=-3");
  report(6, "capped counts clear the exponential bound", bound_fails == 0,
         "triples=50 modes=2, failures=" + std::to_string(bound_fails) +
             " worst_z=" + fmt(worst_bound_z) + " allowed>=-3");
}

// ---------------------------------------------------------------------------
// 7. Clustering structure on 200 generated instances, revalidated by
//    independent checkers, within a minute.
std::vector<ftfl::Prepared> g_prepared;  // kept for criteria 8 and 12

void criterion_clustering() {
  const auto t0 = std::chrono::steady_clock::now();
  int laminar_fails = 0, cover_fails = 0;
  std::string first_why;

  std::vector<Instance> pool;
  for (int t = 0; t < 200; ++t) {
    const int m = 3 + t % 10;                       // 3..12
    const int n = 3 + (t / 2) % 10;                 // 3..12
    const int rmax = std::min(m, 1 + t % 3);        // 1..3
    const auto mode = t % 2 ? ftfl::GenMode::uniform : ftfl::GenMode::euclidean;
    pool.push_back(ftfl::generate(mode, m, n, rmax, 40000 + std::uint64_t(t)));
  }
  // Random instances almost always have integral LP optima, which would leave
  // criteria 8 and 12 with nothing to round.  The ring instances are valid
  // metric instances within the same size limits whose LP optima are provably
  // fractional, so the clustering and rounding stages are genuinely exercised.
  pool.push_back(testers::ring_instance(5, 1.0, 1));
  pool.push_back(testers::ring_instance(7, 1.0, 1));
  pool.push_back(testers::ring_instance(9, 1.0, 1));
  pool.push_back(testers::ring_instance(5, 6.0, 2));
  pool.push_back(testers::ring_instance(7, 6.0, 2));

  for (const Instance& inst : pool) {
    ftfl::Prepared prep = ftfl::prepare(inst);

    if (!testers::is_laminar(prep.clusters.family.sets, inst.m)) ++laminar_fails;
    for (std::size_t c = 0; c < prep.clusters.covers.size(); ++c) {
      const int client = prep.cls.ordinary[c];
      const ftfl::ClientSplit* sp = nullptr;
      for (const auto& cand : prep.splits)
        if (cand.client == client) sp = &cand;
      std::string why = "no split for covered client";
      if (sp == nullptr ||
          !testers::cover_ok(prep.inst, prep.st, *sp, prep.clusters.covers[c], &why)) {
        ++cover_fails;
        if (first_why.empty()) first_why = why;
      }
    }
    g_prepared.push_back(std::move(prep));
  }

  const double secs =
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - t0)
          .count() /
      1e3;
  const bool pass = laminar_fails == 0 && cover_fails == 0 && secs < 60.0;
  report(7, "cluster families are laminar with disjoint in-radius covers", pass,
         "instances=205 (200 generated + 5 ring) laminar_fails=" +
             std::to_string(laminar_fails) + " cover_fails=" +
             std::to_string(cover_fails) + " time_s=" + fmt(secs) +
             (first_why.empty() ? "" : " first_issue=" + first_why));
}

// ---------------------------------------------------------------------------
// 8. Per-run coverage: in every single rounding run, each ordinary client
//    finds at least rbar rounded-open facilities within three times its
//    close-set span.  Checked independently of the pipeline's own assert.
long long g_infeasible_runs = 0;  // tallied here and in criteria 10/11

void criterion_per_run_coverage() {
  long long runs = 0, violations = 0;
  std::vector<const ftfl::Prepared*> fractional;
  for (const auto& prep : g_prepared)
    if (prep.clusters.family.sets.size() > 1) fractional.push_back(&prep);

  const long long target = 10000;
  std::size_t cursor = 0;
  std::uint64_t trial = 0;
  while (runs < target && !fractional.empty()) {
    const ftfl::Prepared& prep = *fractional[cursor];
    cursor = (cursor + 1) % fractional.size();
    Rng rng = Rng::derive(777, trial++);
    const auto rounded = ftfl::round_openings(prep.st, prep.clusters.family, rng);

    for (std::size_t c = 0; c < prep.cls.ordinary.size(); ++c) {
      const int client = prep.cls.ordinary[c];
      const ftfl::ClientSplit* sp = nullptr;
      for (const auto& cand : prep.splits)
        if (cand.client == client) sp = &cand;
      const double radius = 3.0 * sp->d_max;
      int within = 0;
      for (int i = 0; i < prep.inst.m; ++i)
        if (rounded[std::size_t(i)] &&
            prep.inst.cost(client, i) <= radius + 1e-9 * std::max(1.0, radius))
          ++within;
      if (within < sp->rbar) ++violations;
    }

    try {
      const auto sol = ftfl::complete_trial(prep, rounded);
      if (!ftfl::is_feasible(prep.inst, sol)) ++g_infeasible_runs;
    } catch (const ftfl::Error&) {
      ++g_infeasible_runs;
      ++violations;
    }
    ++runs;
  }

  report(8, "every rounding run covers each client within its radius",
         violations == 0 && runs == target,
         "runs=" + std::to_string(runs) + " across " +
             std::to_string(fractional.size()) +
             " fractional instances, violations=" + std::to_string(violations) +
             " required=0");
}

// ---------------------------------------------------------------------------
// 10-11. End-to-end guarantee on 50 instances: sampled mean within the proven
//        factor of the relaxation, and sandwiched against the true optimum.
void criteria_end_to_end() {
  int mean_lp_fails = 0, sandwich_fails = 0, mean_opt_fails = 0;
  double worst_lp_ratio = 0.0, worst_opt_ratio = 0.0;

  std::vector<Instance> pool;
  for (int t = 0; t < 50; ++t) {
    const int m = 3 + t % 6;                 // 3..8
    const int n = 3 + (t / 3) % 6;           // 3..8
    const int rmax = std::min(m, 1 + t % 3);
    const auto mode = t % 2 ? ftfl::GenMode::euclidean : ftfl::GenMode::uniform;
    pool.push_back(ftfl::generate(mode, m, n, rmax, 50000 + std::uint64_t(t)));
  }
  pool.push_back(testers::ring_instance(5, 1.0, 1));  // fractional LP optima
  pool.push_back(testers::ring_instance(7, 1.0, 1));
  pool.push_back(testers::ring_instance(5, 6.0, 2));

  for (std::size_t t = 0; t < pool.size(); ++t) {
    const Instance& inst = pool[t];
    const ftfl::Prepared prep = ftfl::prepare(inst);
    const auto costs = ftfl::trial_costs(prep, 2000, 600 + std::uint64_t(t));
    std::vector<double> ok;
    for (double c : costs) {
      if (std::isnan(c))
        ++g_infeasible_runs;
      else
        ok.push_back(c);
    }
    const auto stats = ftfl::sample_stats(ok);
    const double lp = prep.diag.lp_cost;

    if (!(stats.mean <= 1.7245 * lp + 3.0 * stats.se)) ++mean_lp_fails;
    worst_lp_ratio = std::max(worst_lp_ratio, lp > 0 ? stats.mean / lp : 1.0);

    const auto opt = ftfl::exact_opt(inst);
    const double scale = std::max(1.0, opt.cost);
    if (!(lp <= opt.cost + 1e-6 * scale)) ++sandwich_fails;
    for (double c : ok)
      if (!(c >= opt.cost - 1e-6 * scale)) {
        ++sandwich_fails;
        break;
      }
    if (!(stats.mean <= 1.7245 * opt.cost + 3.0 * stats.se)) ++mean_opt_fails;
    worst_opt_ratio =
        std::max(worst_opt_ratio, opt.cost > 0 ? stats.mean / opt.cost : 1.0);
  }

  report(10, "sampled mean within the proven factor of the relaxation",
         mean_lp_fails == 0,
         "instances=53 trials=2000 each, failures=" + std::to_string(mean_lp_fails) +
             " worst_mean/lp=" + fmt(worst_lp_ratio) + " allowed=1.7245+3se");
  report(11, "costs sandwiched between relaxation and optimum",
         sandwich_fails == 0 && mean_opt_fails == 0,
         "sandwich_fails=" + std::to_string(sandwich_fails) + " mean_opt_fails=" +
             std::to_string(mean_opt_fails) + " worst_mean/opt=" +
             fmt(worst_opt_ratio));
}

// ---------------------------------------------------------------------------
// 9. No run anywhere in this binary may produce an infeasible solution.
void criterion_feasibility() {
  report(9, "all runs produce feasible solutions", g_infeasible_runs == 0,
         "infeasible_runs=" + std::to_string(g_infeasible_runs) +
             " across criteria 8, 10 and 11; required=0");
}

// ---------------------------------------------------------------------------
// 12. Expected coverage: close facilities alone reach (1-1/e) of the residual
//     requirement; close and distant together reach (1-e^-gamma).
void criterion_expected_coverage() {
  int clients_checked = 0, fails = 0;
  int instances_used = 0;
  double worst_close_z = std::numeric_limits<double>::infinity();
  double worst_both_z = std::numeric_limits<double>::infinity();
  const long long trials = 100000;

  for (const auto& prep : g_prepared) {
    if (instances_used >= 5) break;
    if (prep.clusters.family.sets.size() <= 1 || prep.cls.ordinary.empty()) continue;
    ++instances_used;

    const std::size_t clients = prep.cls.ordinary.size();
    std::vector<double> close_sum(clients, 0.0), close_sq(clients, 0.0);
    std::vector<double> both_sum(clients, 0.0), both_sq(clients, 0.0);

    for (long long t = 0; t < trials; ++t) {
      Rng rng = Rng::derive(880 + std::uint64_t(instances_used), std::uint64_t(t));
      Rng coin = Rng::derive(980 + std::uint64_t(instances_used), std::uint64_t(t));
      const auto rounded = ftfl::round_openings(prep.st, prep.clusters.family, rng);
      const auto samples = ftfl::measure_coverage(prep, rounded, coin);
      for (std::size_t c = 0; c < clients; ++c) {
        close_sum[c] += samples[c].close_min;
        close_sq[c] += samples[c].close_min * samples[c].close_min;
        both_sum[c] += samples[c].both_min;
        both_sq[c] += samples[c].both_min * samples[c].both_min;
      }
    }

    const double gamma = prep.st.gamma;
    for (std::size_t c = 0; c < clients; ++c) {
      const ftfl::ClientSplit* sp = nullptr;
      for (const auto& cand : prep.splits)
        if (cand.client == prep.cls.ordinary[c]) sp = &cand;
      const double rbar = double(sp->rbar);
      ++clients_checked;

      const auto check = [&](double sum, double sq, double bound, double& worst) {
        const double mean = sum / double(trials);
        const double var =
            std::max(0.0, (sq - double(trials) * mean * mean) / double(trials - 1));
        const double se = std::sqrt(var / double(trials));
        const double slack = mean - bound;
        const double z = se > 0.0 ? slack / se : (slack >= -1e-12 ? 0.0 : -99.0);
        worst = std::min(worst, z);
        if (slack < -3.0 * se - 1e-12) ++fails;
      };
      check(close_sum[c], close_sq[c], (1.0 - std::exp(-1.0)) * rbar, worst_close_z);
      check(both_sum[c], both_sq[c], (1.0 - std::exp(-gamma)) * rbar, worst_both_z);
    }
  }

  report(12, "expected coverage clears both exponential thresholds",
         fails == 0 && instances_used > 0 && clients_checked > 0,
         "instances=" + std::to_string(instances_used) + " clients=" +
             std::to_string(clients_checked) + " trials=100000 fails=" +
             std::to_string(fails) + " worst_close_z=" + fmt(worst_close_z) +
             " worst_both_z=" + fmt(worst_both_z) + " allowed>=-3");
}

// ---------------------------------------------------------------------------
// 13. Determinism of the shipped binary: byte-identical reports for the same
//     seed, independent of thread count.
void criterion_determinism() {
  const std::string bin = testers::cli_path();
  if (bin.empty()) {
    report(13, "reports are byte-identical across runs and thread counts", false,
           "FTFL_BIN not set; cannot exercise the binary");
    return;
  }
  const std::string dir = testers::make_temp_dir();
  if (dir.empty()) {
    report(13, "reports are byte-identical across runs and thread counts", false,
           "could not create a temp dir");
    return;
  }
  const std::string path = dir + "/det.ftfl";
  {
    std::ofstream out(path, std::ios::binary);
    // Fractional instance: the per-trial costs actually vary, so identical
    // bytes across thread counts is a meaningful check.
    out << ftfl::serialize_instance(testers::ring_instance(7, 1.0, 1));
  }
  const std::string cmd =
      "\"" + bin + "\" solve \"" + path + "\" --json --trials 400 --seed 31";
  const auto a = testers::run_cli(cmd);
  const auto b = testers::run_cli(cmd);
  const auto c = testers::run_cli("FTFL_THREADS=1 " + cmd);
  const auto d = testers::run_cli("FTFL_THREADS=8 " + cmd);

  const bool ok = a.status == 0 && b.status == 0 && c.status == 0 &&
                  d.status == 0 && !a.out.empty() && a.out == b.out &&
                  a.out == c.out && a.out == d.out;
  report(13, "reports are byte-identical across runs and thread counts", ok,
         "bytes=" + std::to_string(a.out.size()) + " runs=4 (repeat, threads=1, threads=8)" +
             (ok ? "" : " exit codes=" + std::to_string(a.status) + "," +
                            std::to_string(b.status) + "," + std::to_string(c.status) +
                            "," + std::to_string(d.status)));
}

}  // namespace

int main() {
  criterion_gamma();
  criteria_rounding_laws();
  criteria_capped_counts();
  criterion_clustering();
  criterion_per_run_coverage();
  criteria_end_to_end();  // also feeds the feasibility tally
  criterion_feasibility();
  criterion_expected_coverage();
  criterion_determinism();

  std::sort(g_verdicts.begin(), g_verdicts.end(),
            [](const Verdict& a, const Verdict& b) { return a.number < b.number; });
  for (const auto& v : g_verdicts) std::cout << v.line << "\n";

  if (g_failures == 0) {
    std::cout << "all 13 criteria passed\n";
    return 0;
  }
  std::cout << g_failures << " criteria failed\n";
  return 1;
}
