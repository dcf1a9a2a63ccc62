#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ftfl/instance.hpp"
#include "ftfl/lp.hpp"
#include "ftfl/rounding.hpp"

namespace ftfl {

// Scale factor used by the algorithm: the unique root in (1,2) of
//   g = (1/e + 2/e^g) * (1 + 1/(g-1)),
// found by bisection to within tol.  gamma0() caches the tol=1e-12 value for
// the process; it is slightly below 1.7245.
double compute_gamma(double tol);
double gamma0();

// State after scaling a canonical fractional solution by gamma and peeling
// off the integral part.  ytilde/xtilde hold the pre-opened/pre-connected
// 0/1 part; ybar/xbar the fractional remainder (all entries in (0,1), with
// exact zeros elsewhere); rbar is what is still owed to each client.
struct ScaledState {
  double gamma = 1.0;
  std::vector<double> ytilde;               // size m, entries 0/1
  std::vector<double> ybar;                 // size m, entries in [0,1)
  std::vector<std::vector<double>> xtilde;  // n x m, entries 0/1
  std::vector<std::vector<double>> xbar;    // n x m, entries in [0,1)
  std::vector<int> rbar;                    // size n, >= 0
  std::vector<int> special;                 // per client: pre-opened facility with
                                            // fractional xbar toward it, or -1
};

ScaledState scale_and_preopen(const Instance& inst, const FractionalSolution& sol,
                              double gamma);

// Split of one client's xbar mass into the closest rbar units ("close") and
// the rest ("distant"), walking facilities by (distance, index).  The two
// supports overlap in at most the boundary facility.
struct ClientSplit {
  int client = -1;
  int rbar = 0;
  std::vector<double> xc, xd;      // dense, size m; xc + xd == xbar row
  std::vector<int> close, distant;  // supports, ascending facility index
  int boundary = -1;                // facility in both supports, or -1
  double d_max = 0.0;               // distance of the farthest close facility
  double d_avg = 0.0;               // xbar-weighted average distance
  double d_close = 0.0;             // xc-weighted average distance (mass rbar)
  double d_dist = 0.0;              // xd-weighted average distance
  double ratio = 0.0;               // (d_avg - d_close) / d_avg, 0 if d_avg == 0
};

// Splits one client with rbar > 0 (throws InternalError otherwise).
ClientSplit split_client(const Instance& inst, const ScaledState& st, int j);

// All clients with rbar > 0, ascending client index.
std::vector<ClientSplit> split_close_distant(const Instance& inst,
                                             const ScaledState& st);

// Clients still owed coverage fall in two groups: "special" clients (owed
// exactly 1, and a pre-opened facility with fractional demand toward them
// sits inside their close set — it alone will cover them) and "ordinary"
// clients, which the clustering serves.  Ordinary clients must not have such
// a facility among their close set; that is asserted here.
struct Classification {
  std::vector<int> special_clients;
  std::vector<int> ordinary;
};

Classification classify_clients(const Instance& inst, const ScaledState& st,
                                const std::vector<ClientSplit>& splits);

// The disjoint clusters guarding one ordinary client at the moment it became
// fully covered: every member facility is within `radius` of the client and
// the floors of the clusters' ybar masses sum to at least rbar.
struct ClientCover {
  int client = -1;
  std::vector<std::vector<int>> sets;
  double radius = 0.0;  // 3 * d_max
};

struct ClusterBuild {
  rounding::LaminarFamily family;   // clusters in creation order, root last
  std::vector<ClientCover> covers;  // one per ordinary client
};

ClusterBuild build_clusters(const Instance& inst, const ScaledState& st,
                            const std::vector<ClientSplit>& splits,
                            const Classification& cls);

// Rounds ybar to 0/1 guided by the cluster family.
std::vector<std::uint8_t> round_openings(const ScaledState& st,
                                         const rounding::LaminarFamily& fam,
                                         Rng& rng);

struct IntegralSolution {
  std::vector<int> open;                 // ascending facility indices
  std::vector<std::vector<int>> assign;  // per client: r_j facilities, ascending
  double cost = 0.0;
};

// Connects every client to its r_j cheapest open facilities (ties by index).
IntegralSolution connect(const Instance& inst, const std::vector<std::uint8_t>& open);

void validate_solution(const Instance& inst, const IntegralSolution& sol);
bool is_feasible(const Instance& inst, const IntegralSolution& sol);

struct ClientDiag {
  int client = 0;
  int rbar = 0;
  double d_max = 0.0;
  double ratio = 0.0;
};

struct Diagnostics {
  double lp_cost = 0.0;
  double gamma = 0.0;
  int pre_opened = 0;
  std::vector<int> cluster_sizes;        // family set sizes, creation order
  std::vector<ClientDiag> clients;       // clients with rbar > 0
  std::vector<int> special_clients;
  std::vector<int> ordinary_clients;
};

// Everything the trials share: LP solve, canonicalization, scaling, split,
// classification and clustering.
struct Prepared {
  Instance inst;
  FractionalSolution lp;  // canonical
  ScaledState st;
  std::vector<ClientSplit> splits;
  Classification cls;
  ClusterBuild clusters;
  Diagnostics diag;
};

Prepared prepare(const Instance& inst, std::optional<double> gamma = {},
                 double tol = 1e-9);

// Finish one trial from rounded openings: checks that every ordinary client
// has at least rbar rounded-open facilities within 3*d_max (a per-run
// guarantee, not just in expectation), connects, and validates feasibility.
IntegralSolution complete_trial(const Prepared& prep,
                                const std::vector<std::uint8_t>& rounded);

IntegralSolution run_trial(const Prepared& prep, Rng& rng);

// Per-trial costs for `trials` rounding runs; trial t is seeded from
// (seed, t), so any execution order gives identical output.
std::vector<double> trial_costs(const Prepared& prep, long long trials,
                                std::uint64_t seed);

struct RunResult {
  IntegralSolution sol;
  Diagnostics diag;
};

// Full pipeline on one instance with one rounding pass.
RunResult run_alg(const Instance& inst, std::uint64_t seed,
                  std::optional<double> gamma = {});

// Coverage measurement for expectation checks.  close_min counts rounded-open
// close facilities clipped at rbar; a facility sitting in both supports
// counts as close only when a coin with success probability xc/ybar agrees,
// which makes the expected close opening mass exactly rbar.  both_min counts
// open facilities (rounded or pre-opened) in the union of the supports,
// clipped at rbar.  The coin lives in the measurement only; the run itself
// never uses it.
struct CoverageSample {
  int client = -1;
  double close_min = 0.0;
  double both_min = 0.0;
};

std::vector<CoverageSample> measure_coverage(const Prepared& prep,
                                             const std::vector<std::uint8_t>& rounded,
                                             Rng& coin);

}  // namespace ftfl
