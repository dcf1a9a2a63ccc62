#include "ftfl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "ftfl/errors.hpp"
#include "ftfl/parallel.hpp"
#include "ftfl/rng.hpp"

namespace ftfl {

namespace {

using rounding::floor_snapped;
using rounding::kIntegralEps;

constexpr double kMassEps = 1e-7;       // slack on accumulated-mass comparisons
constexpr double kInvariantEps = 1e-6;  // slack on LP-derived invariants

std::string itos(long long v) { return std::to_string(v); }

}  // namespace

// ---------------------------------------------------------------------------
// Scale factor
// ---------------------------------------------------------------------------

double compute_gamma(double tol) {
  if (!(tol > 0.0)) throw InvalidInputError("gamma tolerance must be positive");
  const auto h = [](double g) {
    return g - (1.0 / std::exp(1.0) + 2.0 * std::exp(-g)) * (1.0 + 1.0 / (g - 1.0));
  };
  // h is negative near 1 (the 1/(g-1) pole) and positive at 2.  The bracket
  // is narrowed to a tenth of the requested tolerance: |h'| is about 4.5 at
  // the root, so stopping at tol itself could leave a residual above 2*tol.
  double lo = 1.0 + 1e-9, hi = 2.0;
  const double width = std::max(0.1 * tol, 1e-15);
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double gamma0() {
  static const double g = compute_gamma(1e-12);
  return g;
}

// ---------------------------------------------------------------------------
// Scaling and pre-opening
// ---------------------------------------------------------------------------

ScaledState scale_and_preopen(const Instance& inst, const FractionalSolution& sol,
                              double gamma) {
  const int m = inst.m, n = inst.n;
  ScaledState st;
  st.gamma = gamma;
  st.ytilde.assign(std::size_t(m), 0.0);
  st.ybar.assign(std::size_t(m), 0.0);
  for (int i = 0; i < m; ++i) {
    const double yhat = std::min(1.0, gamma * sol.y[std::size_t(i)]);
    if (yhat >= 1.0 - kIntegralEps) {
      st.ytilde[std::size_t(i)] = 1.0;
    } else if (yhat > kIntegralEps) {
      st.ybar[std::size_t(i)] = yhat;
    }
  }
  st.xtilde.assign(std::size_t(n), std::vector<double>(std::size_t(m), 0.0));
  st.xbar.assign(std::size_t(n), std::vector<double>(std::size_t(m), 0.0));
  st.rbar.assign(std::size_t(n), 0);
  st.special.assign(std::size_t(n), -1);
  for (int j = 0; j < n; ++j) {
    int pre = 0;
    for (int i = 0; i < m; ++i) {
      const double xhat = std::min(1.0, gamma * sol.x[std::size_t(j)][std::size_t(i)]);
      if (xhat >= 1.0 - kIntegralEps) {
        st.xtilde[std::size_t(j)][std::size_t(i)] = 1.0;
        ++pre;
      } else if (xhat > kIntegralEps) {
        st.xbar[std::size_t(j)][std::size_t(i)] = xhat;
      }
    }
    st.rbar[std::size_t(j)] = std::max(0, inst.r[std::size_t(j)] - pre);
    for (int i = 0; i < m; ++i) {
      if (st.xbar[std::size_t(j)][std::size_t(i)] > 0.0 &&
          st.ytilde[std::size_t(i)] == 1.0) {
        if (st.special[std::size_t(j)] != -1)
          throw InternalError("scaling: client " + itos(j) +
                              " has more than one pre-opened fractional server");
        st.special[std::size_t(j)] = i;
      }
    }
    if (st.rbar[std::size_t(j)] > 0) {
      double mass = 0.0;
      for (int i = 0; i < m; ++i) mass += st.xbar[std::size_t(j)][std::size_t(i)];
      if (mass < gamma * st.rbar[std::size_t(j)] - kInvariantEps)
        throw InternalError("scaling: residual connection mass " + std::to_string(mass) +
                            " below gamma*rbar for client " + itos(j));
    }
  }
  return st;
}

// ---------------------------------------------------------------------------
// Close/distant split
// ---------------------------------------------------------------------------

ClientSplit split_client(const Instance& inst, const ScaledState& st, int j) {
  const int m = inst.m;
  if (j < 0 || j >= inst.n || st.rbar[std::size_t(j)] <= 0)
    throw InternalError("split requested for client without residual requirement");
  const auto& row = st.xbar[std::size_t(j)];

  ClientSplit sp;
  sp.client = j;
  sp.rbar = st.rbar[std::size_t(j)];
  sp.xc.assign(std::size_t(m), 0.0);
  sp.xd.assign(std::size_t(m), 0.0);

  std::vector<int> order;
  for (int i = 0; i < m; ++i)
    if (row[std::size_t(i)] > 0.0) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ca = inst.cost(j, a), cb = inst.cost(j, b);
    return ca != cb ? ca < cb : a < b;
  });

  double need = double(sp.rbar);
  for (int i : order) {
    double take = need > kIntegralEps ? std::min(row[std::size_t(i)], need) : 0.0;
    if (take > 0.0 && row[std::size_t(i)] - take < kIntegralEps)
      take = row[std::size_t(i)];
    sp.xc[std::size_t(i)] = take;
    const double rest = row[std::size_t(i)] - take;
    sp.xd[std::size_t(i)] = rest < kIntegralEps ? 0.0 : rest;
    need -= take;
  }
  if (need > kMassEps)
    throw InternalError("split: client " + itos(j) + " short of fractional mass by " +
                        std::to_string(need));

  for (int i : order) {
    if (sp.xc[std::size_t(i)] > 0.0) sp.close.push_back(i);
    if (sp.xd[std::size_t(i)] > 0.0) sp.distant.push_back(i);
    if (sp.xc[std::size_t(i)] > 0.0 && sp.xd[std::size_t(i)] > 0.0) {
      if (sp.boundary != -1)
        throw InternalError("split: client " + itos(j) + " has two boundary facilities");
      sp.boundary = i;
    }
  }
  std::sort(sp.close.begin(), sp.close.end());
  std::sort(sp.distant.begin(), sp.distant.end());

  double sx = 0.0, sxc = 0.0, sxd = 0.0, wx = 0.0, wxc = 0.0, wxd = 0.0;
  for (int i : order) {
    const double c = inst.cost(j, i);
    sx += row[std::size_t(i)];
    wx += c * row[std::size_t(i)];
    sxc += sp.xc[std::size_t(i)];
    wxc += c * sp.xc[std::size_t(i)];
    sxd += sp.xd[std::size_t(i)];
    wxd += c * sp.xd[std::size_t(i)];
  }
  for (int i : sp.close) sp.d_max = std::max(sp.d_max, inst.cost(j, i));
  sp.d_avg = wx / sx;
  sp.d_close = wxc / sxc;
  sp.d_dist = sxd > kIntegralEps ? wxd / sxd : 0.0;
  sp.ratio = sp.d_avg > 0.0
                 ? std::clamp((sp.d_avg - sp.d_close) / sp.d_avg, 0.0, 1.0)
                 : 0.0;

  // The farthest close facility is never farther than the average distant one.
  if (!sp.distant.empty() && sp.d_max > sp.d_dist + kMassEps * std::max(1.0, sp.d_dist))
    throw InternalError("split: close radius exceeds average distant distance for client " +
                        itos(j));
  // Distant average bound; its derivation needs the full scaled mass, so it
  // is only checked when that much mass is present (always true in-pipeline).
  if (sx >= st.gamma * sp.rbar - kInvariantEps) {
    const double bound = sp.d_avg * (1.0 + sp.ratio / (st.gamma - 1.0));
    if (sp.d_dist > bound + kMassEps * std::max(1.0, bound))
      throw InternalError("split: distant-average bound violated for client " + itos(j));
  }
  return sp;
}

std::vector<ClientSplit> split_close_distant(const Instance& inst,
                                             const ScaledState& st) {
  std::vector<ClientSplit> out;
  for (int j = 0; j < inst.n; ++j)
    if (st.rbar[std::size_t(j)] > 0) out.push_back(split_client(inst, st, j));
  return out;
}

// ---------------------------------------------------------------------------
// Client classification
// ---------------------------------------------------------------------------

Classification classify_clients(const Instance&, const ScaledState& st,
                                const std::vector<ClientSplit>& splits) {
  Classification cls;
  for (const auto& sp : splits) {
    const int j = sp.client;
    const int special = st.special[std::size_t(j)];
    const bool special_close =
        special != -1 && std::binary_search(sp.close.begin(), sp.close.end(), special);
    if (sp.rbar == 1 && special_close) {
      cls.special_clients.push_back(j);
    } else {
      if (special_close)
        throw InternalError("classification: client " + itos(j) + " (requirement " +
                            itos(sp.rbar) +
                            ") keeps a pre-opened fractional server among its close set");
      cls.ordinary.push_back(j);
    }
  }
  return cls;
}

// ---------------------------------------------------------------------------
// Clustering
// ---------------------------------------------------------------------------

namespace {

// Tracks every distinct facility set ever placed in some A/B family, so that
// set identity is structural: equal contents, one id.
struct SetPool {
  std::map<std::vector<int>, int> ids;
  std::vector<std::vector<int>> members;
  std::vector<double> mass;      // sum of ybar over members
  std::vector<bool> is_cluster;  // created by the loop (not an initial singleton)

  int intern(std::vector<int> s, const std::vector<double>& ybar) {
    std::sort(s.begin(), s.end());
    if (auto it = ids.find(s); it != ids.end()) return it->second;
    const int id = int(members.size());
    double tot = 0.0;
    for (int i : s) tot += ybar[std::size_t(i)];
    ids.emplace(s, id);
    members.push_back(std::move(s));
    mass.push_back(tot);
    is_cluster.push_back(false);
    return id;
  }

  double frac(int id) const {
    const double v = mass[std::size_t(id)];
    return std::max(0.0, v - double(floor_snapped(v)));
  }
  long long floor_of(int id) const { return floor_snapped(mass[std::size_t(id)]); }
};

bool sorted_intersect(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t p = 0, q = 0;
  while (p < a.size() && q < b.size()) {
    if (a[p] == b[q]) return true;
    (a[p] < b[q] ? p : q)++;
  }
  return false;
}

struct CenterState {
  int client = -1;
  int rbar = 0;
  double d_max = 0.0;
  std::set<int> a, b;  // set-pool ids; jointly pairwise disjoint
  bool active = false;
  double prev_slack = 0.0;
  std::vector<int> cover_ids;
};

long long floors_in(const CenterState& cs, const SetPool& pool) {
  long long tot = 0;
  for (int id : cs.a) tot += pool.floor_of(id);
  for (int id : cs.b) tot += pool.floor_of(id);
  return tot;
}

double slack_of(const CenterState& cs, const SetPool& pool) {
  double fr = 0.0;
  for (int id : cs.a) fr += pool.frac(id);
  return fr - double(cs.rbar - floors_in(cs, pool));
}

}  // namespace

ClusterBuild build_clusters(const Instance& inst, const ScaledState& st,
                            const std::vector<ClientSplit>& splits,
                            const Classification& cls) {
  const int m = inst.m;
  SetPool pool;
  std::vector<CenterState> centers;
  centers.reserve(cls.ordinary.size());
  for (const auto& sp : splits) {
    if (!std::binary_search(cls.ordinary.begin(), cls.ordinary.end(), sp.client))
      continue;
    CenterState cs;
    cs.client = sp.client;
    cs.rbar = sp.rbar;
    cs.d_max = sp.d_max;
    for (int i : sp.close) {
      if (st.ytilde[std::size_t(i)] == 1.0 || st.ybar[std::size_t(i)] <= 0.0)
        throw InternalError("clustering: close facility " + itos(i) + " of client " +
                            itos(sp.client) + " is not fractionally open");
      cs.a.insert(pool.intern({i}, st.ybar));
    }
    cs.active = true;
    cs.prev_slack = slack_of(cs, pool);
    centers.push_back(std::move(cs));
  }

  ClusterBuild out;
  for (;;) {
    // Next center: smallest close radius, ties by client index.
    int pick = -1;
    for (int c = 0; c < int(centers.size()); ++c) {
      if (!centers[std::size_t(c)].active) continue;
      if (pick == -1 || centers[std::size_t(c)].d_max < centers[std::size_t(pick)].d_max)
        pick = c;
    }
    if (pick == -1) break;
    CenterState& cj = centers[std::size_t(pick)];
    const long long rr = cj.rbar - floors_in(cj, pool);
    if (rr <= 0) throw InternalError("clustering: active center already satisfied");

    // Pick a minimal bundle of cj's sets whose fractional parts cover rr:
    // largest fractional part first (ties: smallest member), then one removal
    // pass.  Two sets at least: a single fractional part is below 1 <= rr.
    std::vector<int> cand(cj.a.begin(), cj.a.end());
    std::sort(cand.begin(), cand.end(), [&](int u, int v) {
      const double fu = pool.frac(u), fv = pool.frac(v);
      if (fu != fv) return fu > fv;
      return pool.members[std::size_t(u)][0] < pool.members[std::size_t(v)][0];
    });
    const double threshold = double(rr) - kIntegralEps;
    std::vector<int> chosen;
    double acc = 0.0;
    for (int id : cand) {
      if (acc >= threshold && chosen.size() >= 2) break;
      chosen.push_back(id);
      acc += pool.frac(id);
    }
    if (acc < threshold || chosen.size() < 2)
      throw InternalError("clustering: client " + itos(cj.client) +
                          " lacks fractional mass to form a cluster");
    {
      std::vector<int> kept;
      for (std::size_t s = 0; s < chosen.size(); ++s) {
        const double rest = acc - pool.frac(chosen[s]);
        if (kept.size() + (chosen.size() - s - 1) >= 2 && rest >= threshold) {
          acc = rest;  // drop this set, the remainder still covers rr
        } else {
          kept.push_back(chosen[s]);
        }
      }
      chosen = std::move(kept);
    }
    const std::set<int> x(chosen.begin(), chosen.end());

    std::vector<int> united;
    for (int id : x)
      united.insert(united.end(), pool.members[std::size_t(id)].begin(),
                    pool.members[std::size_t(id)].end());
    const int sj = pool.intern(std::move(united), st.ybar);
    pool.is_cluster[std::size_t(sj)] = true;
    const auto& sj_members = pool.members[std::size_t(sj)];
    out.family.sets.push_back(sj_members);

    // Update every active center's families.
    for (auto& ck : centers) {
      if (!ck.active) continue;
      std::size_t inside = 0;
      for (int id : x) inside += ck.a.count(id);
      if (&ck == &cj || inside == x.size()) {
        for (int id : x) ck.a.erase(id);
        ck.a.insert(sj);
      } else if (inside > 0) {
        for (int id : x) ck.a.erase(id);
        std::vector<int> keep;
        for (int id : ck.b)
          if (!sorted_intersect(pool.members[std::size_t(id)], sj_members))
            keep.push_back(id);
        ck.b = std::set<int>(keep.begin(), keep.end());
        ck.b.insert(sj);
      }
      for (int id : ck.a)
        if (id != sj && sorted_intersect(pool.members[std::size_t(id)], sj_members))
          throw InternalError("clustering: family of client " + itos(ck.client) +
                              " retains a set crossing the new cluster");
    }

    // Deactivate satisfied centers, snapshotting their guarantee: the created
    // clusters among their disjoint sets.  Initial singletons never carry a
    // whole unit of mass, so they add nothing to the floor count.
    for (auto& ck : centers) {
      if (!ck.active) continue;
      if (ck.rbar - floors_in(ck, pool) <= 0) {
        ck.active = false;
        for (int id : ck.a)
          if (pool.is_cluster[std::size_t(id)]) ck.cover_ids.push_back(id);
        for (int id : ck.b)
          if (pool.is_cluster[std::size_t(id)]) ck.cover_ids.push_back(id);
      } else {
        const double now = slack_of(ck, pool);
        if (now < ck.prev_slack - kIntegralEps)
          throw InternalError("clustering: spare fractional mass of client " +
                              itos(ck.client) + " decreased");
        ck.prev_slack = now;
      }
    }
    if (cj.active)
      throw InternalError("clustering: new cluster left its center unsatisfied");
  }

  auto all = std::vector<int>(std::size_t(m));
  std::iota(all.begin(), all.end(), 0);
  if (out.family.sets.empty() || out.family.sets.back() != all)
    out.family.sets.push_back(all);
  out.family.validate(m);

  for (const auto& ck : centers) {
    if (ck.active) throw InternalError("clustering: loop ended with an active center");
    ClientCover cover;
    cover.client = ck.client;
    cover.radius = 3.0 * ck.d_max;
    for (int id : ck.cover_ids) cover.sets.push_back(pool.members[std::size_t(id)]);
    out.covers.push_back(std::move(cover));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rounding, connection, validation
// ---------------------------------------------------------------------------

std::vector<std::uint8_t> round_openings(const ScaledState& st,
                                         const rounding::LaminarFamily& fam,
                                         Rng& rng) {
  return rounding::dependent_round(st.ybar, fam, rng);
}

IntegralSolution connect(const Instance& inst, const std::vector<std::uint8_t>& open) {
  if (int(open.size()) != inst.m)
    throw InvalidInputError("connect: opening vector has wrong length");
  IntegralSolution sol;
  for (int i = 0; i < inst.m; ++i)
    if (open[std::size_t(i)]) sol.open.push_back(i);
  double cost = 0.0;
  for (int i : sol.open) cost += inst.f[std::size_t(i)];
  sol.assign.resize(std::size_t(inst.n));
  std::vector<int> by_cost;
  for (int j = 0; j < inst.n; ++j) {
    const int need = inst.r[std::size_t(j)];
    if (int(sol.open.size()) < need)
      throw InfeasibleError("client " + itos(j) + " needs " + itos(need) +
                            " open facilities, only " + itos(int(sol.open.size())) +
                            " available");
    by_cost = sol.open;
    std::sort(by_cost.begin(), by_cost.end(), [&](int a, int b) {
      const double ca = inst.cost(j, a), cb = inst.cost(j, b);
      return ca != cb ? ca < cb : a < b;
    });
    auto& mine = sol.assign[std::size_t(j)];
    mine.assign(by_cost.begin(), by_cost.begin() + need);
    std::sort(mine.begin(), mine.end());
    for (int i : mine) cost += inst.cost(j, i);
  }
  sol.cost = cost;
  return sol;
}

void validate_solution(const Instance& inst, const IntegralSolution& sol) {
  std::set<int> open(sol.open.begin(), sol.open.end());
  if (open.size() != sol.open.size())
    throw InternalError("solution: duplicate open facilities");
  for (int i : sol.open)
    if (i < 0 || i >= inst.m) throw InternalError("solution: open facility out of range");
  if (int(sol.assign.size()) != inst.n)
    throw InternalError("solution: wrong number of client assignments");
  double cost = 0.0;
  for (int i : sol.open) cost += inst.f[std::size_t(i)];
  for (int j = 0; j < inst.n; ++j) {
    const auto& mine = sol.assign[std::size_t(j)];
    if (int(mine.size()) != inst.r[std::size_t(j)])
      throw InternalError("solution: client " + itos(j) + " has " + itos(int(mine.size())) +
                          " connections, needs " + itos(inst.r[std::size_t(j)]));
    std::set<int> uniq(mine.begin(), mine.end());
    if (uniq.size() != mine.size())
      throw InternalError("solution: client " + itos(j) + " connected twice to a facility");
    for (int i : mine) {
      if (!open.count(i))
        throw InternalError("solution: client " + itos(j) + " uses a closed facility");
      cost += inst.cost(j, i);
    }
  }
  if (std::abs(cost - sol.cost) > kInvariantEps * std::max(1.0, std::abs(cost)))
    throw InternalError("solution: recorded cost differs from recomputation");
}

bool is_feasible(const Instance& inst, const IntegralSolution& sol) {
  try {
    validate_solution(inst, sol);
    return true;
  } catch (const Error&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Pipeline assembly
// ---------------------------------------------------------------------------

Prepared prepare(const Instance& inst, std::optional<double> gamma, double tol) {
  inst.validate();
  const double g = gamma ? *gamma : gamma0();
  if (!(g > 1.0 && g < 2.0))
    throw InvalidInputError("gamma must lie strictly between 1 and 2");
  Prepared p;
  p.inst = inst;
  p.lp = canonicalize(inst, solve_lp(build_lp(inst), tol));
  p.st = scale_and_preopen(inst, p.lp, g);
  p.splits = split_close_distant(inst, p.st);
  p.cls = classify_clients(inst, p.st, p.splits);
  p.clusters = build_clusters(inst, p.st, p.splits, p.cls);

  p.diag.lp_cost = p.lp.objective;
  p.diag.gamma = g;
  for (double v : p.st.ytilde) p.diag.pre_opened += v == 1.0 ? 1 : 0;
  for (const auto& s : p.clusters.family.sets) p.diag.cluster_sizes.push_back(int(s.size()));
  for (const auto& sp : p.splits)
    p.diag.clients.push_back({sp.client, sp.rbar, sp.d_max, sp.ratio});
  p.diag.special_clients = p.cls.special_clients;
  p.diag.ordinary_clients = p.cls.ordinary;
  return p;
}

IntegralSolution complete_trial(const Prepared& prep,
                                const std::vector<std::uint8_t>& rounded) {
  // Per-run guarantee: every clustered client has its residual requirement
  // worth of rounded-open facilities within three times its close radius.
  for (const auto& sp : prep.splits) {
    if (!std::binary_search(prep.cls.ordinary.begin(), prep.cls.ordinary.end(),
                            sp.client))
      continue;
    const double radius = 3.0 * sp.d_max;
    int within = 0;
    for (int i = 0; i < prep.inst.m; ++i)
      if (rounded[std::size_t(i)] &&
          prep.inst.cost(sp.client, i) <= radius + kIntegralEps * std::max(1.0, radius))
        ++within;
    if (within < sp.rbar)
      throw InternalError("rounding: client " + itos(sp.client) + " got " + itos(within) +
                          " nearby openings, guaranteed " + itos(sp.rbar));
  }
  std::vector<std::uint8_t> open(std::size_t(prep.inst.m), 0);
  for (int i = 0; i < prep.inst.m; ++i)
    open[std::size_t(i)] =
        std::uint8_t(rounded[std::size_t(i)] || prep.st.ytilde[std::size_t(i)] == 1.0);
  IntegralSolution sol = connect(prep.inst, open);
  validate_solution(prep.inst, sol);
  return sol;
}

IntegralSolution run_trial(const Prepared& prep, Rng& rng) {
  return complete_trial(prep, round_openings(prep.st, prep.clusters.family, rng));
}

std::vector<double> trial_costs(const Prepared& prep, long long trials,
                                std::uint64_t seed) {
  if (trials < 0) throw InvalidInputError("trial count must be nonnegative");
  auto costs = std::vector<double>(std::size_t(trials));
  if (trials == 0) return costs;
  const int workers = int(std::min<long long>(worker_count(), trials));
  const long long chunk = (trials + workers - 1) / workers;
  parallel_for(
      workers,
      [&](std::int64_t w) {
        rounding::DependentRounder rounder(prep.clusters.family, prep.inst.m);
        std::vector<std::uint8_t> rounded;
        const long long lo = w * chunk;
        const long long hi = std::min<long long>(trials, lo + chunk);
        for (long long t = lo; t < hi; ++t) {
          Rng rng = Rng::derive(seed, std::uint64_t(t));
          rounder.round(prep.st.ybar, rng, rounded);
          try {
            costs[std::size_t(t)] = complete_trial(prep, rounded).cost;
          } catch (const InfeasibleError&) {
            costs[std::size_t(t)] = std::numeric_limits<double>::quiet_NaN();
          }
        }
      },
      workers);
  return costs;
}

RunResult run_alg(const Instance& inst, std::uint64_t seed,
                  std::optional<double> gamma) {
  Prepared prep = prepare(inst, gamma);
  Rng rng = Rng::derive(seed, 0);
  return {run_trial(prep, rng), prep.diag};
}

std::vector<CoverageSample> measure_coverage(const Prepared& prep,
                                             const std::vector<std::uint8_t>& rounded,
                                             Rng& coin) {
  std::vector<CoverageSample> out;
  for (const auto& sp : prep.splits) {
    if (!std::binary_search(prep.cls.ordinary.begin(), prep.cls.ordinary.end(),
                            sp.client))
      continue;
    const auto open_at = [&](int i) {
      return rounded[std::size_t(i)] != 0 || prep.st.ytilde[std::size_t(i)] == 1.0;
    };
    double close_count = 0.0;
    for (int i : sp.close) {
      if (!open_at(i)) continue;
      if (i == sp.boundary) {
        // The facility straddling the close/distant cut contributes its close
        // share of the opening mass, decided by a coin of exactly that bias.
        const double ybar = prep.st.ybar[std::size_t(i)];
        const double bias = sp.xc[std::size_t(i)] / (ybar > 0.0 ? ybar : 1.0);
        if (coin.uniform01() < bias) close_count += 1.0;
      } else {
        close_count += 1.0;
      }
    }
    double both_count = 0.0;
    for (int i = 0; i < prep.inst.m; ++i)
      if (prep.st.xbar[std::size_t(sp.client)][std::size_t(i)] > 0.0 && open_at(i))
        both_count += 1.0;
    out.push_back({sp.client, std::min(double(sp.rbar), close_count),
                   std::min(double(sp.rbar), both_count)});
  }
  return out;
}

}  // namespace ftfl
