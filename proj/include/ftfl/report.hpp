#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ftfl/oracle.hpp"
#include "ftfl/pipeline.hpp"

namespace ftfl {

struct BenchRow {
  std::string instance;  // label, normally the instance file path
  int m = 0;
  int n = 0;
  int rmax = 0;
  RatioReport rep;
};

// Fixed column order:
// instance,m,n,rmax,lp_cost,opt_cost,trials,alg_mean,alg_stderr,ratio_lp,ratio_opt,feas_failures
// Missing optional fields are left empty.  Numbers use the shortest form that
// round-trips, so parsing the file back reproduces them exactly.
void emit_csv(const std::vector<BenchRow>& rows, std::ostream& out);

// Everything one `solve` invocation measured, for the JSON record.
struct SolveRecord {
  std::string instance;
  std::uint64_t seed = 0;
  long long trials = 0;
  Diagnostics diag;
  std::vector<double> per_trial_costs;  // NaN marks an infeasible trial
  double mean_cost = 0.0;
  double stderr_cost = 0.0;
  double ratio_lp = 0.0;
  long long feasibility_failures = 0;
};

// Stable key order, two-space indentation, trailing newline.
std::string solve_record_json(const SolveRecord& rec);

}  // namespace ftfl
