#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ftfl {

// Fault-tolerant facility location instance: m facilities with opening costs
// f, n clients where client j must be connected to r[j] *distinct* open
// facilities, and c[j][i] is the cost of connecting client j to facility i.
struct Instance {
  int m = 0;
  int n = 0;
  std::vector<double> f;               // size m
  std::vector<std::vector<double>> c;  // n rows of size m
  std::vector<int> r;                  // size n, 1 <= r[j] <= m

  double cost(int j, int i) const { return c[std::size_t(j)][std::size_t(i)]; }
  int max_requirement() const;

  // Shape/sign checks; r[j] > m raises InfeasibleError, anything else
  // malformed raises InvalidInputError.
  void validate() const;
};

// Text format (whitespace separated, '#' comments run to end of line):
//
//   FTFL 1
//   <m> <n>
//   <f_1> ... <f_m>
//   <r_j> <c_j1> ... <c_jm>     (one line per client)
//
// Costs are doubles, requirements are integers.  Serialization prints
// shortest round-trip decimal forms, so parse(serialize(x)) == x exactly.
Instance parse_instance(const std::string& text);
Instance parse_instance(std::istream& in);
std::string serialize_instance(const Instance& inst);

// One counterexample to the relaxed (bipartite) triangle inequality:
// c[j][i] <= c[j][i2] + c[j2][i2] + c[j2][i] + tol failed.
struct MetricViolation {
  int i, j, i2, j2;
  double lhs, rhs;
};

struct MetricReport {
  std::vector<MetricViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks every quadruple (two distinct facilities, two distinct clients).
// With fewer than two facilities or two clients there is nothing to check.
MetricReport validate_metric(const Instance& inst, double tol = 1e-9);

enum class GenMode { euclidean, uniform };

// Deterministic in all arguments.  euclidean: facilities and clients are
// i.i.d. uniform points in the unit square, c = Euclidean distance,
// f ~ U[0,1].  uniform: c comes from the all-pairs shortest-path closure of
// a complete graph on m+n nodes with i.i.d. U[0,1) edge weights, f ~ U[0,1].
// Requirements are uniform integers in [1, r_max]; needs 1 <= r_max <= m.
Instance generate(GenMode mode, int m, int n, int r_max, std::uint64_t seed);

}  // namespace ftfl
