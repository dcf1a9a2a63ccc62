#include "ftfl/report.hpp"

#include <nlohmann/json.hpp>
#include <ostream>

#include "ftfl/numfmt.hpp"

namespace ftfl {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void emit_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << "instance,m,n,rmax,lp_cost,opt_cost,trials,alg_mean,alg_stderr,"
         "ratio_lp,ratio_opt,feas_failures\n";
  for (const auto& row : rows) {
    const RatioReport& r = row.rep;
    out << csv_field(row.instance) << ',' << row.m << ',' << row.n << ',' << row.rmax
        << ',' << fmt_double(r.lp_cost) << ','
        << (r.opt_cost ? fmt_double(*r.opt_cost) : std::string()) << ',' << r.trials
        << ',' << fmt_double(r.alg_mean) << ',' << fmt_double(r.alg_stderr) << ','
        << fmt_double(r.ratio_to_lp) << ','
        << (r.ratio_to_opt ? fmt_double(*r.ratio_to_opt) : std::string()) << ','
        << r.feasibility_failures << '\n';
  }
}

std::string solve_record_json(const SolveRecord& rec) {
  nlohmann::ordered_json j;
  j["instance"] = rec.instance;
  j["seed"] = rec.seed;
  j["trials"] = rec.trials;
  j["gamma"] = rec.diag.gamma;
  j["lp_cost"] = rec.diag.lp_cost;
  j["pre_opened"] = rec.diag.pre_opened;
  j["special_clients"] = rec.diag.special_clients;
  j["ordinary_clients"] = rec.diag.ordinary_clients;
  j["cluster_sizes"] = rec.diag.cluster_sizes;
  auto clients = nlohmann::ordered_json::array();
  for (const auto& c : rec.diag.clients) {
    nlohmann::ordered_json e;
    e["client"] = c.client;
    e["rbar"] = c.rbar;
    e["d_max"] = c.d_max;
    e["R"] = c.ratio;
    clients.push_back(std::move(e));
  }
  j["clients"] = std::move(clients);
  j["per_trial_costs"] = rec.per_trial_costs;
  j["mean_cost"] = rec.mean_cost;
  j["stderr_cost"] = rec.stderr_cost;
  j["ratio_lp"] = rec.ratio_lp;
  j["feasibility_failures"] = rec.feasibility_failures;
  return j.dump(2) + "\n";
}

}  // namespace ftfl
