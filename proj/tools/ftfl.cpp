// Command-line front end: solve, lp, exact, gen, verify-rounding, bench.
//
// Exit codes: 0 success; 1 usage, parse, invalid-input, or infeasibility
// errors; 2 internal-consistency or solver failures; 3 statistical-suite
// failure.

#include <boost/program_options.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ftfl/errors.hpp"
#include "ftfl/instance.hpp"
#include "ftfl/lp.hpp"
#include "ftfl/numfmt.hpp"
#include "ftfl/oracle.hpp"
#include "ftfl/pipeline.hpp"
#include "ftfl/report.hpp"
#include "ftfl/stats.hpp"
#include "ftfl/verify.hpp"

namespace po = boost::program_options;
namespace fs = std::filesystem;

namespace {

void usage(std::ostream& out) {
  out << "usage: ftfl <command> [options]\n"
         "\n"
         "commands:\n"
         "  solve <file>      run the randomized rounding algorithm, report costs\n"
         "  lp <file>         solve the LP relaxation, print the fractional solution\n"
         "  exact <file>      brute-force the exact optimum (at most 20 facilities)\n"
         "  gen               generate a random metric instance\n"
         "  verify-rounding   statistical property suite for the rounding engine\n"
         "  bench <dir>       run every *.ftfl instance in a directory, emit CSV\n"
         "\n"
         "run `ftfl <command> --help` for the command's options.\n"
         "FTFL_THREADS caps trial parallelism (0 or unset: one per hardware "
         "thread).\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ftfl::InvalidInputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses with support for --help before required-argument validation.
bool parse_or_help(const po::options_description& desc,
                   const po::positional_options_description& pos,
                   const std::vector<std::string>& args, po::variables_map& vm) {
  po::store(po::command_line_parser(args).options(desc).positional(pos).run(), vm);
  if (vm.count("help")) {
    std::cout << desc;
    return false;
  }
  po::notify(vm);
  return true;
}

double ratio_or_unit(double num, double denom) {
  if (denom > 0.0) return num / denom;
  return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
}

std::optional<double> gamma_of(const po::variables_map& vm) {
  if (!vm.count("gamma")) return {};
  return vm["gamma"].as<double>();
}

int cmd_solve(const std::vector<std::string>& args) {
  po::options_description desc("ftfl solve <file> [options]");
  desc.add_options()                                                   //
      ("help,h", "show this help")                                     //
      ("input", po::value<std::string>(), "instance file")             //
      ("seed", po::value<std::uint64_t>()->default_value(0), "RNG seed")  //
      ("trials", po::value<long long>()->default_value(1000), "rounding trials")  //
      ("gamma", po::value<double>(), "scale-factor override, strictly in (1,2)")  //
      ("tol", po::value<double>()->default_value(1e-9), "LP tolerance")           //
      ("json", po::bool_switch()->default_value(false), "emit a JSON record");
  po::positional_options_description pos;
  pos.add("input", 1);
  po::variables_map vm;
  if (!parse_or_help(desc, pos, args, vm)) return 0;
  if (!vm.count("input"))
    throw ftfl::InvalidInputError("solve needs an instance file");

  const std::string path = vm["input"].as<std::string>();
  const long long trials = vm["trials"].as<long long>();
  if (trials < 1) throw ftfl::InvalidInputError("--trials must be at least 1");
  const std::uint64_t seed = vm["seed"].as<std::uint64_t>();

  const ftfl::Instance inst = ftfl::parse_instance(read_file(path));
  const ftfl::Prepared prep =
      ftfl::prepare(inst, gamma_of(vm), vm["tol"].as<double>());
  const std::vector<double> costs = ftfl::trial_costs(prep, trials, seed);

  ftfl::SolveRecord rec;
  rec.instance = path;
  rec.seed = seed;
  rec.trials = trials;
  rec.diag = prep.diag;
  rec.per_trial_costs = costs;
  std::vector<double> ok;
  ok.reserve(costs.size());
  for (double c : costs) {
    if (std::isnan(c))
      ++rec.feasibility_failures;
    else
      ok.push_back(c);
  }
  const ftfl::SampleStats stats = ftfl::sample_stats(ok);
  rec.mean_cost = stats.mean;
  rec.stderr_cost = stats.se;
  rec.ratio_lp = ratio_or_unit(rec.mean_cost, rec.diag.lp_cost);

  if (vm["json"].as<bool>()) {
    std::cout << ftfl::solve_record_json(rec);
    return 0;
  }
  std::cout << "instance: " << path << "\n"
            << "facilities: " << inst.m << "  clients: " << inst.n << "\n"
            << "seed: " << seed << "  trials: " << trials << "\n"
            << "gamma: " << ftfl::fmt_double(rec.diag.gamma) << "\n"
            << "lp_cost: " << ftfl::fmt_double(rec.diag.lp_cost) << "\n"
            << "pre_opened: " << rec.diag.pre_opened << "\n";
  std::cout << "cluster_sizes:";
  for (int s : rec.diag.cluster_sizes) std::cout << ' ' << s;
  std::cout << "\n";
  for (std::size_t t = 0; t < costs.size(); ++t)
    std::cout << "trial " << t << ": " << ftfl::fmt_double(costs[t]) << "\n";
  std::cout << "mean_cost: " << ftfl::fmt_double(rec.mean_cost) << "\n"
            << "stderr_cost: " << ftfl::fmt_double(rec.stderr_cost) << "\n"
            << "ratio_lp: " << ftfl::fmt_double(rec.ratio_lp) << "\n"
            << "feasibility_failures: " << rec.feasibility_failures << "\n";
  return 0;
}

int cmd_lp(const std::vector<std::string>& args) {
  po::options_description desc("ftfl lp <file> [options]");
  desc.add_options()                                        //
      ("help,h", "show this help")                          //
      ("input", po::value<std::string>(), "instance file")  //
      ("tol", po::value<double>()->default_value(1e-9), "LP tolerance");
  po::positional_options_description pos;
  pos.add("input", 1);
  po::variables_map vm;
  if (!parse_or_help(desc, pos, args, vm)) return 0;
  if (!vm.count("input")) throw ftfl::InvalidInputError("lp needs an instance file");

  const ftfl::Instance inst =
      ftfl::parse_instance(read_file(vm["input"].as<std::string>()));
  const ftfl::FractionalSolution sol =
      ftfl::solve_lp(ftfl::build_lp(inst), vm["tol"].as<double>());
  std::cout << "objective: " << ftfl::fmt_double(sol.objective) << "\n";
  for (int i = 0; i < inst.m; ++i)
    if (sol.y[std::size_t(i)] > 0.0)
      std::cout << "y " << i << " " << ftfl::fmt_double(sol.y[std::size_t(i)]) << "\n";
  for (int j = 0; j < inst.n; ++j)
    for (int i = 0; i < inst.m; ++i)
      if (sol.x[std::size_t(j)][std::size_t(i)] > 0.0)
        std::cout << "x " << j << " " << i << " "
                  << ftfl::fmt_double(sol.x[std::size_t(j)][std::size_t(i)]) << "\n";
  return 0;
}

int cmd_exact(const std::vector<std::string>& args) {
  po::options_description desc("ftfl exact <file>");
  desc.add_options()  //
      ("help,h", "show this help")("input", po::value<std::string>(), "instance file");
  po::positional_options_description pos;
  pos.add("input", 1);
  po::variables_map vm;
  if (!parse_or_help(desc, pos, args, vm)) return 0;
  if (!vm.count("input"))
    throw ftfl::InvalidInputError("exact needs an instance file");

  const ftfl::Instance inst =
      ftfl::parse_instance(read_file(vm["input"].as<std::string>()));
  const ftfl::IntegralSolution opt = ftfl::exact_opt(inst);
  std::cout << "opt_cost: " << ftfl::fmt_double(opt.cost) << "\n";
  std::cout << "open:";
  for (int i : opt.open) std::cout << ' ' << i;
  std::cout << "\n";
  return 0;
}

int cmd_gen(const std::vector<std::string>& args) {
  po::options_description desc("ftfl gen [options]");
  desc.add_options()                                                          //
      ("help,h", "show this help")                                            //
      ("mode", po::value<std::string>()->default_value("euclidean"),
       "euclidean | uniform")                                                 //
      ("m", po::value<int>()->default_value(8), "facilities")                 //
      ("n", po::value<int>()->default_value(8), "clients")                    //
      ("rmax", po::value<int>()->default_value(2), "largest requirement")     //
      ("seed", po::value<std::uint64_t>()->default_value(0), "RNG seed")      //
      ("out", po::value<std::string>(), "output file (default: stdout)");
  po::positional_options_description pos;
  po::variables_map vm;
  if (!parse_or_help(desc, pos, args, vm)) return 0;

  const std::string mode_name = vm["mode"].as<std::string>();
  ftfl::GenMode mode;
  if (mode_name == "euclidean")
    mode = ftfl::GenMode::euclidean;
  else if (mode_name == "uniform")
    mode = ftfl::GenMode::uniform;
  else
    throw ftfl::InvalidInputError("unknown --mode: " + mode_name);

  const ftfl::Instance inst =
      ftfl::generate(mode, vm["m"].as<int>(), vm["n"].as<int>(), vm["rmax"].as<int>(),
                     vm["seed"].as<std::uint64_t>());
  const std::string text = ftfl::serialize_instance(inst);
  if (vm.count("out")) {
    std::ofstream out(vm["out"].as<std::string>(), std::ios::binary);
    if (!out) throw ftfl::InvalidInputError("cannot write " + vm["out"].as<std::string>());
    out << text;
  } else {
    std::cout << text;
  }
  return 0;
}

int cmd_verify(const std::vector<std::string>& args) {
  po::options_description desc("ftfl verify-rounding [options]");
  desc.add_options()                                                       //
      ("help,h", "show this help")                                         //
      ("n", po::value<int>()->default_value(16), "vector length (4..64)")  //
      ("trials", po::value<long long>()->default_value(100000), "rounding trials")  //
      ("seed", po::value<std::uint64_t>()->default_value(0), "RNG seed")            //
      ("k", po::value<long long>(), "cap for the min{k, opened} rows");
  po::positional_options_description pos;
  po::variables_map vm;
  if (!parse_or_help(desc, pos, args, vm)) return 0;

  std::optional<long long> k;
  if (vm.count("k")) k = vm["k"].as<long long>();
  const ftfl::PropertySuite suite = ftfl::run_property_suite(
      vm["n"].as<int>(), vm["trials"].as<long long>(), vm["seed"].as<std::uint64_t>(), k);

  std::cout << "rounding property suite: n=" << suite.v.size()
            << " trials=" << suite.trials << " sets=" << suite.family.sets.size()
            << " focus_set_size=" << suite.focus_set.size() << " k=" << suite.k
            << "\n";
  for (const auto& row : suite.rows) {
    std::cout << (row.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(44)
              << row.name << " observed " << std::setw(22)
              << ftfl::fmt_double(row.observed) << " required " << row.relation << " "
              << ftfl::fmt_double(row.requirement) << "\n";
  }
  if (!suite.all_pass()) {
    std::cerr << "statistical failure: at least one property row failed\n";
    return 3;
  }
  return 0;
}

int cmd_bench(const std::vector<std::string>& args) {
  po::options_description desc("ftfl bench <dir> [options]");
  desc.add_options()                                                              //
      ("help,h", "show this help")                                                //
      ("dir", po::value<std::string>(), "directory of *.ftfl instances")          //
      ("trials", po::value<long long>()->default_value(1000), "trials per instance")  //
      ("seed", po::value<std::uint64_t>()->default_value(0), "RNG seed")              //
      ("gamma", po::value<double>(), "scale-factor override, strictly in (1,2)")      //
      ("out", po::value<std::string>(), "CSV output file (default: stdout)");
  po::positional_options_description pos;
  pos.add("dir", 1);
  po::variables_map vm;
  if (!parse_or_help(desc, pos, args, vm)) return 0;
  if (!vm.count("dir")) throw ftfl::InvalidInputError("bench needs a directory");

  const std::string dir = vm["dir"].as<std::string>();
  if (!fs::is_directory(dir))
    throw ftfl::InvalidInputError("not a directory: " + dir);
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".ftfl")
      paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  if (paths.empty())
    throw ftfl::InvalidInputError("no .ftfl instances in " + dir);

  const long long trials = vm["trials"].as<long long>();
  if (trials < 1) throw ftfl::InvalidInputError("--trials must be at least 1");
  const std::uint64_t seed = vm["seed"].as<std::uint64_t>();

  std::vector<ftfl::BenchRow> rows;
  for (const std::string& path : paths) {
    const ftfl::Instance inst = ftfl::parse_instance(read_file(path));
    ftfl::BenchRow row;
    row.instance = path;
    row.m = inst.m;
    row.n = inst.n;
    row.rmax = inst.max_requirement();
    row.rep = ftfl::ratio_report(inst, trials, seed, inst.m <= 20, gamma_of(vm));
    rows.push_back(std::move(row));
  }
  if (vm.count("out")) {
    std::ofstream out(vm["out"].as<std::string>(), std::ios::binary);
    if (!out) throw ftfl::InvalidInputError("cannot write " + vm["out"].as<std::string>());
    ftfl::emit_csv(rows, out);
  } else {
    ftfl::emit_csv(rows, std::cout);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty()) {
    usage(std::cerr);
    return 1;
  }
  const std::string cmd = args[0];
  if (cmd == "--help" || cmd == "-h" || cmd == "help") {
    usage(std::cout);
    return 0;
  }
  const std::vector<std::string> rest(args.begin() + 1, args.end());
  try {
    if (cmd == "solve") return cmd_solve(rest);
    if (cmd == "lp") return cmd_lp(rest);
    if (cmd == "exact") return cmd_exact(rest);
    if (cmd == "gen") return cmd_gen(rest);
    if (cmd == "verify-rounding") return cmd_verify(rest);
    if (cmd == "bench") return cmd_bench(rest);
    std::cerr << "unknown command: " << cmd << "\n\n";
    usage(std::cerr);
    return 1;
  } catch (const po::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ftfl::InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const ftfl::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  } catch (const ftfl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 2;
  }
}
