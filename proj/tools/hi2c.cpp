// Command-line front end: run, sweep, verify, orient-oracle.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "hi2c/harness/graphs.hpp"
#include "hi2c/harness/replay.hpp"
#include "hi2c/harness/verify.hpp"

namespace {

using namespace hi2c;
using namespace hi2c::harness;

struct WorkloadFlags {
  std::string alloc = "hi-greedy";
  std::uint64_t m = 0;
  std::uint64_t ops = 1000;
  std::string mode = "uniform-churn";
  std::string seed = std::string(kDefaultSeedHex);
  std::uint64_t trials = 1;
  std::uint64_t snapshot_every = 16;
  std::uint64_t pool = 4;
  std::string format = "csv";
  std::string out;
};

void add_workload_flags(CLI::App* app, WorkloadFlags& f) {
  app->add_option("--alloc", f.alloc, "single | hi-greedy | slice-spread | full")
      ->check(CLI::IsMember({"single", "hi-greedy", "slice-spread", "full"}))
      ->capture_default_str();
  app->add_option("--ops", f.ops, "operations per trial")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--mode", f.mode, "churn mode")
      ->check(CLI::IsMember({"uniform-churn", "reinsertion-heavy", "sliding-window"}))
      ->capture_default_str();
  app->add_option("--seed", f.seed, "64 hex characters")->envname("HI2C_SEED")->capture_default_str();
  app->add_option("--trials", f.trials)->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--snapshot-every", f.snapshot_every)->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--pool", f.pool, "recycled ids for reinsertion-heavy")->capture_default_str();
  app->add_option("--format", f.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app->add_option("--out", f.out, "output file (default stdout)");
  app->set_config("--config", "", "key=value file with any of these flags");
}

WorkloadSpec spec_from(const WorkloadFlags& f, std::uint64_t n, std::uint64_t m) {
  WorkloadSpec s;
  s.n = n;
  s.m = m;
  s.allocator = parse_allocator(f.alloc);
  s.ops = f.ops;
  s.churn = parse_churn(f.mode);
  s.seed_hex = f.seed;
  s.trials = f.trials;
  s.snapshot_every = f.snapshot_every;
  s.pool = f.pool;
  s.validate();
  return s;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"History-independent two-choice allocation experiments"};
  app.require_subcommand(1);

  WorkloadFlags run_flags;
  std::uint64_t run_n = 256, run_mu = 16;
  auto* run_cmd = app.add_subcommand("run", "replay a churn workload and report recourse and overload");
  add_workload_flags(run_cmd, run_flags);
  run_cmd->add_option("--n", run_n, "bins")->check(CLI::PositiveNumber)->capture_default_str();
  run_cmd->add_option("--mu", run_mu, "balls per bin, m = n * mu")->check(CLI::PositiveNumber)->capture_default_str();
  run_cmd->add_option("--m", run_flags.m, "capacity, overrides --mu");

  WorkloadFlags sweep_flags;
  std::vector<std::uint64_t> sweep_n{256}, sweep_mu{16};
  auto* sweep_cmd = app.add_subcommand("sweep", "one summary row per (n, mu) grid point");
  add_workload_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--n", sweep_n, "bins, comma separated")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--mu", sweep_mu, "densities, comma separated")->delimiter(',')->capture_default_str();

  std::string suite = "all";
  std::string verify_seed = std::string(kDefaultSeedHex);
  VerifyParams vp;
  auto* verify_cmd = app.add_subcommand("verify", "run invariant suites");
  std::vector<std::string> suite_names{"all"};
  for (const auto& [name, fn] : verify_suites()) suite_names.push_back(name);
  verify_cmd->add_option("--suite", suite)->check(CLI::IsMember(suite_names))->capture_default_str();
  verify_cmd->add_option("--trials", vp.trials, "0 = suite default");
  verify_cmd->add_option("--n", vp.n, "0 = suite default");
  verify_cmd->add_option("--mu", vp.mu, "0 = suite default");
  verify_cmd->add_option("--seed", verify_seed)->envname("HI2C_SEED");

  std::uint64_t oracle_trials = 1000, oracle_n = 16;
  std::uint32_t oracle_edges = 10;
  std::string oracle_seed = std::string(kDefaultSeedHex);
  bool oracle_dump = false;
  auto* oracle_cmd = app.add_subcommand("orient-oracle", "compare component orientation with exhaustive search");
  oracle_cmd->add_option("--trials", oracle_trials)->capture_default_str();
  oracle_cmd->add_option("--n", oracle_n, "bins")->check(CLI::PositiveNumber)->capture_default_str();
  oracle_cmd->add_option("--max-edges", oracle_edges)->check(CLI::Range(1, 16))->capture_default_str();
  oracle_cmd->add_option("--seed", oracle_seed)->envname("HI2C_SEED");
  oracle_cmd->add_flag("--dump", oracle_dump, "print every graph with its orientation");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const auto spec = spec_from(run_flags, run_n, run_flags.m ? run_flags.m : run_n * run_mu);
      const auto report = run(spec);
      emit(run_flags.format == "csv" ? to_csv(report) : to_json(report).dump(2) + "\n", run_flags.out);
      return 0;
    }
    if (*sweep_cmd) {
      std::string csv = kCsvHeader;
      nlohmann::json rows = nlohmann::json::array();
      for (auto n : sweep_n) {
        for (auto mu : sweep_mu) {
          const auto report = run(spec_from(sweep_flags, n, n * mu));
          csv += report.run_id + ",mean,summary," + format_double(report.recourse.mean) + ',' +
                 format_double(report.overload.mean) + ',' + format_double(report.cumulative_overload.mean) + ',' +
                 format_double(report.max_load.mean) + '\n';
          auto j = to_json(report);
          j.erase("trials");
          rows.push_back(std::move(j));
        }
      }
      emit(sweep_flags.format == "csv" ? csv : rows.dump(2) + "\n", sweep_flags.out);
      return 0;
    }
    if (*verify_cmd) {
      vp.seed = MasterSeed::from_hex(verify_seed);
      bool ok = true;
      for (const auto& [name, fn] : verify_suites()) {
        if (suite != "all" && suite != name) continue;
        const auto r = fn(vp);
        std::cout << (r.passed() ? "PASS " : "FAIL ") << name << " checks=" << r.checks << " failures=" << r.failures
                  << '\n';
        if (!r.passed()) std::cout << "  first failure: " << r.first_failure << '\n';
        ok = ok && r.passed();
      }
      return ok ? 0 : 1;
    }
    if (*oracle_cmd) {
      Rng rng(MasterSeed::from_hex(oracle_seed).derive("orient-oracle", 0));
      std::uint64_t mismatches = 0;
      for (std::uint64_t k = 0; k < oracle_trials; ++k) {
        const CuckooGraph g = random_component(rng, oracle_n, oracle_edges, 8);
        const Orientation o{orient_component(g, components(g).at(0))};
        const auto deg = in_degrees(g, o);
        const auto got = *std::max_element(deg.begin(), deg.end());
        const auto want = brute_min_max_indegree(g.edges, g.n);
        if (got != want) ++mismatches;
        if (oracle_dump || got != want)
          std::cout << "# component " << k << " flow=" << got << " exhaustive=" << want << '\n' << graph_dump(g, o);
      }
      std::cout << "compared " << oracle_trials << " components, mismatches " << mismatches << '\n';
      return mismatches == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
