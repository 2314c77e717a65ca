#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hi2c/allocators.hpp"
#include "hi2c/harness/workload.hpp"

namespace hi2c::harness {

struct Snapshot {
  std::uint64_t op_index = 0;
  Rational overload;
  Rational cumulative_overload;
  std::uint64_t max_load = 0;
  std::optional<RoundDiagnostics> rounds;
};

struct TrialReport {
  std::uint64_t trial = 0;
  std::vector<std::uint64_t> recourse;  // recourse[k] belongs to op k + 1
  std::vector<Snapshot> snapshots;
};

struct Summary {
  std::uint64_t count = 0;
  double mean = 0;
  double p50 = 0;
  double p95 = 0;
  double max = 0;
};

/// Nearest-rank percentiles.
inline Summary summarize(std::vector<double> xs) {
  Summary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  std::sort(xs.begin(), xs.end());
  double total = 0;
  for (double x : xs) total += x;
  s.mean = total / static_cast<double>(xs.size());
  auto rank = [&](double p) {
    const auto r = static_cast<std::size_t>(std::ceil(p * static_cast<double>(xs.size())));
    return xs[std::max<std::size_t>(r, 1) - 1];
  };
  s.p50 = rank(0.50);
  s.p95 = rank(0.95);
  s.max = xs.back();
  return s;
}

struct RunReport {
  std::string run_id;
  WorkloadSpec spec;
  std::vector<TrialReport> trials;
  Summary recourse;
  Summary overload;
  Summary cumulative_overload;
  Summary max_load;

  void recompute_summaries() {
    std::vector<double> r, o, c, l;
    for (const auto& t : trials) {
      for (auto x : t.recourse) r.push_back(static_cast<double>(x));
      for (const auto& s : t.snapshots) {
        o.push_back(s.overload.to_double());
        c.push_back(s.cumulative_overload.to_double());
        l.push_back(static_cast<double>(s.max_load));
      }
    }
    recourse = summarize(r);
    overload = summarize(o);
    cumulative_overload = summarize(c);
    max_load = summarize(l);
  }
};

inline std::string run_id_of(const WorkloadSpec& s) {
  return std::string(name_of(s.allocator)) + "-n" + std::to_string(s.n) + "-m" + std::to_string(s.m) + "-" +
         std::string(name_of(s.churn));
}

inline Snapshot snapshot_of(std::uint64_t op_index, const Allocation& a, std::optional<RoundDiagnostics> rounds = {}) {
  const auto lv = loads(a);
  return {op_index, overload(lv, a.cfg), cumulative_overload(lv, a.cfg), lv.max(), std::move(rounds)};
}

/// Recomputes the allocation after every op and records recourse against
/// the previous one. Load metrics every `snapshot_every` ops and after the last.
template <BallOracle O>
TrialReport replay(const Trace& trace, AllocatorKind kind, const O& oracle, std::uint64_t snapshot_every = 16,
                   std::uint64_t trial = 0) {
  TrialReport rep;
  rep.trial = trial;
  if (trace.ops.empty()) return rep;
  BallSet current = trace.initial;
  auto compute = [&](std::optional<RoundDiagnostics>* rounds) {
    if (kind == AllocatorKind::slice_spread) {
      auto r = allocate_slice_spread(current, trace.cfg, oracle);
      if (rounds) *rounds = std::move(r.diagnostics);
      return std::move(r.allocation);
    }
    if (kind == AllocatorKind::full) {
      auto r = full_allocate(current, trace.cfg, oracle);
      if (rounds) *rounds = std::move(r.pre.diagnostics);
      return std::move(r.allocation);
    }
    return allocate(kind, current, trace.cfg, oracle);
  };
  Allocation prev = compute(nullptr);
  for (std::uint64_t k = 0; k < trace.ops.size(); ++k) {
    apply(current, trace.ops[k]);
    std::optional<RoundDiagnostics> rounds;
    Allocation next = compute(&rounds);
    rep.recourse.push_back(recourse(prev, next));
    const std::uint64_t op_index = k + 1;
    if (op_index % snapshot_every == 0 || op_index == trace.ops.size())
      rep.snapshots.push_back(snapshot_of(op_index, next, std::move(rounds)));
    prev = std::move(next);
  }
  return rep;
}

/// All trials of a spec, run concurrently and merged in trial order.
inline RunReport run(const WorkloadSpec& spec) {
  spec.validate();
  RunReport report{run_id_of(spec), spec, {}, {}, {}, {}, {}};
  const MasterSeed seed = spec.seed();
  std::vector<std::future<TrialReport>> jobs;
  for (std::uint64_t t = 0; t < spec.trials; ++t) {
    jobs.push_back(std::async(std::launch::async, [&spec, seed, t] {
      const Oracle oracle = trial_oracle(seed, t);
      return replay(generate_trace(spec, t), spec.allocator, oracle, spec.snapshot_every, t);
    }));
  }
  for (auto& j : jobs) report.trials.push_back(j.get());
  report.recompute_summaries();
  return report;
}

inline std::string format_double(double x) {
  std::ostringstream out;
  out.precision(10);
  out << x;
  return out.str();
}

inline constexpr const char* kCsvHeader = "run_id,trial,op_index,recourse,overload,cumulative_overload,max_load\n";

/// Summary rows carry the statistic name in the trial column and "summary"
/// in the op_index column.
inline std::string summary_csv_rows(const RunReport& r) {
  std::string out;
  const std::pair<const char*, double Summary::*> stats[] = {
      {"mean", &Summary::mean}, {"p50", &Summary::p50}, {"p95", &Summary::p95}, {"max", &Summary::max}};
  for (const auto& [label, field] : stats) {
    out += r.run_id + ',' + label + ",summary," + format_double(r.recourse.*field) + ',' +
           format_double(r.overload.*field) + ',' + format_double(r.cumulative_overload.*field) + ',' +
           format_double(r.max_load.*field) + '\n';
  }
  return out;
}

/// One row per op; load columns are filled on snapshot ops only.
inline std::string to_csv(const RunReport& r, bool header = true) {
  std::string out = header ? kCsvHeader : "";
  for (const auto& t : r.trials) {
    std::size_t snap = 0;
    for (std::size_t k = 0; k < t.recourse.size(); ++k) {
      const std::uint64_t op_index = k + 1;
      out += r.run_id + ',' + std::to_string(t.trial) + ',' + std::to_string(op_index) + ',' +
             std::to_string(t.recourse[k]) + ',';
      if (snap < t.snapshots.size() && t.snapshots[snap].op_index == op_index) {
        const auto& s = t.snapshots[snap++];
        out += format_double(s.overload.to_double()) + ',' + format_double(s.cumulative_overload.to_double()) + ',' +
               std::to_string(s.max_load);
      } else {
        out += ",,";
      }
      out += '\n';
    }
  }
  out += summary_csv_rows(r);
  return out;
}

inline nlohmann::json to_json(const Summary& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"p50", s.p50}, {"p95", s.p95}, {"max", s.max}};
}

inline nlohmann::json to_json(const RoundDiagnostics& d) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : d.rounds)
    rounds.push_back({{"round", r.round},
                      {"tau", r.tau},
                      {"rethrown", r.rethrown},
                      {"in_bins", r.in_bins},
                      {"under_error", r.under_error},
                      {"over_error", r.over_error}});
  return {{"ball_count", d.ball_count}, {"n", d.n}, {"accounting_holds", d.accounting_holds()}, {"rounds", rounds}};
}

inline nlohmann::json to_json(const WorkloadSpec& s) {
  return {{"n", s.n},
          {"m", s.m},
          {"allocator", name_of(s.allocator)},
          {"ops", s.ops},
          {"churn", name_of(s.churn)},
          {"seed", s.seed_hex},
          {"trials", s.trials},
          {"snapshot_every", s.snapshot_every},
          {"pool", s.pool}};
}

inline nlohmann::json to_json(const RunReport& r) {
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : r.trials) {
    nlohmann::json snaps = nlohmann::json::array();
    for (const auto& s : t.snapshots) {
      nlohmann::json j = {{"op_index", s.op_index},
                          {"overload", s.overload.str()},
                          {"cumulative_overload", s.cumulative_overload.str()},
                          {"max_load", s.max_load}};
      if (s.rounds) j["rounds"] = to_json(*s.rounds);
      snaps.push_back(std::move(j));
    }
    trials.push_back({{"trial", t.trial}, {"recourse", t.recourse}, {"snapshots", snaps}});
  }
  return {{"run_id", r.run_id},
          {"spec", to_json(r.spec)},
          {"trials", trials},
          {"summary",
           {{"recourse", to_json(r.recourse)},
            {"overload", to_json(r.overload)},
            {"cumulative_overload", to_json(r.cumulative_overload)},
            {"max_load", to_json(r.max_load)}}}};
}

/// Census, fail-set sizes, swap failure counts and dummy inventory.
inline nlohmann::json diagnostics_json(const FullResult& r) {
  const auto n = r.allocation.cfg.n;
  nlohmann::json bins = nlohmann::json::array();
  for (Bin i = 0; i < n; ++i) {
    nlohmann::json c = nlohmann::json::array();
    for (int j = 1; j <= 3; ++j) c.push_back({r.census.count(i, j, 1), r.census.count(i, j, 2)});
    bins.push_back({{"bin", i},
                    {"census", c},
                    {"phase1_failures", r.swap.phase1_failures[i]},
                    {"phase2_failures", r.swap.phase2_failures[i]},
                    {"fsafe_count", r.fsafe_counts[i]}});
  }
  nlohmann::json sets = nlohmann::json::object();
  for (const auto& f : r.fail.sets) sets[f.name()] = f.members.size();
  auto dummies = [](const std::vector<SwapDummy>& ds) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& d : ds) out.push_back({{"id", d.id}, {"bin", d.bin}, {"tape", d.tape}, {"second", d.second}});
    return out;
  };
  return {{"n", n},
          {"m", r.allocation.cfg.m},
          {"bins", bins},
          {"fail_sets", sets},
          {"fail_union", r.fail.all.size()},
          {"B", r.swap.B.size()},
          {"p1_real", r.swap.p1_real.size()},
          {"bprime_real", r.swap.bprime_real.size()},
          {"phase1_dummies", dummies(r.swap.p1_dummies)},
          {"phase2_dummies", dummies(r.swap.bprime_dummies)},
          {"fsafe", r.fsafe},
          {"rounds", to_json(r.pre.diagnostics)}};
}

}  // namespace hi2c::harness
