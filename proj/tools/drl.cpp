// drl: run campaigns, explore, replay traces, run golden scenarios and detect
// over dumped snapshot stores.
//
// Exit codes: 0 clean, 1 violations or divergence, 2 usage or I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "drl/explore.hpp"
#include "drl/hash.hpp"
#include "drl/json.hpp"
#include "drl/run.hpp"
#include "drl/scenarios.hpp"

namespace fs = std::filesystem;
using namespace drl;

namespace {

constexpr int kClean = 0;
constexpr int kViolations = 1;
constexpr int kIoError = 2;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write to " + path.string() + " failed");
}

struct SimulateOptions {
  std::uint64_t seed = 0;
  std::uint64_t runs = 1;
  std::uint32_t max_events = 300;
  std::uint32_t max_actors = 6;
  std::uint32_t max_refobs = 2;
  std::uint32_t max_injections = 8;
  std::string policy = "final-action";
  std::int64_t allow_in_until = -1;
  std::uint32_t check_every = 1;
  std::uint32_t detect_every = 10;
  std::string scheduler = "rule";
  double in_probability = 0.1;
  bool self_destruct = false;
  bool no_sweep = false;
  std::uint32_t msg_samples = 0;
  bool dump_stores = false;
  std::string out;
};

int cmd_simulate(const SimulateOptions& o) {
  RunConfig base;
  base.bounds.max_actors = o.max_actors;
  base.bounds.max_events_per_run = o.max_events;
  base.bounds.max_refobs_per_message = o.max_refobs;
  base.bounds.max_external_injections = o.max_injections;
  base.policy = SnapshotPolicy::parse(o.policy);
  if (o.allow_in_until >= 0) {
    base.bounds.allow_in = true;
    base.allow_in_until = static_cast<EventIndex>(o.allow_in_until);
  }
  base.check_every = o.check_every;
  base.detect_every = o.detect_every;
  base.scheduler = scheduler_from_name(o.scheduler);
  base.in_probability = o.in_probability;
  base.self_destruct = o.self_destruct;
  base.final_sweep = !o.no_sweep;
  base.msg_count_samples = o.msg_samples;
  base.keep_history = o.msg_samples > 0;

  const fs::path out_dir = o.out;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir / "traces");
    if (o.dump_stores) fs::create_directories(out_dir / "stores");
  }

  CampaignSummary summary;
  json runs = json::array();
  for (std::uint64_t i = 0; i < o.runs; ++i) {
    RunConfig config = base;
    config.seed = o.seed + i;
    const auto result = run_random(config);
    summary.add(result.report);
    runs.push_back(to_json_value(result.report));
    if (!out_dir.empty()) {
      std::ostringstream trace;
      write_trace(trace, config, result.trace, result.finished);
      write_file(out_dir / "traces" / ("run-" + std::to_string(config.seed) + ".jsonl"), trace.str());
      if (o.dump_stores) {
        write_file(out_dir / "stores" / ("run-" + std::to_string(config.seed) + ".json"), json(result.store).dump(2) + "\n");
      }
    }
  }

  const json summary_json = to_json_value(summary);
  if (!out_dir.empty()) {
    write_file(out_dir / "report.json", json{{"summary", summary_json}, {"runs", runs}}.dump(2) + "\n");
  }
  std::printf("%-28s %12s\n", "runs", std::to_string(summary.runs).c_str());
  std::printf("%-28s %12s\n", "chosen events", std::to_string(summary.chosen_events).c_str());
  std::printf("%-28s %12s\n", "violations", std::to_string(summary.violations()).c_str());
  for (const auto& [check, n] : summary.violations_by_check) {
    std::printf("  %-26s %12s\n", check.c_str(), std::to_string(n).c_str());
  }
  std::printf("%-28s %12s\n", "terminated at end", std::to_string(summary.terminated_at_end).c_str());
  std::printf("%-28s %12s\n", "detections", std::to_string(summary.detections).c_str());
  std::printf("%-28s %12.2f\n", "mean detection latency", summary.mean_detection_latency());
  std::printf("%-28s %12s\n", "liveness misses", std::to_string(summary.liveness_misses).c_str());
  std::printf("%-28s %12s\n", "msg-count samples", std::to_string(summary.msg_count_samples).c_str());
  return summary.violations() == 0 ? kClean : kViolations;
}

struct ExploreOptions {
  std::uint32_t depth = 8;
  std::uint32_t max_actors = 3;
  std::uint32_t max_refobs = 2;
  int allow_in = 0;
  std::uint32_t max_injections = 1;
  std::string snapshots = "final-action";
  std::string mutation = "none";
  std::uint64_t budget = 0;
  std::uint64_t seconds = 0;
  bool no_symmetry = false;
  std::string out;
};

int cmd_explore(const ExploreOptions& o) {
  ExploreConfig c;
  c.bounds.max_actors = o.max_actors;
  c.bounds.max_refobs_per_message = o.max_refobs;
  c.bounds.allow_in = o.allow_in != 0;
  c.bounds.max_external_injections = o.max_injections;
  c.max_depth = o.depth;
  c.snapshots = explore_snapshots_from_name(o.snapshots);
  c.mutation = mutation_from_name(o.mutation);
  c.state_budget = o.budget;
  c.time_budget = std::chrono::seconds(o.seconds);
  c.symmetry = !o.no_symmetry;
  const auto r = explore_exhaustive(c);

  json violations = json::array();
  for (const auto& v : r.violations) {
    json path = json::array();
    for (const auto& e : v.path) path.push_back(to_string(e));
    violations.push_back(json{{"check", v.check}, {"detail", v.detail}, {"path", path}});
  }
  const json report{{"depth", o.depth},
                    {"max_actors", o.max_actors},
                    {"max_refobs_per_message", o.max_refobs},
                    {"allow_in", c.bounds.allow_in},
                    {"snapshots", o.snapshots},
                    {"mutation", o.mutation},
                    {"symmetry", c.symmetry},
                    {"states", r.states},
                    {"transitions", r.transitions},
                    {"revisits", r.revisits},
                    {"finalized_subsets_checked", r.finalized_subsets_checked},
                    {"rule_coverage", r.rule_coverage},
                    {"violation_count", r.violation_count},
                    {"violations", violations},
                    {"complete", r.complete}};
  if (!o.out.empty()) write_file(o.out, report.dump(2) + "\n");

  std::printf("states visited      %llu\n", static_cast<unsigned long long>(r.states));
  std::printf("transitions         %llu\n", static_cast<unsigned long long>(r.transitions));
  std::printf("complete            %s\n", r.complete ? "yes" : "no (budget reached)");
  std::printf("rule coverage\n");
  for (std::size_t i = 0; i < kRuleCount; ++i) {
    const std::string name(rule_name(static_cast<Rule>(i)));
    auto it = r.rule_coverage.find(name);
    std::printf("  %-12s %llu\n", name.c_str(),
                static_cast<unsigned long long>(it == r.rule_coverage.end() ? 0 : it->second));
  }
  std::printf("violations          %llu\n", static_cast<unsigned long long>(r.violation_count));
  for (const auto& v : r.violations) {
    std::printf("  %s: %s\n", v.check.c_str(), v.detail.c_str());
    for (const auto& e : v.path) std::printf("    %s\n", to_string(e).c_str());
  }
  return r.violation_count == 0 ? kClean : kViolations;
}

int cmd_replay(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file);
  const Trace trace = read_trace(in);
  try {
    const auto result = replay(trace);
    std::printf("replayed %zu entries%s, final hash %s\n", result.trace.size(), trace.complete ? "" : " (truncated trace)",
                hex_digest(result.report.final_hash).c_str());
    std::printf("violations %zu\n", result.report.violations.size());
    for (const auto& v : result.report.violations) {
      std::printf("  [%llu] %s: %s\n", static_cast<unsigned long long>(v.at), v.check.c_str(), v.detail.c_str());
    }
    return result.report.violations.empty() ? kClean : kViolations;
  } catch (const ReplayDivergence& d) {
    std::fprintf(stderr, "%s\n", d.what());
    return kViolations;
  }
}

int cmd_scenario(const std::string& name) {
  std::vector<Scenario> selected;
  if (name == "all") {
    selected = workload_scenarios();
  } else if (const auto* s = find_scenario(name)) {
    selected.push_back(*s);
  } else {
    std::fprintf(stderr, "unknown scenario %s; known:", name.c_str());
    for (const auto& s : workload_scenarios()) std::fprintf(stderr, " %s", s.name.c_str());
    std::fprintf(stderr, "\n");
    return kIoError;
  }
  bool ok = true;
  for (const auto& s : selected) {
    const auto outcome = s.run();
    std::printf("%s %s: %s\n", outcome.passed ? "PASS" : "FAIL", s.name.c_str(), s.summary.c_str());
    for (const auto& n : outcome.notes) std::printf("  %s\n", n.c_str());
    for (const auto& f : outcome.failures) std::printf("  failed: %s\n", f.c_str());
    ok = ok && outcome.passed;
  }
  return ok ? kClean : kViolations;
}

int cmd_detect(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file);
  SnapshotStore store;
  try {
    store = json::parse(in).get<SnapshotStore>();
  } catch (const json::exception& e) {
    throw IoError(file + ": " + e.what());
  }
  const auto found = detect(store);
  std::printf("%s\n", json{{"snapshots", store.size()}, {"detected", found}}.dump().c_str());
  return kClean;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deferred reference listing: simulation, exploration and replay"};
  app.set_config("--config", "", "key=value file with default flag values");
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run seeded random executions with runtime checks");
  simulate->add_option("--seed", sim.seed, "First seed; run i uses seed+i");
  simulate->add_option("--runs", sim.runs)->check(CLI::PositiveNumber);
  simulate->add_option("--max-events", sim.max_events, "Chosen events per run");
  simulate->add_option("--max-actors", sim.max_actors)->check(CLI::Range(1u, 1000u));
  simulate->add_option("--max-refobs-per-msg", sim.max_refobs);
  simulate->add_option("--max-injections", sim.max_injections, "In events per run");
  simulate->add_option("--snapshot-policy", sim.policy, "final-action | periodic:N | never")
      ->check([](const std::string& s) {
        try {
          SnapshotPolicy::parse(s);
          return std::string();
        } catch (const std::invalid_argument& e) {
          return std::string(e.what());
        }
      });
  simulate->add_option("--allow-in-until", sim.allow_in_until, "Enable In events until this many chosen events");
  simulate->add_option("--check-every", sim.check_every, "0 disables per-step checks");
  simulate->add_option("--detect-every", sim.detect_every, "0 disables periodic detection");
  simulate->add_option("--scheduler", sim.scheduler)->check(CLI::IsMember({"rule", "instance"}));
  simulate->add_option("--in-probability", sim.in_probability)->check(CLI::Range(0.0, 1.0));
  simulate->add_flag("--self-destruct", sim.self_destruct, "Remove detected actors");
  simulate->add_flag("--no-sweep", sim.no_sweep, "Skip the final snapshot sweep");
  simulate->add_option("--msg-count-samples", sim.msg_samples, "Message-count lemma samples per run");
  simulate->add_flag("--dump-stores", sim.dump_stores, "Write each run's final snapshot store");
  simulate->add_option("--out", sim.out, "Output directory")->envname("DRL_OUT");

  ExploreOptions ex;
  auto* explore = app.add_subcommand("explore", "Exhaustively explore bounded interleavings");
  explore->add_option("--depth", ex.depth);
  explore->add_option("--max-actors", ex.max_actors)->check(CLI::Range(1u, 16u));
  explore->add_option("--max-refobs-per-msg", ex.max_refobs);
  explore->add_option("--allow-in", ex.allow_in)->check(CLI::Range(0, 1));
  explore->add_option("--max-injections", ex.max_injections);
  explore->add_option("--snapshots", ex.snapshots)->check(CLI::IsMember({"final-action", "choice", "never"}));
  explore->add_option("--budget", ex.budget, "Stop after this many states (0: no limit)");
  explore->add_option("--seconds", ex.seconds, "Stop after this much wall time (0: no limit)");
  explore->add_flag("--no-symmetry", ex.no_symmetry, "Do not identify states equal up to token renaming");
  explore->add_option("--out", ex.out, "Write the report as JSON to this file");
  explore->add_option("--mutation", ex.mutation)
      ->check(CLI::IsMember({"none", "skip-inc-sent", "skip-created-using"}))
      ->group("");

  std::string trace_file;
  auto* replay_cmd = app.add_subcommand("replay", "Replay a trace and verify every hash");
  replay_cmd->add_option("trace", trace_file)->required();

  std::string scenario_name;
  auto* scenario = app.add_subcommand("scenario", "Run a golden scenario (or 'all')");
  scenario->add_option("name", scenario_name)->required();

  std::string store_file;
  auto* detect_cmd = app.add_subcommand("detect", "Run detection over a dumped snapshot store");
  detect_cmd->add_option("store", store_file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kClean : kIoError;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*explore) return cmd_explore(ex);
    if (*replay_cmd) return cmd_replay(trace_file);
    if (*scenario) return cmd_scenario(scenario_name);
    if (*detect_cmd) return cmd_detect(store_file);
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIoError;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIoError;
  }
  return kIoError;
}
