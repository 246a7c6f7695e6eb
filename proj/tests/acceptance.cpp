// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "drl/explore.hpp"
#include "drl/run.hpp"
#include "drl/scenarios.hpp"
#include "support.hpp"

namespace {

using namespace drl;
using Clock = std::chrono::steady_clock;

struct Options {
  std::uint64_t runs = 1000;
  std::uint32_t in_cutoff = 150;
  std::uint32_t explore_depth = 8;
  std::uint64_t explore_seconds = 600;
  std::uint64_t stores = 500;
  std::uint64_t lemma_runs = 100;
  std::uint32_t lemma_samples_per_run = 20;
  std::uint64_t replay_runs = 100;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int digits = 1) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

RunConfig campaign_config(std::uint64_t seed, std::uint32_t in_cutoff) {
  RunConfig c;  // 6 actors, 300 events, final-action snapshots, detect every 10
  c.seed = seed;
  c.bounds.allow_in = true;
  c.allow_in_until = in_cutoff;
  c.final_sweep = true;
  return c;
}

struct Campaign {
  CampaignSummary summary;
  std::uint64_t terminated_actors = 0;
  double seconds = 0;
};

Campaign run_campaign(const Options& o) {
  Campaign out;
  const auto start = Clock::now();
  for (std::uint64_t seed = 0; seed < o.runs; ++seed) {
    const auto r = run_random(campaign_config(seed, o.in_cutoff));
    out.summary.add(r.report);
    out.terminated_actors += r.report.final_terminated.size();
  }
  out.seconds = seconds_since(start);
  return out;
}

std::uint64_t violations_of(const CampaignSummary& s, const std::string& check) {
  auto it = s.violations_by_check.find(check);
  return it == s.violations_by_check.end() ? 0 : it->second;
}

Outcome safety(const Campaign& c) {
  const auto unsafe = violations_of(c.summary, "safety");
  return {unsafe == 0 && c.summary.runs > 0,
          std::to_string(c.summary.runs) + " runs, " + std::to_string(c.summary.chosen_events) +
              " chosen events, " + std::to_string(unsafe) + " detections outside the terminated set, " +
              std::to_string(c.summary.violations()) + " violations of any check, " + fixed(c.seconds) + " s"};
}

Outcome liveness(const Campaign& c, const Options& o) {
  const auto misses = c.summary.liveness_misses;
  return {misses == 0 && c.terminated_actors > 0,
          "In cut off at event " + std::to_string(o.in_cutoff) + ", " + std::to_string(c.terminated_actors) +
              " terminated actors at run end, " + std::to_string(misses) + " missing from the final detect"};
}

Outcome chain_lemma(const Options& o) {
  ExploreConfig config;
  config.bounds = ExplorationBounds{3, 0, 2, 1, false};
  config.max_depth = o.explore_depth;
  config.time_budget = std::chrono::seconds(o.explore_seconds);
  const auto start = Clock::now();
  const auto r = explore_exhaustive(config);
  std::uint64_t chain_violations = 0;
  for (const auto& v : r.violations) chain_violations += v.check == "chain-lemma";
  std::string detail = "depth " + std::to_string(o.explore_depth) + ", 3 internal actors, 2 refobs per message: " +
                       std::to_string(r.states) + " states visited, " + std::to_string(r.transitions) +
                       " transitions, " + std::to_string(chain_violations) + " chain-lemma violations, " +
                       std::to_string(r.violation_count) + " violations of any check, " + fixed(seconds_since(start)) +
                       " s";
  if (!r.complete) detail += "; INCOMPLETE: stopped at the " + std::to_string(o.explore_seconds) + " s budget";
  return {r.complete && r.violation_count == 0, detail};
}

Outcome simple_garbage(const Campaign& c) {
  const auto bad = violations_of(c.summary, "simple-garbage");
  return {bad == 0 && c.summary.simple_garbage_positives > 0,
          std::to_string(c.summary.simple_garbage_positives) + " idle actors passed the local test at check points, " +
              std::to_string(bad) + " of them not terminated"};
}

Outcome maximum_finalized(const Options& o) {
  std::uint64_t mismatches = 0, corrupted_mismatches = 0, ambiguous = 0, proper = 0, unfinalized = 0;
  for (std::uint64_t seed = 0; seed < o.stores; ++seed) {
    const auto q = testing::random_store(seed, 8);
    const auto best = testing::brute_largest_finalized(q);
    const auto m = maximum_finalized_subset(q);
    unfinalized += !is_finalized(m);
    proper += m.size() < q.size();
    if (best.size() != 1) {
      ++ambiguous;
      continue;
    }
    if (m != best.front()) {
      ++mismatches;
      corrupted_mismatches += q != testing::random_store(seed, 8, testing::Corruption::Never);
    }
  }
  return {mismatches == 0 && ambiguous == 0,
          std::to_string(o.stores) + " stores of at most 8 members, " + std::to_string(proper) +
              " with a proper maximum, " + std::to_string(mismatches) + " mismatches (" +
              std::to_string(corrupted_mismatches) + " on corrupted stores), " + std::to_string(ambiguous) +
              " without a unique largest subset, " + std::to_string(unfinalized) + " pruning results not finalized"};
}

Outcome message_counts(const Options& o) {
  std::uint64_t samples = 0, mismatches = 0;
  for (std::uint64_t seed = 0; seed < o.lemma_runs; ++seed) {
    RunConfig c = campaign_config(seed, o.in_cutoff);
    c.keep_history = true;
    c.msg_count_samples = o.lemma_samples_per_run;
    const auto r = run_random(c);
    samples += r.report.stats.msg_count_samples;
    mismatches += r.report.stats.msg_count_mismatches;
  }
  return {mismatches == 0 && samples > 0, std::to_string(o.lemma_runs) + " runs, " + std::to_string(samples) +
                                              " sampled (refob, t1, t2) triples, " + std::to_string(mismatches) +
                                              " mismatches"};
}

Outcome golden_scenarios() {
  std::uint64_t passed = 0;
  std::string failed;
  const auto all = workload_scenarios();
  for (const auto& s : all) {
    const auto outcome = s.run();
    if (outcome.passed) {
      ++passed;
    } else {
      failed += " " + s.name;
      for (const auto& f : outcome.failures) std::cerr << s.name << ": " << f << "\n";
    }
  }
  bool required = true;
  for (const char* name : {"fig1", "fig2", "chain"}) required = required && find_scenario(name) != nullptr;
  return {required && failed.empty(),
          std::to_string(passed) + "/" + std::to_string(all.size()) + " scenarios pass" +
              (failed.empty() ? "" : ", failed:" + failed)};
}

Outcome determinism(const Options& o) {
  std::uint64_t hashes = 0, divergences = 0, report_mismatches = 0;
  for (std::uint64_t seed = 0; seed < o.replay_runs; ++seed) {
    const RunConfig c = campaign_config(seed, o.in_cutoff);
    const auto first = run_random(c);
    const auto second = run_random(c);
    report_mismatches += to_json_value(first.report).dump() != to_json_value(second.report).dump();
    std::stringstream text;
    write_trace(text, c, first.trace, first.finished);
    try {
      const auto again = replay(read_trace(text));
      divergences += again.trace != first.trace;
      hashes += again.trace.size();
    } catch (const ReplayDivergence& e) {
      ++divergences;
      std::cerr << "seed " << seed << ": " << e.what() << "\n";
    }
  }
  return {divergences == 0 && report_mismatches == 0,
          std::to_string(o.replay_runs) + " runs replayed, " + std::to_string(hashes) + " configuration hashes checked, " +
              std::to_string(divergences) + " divergences, " + std::to_string(report_mismatches) +
              " report byte mismatches"};
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Acceptance criteria"};
  app.add_option("--runs", o.runs, "Campaign size (seeds 0..runs-1)");
  app.add_option("--in-cutoff", o.in_cutoff, "Event after which In is disabled");
  app.add_option("--explore-depth", o.explore_depth);
  app.add_option("--explore-seconds", o.explore_seconds, "Wall-clock budget for the exhaustive exploration");
  app.add_option("--stores", o.stores);
  app.add_option("--lemma-runs", o.lemma_runs);
  app.add_option("--replay-runs", o.replay_runs);
  CLI11_PARSE(app, argc, argv);

  const auto campaign = run_campaign(o);
  const std::pair<const char*, Outcome> results[] = {
      {"safety", safety(campaign)},
      {"liveness", liveness(campaign, o)},
      {"chain-lemma", chain_lemma(o)},
      {"simple-garbage", simple_garbage(campaign)},
      {"maximum-finalized-subset", maximum_finalized(o)},
      {"message-counts", message_counts(o)},
      {"golden-scenarios", golden_scenarios()},
      {"determinism", determinism(o)},
  };
  bool all = true;
  int n = 0;
  for (const auto& [name, outcome] : results) {
    std::cout << (outcome.pass ? "PASS" : "FAIL") << "  " << ++n << " " << name << ": " << outcome.detail << "\n";
    all = all && outcome.pass;
  }
  return all ? 0 : 1;
}
