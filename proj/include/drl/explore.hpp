#pragma once

// Bounded exhaustive exploration of every interleaving from the initial
// configuration, checking each distinct state once.

#include <chrono>
#include <map>
#include <string>
#include <vector>

#include "drl/semantics.hpp"

namespace drl {

enum class ExploreSnapshots : std::uint8_t {
  FinalAction,  // inserted after Idle, Info and Release, as in random runs
  Choice,       // Snapshot of any idle actor is one more nondeterministic choice
  Never,
};

std::string_view explore_snapshots_name(ExploreSnapshots s);
ExploreSnapshots explore_snapshots_from_name(std::string_view name);

struct ExploreConfig {
  ExplorationBounds bounds{3, 0, 2, 1, false};
  std::uint32_t max_depth = 8;
  ExploreSnapshots snapshots = ExploreSnapshots::FinalAction;
  Mutation mutation = Mutation::None;
  bool symmetry = true;               // identify states equal up to token renaming
  std::uint64_t state_budget = 0;     // stop after this many distinct states; 0 means no limit
  std::chrono::milliseconds time_budget{0};  // stop after this much wall time; 0 means no limit
  std::uint32_t max_reported = 10;    // violations kept with their paths
};

struct ExploreViolation {
  std::vector<Event> path;
  std::string check;
  std::string detail;
};

struct ExploreReport {
  ExploreConfig config;
  std::uint64_t states = 0;
  std::uint64_t transitions = 0;
  std::uint64_t revisits = 0;
  std::uint64_t finalized_subsets_checked = 0;
  std::map<std::string, std::uint64_t> rule_coverage;
  std::uint64_t violation_count = 0;
  std::vector<ExploreViolation> violations;  // the first max_reported
  bool complete = true;
};

ExploreReport explore_exhaustive(const ExploreConfig& config);

}  // namespace drl
