#pragma once

// An instrumented execution: configuration, ledger, snapshot store and trace,
// advanced one event at a time with the runtime checks applied after each.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "drl/aggregator.hpp"
#include "drl/ledger.hpp"
#include "drl/model.hpp"
#include "drl/oracle.hpp"
#include "drl/semantics.hpp"

namespace drl {

struct SnapshotPolicy {
  enum class Kind : std::uint8_t { AfterFinalAction, Periodic, Never };
  Kind kind = Kind::AfterFinalAction;
  std::uint32_t every = 0;  // Periodic only

  /// "final-action", "periodic:N" or "never".
  static SnapshotPolicy parse(std::string_view text);
  std::string name() const;
  friend bool operator==(const SnapshotPolicy&, const SnapshotPolicy&) = default;
};

/// How run_random picks among the scheduler's choices: uniformly over event
/// instances, or uniformly over rule labels and then over that rule's
/// instances.
enum class Scheduler : std::uint8_t { Instance, Rule };

std::string_view scheduler_name(Scheduler s);
Scheduler scheduler_from_name(std::string_view name);

struct RunConfig {
  ExplorationBounds bounds;
  Scheduler scheduler = Scheduler::Rule;
  std::uint64_t seed = 0;
  SnapshotPolicy policy;
  std::uint32_t check_every = 1;   // invariant checks every n events; 0 disables them
  std::uint32_t detect_every = 10; // detect runs every n events; 0 disables it
  std::optional<EventIndex> allow_in_until;  // In events only while fewer chosen events than this
  double in_probability = 0.1;     // chance of picking an In event when one is enabled
  bool final_sweep = true;
  bool self_destruct = false;
  bool keep_history = false;       // needed for message-count sampling
  std::uint32_t msg_count_samples = 0;
  Mutation mutation = Mutation::None;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

enum class EntryKind : std::uint8_t { Chosen, Policy, Sweep, Collect };

std::string_view entry_kind_name(EntryKind k);
EntryKind entry_kind_from_name(std::string_view name);

struct TraceEntry {
  EventIndex index = 0;
  EntryKind kind = EntryKind::Chosen;
  std::optional<Event> event;            // absent for Collect
  std::optional<ActorAddress> collected; // Collect only
  std::uint64_t hash = 0;                // configuration hash after the entry
  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct RunViolation {
  EventIndex at = 0;
  std::string check;
  std::string detail;
  friend bool operator==(const RunViolation&, const RunViolation&) = default;
};

struct RunStats {
  std::map<std::string, std::uint64_t> rule_counts;
  std::uint64_t chosen_events = 0;
  std::uint64_t checks = 0;
  std::uint64_t detect_calls = 0;
  std::uint64_t simple_garbage_positives = 0;
  std::uint64_t simple_garbage_literal_false_positives = 0;
  std::uint64_t msg_count_samples = 0;
  std::uint64_t msg_count_mismatches = 0;
  std::uint64_t liveness_misses = 0;
  std::uint64_t detection_latency_total = 0;  // events between termination and first detection
  std::uint64_t detections = 0;               // actors detected at least once
  std::uint64_t collected = 0;
  bool quiescent = false;
};

struct RunReport {
  RunConfig config;
  RunStats stats;
  std::vector<RunViolation> violations;
  std::set<ActorAddress> final_terminated;
  std::set<ActorAddress> final_detected;
  std::uint64_t final_hash = 0;
  std::uint64_t trace_length = 0;
};

class Simulation {
 public:
  explicit Simulation(RunConfig config);

  const RunConfig& config() const { return config_; }
  const Configuration& configuration() const { return k_; }
  const Ledger& ledger() const { return ledger_; }
  const SnapshotStore& store() const { return store_; }
  const std::vector<TraceEntry>& trace() const { return trace_; }
  const std::vector<RunViolation>& violations() const { return violations_; }
  const RunStats& stats() const { return stats_; }
  /// Configuration after each entry; index 0 is the initial one. Empty unless
  /// keep_history is set.
  const std::vector<Configuration>& history() const { return history_; }
  EventIndex now() const { return trace_.size(); }

  /// Events the scheduler may choose: enabled events minus Snapshot (inserted
  /// by policy) and minus In once the cutoff has passed.
  std::vector<Event> choices() const;

  /// Applies a chosen event, then any policy-driven snapshots, collection and
  /// periodic checks. Throws RejectedEvent if the event is not enabled.
  void step(const Event& e);

  /// End of run: final snapshot sweep (policy permitting), final detect and
  /// the liveness check.
  void finish();

  /// Runs every check on the current state, regardless of check_every.
  void check_now();
  /// detect over the current store, checked against the oracle.
  std::set<ActorAddress> detect_now();

  RunReport report() const;

 private:
  void apply_entry(const Event& e, EntryKind kind);
  void collect(ActorAddress a);
  void after_chosen(const Event& e);
  void check_facts_remain(const Event& e, const std::map<ActorAddress, KnowledgeSet>& before);
  void note_terminated(const std::set<ActorAddress>& terminated);
  void sample_message_counts();
  void violation(std::string check, std::string detail);

  RunConfig config_;
  Configuration k_;
  Ledger ledger_;
  SnapshotStore store_;
  std::vector<TraceEntry> trace_;
  std::vector<RunViolation> violations_;
  RunStats stats_;
  std::vector<Configuration> history_;
  std::map<ActorAddress, EventIndex> terminated_since_;
  std::set<ActorAddress> detected_ever_;
  std::set<ActorAddress> last_terminated_;
  std::set<ActorAddress> last_detected_;
  bool finished_ = false;
};

/// Violations of the configuration-level checks that need no history:
/// configuration invariants, chain lemma, release-is-final, conservation and
/// simple-garbage soundness.
std::vector<Violation> state_violations(const Configuration& k, const Ledger& ledger);

/// The message-count lemma for refob x between times t1 and t2, or nullopt
/// when its preconditions do not hold. Returns {predicted, actual}.
std::optional<std::pair<std::uint64_t, std::uint64_t>> message_count_instance(const std::vector<Configuration>& history,
                                                                               const Ledger& ledger, const Refob& x,
                                                                               EventIndex t1, EventIndex t2);

}  // namespace drl
