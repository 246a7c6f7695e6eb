#pragma once

// The transition system. Each rule validates its premises against the
// configuration and throws RejectedEvent before touching anything if they
// fail, so a rejected event leaves the configuration unchanged.

#include <stdexcept>
#include <vector>

#include "drl/aggregator.hpp"
#include "drl/ledger.hpp"
#include "drl/model.hpp"

namespace drl {

/// Caps on the nondeterministic choices offered by enabled_events.
struct ExplorationBounds {
  std::uint32_t max_actors = 6;               // internal actors ever spawned, the initial one included
  std::uint32_t max_events_per_run = 300;
  std::uint32_t max_refobs_per_message = 2;
  std::uint32_t max_external_injections = 8;  // In events per run
  bool allow_in = false;

  friend bool operator==(const ExplorationBounds&, const ExplorationBounds&) = default;
};

/// Deliberately broken rule variants, used as negative controls for the
/// checkers.
enum class Mutation : std::uint8_t {
  None,
  SkipIncSent,       // Send forgets to bump the sent count
  SkipCreatedUsing,  // Send forgets the CreatedUsing facts
};

std::string_view mutation_name(Mutation m);
Mutation mutation_from_name(std::string_view name);

class RejectedEvent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StepContext {
  Ledger* ledger = nullptr;
  SnapshotStore* store = nullptr;
  EventIndex index = 0;  // index of the event being applied (1-based within a run)
  Mutation mutation = Mutation::None;
};

/// All events whose premises hold in k, sorted by rule label then parameters.
/// Fresh names are taken from k's name supply, so the list is deterministic.
std::vector<Event> enabled_events(const Configuration& k, const ExplorationBounds& bounds);

void apply(Configuration& k, const Event& e, const StepContext& ctx = {});
/// Copying variant of apply.
Configuration applied(Configuration k, const Event& e, const StepContext& ctx = {});
bool is_enabled(const Configuration& k, const Event& e);

void apply_spawn(Configuration& k, const SpawnEvent& e, const StepContext& ctx = {});
void apply_send(Configuration& k, const SendEvent& e, const StepContext& ctx = {});
void apply_receive(Configuration& k, const ReceiveEvent& e, const StepContext& ctx = {});
void apply_idle(Configuration& k, const IdleEvent& e, const StepContext& ctx = {});
void apply_send_info(Configuration& k, const SendInfoEvent& e, const StepContext& ctx = {});
void apply_info(Configuration& k, const InfoEvent& e, const StepContext& ctx = {});
void apply_send_release(Configuration& k, const SendReleaseEvent& e, const StepContext& ctx = {});
void apply_release(Configuration& k, const ReleaseEvent& e, const StepContext& ctx = {});
void apply_compaction(Configuration& k, const CompactionEvent& e, const StepContext& ctx = {});
void apply_snapshot(Configuration& k, const SnapshotEvent& e, const StepContext& ctx = {});
void apply_in(Configuration& k, const InEvent& e, const StepContext& ctx = {});
void apply_out(Configuration& k, const OutEvent& e, const StepContext& ctx = {});
/// ReleaseOut and InfoOut: a system message addressed to an external actor is
/// dropped.
void apply_drop_system_to_external(Configuration& k, const Message& message, ActorAddress external,
                                   const StepContext& ctx = {});

}  // namespace drl
