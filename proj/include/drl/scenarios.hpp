#pragma once

// Scripted executions reproducing the small worked examples of the protocol,
// each with the expectations it must meet.

#include <functional>
#include <string>
#include <vector>

#include "drl/simulation.hpp"

namespace drl {

/// Builds events for a Simulation by naming actors and refobs instead of
/// spelling out every parameter. Every helper throws RejectedEvent if the
/// resulting event is not enabled.
class Script {
 public:
  explicit Script(RunConfig config = script_config());

  /// Checks after every event, no automatic snapshots, no periodic detect.
  static RunConfig script_config();

  Simulation& sim() { return sim_; }
  const Configuration& k() const { return sim_.configuration(); }

  /// The first activated refob owner -> target.
  Refob refob(ActorAddress owner, ActorAddress target) const;
  Refob self(ActorAddress a) const { return refob(a, a); }

  /// Spawns a child of `parent` and returns it.
  ActorAddress spawn(ActorAddress parent);
  /// Sends along x, creating one refob for the recipient per entry of `using_`;
  /// returns the created refobs in order.
  std::vector<Refob> send(const Refob& x, const std::vector<Refob>& using_ = {});
  /// Receives the oldest application message in a's mailbox.
  void receive(ActorAddress a);
  void idle(ActorAddress a);
  void send_info(ActorAddress a, const Refob& used, const Refob& created);
  /// Receives the oldest Info message in a's mailbox.
  void info(ActorAddress a);
  void send_release(const Refob& x);
  /// Receives the Release message for x at its target.
  void release(const Refob& x);
  void compaction(const Refob& x);
  void snapshot(ActorAddress a);

 private:
  void run(const Event& e);
  Simulation sim_;
};

struct ScenarioOutcome {
  bool passed = true;
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what);
};

struct Scenario {
  std::string name;
  std::string summary;
  std::function<ScenarioOutcome()> run;
};

std::vector<Scenario> workload_scenarios();
const Scenario* find_scenario(std::string_view name);

}  // namespace drl
