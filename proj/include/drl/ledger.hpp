#pragma once

// Instrumentation that shadows the configuration: the lifecycle of every refob
// and the history of every message. The transition rules never read it; the
// oracle and the runtime checks do.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "drl/model.hpp"

namespace drl {

enum class RefobState : std::uint8_t { Pending, Active, Inactive, Released };

std::string_view state_name(RefobState s);

struct RefobRecord {
  Refob refob;
  RefobState state = RefobState::Pending;
  Rule origin = Rule::Spawn;  // rule that created it; Spawn also covers the initial refobs
  EventIndex created_at = 0;
  std::optional<EventIndex> activated_at;
  std::optional<EventIndex> deactivated_at;
  std::optional<EventIndex> released_at;
};

struct MessageRecord {
  ActorAddress recipient;
  Message message;
  EventIndex sent_at = 0;
  std::optional<EventIndex> delivered_at;
  std::optional<Rule> delivered_by;
};

class LifecycleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class Ledger {
 public:
  /// Ledger matching initial_configuration(): both initial refobs active.
  static Ledger for_initial(const Configuration& k);

  void create(const Refob& refob, RefobState state, Rule origin, EventIndex at);
  /// Moves a refob forward in its lifecycle. Throws LifecycleError on an
  /// unknown token or a backwards move.
  void advance(Token token, RefobState next, EventIndex at);

  std::size_t record_send(ActorAddress recipient, const Message& message, EventIndex at);
  /// Marks the oldest matching undelivered message as delivered. Throws
  /// LifecycleError if none is in transit.
  std::size_t record_delivery(ActorAddress recipient, const Message& message, EventIndex at, Rule by);

  const RefobRecord* find(Token token) const;
  bool is_unreleased(Token token) const;
  const std::map<Token, RefobRecord>& refobs() const { return refobs_; }
  const std::vector<MessageRecord>& messages() const { return messages_; }
  std::vector<const MessageRecord*> in_transit() const;

  /// Messages sent along x that the owner counts (AppMsg and InfoMsg).
  std::vector<const MessageRecord*> counted_messages_along(Token x) const;

  /// Hash of (token, owner, target, state) for every refob; timestamps are
  /// excluded so equivalent histories collide.
  std::uint64_t state_digest() const;

 private:
  std::map<Token, RefobRecord> refobs_;
  std::vector<MessageRecord> messages_;
};

}  // namespace drl
