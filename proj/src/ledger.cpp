#include "drl/ledger.hpp"

#include "drl/hash.hpp"

namespace drl {

std::string_view state_name(RefobState s) {
  switch (s) {
    case RefobState::Pending: return "pending";
    case RefobState::Active: return "active";
    case RefobState::Inactive: return "inactive";
    case RefobState::Released: return "released";
  }
  return "?";
}

Ledger Ledger::for_initial(const Configuration& k) {
  Ledger ledger;
  for (const auto& [addr, state] : k.actors) {
    for (const auto& r : state.knowledge.activated()) ledger.create(r, RefobState::Active, Rule::Spawn, 0);
  }
  return ledger;
}

void Ledger::create(const Refob& refob, RefobState state, Rule origin, EventIndex at) {
  if (refobs_.contains(refob.token)) {
    throw LifecycleError("token introduced twice: " + to_string(refob.token));
  }
  RefobRecord rec{refob, state, origin, at, {}, {}, {}};
  if (state == RefobState::Active) rec.activated_at = at;
  refobs_.emplace(refob.token, rec);
}

void Ledger::advance(Token token, RefobState next, EventIndex at) {
  auto it = refobs_.find(token);
  if (it == refobs_.end()) throw LifecycleError("unknown refob " + to_string(token));
  auto& rec = it->second;
  if (static_cast<int>(next) <= static_cast<int>(rec.state)) {
    throw LifecycleError("refob " + to_string(rec.refob) + " cannot move from " + std::string(state_name(rec.state)) +
                         " to " + std::string(state_name(next)));
  }
  rec.state = next;
  switch (next) {
    case RefobState::Active: rec.activated_at = at; break;
    case RefobState::Inactive: rec.deactivated_at = at; break;
    case RefobState::Released: rec.released_at = at; break;
    case RefobState::Pending: break;
  }
}

std::size_t Ledger::record_send(ActorAddress recipient, const Message& message, EventIndex at) {
  messages_.push_back(MessageRecord{recipient, message, at, {}, {}});
  return messages_.size() - 1;
}

std::size_t Ledger::record_delivery(ActorAddress recipient, const Message& message, EventIndex at, Rule by) {
  for (std::size_t i = 0; i < messages_.size(); ++i) {
    auto& rec = messages_[i];
    if (!rec.delivered_at && rec.recipient == recipient && rec.message == message) {
      rec.delivered_at = at;
      rec.delivered_by = by;
      return i;
    }
  }
  throw LifecycleError("no such message in transit to " + to_string(recipient) + ": " + to_string(message));
}

const RefobRecord* Ledger::find(Token token) const {
  auto it = refobs_.find(token);
  return it == refobs_.end() ? nullptr : &it->second;
}

bool Ledger::is_unreleased(Token token) const {
  const auto* rec = find(token);
  return rec != nullptr && rec->state != RefobState::Released;
}

std::vector<const MessageRecord*> Ledger::in_transit() const {
  std::vector<const MessageRecord*> out;
  for (const auto& rec : messages_) {
    if (!rec.delivered_at) out.push_back(&rec);
  }
  return out;
}

std::vector<const MessageRecord*> Ledger::counted_messages_along(Token x) const {
  std::vector<const MessageRecord*> out;
  for (const auto& rec : messages_) {
    if (std::holds_alternative<ReleaseMsg>(rec.message)) continue;
    if (message_token(rec.message) == x) out.push_back(&rec);
  }
  return out;
}

std::uint64_t Ledger::state_digest() const {
  Hasher h;
  h.u64(refobs_.size());
  for (const auto& [token, rec] : refobs_) {
    hash_append(h, rec.refob);
    h.u8(static_cast<std::uint8_t>(rec.state));
  }
  return h.digest();
}

}  // namespace drl
