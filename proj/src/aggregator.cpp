#include "drl/aggregator.hpp"

#include <algorithm>

namespace drl {

void SnapshotStore::record(ActorAddress actor, KnowledgeSet knowledge, EventIndex taken_at) {
  entries_[actor] = StoredSnapshot{std::move(knowledge), taken_at};
}

const StoredSnapshot* SnapshotStore::find(ActorAddress actor) const {
  auto it = entries_.find(actor);
  return it == entries_.end() ? nullptr : &it->second;
}

SnapshotSet SnapshotStore::as_set() const {
  SnapshotSet q;
  for (const auto& [actor, snap] : entries_) q.emplace(actor, snap.knowledge);
  return q;
}

namespace {

bool any_member_releases(const SnapshotSet& q, const Refob& x) {
  return std::any_of(q.begin(), q.end(), [&](const auto& kv) { return derives_released(kv.second, x); });
}

bool any_member_creates(const SnapshotSet& q, const Refob& x) {
  return std::any_of(q.begin(), q.end(), [&](const auto& kv) { return derives_created(kv.second, x); });
}

bool q_unreleased(const SnapshotSet& q, const Refob& x) {
  return any_member_creates(q, x) && !any_member_releases(q, x);
}

bool owner_side_holds(const SnapshotSet& q, const Refob& x) {
  auto owner = q.find(x.owner);
  return owner != q.end() && owner->second.activated().contains(x);
}

bool counts_agree(const SnapshotSet& q, const Refob& x) {
  auto owner = q.find(x.owner);
  auto target = q.find(x.target);
  if (owner == q.end() || target == q.end()) return false;
  return sent_count(owner->second, x.token) == recv_count(target->second, x.token);
}

}  // namespace

bool q_derives(const SnapshotSet& q, const Query& query) {
  if (const auto* u = std::get_if<Unreleased>(&query)) return q_unreleased(q, u->refob);
  return std::any_of(q.begin(), q.end(), [&](const auto& kv) { return derives(kv.second, query); });
}

std::vector<Refob> unreleased_refobs(const SnapshotSet& q) {
  std::vector<Refob> candidates;
  for (const auto& [actor, phi] : q) {
    candidates.insert(candidates.end(), phi.created().begin(), phi.created().end());
    for (const auto& [used, created] : phi.created_using()) candidates.push_back(created);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::erase_if(candidates, [&](const Refob& x) { return any_member_releases(q, x); });
  return candidates;
}

bool is_relevant(const SnapshotSet& q, const Refob& x) {
  if (!q.contains(x.target)) return true;
  return owner_side_holds(q, x) && counts_agree(q, x);
}

bool is_closed(const SnapshotSet& q) {
  for (const auto& x : unreleased_refobs(q)) {
    if (q.contains(x.target) && !owner_side_holds(q, x)) return false;
  }
  return true;
}

bool appears_blocked(const SnapshotSet& q, ActorAddress b) {
  for (const auto& x : unreleased_refobs(q)) {
    if (x.target == b && !counts_agree(q, x)) return false;
  }
  return true;
}

bool is_finalized(const SnapshotSet& q) {
  const auto unreleased = unreleased_refobs(q);
  return std::all_of(unreleased.begin(), unreleased.end(), [&](const Refob& x) { return is_relevant(q, x); });
}

SnapshotSet restrict_to(const SnapshotSet& q, const ActorSet& members) {
  SnapshotSet out;
  for (const auto& [actor, phi] : q) {
    if (members.contains(actor)) out.emplace(actor, phi);
  }
  return out;
}

ActorSet members_of(const SnapshotSet& q) {
  ActorSet out;
  for (const auto& kv : q) out.insert(kv.first);
  return out;
}

SnapshotSet maximum_finalized_subset(const SnapshotSet& q) {
  SnapshotSet current = q;
  for (;;) {
    ActorSet doomed;
    for (const auto& x : unreleased_refobs(current)) {
      if (!is_relevant(current, x)) doomed.insert(x.target);
    }
    if (doomed.empty()) return current;
    for (auto a : doomed) current.erase(a);
  }
}

ActorSet detect(const SnapshotStore& store) { return members_of(maximum_finalized_subset(store.as_set())); }

}  // namespace drl
