#pragma once

// Snapshot aggregation and termination detection.
//
// A snapshot set Q holds at most one knowledge set per actor. Over Q:
//   Q |- Created(x)     iff some member derives it
//   Q |- Unreleased(x)  iff Q |- Created(x) and no member derives Released(x)
// Q is finalized when every refob unreleased in Q is relevant: if its target
// B is in Q, then its owner A is in Q, Phi_A |- Activated(x), and the owner's
// send count along x equals the target's receive count.

#include <map>
#include <set>
#include <vector>

#include "drl/deduction.hpp"
#include "drl/model.hpp"

namespace drl {

using SnapshotSet = std::map<ActorAddress, KnowledgeSet>;
using ActorSet = std::set<ActorAddress>;

struct StoredSnapshot {
  KnowledgeSet knowledge;
  EventIndex taken_at = 0;
  friend bool operator==(const StoredSnapshot&, const StoredSnapshot&) = default;
};

/// Latest snapshot per actor.
class SnapshotStore {
 public:
  /// Records a snapshot, replacing any earlier one from the same actor.
  void record(ActorAddress actor, KnowledgeSet knowledge, EventIndex taken_at);
  bool contains(ActorAddress actor) const { return entries_.contains(actor); }
  const StoredSnapshot* find(ActorAddress actor) const;
  void erase(ActorAddress actor) { entries_.erase(actor); }

  const std::map<ActorAddress, StoredSnapshot>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  SnapshotSet as_set() const;

  friend bool operator==(const SnapshotStore&, const SnapshotStore&) = default;

 private:
  std::map<ActorAddress, StoredSnapshot> entries_;
};

bool q_derives(const SnapshotSet& q, const Query& query);

/// Every refob x with Q |- Unreleased(x), sorted.
std::vector<Refob> unreleased_refobs(const SnapshotSet& q);

bool is_relevant(const SnapshotSet& q, const Refob& x);
bool is_closed(const SnapshotSet& q);
/// Precondition: b is a member of q.
bool appears_blocked(const SnapshotSet& q, ActorAddress b);
bool is_finalized(const SnapshotSet& q);

/// Restriction of q to the given members.
SnapshotSet restrict_to(const SnapshotSet& q, const ActorSet& members);
ActorSet members_of(const SnapshotSet& q);

/// Iterative pruning: remove the target of every irrelevant unreleased refob,
/// recomputing unreleased refobs over what remains, until nothing changes.
SnapshotSet maximum_finalized_subset(const SnapshotSet& q);

/// Actors whose snapshots form the maximum finalized subset of the store.
ActorSet detect(const SnapshotStore& store);

}  // namespace drl
