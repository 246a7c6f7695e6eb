#pragma once

// Symmetry reduction for exhaustive exploration. Token sequence numbers carry
// no meaning beyond identity and freshness, so two states that differ only by
// a per-creator renaming of tokens have the same futures and the same check
// results; the same goes for swapping the addresses of spawned actors.
// canonical_key relabels tokens in an order computed from the state's
// structure and hashes the relabelled state.

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "drl/aggregator.hpp"
#include "drl/ledger.hpp"
#include "drl/model.hpp"

namespace drl {

using TokenMap = std::map<Token, Token>;

/// Relabelling used by canonical_key. It covers every unreleased ledger token
/// and every token the configuration or store mentions; each creator's tokens
/// get sequence numbers 0..n-1. Released tokens that nothing mentions are left
/// out: they can no longer influence any rule or check.
TokenMap canonical_token_map(const Configuration& k, const Ledger& ledger, const SnapshotStore& store);

/// Tokens absent from the map are kept as they are.
Refob renamed(const Refob& r, const TokenMap& map);
KnowledgeSet renamed(const KnowledgeSet& ks, const TokenMap& map);
Message renamed(const Message& m, const TokenMap& map);
Configuration renamed(const Configuration& k, const TokenMap& map);

/// Equal keys imply the states are equal up to a token renaming (barring
/// hash collisions) and a permutation of the non-initial internal actors. The
/// converse holds for most but not all symmetric pairs.
std::uint64_t canonical_key(const Configuration& k, const Ledger& ledger, const SnapshotStore& store);

/// The relabelled state canonical_key hashes, materialized. Two states with
/// equal keys must have equal forms.
struct CanonicalForm {
  Configuration k;
  std::vector<std::pair<Refob, RefobState>> refobs;  // sorted
  std::map<ActorAddress, KnowledgeSet> store;

  friend bool operator==(const CanonicalForm&, const CanonicalForm&) = default;
};

CanonicalForm canonical_form(const Configuration& k, const Ledger& ledger, const SnapshotStore& store);

}  // namespace drl
