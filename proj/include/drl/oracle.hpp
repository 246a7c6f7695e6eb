#pragma once

// Ground truth computed from the configuration and the ledger: blocked and
// terminated actors, the root set, chains, and the simple-garbage test.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "drl/ledger.hpp"
#include "drl/model.hpp"

namespace drl {

struct Violation {
  std::string check;
  std::string detail;
  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Idle, not a receptionist, and no undelivered messages of any kind.
bool blocked(const Configuration& k, ActorAddress a);

/// Internal actors that no unblocked or external actor potentially reaches
/// over the ledger's unreleased refobs.
std::set<ActorAddress> terminated_set(const Configuration& k, const Ledger& ledger);

/// Receptionists plus targets of refobs carried by application messages in
/// transit to external actors.
std::set<ActorAddress> root_set(const Configuration& k);

/// A shortest chain ending in x, or nullopt if there is none.
std::optional<std::vector<Refob>> find_chain(const Configuration& k, const Ledger& ledger, const Refob& x);

std::vector<Violation> check_chain_lemma(const Configuration& k, const Ledger& ledger);

/// Local test run by an idle actor B on its own knowledge:
///  - no derivable Created(x:A->B) with A != B, and
///  - every derivable, unreleased Created(y:B->B) is still activated with
///    matching sent and received counts.
bool is_simple_garbage_local(ActorAddress b, const KnowledgeSet& phi);

/// The same test reading the premises literally: only Created facts that are
/// members count, and a self refob passes whenever the (possibly defaulted)
/// counts match. Kept for comparison; it admits false positives.
bool is_simple_garbage_literal(ActorAddress b, const KnowledgeSet& phi);

/// Every undelivered message travels along a refob the ledger still holds
/// unreleased.
std::vector<Violation> check_release_is_final(const Configuration& k, const Ledger& ledger);

/// The mailboxes hold exactly the ledger's undelivered messages, as multisets.
std::vector<Violation> check_conservation(const Configuration& k, const Ledger& ledger);

}  // namespace drl
