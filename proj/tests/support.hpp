#pragma once

// Shared fixtures for the unit tests: seeded random walks through the
// semantics and brute-force reference implementations.

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "drl/aggregator.hpp"
#include "drl/deduction.hpp"
#include "drl/ledger.hpp"
#include "drl/model.hpp"
#include "drl/oracle.hpp"
#include "drl/semantics.hpp"
#include "drl/simulation.hpp"

namespace drl::testing {

struct State {
  Configuration k;
  Ledger ledger;
  SnapshotStore store;
};

inline RunConfig walk_config(std::uint64_t seed, bool allow_in = true) {
  RunConfig c;
  c.seed = seed;
  c.bounds.max_actors = 5;
  c.bounds.allow_in = allow_in;
  c.bounds.max_external_injections = 4;
  c.check_every = 0;
  c.detect_every = 0;
  return c;
}

/// States after each of up to `steps` uniformly chosen events, the initial
/// state first.
inline std::vector<State> random_walk(const RunConfig& config, std::size_t steps) {
  Simulation sim(config);
  std::mt19937_64 rng(config.seed);
  std::vector<State> out{{sim.configuration(), sim.ledger(), sim.store()}};
  for (std::size_t i = 0; i < steps; ++i) {
    const auto events = sim.choices();
    if (events.empty()) break;
    sim.step(events[std::uniform_int_distribution<std::size_t>(0, events.size() - 1)(rng)]);
    out.push_back({sim.configuration(), sim.ledger(), sim.store()});
  }
  return out;
}

/// Terminated actors straight from the definition: B is terminated when every
/// actor that potentially reaches B, B included, is internal and blocked.
/// Reachability is a transitive closure over all unreleased ledger refobs.
inline std::set<ActorAddress> brute_terminated(const Configuration& k, const Ledger& ledger) {
  std::vector<ActorAddress> nodes;
  for (const auto& [a, st] : k.actors) nodes.push_back(a);
  for (auto a : k.externals) nodes.push_back(a);
  const std::size_t n = nodes.size();
  auto idx = [&](ActorAddress a) -> std::optional<std::size_t> {
    auto it = std::find(nodes.begin(), nodes.end(), a);
    if (it == nodes.end()) return std::nullopt;
    return static_cast<std::size_t>(it - nodes.begin());
  };
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) reach[i][i] = true;
  for (const auto& [token, rec] : ledger.refobs()) {
    if (rec.state == RefobState::Released) continue;
    auto o = idx(rec.refob.owner);
    auto t = idx(rec.refob.target);
    if (o && t) reach[*o][*t] = true;
  }
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[i][m] && reach[m][j]) reach[i][j] = true;
      }
    }
  }
  std::set<ActorAddress> out;
  for (std::size_t b = 0; b < n; ++b) {
    bool ok = true;
    for (std::size_t a = 0; a < n && ok; ++a) {
      if (!reach[a][b]) continue;
      ok = k.is_internal(nodes[a]) && blocked(k, nodes[a]);
    }
    if (ok) out.insert(nodes[b]);
  }
  return out;
}

/// Every largest finalized subset of q, found by enumerating all 2^|q|
/// subsets.
inline std::vector<SnapshotSet> brute_largest_finalized(const SnapshotSet& q) {
  std::vector<ActorAddress> members;
  for (const auto& kv : q) members.push_back(kv.first);
  std::vector<SnapshotSet> best;
  std::size_t best_size = 0;
  for (std::uint32_t mask = 0; mask < (1u << members.size()); ++mask) {
    ActorSet subset;
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (mask & (1u << i)) subset.insert(members[i]);
    }
    auto candidate = restrict_to(q, subset);
    if (!is_finalized(candidate)) continue;
    if (candidate.size() > best_size) {
      best.clear();
      best_size = candidate.size();
    }
    if (candidate.size() == best_size) best.push_back(std::move(candidate));
  }
  return best;
}

enum class Corruption { Never, Half, Always };

/// A snapshot set of at most `max_members` members taken from the store of a
/// random run at a random point, then possibly corrupted: facts dropped or
/// added, counts bumped, members removed or replaced by an earlier snapshot.
inline SnapshotSet random_store(std::uint64_t seed, std::size_t max_members = 8,
                                Corruption corruption = Corruption::Half) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  RunConfig config = walk_config(seed, pick(2) == 0);
  config.bounds.max_actors = 3 + static_cast<std::uint32_t>(pick(6));
  const auto walk = random_walk(config, 40 + pick(160));
  const std::size_t at = walk.size() / 2 + pick(walk.size() - walk.size() / 2);
  SnapshotSet q = walk[at].store.as_set();
  while (q.size() > max_members) q.erase(std::next(q.begin(), static_cast<long>(pick(q.size()))));
  const bool corrupt = pick(2) == 0 ? corruption == Corruption::Always : corruption != Corruption::Never;
  if (q.empty() || !corrupt) return q;

  std::vector<Refob> universe;
  for (const auto& [token, rec] : walk[at].ledger.refobs()) universe.push_back(rec.refob);
  const std::size_t corruptions = 1 + pick(3);
  for (std::size_t i = 0; i < corruptions && !q.empty(); ++i) {
    auto it = std::next(q.begin(), static_cast<long>(pick(q.size())));
    KnowledgeSet& phi = it->second;
    const Refob r = universe[pick(universe.size())];
    switch (pick(7)) {
      case 0: {
        const auto facts = phi.facts();
        if (!facts.empty()) phi.erase(facts[pick(facts.size())]);
        break;
      }
      case 1: phi.insert(Released{r}); break;
      case 2: phi.insert(Created{r}); break;
      case 3: phi.insert(Activated{r}); break;
      case 4: phi.set_sent_count(r.token, sent_count(phi, r.token) + 1); break;
      case 5: q.erase(it); break;
      default: {
        const auto& old = walk[pick(at + 1)].store;
        if (const auto* snap = old.find(it->first)) phi = snap->knowledge;
        break;
      }
    }
  }
  return q;
}

}  // namespace drl::testing
