#include "drl/explore.hpp"

#include <unordered_map>

#include "drl/aggregator.hpp"
#include "drl/canonical.hpp"
#include "drl/hash.hpp"
#include "drl/ledger.hpp"
#include "drl/oracle.hpp"
#include "drl/simulation.hpp"

namespace drl {

std::string_view explore_snapshots_name(ExploreSnapshots s) {
  switch (s) {
    case ExploreSnapshots::FinalAction: return "final-action";
    case ExploreSnapshots::Choice: return "choice";
    case ExploreSnapshots::Never: return "never";
  }
  return "?";
}

ExploreSnapshots explore_snapshots_from_name(std::string_view name) {
  for (auto s : {ExploreSnapshots::FinalAction, ExploreSnapshots::Choice, ExploreSnapshots::Never}) {
    if (explore_snapshots_name(s) == name) return s;
  }
  throw std::invalid_argument("unknown snapshot mode: " + std::string(name));
}

namespace {

struct State {
  Configuration k;
  Ledger ledger;
  SnapshotStore store;
  EventIndex index = 0;
};

std::uint64_t state_key(const State& s, bool symmetry) {
  if (symmetry) return canonical_key(s.k, s.ledger, s.store);
  Hasher h;
  h.u64(hash_of(s.k));
  h.u64(s.ledger.state_digest());
  h.u64(s.store.size());
  for (const auto& [a, snap] : s.store.entries()) {
    hash_append(h, a);
    hash_append(h, snap.knowledge);
  }
  return h.digest();
}

class Explorer {
 public:
  explicit Explorer(const ExploreConfig& config) : config_(config) { report_.config = config; }

  ExploreReport run() {
    started_ = std::chrono::steady_clock::now();
    State root{initial_configuration(), {}, {}, 0};
    root.ledger = Ledger::for_initial(root.k);
    visit(root, 0);
    return std::move(report_);
  }

 private:
  void record(std::string check, std::string detail) {
    ++report_.violation_count;
    if (report_.violations.size() < config_.max_reported) {
      report_.violations.push_back(ExploreViolation{path_, std::move(check), std::move(detail)});
    }
  }

  void check(const State& s) {
    for (auto& v : state_violations(s.k, s.ledger)) record(std::move(v.check), std::move(v.detail));
    const auto terminated = terminated_set(s.k, s.ledger);
    const auto q = s.store.as_set();
    std::vector<ActorAddress> members;
    for (const auto& kv : q) members.push_back(kv.first);
    for (std::uint32_t mask = 1; mask < (1u << members.size()); ++mask) {
      ActorSet subset;
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (mask & (1u << i)) subset.insert(members[i]);
      }
      ++report_.finalized_subsets_checked;
      if (!is_finalized(restrict_to(q, subset))) continue;
      for (auto a : subset) {
        if (!terminated.contains(a)) {
          record("safety", "finalized subset contains " + to_string(a) + " which is not terminated");
          break;
        }
      }
    }
  }

  void visit(const State& s, std::uint32_t depth) {
    if (!report_.complete) return;
    auto [it, inserted] = visited_.try_emplace(state_key(s, config_.symmetry), depth);
    if (!inserted) {
      if (it->second <= depth) {
        ++report_.revisits;
        return;
      }
      it->second = depth;  // reached more shallowly: expand again with the larger remaining budget
    } else {
      ++report_.states;
      check(s);
      if (config_.state_budget != 0 && report_.states >= config_.state_budget) {
        report_.complete = false;
        return;
      }
      if (config_.time_budget.count() != 0 && report_.states % 1024 == 0 &&
          std::chrono::steady_clock::now() - started_ >= config_.time_budget) {
        report_.complete = false;
        return;
      }
    }
    if (depth == config_.max_depth) return;

    for (const auto& e : enabled_events(s.k, config_.bounds)) {
      if (rule_of(e) == Rule::Snapshot && config_.snapshots != ExploreSnapshots::Choice) continue;
      State child = s;
      apply(child.k, e, StepContext{&child.ledger, &child.store, ++child.index, config_.mutation});
      if (config_.snapshots == ExploreSnapshots::FinalAction) {
        std::optional<ActorAddress> actor;
        if (const auto* idle = std::get_if<IdleEvent>(&e)) actor = idle->actor;
        if (const auto* info = std::get_if<InfoEvent>(&e)) actor = info->created.target;
        if (const auto* rel = std::get_if<ReleaseEvent>(&e)) actor = rel->target;
        if (actor) {
          apply(child.k, SnapshotEvent{*actor}, StepContext{&child.ledger, &child.store, ++child.index, config_.mutation});
        }
      }
      ++report_.transitions;
      ++report_.rule_coverage[std::string(rule_name(rule_of(e)))];
      path_.push_back(e);
      visit(child, depth + 1);
      path_.pop_back();
    }
  }

  const ExploreConfig& config_;
  ExploreReport report_;
  std::unordered_map<std::uint64_t, std::uint32_t> visited_;
  std::vector<Event> path_;
  std::chrono::steady_clock::time_point started_;
};

}  // namespace

ExploreReport explore_exhaustive(const ExploreConfig& config) { return Explorer(config).run(); }

}  // namespace drl
