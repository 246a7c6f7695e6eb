#include "drl/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <random>

#include "drl/deduction.hpp"
#include "drl/hash.hpp"

namespace drl {

SnapshotPolicy SnapshotPolicy::parse(std::string_view text) {
  if (text == "final-action") return {Kind::AfterFinalAction, 0};
  if (text == "never") return {Kind::Never, 0};
  constexpr std::string_view prefix = "periodic:";
  if (text.starts_with(prefix)) {
    const auto digits = text.substr(prefix.size());
    std::uint32_t n = 0;
    auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec == std::errc{} && end == digits.data() + digits.size() && n > 0) return {Kind::Periodic, n};
  }
  throw std::invalid_argument("unknown snapshot policy: " + std::string(text));
}

std::string SnapshotPolicy::name() const {
  switch (kind) {
    case Kind::AfterFinalAction: return "final-action";
    case Kind::Periodic: return "periodic:" + std::to_string(every);
    case Kind::Never: return "never";
  }
  return "?";
}

std::string_view scheduler_name(Scheduler s) { return s == Scheduler::Instance ? "instance" : "rule"; }

Scheduler scheduler_from_name(std::string_view name) {
  if (name == "instance") return Scheduler::Instance;
  if (name == "rule") return Scheduler::Rule;
  throw std::invalid_argument("unknown scheduler: " + std::string(name));
}

std::string_view entry_kind_name(EntryKind k) {
  switch (k) {
    case EntryKind::Chosen: return "chosen";
    case EntryKind::Policy: return "policy";
    case EntryKind::Sweep: return "sweep";
    case EntryKind::Collect: return "collect";
  }
  return "?";
}

EntryKind entry_kind_from_name(std::string_view name) {
  for (auto k : {EntryKind::Chosen, EntryKind::Policy, EntryKind::Sweep, EntryKind::Collect}) {
    if (entry_kind_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown trace entry kind: " + std::string(name));
}

std::vector<Violation> state_violations(const Configuration& k, const Ledger& ledger) {
  std::vector<Violation> out;
  for (auto& v : configuration_invariant_violations(k)) out.push_back({"configuration", std::move(v)});
  auto add = [&](std::vector<Violation> vs) { out.insert(out.end(), vs.begin(), vs.end()); };
  add(check_chain_lemma(k, ledger));
  add(check_release_is_final(k, ledger));
  add(check_conservation(k, ledger));
  const auto terminated = terminated_set(k, ledger);
  for (const auto& [b, state] : k.actors) {
    if (state.idle() && is_simple_garbage_local(b, state.knowledge) && !terminated.contains(b)) {
      out.push_back({"simple-garbage", to_string(b) + " passes the local test but is not terminated"});
    }
  }
  return out;
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> message_count_instance(const std::vector<Configuration>& history,
                                                                               const Ledger& ledger, const Refob& x,
                                                                               EventIndex t1, EventIndex t2) {
  const auto* rec = ledger.find(x.token);
  if (rec == nullptr || t1 >= history.size() || t2 >= history.size()) return std::nullopt;
  if (rec->deactivated_at && *rec->deactivated_at <= t1) return std::nullopt;
  if (rec->released_at && *rec->released_at <= t2) return std::nullopt;
  const auto counted = ledger.counted_messages_along(x.token);
  if (t1 < t2) {
    for (const auto* m : counted) {
      if (m->sent_at > t1 && m->sent_at <= t2) return std::nullopt;
    }
  }
  const auto& k1 = history[t1];
  const auto& k2 = history[t2];
  if (!k1.is_internal(x.owner) || !k2.is_internal(x.target)) return std::nullopt;

  const Count n = sent_count(k1.actor(x.owner).knowledge, x.token);
  const Count m = recv_count(k2.actor(x.target).knowledge, x.token);
  const std::uint64_t predicted = n > m ? n - m : 0;
  std::uint64_t actual = 0;
  for (const auto* msg : counted) {
    if (msg->sent_at <= t1 && (!msg->delivered_at || *msg->delivered_at > t2)) ++actual;
  }
  return std::make_pair(predicted, actual);
}

Simulation::Simulation(RunConfig config)
    : config_(std::move(config)), k_(initial_configuration()), ledger_(Ledger::for_initial(k_)) {
  if (config_.keep_history) history_.push_back(k_);
}

void Simulation::violation(std::string check, std::string detail) {
  violations_.push_back(RunViolation{now(), std::move(check), std::move(detail)});
}

std::vector<Event> Simulation::choices() const {
  auto events = enabled_events(k_, config_.bounds);
  const bool in_closed = config_.allow_in_until && stats_.chosen_events >= *config_.allow_in_until;
  std::erase_if(events, [&](const Event& e) {
    const Rule r = rule_of(e);
    return r == Rule::Snapshot || (in_closed && r == Rule::In);
  });
  return events;
}

void Simulation::apply_entry(const Event& e, EntryKind kind) {
  std::map<ActorAddress, KnowledgeSet> before;
  for (const auto& [a, st] : k_.actors) before.emplace(a, st.knowledge);

  StepContext ctx{&ledger_, &store_, now() + 1, config_.mutation};
  apply(k_, e, ctx);
  trace_.push_back(TraceEntry{ctx.index, kind, e, std::nullopt, hash_of(k_)});
  ++stats_.rule_counts[std::string(rule_name(rule_of(e)))];
  if (config_.keep_history) history_.push_back(k_);
  check_facts_remain(e, before);
}

void Simulation::collect(ActorAddress a) {
  if (!k_.mailbox(a).empty()) violation("self-destruct", to_string(a) + " collected with undelivered messages");
  k_.actors.erase(a);
  k_.mailboxes.erase(a);
  k_.receptionists.erase(a);
  store_.erase(a);
  trace_.push_back(TraceEntry{now() + 1, EntryKind::Collect, std::nullopt, a, hash_of(k_)});
  if (config_.keep_history) history_.push_back(k_);
  ++stats_.collected;
}

void Simulation::step(const Event& e) {
  if (finished_) throw std::logic_error("step after finish");
  apply_entry(e, EntryKind::Chosen);
  ++stats_.chosen_events;
  after_chosen(e);
}

void Simulation::after_chosen(const Event& e) {
  using Kind = SnapshotPolicy::Kind;
  if (config_.policy.kind == Kind::AfterFinalAction) {
    std::optional<ActorAddress> actor;
    if (const auto* idle = std::get_if<IdleEvent>(&e)) actor = idle->actor;
    if (const auto* info = std::get_if<InfoEvent>(&e)) actor = info->created.target;
    if (const auto* rel = std::get_if<ReleaseEvent>(&e)) actor = rel->target;
    if (actor && k_.is_internal(*actor) && k_.actor(*actor).idle()) apply_entry(SnapshotEvent{*actor}, EntryKind::Policy);
  } else if (config_.policy.kind == Kind::Periodic && stats_.chosen_events % config_.policy.every == 0) {
    std::vector<ActorAddress> idle;
    for (const auto& [a, st] : k_.actors) {
      if (st.idle()) idle.push_back(a);
    }
    for (auto a : idle) apply_entry(SnapshotEvent{a}, EntryKind::Policy);
  }
  if (config_.check_every != 0 && stats_.chosen_events % config_.check_every == 0) check_now();
  if (config_.detect_every != 0 && stats_.chosen_events % config_.detect_every == 0) detect_now();
}

namespace {

bool is_compaction_of(const Event& e, ActorAddress actor, Token x) {
  const auto* c = std::get_if<CompactionEvent>(&e);
  return c != nullptr && c->target == actor && c->x == x;
}

}  // namespace

void Simulation::check_facts_remain(const Event& e, const std::map<ActorAddress, KnowledgeSet>& before) {
  for (const auto& [a, old] : before) {
    auto it = k_.actors.find(a);
    if (it == k_.actors.end()) continue;
    const auto& now_k = it->second.knowledge;
    if (now_k == old) continue;
    auto removed = [&](std::string what) { violation("facts-remain", what + " removed from " + to_string(a) + " by " + to_string(e)); };

    for (const auto& [used, created] : old.created_using()) {
      if (now_k.created_using().contains({used, created})) continue;
      const auto* si = std::get_if<SendInfoEvent>(&e);
      if (si == nullptr || si->sender != a || si->y != used.token || si->z != created.token) {
        removed(to_string(Fact{CreatedUsing{used, created}}));
      }
    }
    for (const auto& z : old.created()) {
      if (now_k.created().contains(z)) continue;
      const auto* rec = ledger_.find(z.token);
      if (!is_compaction_of(e, a, z.token) || rec == nullptr || rec->state != RefobState::Released) {
        removed(to_string(Fact{Created{z}}));
      }
    }
    for (const auto& z : old.released()) {
      if (now_k.released().contains(z)) continue;
      const bool info_pending = std::any_of(ledger_.messages().begin(), ledger_.messages().end(), [&](const MessageRecord& m) {
        const auto* info = std::get_if<InfoMsg>(&m.message);
        return info != nullptr && info->created == z && !m.delivered_at;
      });
      if (!is_compaction_of(e, a, z.token) || info_pending) removed(to_string(Fact{Released{z}}));
    }
    for (const auto& x : old.activated()) {
      if (now_k.activated().contains(x)) continue;
      const auto* sr = std::get_if<SendReleaseEvent>(&e);
      if (sr == nullptr || sr->owner != a || sr->x != x.token) removed(to_string(Fact{Activated{x}}));
    }
    for (const auto& [t, n] : old.sent_counts()) {
      auto now_n = now_k.sent_counts().find(t);
      if (now_n == now_k.sent_counts().end()) {
        const auto* sr = std::get_if<SendReleaseEvent>(&e);
        if (sr == nullptr || sr->owner != a || sr->x != t) removed("SentCount(" + to_string(t) + ")");
      } else if (now_n->second < n) {
        violation("facts-remain", "SentCount(" + to_string(t) + ") decreased at " + to_string(a));
      }
    }
    for (const auto& [t, n] : old.recv_counts()) {
      auto now_n = now_k.recv_counts().find(t);
      if (now_n == now_k.recv_counts().end()) {
        if (!is_compaction_of(e, a, t)) removed("RecvCount(" + to_string(t) + ")");
      } else if (now_n->second < n) {
        violation("facts-remain", "RecvCount(" + to_string(t) + ") decreased at " + to_string(a));
      }
    }
  }
}

void Simulation::note_terminated(const std::set<ActorAddress>& terminated) {
  for (auto a : last_terminated_) {
    if (!terminated.contains(a) && k_.is_internal(a)) {
      violation("terminated-stable", to_string(a) + " left the terminated set");
    }
  }
  for (auto a : terminated) terminated_since_.emplace(a, now());
  last_terminated_ = terminated;
}

void Simulation::check_now() {
  for (auto& v : state_violations(k_, ledger_)) violation(std::move(v.check), std::move(v.detail));
  const auto terminated = terminated_set(k_, ledger_);
  for (const auto& [b, st] : k_.actors) {
    if (!st.idle()) continue;
    if (is_simple_garbage_local(b, st.knowledge)) ++stats_.simple_garbage_positives;
    if (is_simple_garbage_literal(b, st.knowledge) && !terminated.contains(b)) {
      ++stats_.simple_garbage_literal_false_positives;
    }
  }
  note_terminated(terminated);
  ++stats_.checks;
}

std::set<ActorAddress> Simulation::detect_now() {
  const auto found = detect(store_);
  const auto terminated = terminated_set(k_, ledger_);
  note_terminated(terminated);
  ++stats_.detect_calls;
  for (auto a : found) {
    if (!terminated.contains(a)) violation("safety", "detect reported " + to_string(a) + " which is not terminated");
    if (detected_ever_.insert(a).second) {
      ++stats_.detections;
      if (auto it = terminated_since_.find(a); it != terminated_since_.end()) {
        stats_.detection_latency_total += now() - it->second;
      }
    }
  }
  last_detected_ = found;
  if (config_.self_destruct) {
    for (auto a : found) {
      if (terminated.contains(a)) collect(a);
    }
    last_terminated_ = terminated_set(k_, ledger_);
  }
  return found;
}

void Simulation::finish() {
  if (finished_) return;
  stats_.quiescent = choices().empty();
  if (config_.final_sweep && config_.policy.kind != SnapshotPolicy::Kind::Never) {
    std::vector<ActorAddress> idle;
    for (const auto& [a, st] : k_.actors) {
      if (st.idle()) idle.push_back(a);
    }
    for (auto a : idle) apply_entry(SnapshotEvent{a}, EntryKind::Sweep);
  }
  if (config_.check_every != 0) check_now();
  const auto terminated = terminated_set(k_, ledger_);
  const auto found = detect_now();
  const bool expect_liveness = config_.policy.kind == SnapshotPolicy::Kind::AfterFinalAction ||
                               (config_.final_sweep && config_.policy.kind != SnapshotPolicy::Kind::Never);
  if (expect_liveness) {
    for (auto a : terminated) {
      if (!found.contains(a) && k_.is_internal(a)) {
        ++stats_.liveness_misses;
        violation("liveness", to_string(a) + " is terminated but not detected");
      }
    }
  }
  if (config_.keep_history && config_.msg_count_samples > 0) sample_message_counts();
  finished_ = true;
}

void Simulation::sample_message_counts() {
  std::vector<Refob> refobs;
  for (const auto& [t, rec] : ledger_.refobs()) refobs.push_back(rec.refob);
  if (refobs.empty()) return;
  std::mt19937_64 rng(config_.seed ^ 0x6d73672d636f756eULL);
  std::uniform_int_distribution<std::size_t> pick_refob(0, refobs.size() - 1);
  std::uniform_int_distribution<EventIndex> pick_time(0, history_.size() - 1);
  const std::uint64_t attempts = std::uint64_t{config_.msg_count_samples} * 50;
  std::uint64_t taken = 0;
  for (std::uint64_t i = 0; i < attempts && taken < config_.msg_count_samples; ++i) {
    const Refob& x = refobs[pick_refob(rng)];
    const EventIndex created = ledger_.find(x.token)->created_at;
    const EventIndex t1 = pick_time(rng);
    const EventIndex t2 = pick_time(rng);
    if (t1 < created || t2 < created) continue;
    const auto got = message_count_instance(history_, ledger_, x, t1, t2);
    if (!got) continue;
    ++taken;
    ++stats_.msg_count_samples;
    if (got->first != got->second) {
      ++stats_.msg_count_mismatches;
      violations_.push_back(RunViolation{now(), "msg-counts",
                                         to_string(x) + " t1=" + std::to_string(t1) + " t2=" + std::to_string(t2) +
                                             ": counts predict " + std::to_string(got->first) + ", ledger has " +
                                             std::to_string(got->second)});
    }
  }
}

RunReport Simulation::report() const {
  RunReport r;
  r.config = config_;
  r.stats = stats_;
  r.violations = violations_;
  r.final_terminated = last_terminated_;
  r.final_detected = last_detected_;
  r.final_hash = hash_of(k_);
  r.trace_length = trace_.size();
  return r;
}

}  // namespace drl
