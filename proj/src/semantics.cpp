#include "drl/semantics.hpp"

#include <algorithm>

#include "drl/deduction.hpp"

namespace drl {

namespace {

[[noreturn]] void reject(const std::string& why) { throw RejectedEvent(why); }

ActorState& busy_actor(Configuration& k, ActorAddress a, std::string_view rule) {
  auto it = k.actors.find(a);
  if (it == k.actors.end()) reject(std::string(rule) + ": " + to_string(a) + " is not an internal actor");
  if (!it->second.busy()) reject(std::string(rule) + ": " + to_string(a) + " is not busy");
  return it->second;
}

ActorState& idle_actor(Configuration& k, ActorAddress a, std::string_view rule) {
  auto it = k.actors.find(a);
  if (it == k.actors.end()) reject(std::string(rule) + ": " + to_string(a) + " is not an internal actor");
  if (!it->second.idle()) reject(std::string(rule) + ": " + to_string(a) + " is not idle");
  return it->second;
}

std::vector<Message>::const_iterator find_message(const Configuration& k, ActorAddress to, const Message& m) {
  const auto& box = k.mailbox(to);
  return std::find(box.begin(), box.end(), m);
}

bool has_message(const Configuration& k, ActorAddress to, const Message& m) {
  return find_message(k, to, m) != k.mailbox(to).end();
}

void remove_message(Configuration& k, ActorAddress to, const Message& m) {
  auto it = k.mailboxes.find(to);
  auto pos = std::find(it->second.begin(), it->second.end(), m);
  it->second.erase(pos);
  if (it->second.empty()) k.mailboxes.erase(it);
}

void push_message(Configuration& k, ActorAddress to, Message m) { k.mailboxes[to].push_back(std::move(m)); }

bool all_distinct(std::vector<Token> tokens) {
  std::sort(tokens.begin(), tokens.end());
  return std::adjacent_find(tokens.begin(), tokens.end()) == tokens.end();
}

std::vector<Refob> sorted_unique(std::vector<Refob> rs) {
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  return rs;
}

}  // namespace

std::string_view mutation_name(Mutation m) {
  switch (m) {
    case Mutation::None: return "none";
    case Mutation::SkipIncSent: return "skip-inc-sent";
    case Mutation::SkipCreatedUsing: return "skip-created-using";
  }
  return "?";
}

Mutation mutation_from_name(std::string_view name) {
  for (auto m : {Mutation::None, Mutation::SkipIncSent, Mutation::SkipCreatedUsing}) {
    if (mutation_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown mutation: " + std::string(name));
}

void apply_spawn(Configuration& k, const SpawnEvent& e, const StepContext& ctx) {
  auto& parent = busy_actor(k, e.parent, "Spawn");
  if (!k.names.is_fresh(e.child)) reject("Spawn: child address " + to_string(e.child) + " is not fresh");
  if (!k.names.is_fresh(e.x) || !k.names.is_fresh(e.self) || e.x == e.self) reject("Spawn: tokens are not fresh");
  const Refob x{e.x, e.parent, e.child};
  const Refob y{e.self, e.child, e.child};

  k.names.claim(e.child);
  k.names.claim(e.x);
  k.names.claim(e.self);
  k.names.note_spawn();
  parent.knowledge.insert(Activated{x});
  ActorState child;
  child.mode = Mode::Busy;
  child.knowledge.insert(Created{x});
  child.knowledge.insert(Created{y});
  child.knowledge.insert(Activated{y});
  k.actors.emplace(e.child, std::move(child));

  if (ctx.ledger) {
    ctx.ledger->create(x, RefobState::Active, Rule::Spawn, ctx.index);
    ctx.ledger->create(y, RefobState::Active, Rule::Spawn, ctx.index);
  }
}

void apply_send(Configuration& k, const SendEvent& e, const StepContext& ctx) {
  auto& sender = busy_actor(k, e.sender, "Send");
  const Refob x{e.x, e.sender, e.recipient};
  if (!sender.knowledge.activated().contains(x)) reject("Send: " + to_string(x) + " is not activated");
  if (e.ys.size() != e.zs.size() || e.ys.size() != e.targets.size()) reject("Send: parameter lengths differ");
  for (std::size_t i = 0; i < e.ys.size(); ++i) {
    const Refob y{e.ys[i], e.sender, e.targets[i]};
    if (!sender.knowledge.activated().contains(y)) reject("Send: " + to_string(y) + " is not activated");
    if (!k.names.is_fresh(e.zs[i])) reject("Send: token " + to_string(e.zs[i]) + " is not fresh");
  }
  if (!all_distinct(e.zs)) reject("Send: new tokens repeat");
  if (!k.is_internal(e.recipient) && !k.is_external(e.recipient)) {
    reject("Send: recipient " + to_string(e.recipient) + " does not exist");
  }

  std::vector<Refob> created;
  for (std::size_t i = 0; i < e.ys.size(); ++i) {
    const Refob y{e.ys[i], e.sender, e.targets[i]};
    const Refob z{e.zs[i], e.recipient, e.targets[i]};
    k.names.claim(e.zs[i]);
    if (ctx.mutation != Mutation::SkipCreatedUsing) sender.knowledge.insert(CreatedUsing{y, z});
    created.push_back(z);
  }
  if (ctx.mutation != Mutation::SkipIncSent) inc_sent_in_place(e.x, sender.knowledge);
  AppMsg msg{e.x, sorted_unique(created)};
  if (ctx.ledger) {
    for (const auto& z : msg.refobs) ctx.ledger->create(z, RefobState::Pending, Rule::Send, ctx.index);
    ctx.ledger->record_send(e.recipient, msg, ctx.index);
  }
  push_message(k, e.recipient, std::move(msg));
}

void apply_receive(Configuration& k, const ReceiveEvent& e, const StepContext& ctx) {
  auto& recipient = idle_actor(k, e.recipient, "Receive");
  const Message msg = AppMsg{e.x, sorted_unique(e.refobs)};
  if (!has_message(k, e.recipient, msg)) reject("Receive: no " + to_string(msg) + " for " + to_string(e.recipient));

  remove_message(k, e.recipient, msg);
  recipient.mode = Mode::Busy;
  const auto& refobs = std::get<AppMsg>(msg).refobs;
  for (const auto& z : refobs) recipient.knowledge.insert(Activated{z});
  inc_recv_in_place(e.x, recipient.knowledge);
  if (ctx.ledger) {
    ctx.ledger->record_delivery(e.recipient, msg, ctx.index, Rule::Receive);
    for (const auto& z : refobs) ctx.ledger->advance(z.token, RefobState::Active, ctx.index);
  }
}

void apply_idle(Configuration& k, const IdleEvent& e, const StepContext&) {
  busy_actor(k, e.actor, "Idle").mode = Mode::Idle;
}

void apply_send_info(Configuration& k, const SendInfoEvent& e, const StepContext& ctx) {
  auto& sender = busy_actor(k, e.sender, "SendInfo");
  const Refob y{e.y, e.sender, e.target};
  const Refob z{e.z, e.owner, e.target};
  const CreatedUsing fact{y, z};
  if (!sender.knowledge.contains(fact)) reject("SendInfo: missing " + to_string(Fact{fact}));

  sender.knowledge.erase(fact);
  inc_sent_in_place(e.y, sender.knowledge);
  InfoMsg msg{e.y, z};
  if (ctx.ledger) ctx.ledger->record_send(e.target, msg, ctx.index);
  push_message(k, e.target, std::move(msg));
}

void apply_info(Configuration& k, const InfoEvent& e, const StepContext& ctx) {
  const ActorAddress c = e.created.target;
  auto& target = idle_actor(k, c, "Info");
  const Message msg = InfoMsg{e.y, e.created};
  if (!has_message(k, c, msg)) reject("Info: no " + to_string(msg) + " for " + to_string(c));

  remove_message(k, c, msg);
  target.knowledge.insert(Created{e.created});
  inc_recv_in_place(e.y, target.knowledge);
  if (ctx.ledger) ctx.ledger->record_delivery(c, msg, ctx.index, Rule::Info);
}

void apply_send_release(Configuration& k, const SendReleaseEvent& e, const StepContext& ctx) {
  auto& owner = busy_actor(k, e.owner, "SendRelease");
  const Refob x{e.x, e.owner, e.target};
  if (!owner.knowledge.activated().contains(x)) reject("SendRelease: " + to_string(x) + " is not activated");
  if (has_created_using_from(owner.knowledge, e.x)) {
    reject("SendRelease: refobs created using " + to_string(x) + " have not been reported yet");
  }

  const Count n = sent_count(owner.knowledge, e.x);
  owner.knowledge.erase(Activated{x});
  owner.knowledge.erase_sent_count(e.x);
  ReleaseMsg msg{x, n};
  if (ctx.ledger) {
    ctx.ledger->advance(e.x, RefobState::Inactive, ctx.index);
    ctx.ledger->record_send(e.target, msg, ctx.index);
  }
  push_message(k, e.target, msg);
}

void apply_release(Configuration& k, const ReleaseEvent& e, const StepContext& ctx) {
  auto& target = idle_actor(k, e.target, "Release");
  const Refob x{e.x, e.owner, e.target};
  const auto& box = k.mailbox(e.target);
  auto it = std::find_if(box.begin(), box.end(), [&](const Message& m) {
    const auto* rel = std::get_if<ReleaseMsg>(&m);
    return rel != nullptr && rel->released == x;
  });
  if (it == box.end()) reject("Release: no ReleaseMsg for " + to_string(x));
  const Message msg = *it;
  if (recv_count(target.knowledge, e.x) != std::get<ReleaseMsg>(msg).count) {
    reject("Release: " + to_string(msg) + " is not deliverable before all messages along it arrive");
  }

  remove_message(k, e.target, msg);
  target.knowledge.insert(Released{x});
  if (ctx.ledger) {
    ctx.ledger->record_delivery(e.target, msg, ctx.index, Rule::Release);
    ctx.ledger->advance(e.x, RefobState::Released, ctx.index);
  }
}

void apply_compaction(Configuration& k, const CompactionEvent& e, const StepContext&) {
  auto& target = idle_actor(k, e.target, "Compaction");
  const Refob x{e.x, e.owner, e.target};
  if (!target.knowledge.created().contains(x) || !target.knowledge.released().contains(x)) {
    reject("Compaction: " + to_string(e.target) + " does not hold both Created and Released for " + to_string(x));
  }
  target.knowledge.erase(Created{x});
  target.knowledge.erase(Released{x});
  target.knowledge.erase_recv_count(e.x);
}

void apply_snapshot(Configuration& k, const SnapshotEvent& e, const StepContext& ctx) {
  const auto& actor = idle_actor(k, e.actor, "Snapshot");
  if (ctx.store) ctx.store->record(e.actor, actor.knowledge, ctx.index);
}

void apply_in(Configuration& k, const InEvent& e, const StepContext& ctx) {
  if (!k.receptionists.contains(e.receptionist)) reject("In: " + to_string(e.receptionist) + " is not a receptionist");
  std::vector<Token> tokens;
  std::vector<ActorAddress> fresh_targets;
  for (const auto& r : e.refobs) {
    if (r.owner != e.receptionist) reject("In: " + to_string(r) + " is not owned by the receptionist");
    if (!k.names.is_fresh(r.token)) reject("In: token " + to_string(r.token) + " is not fresh");
    tokens.push_back(r.token);
    if (k.is_internal(r.target)) {
      if (!k.receptionists.contains(r.target)) reject("In: internal target " + to_string(r.target) + " is hidden");
    } else if (!k.is_external(r.target)) {
      if (!k.names.is_fresh(r.target)) reject("In: target " + to_string(r.target) + " is neither known nor fresh");
      fresh_targets.push_back(r.target);
    }
  }
  if (!all_distinct(tokens)) reject("In: tokens repeat");

  for (auto t : tokens) k.names.claim(t);
  for (auto a : fresh_targets) {
    k.names.claim(a);
    k.externals.insert(a);
  }
  k.names.note_injection();
  AppMsg msg{Token::external(), sorted_unique(e.refobs)};
  if (ctx.ledger) {
    for (const auto& r : msg.refobs) ctx.ledger->create(r, RefobState::Pending, Rule::In, ctx.index);
    ctx.ledger->record_send(e.receptionist, msg, ctx.index);
  }
  push_message(k, e.receptionist, std::move(msg));
}

void apply_out(Configuration& k, const OutEvent& e, const StepContext& ctx) {
  if (!k.is_external(e.external)) reject("Out: " + to_string(e.external) + " is not external");
  const Message msg = AppMsg{e.x, sorted_unique(e.refobs)};
  if (!has_message(k, e.external, msg)) reject("Out: no " + to_string(msg) + " for " + to_string(e.external));

  remove_message(k, e.external, msg);
  const auto& refobs = std::get<AppMsg>(msg).refobs;
  for (const auto& r : refobs) {
    if (k.is_internal(r.target)) k.receptionists.insert(r.target);
  }
  if (ctx.ledger) {
    ctx.ledger->record_delivery(e.external, msg, ctx.index, Rule::Out);
    for (const auto& r : refobs) ctx.ledger->advance(r.token, RefobState::Active, ctx.index);
  }
}

void apply_drop_system_to_external(Configuration& k, const Message& dropped, ActorAddress external,
                                   const StepContext& ctx) {
  const Message message = dropped;  // may alias the mailbox entry removed below
  if (!k.is_external(external)) reject("drop: " + to_string(external) + " is not external");
  if (std::holds_alternative<AppMsg>(message)) reject("drop: application messages are delivered with Out");
  if (!has_message(k, external, message)) reject("drop: no " + to_string(message) + " for " + to_string(external));

  remove_message(k, external, message);
  // The refob of a dropped ReleaseMsg stays inactive: the external target
  // never records its release, and messages sent earlier along it may still
  // be in transit.
  if (ctx.ledger) {
    const bool release = std::holds_alternative<ReleaseMsg>(message);
    ctx.ledger->record_delivery(external, message, ctx.index, release ? Rule::ReleaseOut : Rule::InfoOut);
  }
}

void apply(Configuration& k, const Event& e, const StepContext& ctx) {
  std::visit(
      [&](const auto& ev) {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, SpawnEvent>) apply_spawn(k, ev, ctx);
        else if constexpr (std::is_same_v<T, SendEvent>) apply_send(k, ev, ctx);
        else if constexpr (std::is_same_v<T, ReceiveEvent>) apply_receive(k, ev, ctx);
        else if constexpr (std::is_same_v<T, IdleEvent>) apply_idle(k, ev, ctx);
        else if constexpr (std::is_same_v<T, SendInfoEvent>) apply_send_info(k, ev, ctx);
        else if constexpr (std::is_same_v<T, InfoEvent>) apply_info(k, ev, ctx);
        else if constexpr (std::is_same_v<T, SendReleaseEvent>) apply_send_release(k, ev, ctx);
        else if constexpr (std::is_same_v<T, ReleaseEvent>) apply_release(k, ev, ctx);
        else if constexpr (std::is_same_v<T, CompactionEvent>) apply_compaction(k, ev, ctx);
        else if constexpr (std::is_same_v<T, SnapshotEvent>) apply_snapshot(k, ev, ctx);
        else if constexpr (std::is_same_v<T, InEvent>) apply_in(k, ev, ctx);
        else if constexpr (std::is_same_v<T, OutEvent>) apply_out(k, ev, ctx);
        else if constexpr (std::is_same_v<T, ReleaseOutEvent>) {
          const auto& box = k.mailbox(ev.external);
          auto it = std::find_if(box.begin(), box.end(), [&](const Message& m) {
            const auto* rel = std::get_if<ReleaseMsg>(&m);
            return rel != nullptr && rel->released.token == ev.x;
          });
          if (it == box.end()) reject("ReleaseOut: no ReleaseMsg for " + to_string(ev.x));
          const Message msg = *it;
          apply_drop_system_to_external(k, msg, ev.external, ctx);
        } else {
          static_assert(std::is_same_v<T, InfoOutEvent>);
          apply_drop_system_to_external(k, InfoMsg{ev.y, ev.created}, ev.created.target, ctx);
        }
      },
      e);
}

Configuration applied(Configuration k, const Event& e, const StepContext& ctx) {
  apply(k, e, ctx);
  return k;
}

bool is_enabled(const Configuration& k, const Event& e) {
  try {
    Configuration copy = k;
    apply(copy, e);
    return true;
  } catch (const RejectedEvent&) {
    return false;
  }
}

namespace {

/// Calls f with every strictly increasing index vector of length 0..max_len
/// drawn from [0, n).
template <class F>
void for_each_combination(std::size_t n, std::size_t max_len, F&& f) {
  std::vector<std::size_t> idx;
  f(idx);
  // Depth-first over increasing sequences.
  auto rec = [&](auto& self, std::size_t start) -> void {
    if (idx.size() == max_len) return;
    for (std::size_t i = start; i < n; ++i) {
      idx.push_back(i);
      f(idx);
      self(self, i + 1);
      idx.pop_back();
    }
  };
  rec(rec, 0);
}

std::vector<Message> distinct(const std::vector<Message>& box) {
  std::vector<Message> out = box;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<Event> enabled_events(const Configuration& k, const ExplorationBounds& bounds) {
  std::vector<Event> out;
  const std::size_t fanout = bounds.max_refobs_per_message;

  for (const auto& [a, state] : k.actors) {
    const auto& phi = state.knowledge;
    if (state.busy()) {
      if (k.names.spawned() < bounds.max_actors) {
        const ActorAddress child = k.names.peek_address();
        out.emplace_back(SpawnEvent{k.names.peek_tokens(a, 1).front(), a, child, Token{child, 0}});
      }
      const std::vector<Refob> active(phi.activated().begin(), phi.activated().end());
      for (const auto& x : active) {
        for_each_combination(active.size(), fanout, [&](const std::vector<std::size_t>& pick) {
          SendEvent send{x.token, {}, k.names.peek_tokens(a, pick.size()), a, x.target, {}};
          for (auto i : pick) {
            send.ys.push_back(active[i].token);
            send.targets.push_back(active[i].target);
          }
          out.emplace_back(std::move(send));
        });
      }
      out.emplace_back(IdleEvent{a});
      for (const auto& [used, created] : phi.created_using()) {
        out.emplace_back(SendInfoEvent{used.token, created.token, a, created.owner, created.target});
      }
      for (const auto& x : active) {
        if (!has_created_using_from(phi, x.token)) out.emplace_back(SendReleaseEvent{x.token, a, x.target});
      }
    } else {
      out.emplace_back(SnapshotEvent{a});
      for (const auto& m : distinct(k.mailbox(a))) {
        if (const auto* app = std::get_if<AppMsg>(&m)) {
          out.emplace_back(ReceiveEvent{app->along, a, app->refobs});
        } else if (const auto* info = std::get_if<InfoMsg>(&m)) {
          out.emplace_back(InfoEvent{info->along, info->created});
        } else {
          const auto& rel = std::get<ReleaseMsg>(m);
          if (recv_count(phi, rel.released.token) == rel.count) {
            out.emplace_back(ReleaseEvent{rel.released.token, rel.released.owner, a});
          }
        }
      }
      for (const auto& x : phi.created()) {
        if (phi.released().contains(x)) out.emplace_back(CompactionEvent{x.token, x.owner, x.target});
      }
    }
  }

  for (auto ext : k.externals) {
    for (const auto& m : distinct(k.mailbox(ext))) {
      if (const auto* app = std::get_if<AppMsg>(&m)) {
        out.emplace_back(OutEvent{app->along, ext, app->refobs});
      } else if (const auto* info = std::get_if<InfoMsg>(&m)) {
        out.emplace_back(InfoOutEvent{info->along, info->created});
      } else {
        out.emplace_back(ReleaseOutEvent{std::get<ReleaseMsg>(m).released.token, ext});
      }
    }
  }

  if (bounds.allow_in && k.names.injections() < bounds.max_external_injections) {
    std::vector<ActorAddress> candidates(k.receptionists.begin(), k.receptionists.end());
    candidates.insert(candidates.end(), k.externals.begin(), k.externals.end());
    candidates.push_back(k.names.peek_address());
    for (auto a : k.receptionists) {
      for_each_combination(candidates.size(), fanout, [&](const std::vector<std::size_t>& pick) {
        const auto tokens = k.names.peek_tokens(a, pick.size());
        InEvent in{a, {}};
        for (std::size_t i = 0; i < pick.size(); ++i) in.refobs.push_back(Refob{tokens[i], a, candidates[pick[i]]});
        std::sort(in.refobs.begin(), in.refobs.end());
        out.emplace_back(std::move(in));
      });
    }
  }

  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace drl
