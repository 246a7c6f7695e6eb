#include "drl/scenarios.hpp"

#include <algorithm>

#include "drl/deduction.hpp"
#include "drl/oracle.hpp"

namespace drl {

RunConfig Script::script_config() {
  RunConfig c;
  c.policy.kind = SnapshotPolicy::Kind::Never;
  c.check_every = 1;
  c.detect_every = 0;
  c.final_sweep = false;
  return c;
}

Script::Script(RunConfig config) : sim_(std::move(config)) {}

void Script::run(const Event& e) { sim_.step(e); }

Refob Script::refob(ActorAddress owner, ActorAddress target) const {
  for (const auto& r : k().actor(owner).knowledge.activated()) {
    if (r.target == target) return r;
  }
  throw RejectedEvent(to_string(owner) + " holds no active refob to " + to_string(target));
}

ActorAddress Script::spawn(ActorAddress parent) {
  const ActorAddress child = k().names.peek_address();
  run(SpawnEvent{k().names.peek_tokens(parent, 1).front(), parent, child, Token{child, 0}});
  return child;
}

std::vector<Refob> Script::send(const Refob& x, const std::vector<Refob>& using_) {
  SendEvent e{x.token, {}, k().names.peek_tokens(x.owner, using_.size()), x.owner, x.target, {}};
  std::vector<Refob> created;
  for (std::size_t i = 0; i < using_.size(); ++i) {
    e.ys.push_back(using_[i].token);
    e.targets.push_back(using_[i].target);
    created.push_back(Refob{e.zs[i], x.target, using_[i].target});
  }
  run(e);
  return created;
}

void Script::receive(ActorAddress a) {
  for (const auto& m : k().mailbox(a)) {
    if (const auto* app = std::get_if<AppMsg>(&m)) {
      run(ReceiveEvent{app->along, a, app->refobs});
      return;
    }
  }
  throw RejectedEvent("no application message for " + to_string(a));
}

void Script::idle(ActorAddress a) { run(IdleEvent{a}); }

void Script::send_info(ActorAddress a, const Refob& used, const Refob& created) {
  run(SendInfoEvent{used.token, created.token, a, created.owner, created.target});
}

void Script::info(ActorAddress a) {
  for (const auto& m : k().mailbox(a)) {
    if (const auto* info = std::get_if<InfoMsg>(&m)) {
      run(InfoEvent{info->along, info->created});
      return;
    }
  }
  throw RejectedEvent("no info message for " + to_string(a));
}

void Script::send_release(const Refob& x) { run(SendReleaseEvent{x.token, x.owner, x.target}); }
void Script::release(const Refob& x) { run(ReleaseEvent{x.token, x.owner, x.target}); }
void Script::compaction(const Refob& x) { run(CompactionEvent{x.token, x.owner, x.target}); }
void Script::snapshot(ActorAddress a) { run(SnapshotEvent{a}); }

void ScenarioOutcome::expect(bool ok, const std::string& what) {
  if (!ok) {
    passed = false;
    failures.push_back(what);
  }
}

namespace {

std::string names(const std::set<ActorAddress>& s) {
  std::string out = "{";
  for (auto a : s) out += (out.size() > 1 ? "," : "") + to_string(a);
  return out + "}";
}

void expect_clean(ScenarioOutcome& out, const Simulation& sim) {
  for (const auto& v : sim.violations()) {
    out.expect(false, v.check + " at entry " + std::to_string(v.at) + ": " + v.detail);
  }
}

bool mentions(const KnowledgeSet& phi, Token z) {
  auto in = [&](const auto& refobs) {
    return std::any_of(refobs.begin(), refobs.end(), [&](const Refob& r) { return r.token == z; });
  };
  if (in(phi.created()) || in(phi.released()) || in(phi.activated())) return true;
  for (const auto& [u, c] : phi.created_using()) {
    if (u.token == z || c.token == z) return true;
  }
  return phi.sent_counts().contains(z) || phi.recv_counts().contains(z);
}

// Six actors: F sends C a message carrying a refob to E, then drops its own
// refobs, and A releases its refob to F. Only F is unreachable.
ScenarioOutcome fig1() {
  ScenarioOutcome out;
  Script s;
  const ActorAddress a = kInitialActor;
  const ActorAddress b = s.spawn(a), c = s.spawn(a), d = s.spawn(a), e = s.spawn(a), f = s.spawn(a);
  for (auto child : {b, c, d, e, f}) s.idle(child);

  const Refob cd = s.send(s.refob(a, c), {s.refob(a, d)}).front();
  s.receive(c);
  s.idle(c);
  const auto from_a = s.send(s.refob(a, f), {s.refob(a, c), s.refob(a, e)});
  s.receive(f);
  const Refob fc = from_a[0], fe = from_a[1];
  const Refob ce = s.send(fc, {fe}).front();  // the message m
  s.send_info(f, fe, ce);
  s.send_release(fc);
  s.send_release(fe);
  s.idle(f);
  const Refob af = s.refob(a, f);
  s.send_release(af);
  s.release(af);
  s.compaction(af);
  s.info(e);
  s.release(fe);

  const auto& k = s.k();
  const auto& ledger = s.sim().ledger();
  auto check = [&](const std::string& when) {
    const auto terminated = terminated_set(k, ledger);
    out.expect(terminated == std::set<ActorAddress>{f}, when + ": terminated is " + names(terminated) + ", expected {" +
                                                            to_string(f) + "}");
    out.expect(ledger.is_unreleased(ce.token), when + ": E is not a potential acquaintance of C");
    out.expect(ledger.is_unreleased(cd.token), when + ": D is not reachable from C");
    out.notes.push_back(when + ": terminated = " + names(terminated));
  };
  out.expect(!k.mailbox(c).empty() && k.actor(c).idle(), "C should be idle with m undelivered");
  check("before C receives m");
  out.expect(is_simple_garbage_local(f, k.actor(f).knowledge), "F should pass the simple-garbage test");
  s.receive(c);
  check("after C receives m");
  expect_clean(out, s.sim());
  return out;
}

// A spawns B and C, creates z:B->C using y:A->C and sends it to B; B activates
// and later releases z; C learns of z's creation and release, then compacts.
ScenarioOutcome fig2_order(bool info_first) {
  ScenarioOutcome out;
  Script s;
  const ActorAddress a = kInitialActor;
  const ActorAddress b = s.spawn(a);
  const ActorAddress c = s.spawn(a);
  s.idle(b);
  s.idle(c);
  const Refob x = s.refob(a, b), y = s.refob(a, c);
  out.expect(s.k().actor(b).knowledge.contains(Created{x}), "B records Created(x) on spawn");
  out.expect(s.k().actor(c).knowledge.contains(Created{y}), "C records Created(y) on spawn");

  const Refob z = s.send(x, {y}).front();
  out.expect(s.k().actor(a).knowledge.contains(CreatedUsing{y, z}), "(3) A records CreatedUsing(y,z)");
  s.receive(b);
  out.expect(s.k().actor(b).knowledge.contains(Activated{z}), "(4) B records Activated(z)");
  s.send_info(a, y, z);
  out.expect(!s.k().actor(a).knowledge.contains(CreatedUsing{y, z}), "(4) A forgets z after informing C");
  s.send_release(z);
  out.expect(!s.k().actor(b).knowledge.contains(Activated{z}), "(5) B deactivates z");
  const auto& box = s.k().mailbox(c);
  out.expect(std::find(box.begin(), box.end(), Message{ReleaseMsg{z, 0}}) != box.end(), "(5) ReleaseMsg(z,0) sent to C");
  s.idle(b);
  if (info_first) {
    s.info(c);
    s.release(z);
  } else {
    s.release(z);
    s.info(c);
  }
  out.expect(s.k().actor(c).knowledge.contains(Created{z}) && s.k().actor(c).knowledge.contains(Released{z}),
             "(6) C holds Created(z) and Released(z)");
  s.compaction(z);
  out.expect(!mentions(s.k().actor(c).knowledge, z.token), "(6) C keeps facts about z after compaction");
  expect_clean(out, s.sim());
  return out;
}

ScenarioOutcome fig2() {
  auto out = fig2_order(true);
  auto reversed = fig2_order(false);
  for (auto& f : reversed.failures) out.expect(false, "release before info: " + f);
  return out;
}

bool counts_agree(const KnowledgeSet& owner, const KnowledgeSet& target, const std::vector<Token>& tokens) {
  return std::all_of(tokens.begin(), tokens.end(),
                     [&](Token t) { return sent_count(owner, t) == recv_count(target, t); });
}

// B sends C one message along x, and later one along a second refob x2.
// Snapshot pairs agree on per-token counts exactly when nothing from B is
// undelivered to C between the two snapshot times.
ScenarioOutcome fig3() {
  ScenarioOutcome out;
  Script s;
  const ActorAddress a = kInitialActor;
  const ActorAddress b = s.spawn(a);
  const ActorAddress c = s.spawn(a);
  s.idle(b);
  s.idle(c);
  const Refob x = s.send(s.refob(a, b), {s.refob(a, c)}).front();
  s.receive(b);
  s.send(x);
  s.idle(b);
  const KnowledgeSet b_t1 = s.k().actor(b).knowledge;
  const KnowledgeSet c_t0 = s.k().actor(c).knowledge;
  s.receive(c);
  s.idle(c);
  const KnowledgeSet c_t2 = s.k().actor(c).knowledge;
  const Refob x2 = s.send(s.refob(a, b), {s.refob(a, c)}).front();
  s.receive(b);
  s.send(x2);
  s.idle(b);
  const KnowledgeSet b_t3 = s.k().actor(b).knowledge;
  s.receive(c);
  s.idle(c);
  const KnowledgeSet c_t4 = s.k().actor(c).knowledge;

  const std::vector<Token> tokens{x.token, x2.token};
  out.expect(!counts_agree(b_t1, c_t0, tokens), "B after one send and C before any receipt must disagree");
  out.expect(counts_agree(b_t1, c_t2, tokens), "B after one send and C after one receipt must agree");
  out.expect(!counts_agree(b_t3, c_t0, tokens), "B's later snapshot against C's first must disagree");
  out.expect(!counts_agree(b_t3, c_t2, tokens), "the message along x2 must keep the later pair apart");
  out.expect(counts_agree(b_t3, c_t4, tokens), "final snapshots must agree");
  out.expect(sent_count(b_t3, x.token) == 1 && sent_count(b_t3, x2.token) == 1,
             "one send per token; a per-actor count would read 2");
  expect_clean(out, s.sim());
  return out;
}

// A1 spawns B, A2 and A3. A1 creates x2:A2->B using x1:A1->B, and A2 creates
// x3:A3->B using x2.
ScenarioOutcome chain(bool info_in_transit) {
  ScenarioOutcome out;
  Script s;
  const ActorAddress a1 = kInitialActor;
  const ActorAddress b = s.spawn(a1), a2 = s.spawn(a1), a3 = s.spawn(a1);
  for (auto child : {b, a2, a3}) s.idle(child);
  const Refob x1 = s.refob(a1, b);
  const auto given = s.send(s.refob(a1, a2), {x1, s.refob(a1, a3)});
  s.receive(a2);
  const Refob x2 = given[0], w = given[1];
  const Refob x3 = s.send(w, {x2}).front();
  s.receive(a3);
  if (info_in_transit) s.send_info(a2, x2, x3);

  const auto found = find_chain(s.k(), s.sim().ledger(), x3);
  const std::vector<Refob> expected{x1, x2, x3};
  out.expect(found.has_value(), "no chain to x3");
  if (found) {
    out.expect(*found == expected, "chain to x3 has length " + std::to_string(found->size()) + ", expected x1,x2,x3");
    std::string path;
    for (const auto& r : *found) path += (path.empty() ? "" : " ") + to_string(r);
    out.notes.push_back("chain: " + path);
  }
  out.expect(!s.k().actor(b).knowledge.contains(Created{x3}), "B must not know x3 directly");
  expect_clean(out, s.sim());
  return out;
}

}  // namespace

std::vector<Scenario> workload_scenarios() {
  return {
      {"fig1", "six actors; F forgets its refobs after sending m to C; only F is terminated", fig1},
      {"fig2", "create, activate, inform, release and compact a refob z:B->C", fig2},
      {"fig3", "per-token message counts identify quiescent snapshot pairs", fig3},
      {"chain", "chain x1,x2,x3 to B through CreatedUsing facts", [] { return chain(false); }},
      {"chain-info", "the same chain with the last link carried by an Info message in transit",
       [] { return chain(true); }},
  };
}

const Scenario* find_scenario(std::string_view name) {
  static const auto all = workload_scenarios();
  for (const auto& s : all) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

}  // namespace drl
