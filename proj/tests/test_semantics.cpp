#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "drl/deduction.hpp"
#include "drl/semantics.hpp"
#include "support.hpp"

namespace drl {
namespace {

constexpr ActorAddress A = kInitialActor;
constexpr ActorAddress E = kInitialExternal;

class World : public ::testing::Test {
 protected:
  World() : ledger(Ledger::for_initial(k)) { bounds.allow_in = true; }

  void run(const Event& e) {
    ASSERT_TRUE(is_enabled(k, e)) << to_string(e);
    apply(k, e, StepContext{&ledger, &store, ++index});
    ASSERT_TRUE(configuration_invariant_violations(k).empty());
  }

  ActorAddress spawn(ActorAddress parent) {
    const ActorAddress child = k.names.peek_address();
    run(SpawnEvent{k.names.peek_tokens(parent, 1).front(), parent, child, Token{child, 0}});
    return child;
  }

  /// Sends along x, creating one refob per entry of `using_`.
  std::vector<Refob> send(const Refob& x, const std::vector<Refob>& using_ = {}) {
    SendEvent e{x.token, {}, k.names.peek_tokens(x.owner, using_.size()), x.owner, x.target, {}};
    std::vector<Refob> created;
    for (std::size_t i = 0; i < using_.size(); ++i) {
      e.ys.push_back(using_[i].token);
      e.targets.push_back(using_[i].target);
      created.push_back(Refob{e.zs[i], x.target, using_[i].target});
    }
    run(e);
    return created;
  }

  Refob activated(ActorAddress owner, ActorAddress target) const {
    for (const auto& r : k.actor(owner).knowledge.activated()) {
      if (r.target == target) return r;
    }
    ADD_FAILURE() << "no activated refob " << to_string(owner) << "->" << to_string(target);
    return {};
  }

  const KnowledgeSet& phi(ActorAddress a) const { return k.actor(a).knowledge; }

  RefobState state_of(const Refob& r) const { return ledger.find(r.token)->state; }

  Configuration k = initial_configuration();
  Ledger ledger;
  SnapshotStore store;
  EventIndex index = 0;
  ExplorationBounds bounds;
};

template <class T>
bool contains_rule(const std::vector<Event>& events, Rule r, const std::function<bool(const T&)>& pred = nullptr) {
  return std::any_of(events.begin(), events.end(), [&](const Event& e) {
    if (rule_of(e) != r) return false;
    return !pred || pred(std::get<T>(e));
  });
}

TEST_F(World, InitialEnabledEvents) {
  const auto events = enabled_events(k, bounds);
  EXPECT_TRUE(contains_rule<IdleEvent>(events, Rule::Idle));
  EXPECT_TRUE(contains_rule<SpawnEvent>(events, Rule::Spawn));
  EXPECT_TRUE(contains_rule<SendEvent>(events, Rule::Send, [](const SendEvent& s) { return s.recipient == E; }));
  EXPECT_TRUE(std::is_sorted(events.begin(), events.end()));
}

TEST_F(World, AllIdleAndNoMessagesLeavesOnlySnapshots) {
  run(IdleEvent{A});
  const auto events = enabled_events(k, bounds);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events.front(), Event{SnapshotEvent{A}});
}

TEST_F(World, BusyActorWithoutRefobsCanOnlyIdle) {
  k.actor(A).knowledge = KnowledgeSet{};
  bounds.max_actors = 1;  // Spawn needs no refob, so the cap rules it out
  const auto events = enabled_events(k, bounds);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(rule_of(events.front()), Rule::Idle);
}

TEST_F(World, SpawnGivesChildThreeFacts) {
  const ActorAddress b = spawn(A);
  const Refob x = activated(A, b);
  const Refob y{Token{b, 0}, b, b};
  EXPECT_EQ(phi(b), (KnowledgeSet{Created{x}, Created{y}, Activated{y}}));
  EXPECT_TRUE(derives(phi(A), Activated{x}));
  EXPECT_TRUE(k.actor(b).busy());
  EXPECT_EQ(state_of(x), RefobState::Active);
  EXPECT_EQ(state_of(y), RefobState::Active);
}

TEST_F(World, SendRecordsCreatedUsingAndCount) {
  const ActorAddress b = spawn(A);
  const ActorAddress c = spawn(A);
  const Refob x = activated(A, b);
  const Refob y = activated(A, c);
  const auto zs = send(x, {y});
  ASSERT_EQ(zs.size(), 1u);
  const Refob z = zs.front();
  EXPECT_EQ(z.owner, b);
  EXPECT_EQ(z.target, c);
  EXPECT_TRUE(phi(A).contains(CreatedUsing{y, z}));
  EXPECT_EQ(sent_count(phi(A), x.token), 1u);
  EXPECT_EQ(k.mailbox(b), (std::vector<Message>{AppMsg{x.token, {z}}}));
  EXPECT_EQ(state_of(z), RefobState::Pending);
}

TEST_F(World, SendWithoutRefobsOnlyCounts) {
  const ActorAddress b = spawn(A);
  const Refob x = activated(A, b);
  const auto before = phi(A);
  send(x);
  EXPECT_EQ(phi(A), inc_sent(x.token, before));
  EXPECT_EQ(k.mailbox(b).size(), 1u);
}

TEST_F(World, SelfSend) {
  const Refob y = activated(A, A);
  send(y);
  EXPECT_EQ(k.mailbox(A), (std::vector<Message>{AppMsg{y.token, {}}}));
  EXPECT_EQ(sent_count(phi(A), y.token), 1u);
}

TEST_F(World, ReceiveActivates) {
  const ActorAddress b = spawn(A);
  const ActorAddress c = spawn(A);
  const Refob x = activated(A, b);
  const Refob z = send(x, {activated(A, c)}).front();
  run(IdleEvent{b});
  run(ReceiveEvent{x.token, b, {z}});
  EXPECT_TRUE(k.actor(b).busy());
  EXPECT_TRUE(phi(b).activated().contains(z));
  EXPECT_EQ(recv_count(phi(b), x.token), 1u);
  EXPECT_TRUE(k.mailbox(b).empty());
  EXPECT_EQ(state_of(z), RefobState::Active);
}

TEST_F(World, ReceiveOfEmptyMessageAddsNoActivation) {
  const Refob y = activated(A, A);
  send(y);
  run(IdleEvent{A});
  const auto activated_before = phi(A).activated();
  run(ReceiveEvent{y.token, A, {}});
  EXPECT_EQ(phi(A).activated(), activated_before);
}

TEST_F(World, ExternalMessagesCountOnTheExternalToken) {
  // Make A a receptionist by handing E a refob to A.
  const Refob x = activated(A, E);
  const Refob to_a = send(x, {activated(A, A)}).front();
  run(OutEvent{x.token, E, {to_a}});
  ASSERT_TRUE(k.receptionists.contains(A));
  run(IdleEvent{A});
  run(InEvent{A, {}});
  EXPECT_EQ(k.externals.size(), 1u);
  run(ReceiveEvent{Token::external(), A, {}});
  EXPECT_EQ(recv_count(phi(A), Token::external()), 1u);
}

TEST_F(World, IdleFlipsModeOnly) {
  const auto before = k;
  run(IdleEvent{A});
  EXPECT_TRUE(k.actor(A).idle());
  EXPECT_EQ(phi(A), before.actor(A).knowledge);
  EXPECT_EQ(k.mailboxes, before.mailboxes);
}

class Fig2 : public World {
 protected:
  // A holds x:A->B and y:A->C; A sends z:B->C to B using y; B receives it.
  void SetUp() override {
    b = spawn(A);
    c = spawn(A);
    x = activated(A, b);
    y = activated(A, c);
    z = send(x, {y}).front();
    run(IdleEvent{b});
    run(ReceiveEvent{x.token, b, {z}});
  }
  ActorAddress b, c;
  Refob x, y, z;
};

TEST_F(Fig2, SendInfoReportsTheCreatedRefob) {
  run(SendInfoEvent{y.token, z.token, A, b, c});
  EXPECT_FALSE(phi(A).contains(CreatedUsing{y, z}));
  EXPECT_EQ(sent_count(phi(A), y.token), 1u);
  EXPECT_EQ(k.mailbox(c), (std::vector<Message>{InfoMsg{y.token, z}}));
}

TEST_F(Fig2, EachCreatedUsingNeedsItsOwnInfo) {
  const Refob z2 = send(x, {y}).front();
  run(SendInfoEvent{y.token, z.token, A, b, c});
  run(SendInfoEvent{y.token, z2.token, A, b, c});
  EXPECT_EQ(sent_count(phi(A), y.token), 2u);
}

TEST_F(Fig2, InfoRecordsCreationAndStaysIdle) {
  run(SendInfoEvent{y.token, z.token, A, b, c});
  run(IdleEvent{c});
  const auto activated_before = phi(c).activated();
  run(InfoEvent{y.token, z});
  EXPECT_TRUE(phi(c).created().contains(z));
  EXPECT_EQ(recv_count(phi(c), y.token), 1u);
  EXPECT_TRUE(k.actor(c).idle());
  EXPECT_EQ(phi(c).activated(), activated_before);
}

TEST_F(Fig2, SendReleaseCarriesTheCount) {
  run(SendReleaseEvent{z.token, b, c});
  EXPECT_FALSE(phi(b).activated().contains(z));
  EXPECT_TRUE(phi(b).sent_counts().find(z.token) == phi(b).sent_counts().end());
  EXPECT_EQ(k.mailbox(c), (std::vector<Message>{ReleaseMsg{z, 0}}));
  EXPECT_EQ(state_of(z), RefobState::Inactive);
}

TEST_F(Fig2, SendReleaseCarriesCountAfterOneSend) {
  send(z);
  run(SendReleaseEvent{z.token, b, c});
  EXPECT_EQ(k.mailbox(c).back(), (Message{ReleaseMsg{z, 1}}));
}

TEST_F(Fig2, SendReleaseWaitsForInfo) {
  // A created z using y, so y cannot be released before the Info goes out.
  EXPECT_FALSE(is_enabled(k, SendReleaseEvent{y.token, A, c}));
  run(SendInfoEvent{y.token, z.token, A, b, c});
  EXPECT_TRUE(is_enabled(k, SendReleaseEvent{y.token, A, c}));
}

TEST_F(Fig2, ReleaseThenInfoThenCompaction) {
  run(SendInfoEvent{y.token, z.token, A, b, c});
  run(SendReleaseEvent{z.token, b, c});
  run(IdleEvent{c});
  run(ReleaseEvent{z.token, b, c});
  EXPECT_TRUE(phi(c).released().contains(z));
  EXPECT_EQ(state_of(z), RefobState::Released);
  EXPECT_FALSE(is_enabled(k, CompactionEvent{z.token, b, c}));
  run(InfoEvent{y.token, z});
  run(CompactionEvent{z.token, b, c});
  EXPECT_FALSE(derives(phi(c), Unreleased{z}));
  EXPECT_FALSE(derives(phi(c), Released{z}));
  EXPECT_FALSE(derives(phi(c), Created{z}));
  EXPECT_TRUE(phi(c).recv_counts().find(z.token) == phi(c).recv_counts().end());
}

TEST_F(Fig2, ReleaseWaitsForOutstandingMessages) {
  send(z);
  send(z);
  run(SendReleaseEvent{z.token, b, c});
  run(IdleEvent{c});
  EXPECT_FALSE(is_enabled(k, ReleaseEvent{z.token, b, c}));
  run(ReceiveEvent{z.token, c, {}});
  run(IdleEvent{c});
  EXPECT_FALSE(is_enabled(k, ReleaseEvent{z.token, b, c}));
  run(ReceiveEvent{z.token, c, {}});
  run(IdleEvent{c});
  EXPECT_TRUE(is_enabled(k, ReleaseEvent{z.token, b, c}));
}

TEST_F(World, SnapshotKeepsLatestAndChangesNothing) {
  run(IdleEvent{A});
  const auto before = k;
  run(SnapshotEvent{A});
  EXPECT_EQ(k, before);
  EXPECT_EQ(store.find(A)->taken_at, index);
  EXPECT_EQ(store.find(A)->knowledge, phi(A));
  run(SnapshotEvent{A});
  EXPECT_EQ(store.size(), 1u);
  EXPECT_EQ(store.find(A)->taken_at, index);
  EXPECT_THROW(apply(k, SnapshotEvent{ActorAddress{77}}), RejectedEvent);
}

TEST_F(World, InRules) {
  const Refob x = activated(A, E);
  const Refob to_a = send(x, {activated(A, A)}).front();
  run(OutEvent{x.token, E, {to_a}});
  const ActorAddress fresh = k.names.peek_address();
  auto tokens = k.names.peek_tokens(A, 2);
  run(InEvent{A, {Refob{tokens[0], A, A}}});
  EXPECT_EQ(k.externals.size(), 1u);
  tokens = k.names.peek_tokens(A, 1);
  run(InEvent{A, {Refob{tokens[0], A, fresh}}});
  EXPECT_TRUE(k.externals.contains(fresh));
  EXPECT_EQ(k.mailbox(A).size(), 2u);
}

TEST_F(World, InRejectsHiddenTargets) {
  const Refob x = activated(A, E);
  const Refob to_a = send(x, {activated(A, A)}).front();
  run(OutEvent{x.token, E, {to_a}});
  const ActorAddress b = spawn(A);
  EXPECT_FALSE(is_enabled(k, InEvent{A, {Refob{k.names.peek_tokens(A, 1).front(), A, b}}}));
}

TEST_F(World, OutMakesTargetsReceptionists) {
  const ActorAddress b = spawn(A);
  const Refob x = activated(A, E);
  send(x);
  const Refob to_b = send(x, {activated(A, b)}).front();
  run(OutEvent{x.token, E, {to_b}});
  EXPECT_EQ(k.receptionists, std::set<ActorAddress>{b});
  EXPECT_EQ(k.mailbox(E).size(), 1u);  // exactly one instance removed
  run(OutEvent{x.token, E, {}});
  EXPECT_EQ(k.receptionists, std::set<ActorAddress>{b});
  EXPECT_EQ(state_of(to_b), RefobState::Active);
}

TEST_F(World, SystemMessagesToExternalsAreDropped) {
  const Refob x = activated(A, E);
  send(x);
  run(SendReleaseEvent{x.token, A, E});
  const auto knowledge_before = phi(A);
  ASSERT_EQ(k.mailbox(E).size(), 2u);
  run(ReleaseOutEvent{x.token, E});
  EXPECT_EQ(k.mailbox(E), (std::vector<Message>{AppMsg{x.token, {}}}));
  EXPECT_EQ(phi(A), knowledge_before);
}

TEST_F(World, InfoToExternalIsDropped) {
  const Refob x = activated(A, E);
  const Refob self = activated(A, A);
  const Refob z = send(self, {x}).front();
  run(SendInfoEvent{x.token, z.token, A, A, E});
  const auto knowledge_before = phi(A);
  run(InfoOutEvent{x.token, z});
  EXPECT_TRUE(k.mailbox(E).empty());
  EXPECT_EQ(phi(A), knowledge_before);
}

TEST(Ledger, LifecycleOnlyMovesForward) {
  auto k = initial_configuration();
  auto ledger = Ledger::for_initial(k);
  const Token y{kInitialActor, 1};
  ledger.advance(y, RefobState::Inactive, 1);
  EXPECT_THROW(ledger.advance(y, RefobState::Active, 2), LifecycleError);
  EXPECT_THROW(ledger.advance(Token{ActorAddress{9}, 9}, RefobState::Released, 3), LifecycleError);
}

// Properties over random walks.

TEST(SemanticsProperties, EnabledEventsApplyAndPreserveInvariants) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto config = testing::walk_config(seed);
    std::mt19937_64 rng(seed);
    Configuration k = initial_configuration();
    Ledger ledger = Ledger::for_initial(k);
    SnapshotStore store;
    std::set<Token> introduced;
    for (EventIndex i = 1; i <= 150; ++i) {
      const auto events = enabled_events(k, config.bounds);
      if (events.empty()) break;
      ASSERT_TRUE(std::is_sorted(events.begin(), events.end()));
      for (const auto& e : events) ASSERT_TRUE(is_enabled(k, e)) << to_string(e);
      const Event e = events[std::uniform_int_distribution<std::size_t>(0, events.size() - 1)(rng)];
      std::map<Token, RefobState> before;
      for (const auto& [t, rec] : ledger.refobs()) before.emplace(t, rec.state);
      std::vector<Token> fresh;
      if (const auto* s = std::get_if<SpawnEvent>(&e)) fresh = {s->x, s->self};
      if (const auto* s = std::get_if<SendEvent>(&e)) fresh = s->zs;
      if (const auto* s = std::get_if<InEvent>(&e)) {
        for (const auto& r : s->refobs) fresh.push_back(r.token);
      }
      for (auto t : fresh) ASSERT_TRUE(introduced.insert(t).second) << "token reused: " << to_string(t);

      ASSERT_NO_THROW(apply(k, e, StepContext{&ledger, &store, i})) << to_string(e);
      ASSERT_TRUE(configuration_invariant_violations(k).empty()) << to_string(e);
      for (const auto& [t, rec] : ledger.refobs()) {
        auto it = before.find(t);
        if (it != before.end()) ASSERT_GE(rec.state, it->second) << to_string(t);
      }
      ASSERT_TRUE(check_conservation(k, ledger).empty());
    }
  }
}

TEST(SemanticsProperties, ApplyIsDeterministic) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto walk = testing::random_walk(testing::walk_config(seed), 60);
    for (const auto& s : walk) {
      for (const auto& e : enabled_events(s.k, ExplorationBounds{})) {
        EXPECT_EQ(applied(s.k, e), applied(s.k, e));
      }
    }
  }
}

}  // namespace
}  // namespace drl
