#pragma once

// Domain data for the DRL reference-listing protocol: addresses, tokens,
// refobs, facts, knowledge sets, messages and configurations.

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/container/flat_map.hpp>
#include <boost/container/flat_set.hpp>

namespace drl {

using EventIndex = std::uint64_t;
using Count = std::uint64_t;

struct ActorAddress {
  std::uint32_t value = 0;

  friend auto operator<=>(const ActorAddress&, const ActorAddress&) = default;
};

/// A globally unique refob token: the creating actor plus a local sequence
/// number. The reserved value `Token::external()` tags messages that enter
/// the system from external actors and never equals a generated token.
struct Token {
  ActorAddress creator;
  std::uint32_t sequence = 0;

  static constexpr Token external() {
    return Token{ActorAddress{std::numeric_limits<std::uint32_t>::max()},
                 std::numeric_limits<std::uint32_t>::max()};
  }
  constexpr bool is_external() const { return *this == external(); }

  friend constexpr auto operator<=>(const Token&, const Token&) = default;
};

/// (token, owner, target). The token alone identifies the refob.
struct Refob {
  Token token;
  ActorAddress owner;
  ActorAddress target;

  friend auto operator<=>(const Refob&, const Refob&) = default;
};

// Facts. Unreleased is derived, never stored (see deduction.hpp).
struct Created {
  Refob refob;
  friend auto operator<=>(const Created&, const Created&) = default;
};
struct Released {
  Refob refob;
  friend auto operator<=>(const Released&, const Released&) = default;
};
struct CreatedUsing {
  Refob used;
  Refob created;
  friend auto operator<=>(const CreatedUsing&, const CreatedUsing&) = default;
};
struct Activated {
  Refob refob;
  friend auto operator<=>(const Activated&, const Activated&) = default;
};
struct SentCount {
  Token token;
  Count n = 0;
  friend auto operator<=>(const SentCount&, const SentCount&) = default;
};
struct RecvCount {
  Token token;
  Count n = 0;
  friend auto operator<=>(const RecvCount&, const RecvCount&) = default;
};

using Fact = std::variant<Created, Released, CreatedUsing, Activated, SentCount, RecvCount>;

/// An actor's system-level bookkeeping. Facts are stored per kind; message
/// counts live in per-token maps so that at most one SentCount and one
/// RecvCount exist for any token.
class KnowledgeSet {
 public:
  using RefobSet = boost::container::flat_set<Refob>;
  using PairSet = boost::container::flat_set<std::pair<Refob, Refob>>;
  using CountMap = boost::container::flat_map<Token, Count>;

  KnowledgeSet() = default;
  KnowledgeSet(std::initializer_list<Fact> facts);

  /// Inserts a fact. A count fact replaces any existing count for the same
  /// token. Throws std::invalid_argument for a CreatedUsing whose refobs have
  /// different targets.
  void insert(const Fact& fact);
  /// Removes a fact if present (count facts must match exactly). Returns
  /// whether anything was removed.
  bool erase(const Fact& fact);
  bool contains(const Fact& fact) const;

  const RefobSet& created() const { return created_; }
  const RefobSet& released() const { return released_; }
  const RefobSet& activated() const { return activated_; }
  const PairSet& created_using() const { return created_using_; }
  const CountMap& sent_counts() const { return sent_; }
  const CountMap& recv_counts() const { return recv_; }

  void set_sent_count(Token token, Count n) { sent_[token] = n; }
  void set_recv_count(Token token, Count n) { recv_[token] = n; }
  bool erase_sent_count(Token token) { return sent_.erase(token) > 0; }
  bool erase_recv_count(Token token) { return recv_.erase(token) > 0; }

  /// Every stored fact, in a canonical order.
  std::vector<Fact> facts() const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  friend bool operator==(const KnowledgeSet&, const KnowledgeSet&) = default;

 private:
  RefobSet created_;
  RefobSet released_;
  RefobSet activated_;
  PairSet created_using_;
  CountMap sent_;
  CountMap recv_;
};

// Messages.
struct AppMsg {
  Token along;
  std::vector<Refob> refobs;  // sorted, duplicate-free
  friend auto operator<=>(const AppMsg&, const AppMsg&) = default;
};
struct InfoMsg {
  Token along;
  Refob created;  // carries both owner and target of the new refob
  friend auto operator<=>(const InfoMsg&, const InfoMsg&) = default;
};
struct ReleaseMsg {
  Refob released;  // the refob's owner is the sender
  Count count = 0;
  friend auto operator<=>(const ReleaseMsg&, const ReleaseMsg&) = default;
};

using Message = std::variant<AppMsg, InfoMsg, ReleaseMsg>;

/// The token a message was sent along (the released token for ReleaseMsg).
Token message_token(const Message& message);

enum class Mode : std::uint8_t { Busy, Idle };

struct ActorState {
  Mode mode = Mode::Busy;
  KnowledgeSet knowledge;

  bool busy() const { return mode == Mode::Busy; }
  bool idle() const { return mode == Mode::Idle; }
  friend bool operator==(const ActorState&, const ActorState&) = default;
};

/// Fresh-name generation. Addresses come from one global counter; tokens from
/// a per-creator sequence. Also counts spawned actors and external injections
/// so exploration bounds can be enforced from the configuration alone.
class NameSupply {
 public:
  ActorAddress fresh_address();
  Token fresh_token(ActorAddress creator);

  /// Peeks at the next `count` tokens `creator` would produce, without
  /// consuming them.
  std::vector<Token> peek_tokens(ActorAddress creator, std::size_t count) const;
  ActorAddress peek_address() const { return ActorAddress{next_address_}; }

  bool is_fresh(Token token) const;
  bool is_fresh(ActorAddress address) const { return address.value >= next_address_; }

  /// Consumes an explicitly chosen fresh name, advancing the counters past it.
  void claim(Token token);
  void claim(ActorAddress address);

  std::uint32_t spawned() const { return spawned_; }
  std::uint32_t injections() const { return injections_; }
  void note_spawn() { ++spawned_; }
  void note_injection() { ++injections_; }

  std::uint32_t next_address() const { return next_address_; }
  const boost::container::flat_map<ActorAddress, std::uint32_t>& sequences() const { return next_sequence_; }

  void restore(std::uint32_t next_address, boost::container::flat_map<ActorAddress, std::uint32_t> sequences,
               std::uint32_t spawned, std::uint32_t injections);

  friend bool operator==(const NameSupply&, const NameSupply&) = default;

 private:
  std::uint32_t next_address_ = 0;
  boost::container::flat_map<ActorAddress, std::uint32_t> next_sequence_;
  std::uint32_t spawned_ = 0;
  std::uint32_t injections_ = 0;
};

/// ⟨alpha | mu | rho | chi⟩ plus the name supply.
struct Configuration {
  std::map<ActorAddress, ActorState> actors;                 // alpha
  std::map<ActorAddress, std::vector<Message>> mailboxes;    // mu, insertion order kept
  std::set<ActorAddress> receptionists;                      // rho
  std::set<ActorAddress> externals;                          // chi
  NameSupply names;

  bool is_internal(ActorAddress a) const { return actors.contains(a); }
  bool is_external(ActorAddress a) const { return externals.contains(a); }
  const ActorState& actor(ActorAddress a) const;
  ActorState& actor(ActorAddress a);
  /// Undelivered messages addressed to `a` (empty span if none).
  const std::vector<Message>& mailbox(ActorAddress a) const;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// A single actor A, busy, with knowledge {Activated(x:A->E), Created(y:A->A),
/// Activated(y:A->A)} and one external actor E.
Configuration initial_configuration();

/// Address of the initial internal actor and the initial external actor.
inline constexpr ActorAddress kInitialActor{0};
inline constexpr ActorAddress kInitialExternal{1};

/// Locality laws and mailbox ownership. Returns a description of each breach.
std::vector<std::string> configuration_invariant_violations(const Configuration& k);

// Events, one struct per rule label.
struct SpawnEvent {
  Token x;              // parent's refob to the child
  ActorAddress parent;  // A
  ActorAddress child;   // B
  Token self;           // child's self refob y
  friend auto operator<=>(const SpawnEvent&, const SpawnEvent&) = default;
};
struct SendEvent {
  Token x;
  std::vector<Token> ys;
  std::vector<Token> zs;
  ActorAddress sender;     // A
  ActorAddress recipient;  // B
  std::vector<ActorAddress> targets;  // C1..Cn
  friend auto operator<=>(const SendEvent&, const SendEvent&) = default;
};
struct ReceiveEvent {
  Token x;
  ActorAddress recipient;
  std::vector<Refob> refobs;
  friend auto operator<=>(const ReceiveEvent&, const ReceiveEvent&) = default;
};
struct IdleEvent {
  ActorAddress actor;
  friend auto operator<=>(const IdleEvent&, const IdleEvent&) = default;
};
struct SendInfoEvent {
  Token y;
  Token z;
  ActorAddress sender;  // A, owner of y
  ActorAddress owner;   // B, owner of z
  ActorAddress target;  // C
  friend auto operator<=>(const SendInfoEvent&, const SendInfoEvent&) = default;
};
struct InfoEvent {
  Token y;
  Refob created;  // z:B->C, delivered to C
  friend auto operator<=>(const InfoEvent&, const InfoEvent&) = default;
};
struct SendReleaseEvent {
  Token x;
  ActorAddress owner;
  ActorAddress target;
  friend auto operator<=>(const SendReleaseEvent&, const SendReleaseEvent&) = default;
};
struct ReleaseEvent {
  Token x;
  ActorAddress owner;
  ActorAddress target;
  friend auto operator<=>(const ReleaseEvent&, const ReleaseEvent&) = default;
};
struct CompactionEvent {
  Token x;
  ActorAddress owner;
  ActorAddress target;
  friend auto operator<=>(const CompactionEvent&, const CompactionEvent&) = default;
};
struct SnapshotEvent {
  ActorAddress actor;
  friend auto operator<=>(const SnapshotEvent&, const SnapshotEvent&) = default;
};
struct InEvent {
  ActorAddress receptionist;
  std::vector<Refob> refobs;
  friend auto operator<=>(const InEvent&, const InEvent&) = default;
};
struct OutEvent {
  Token x;
  ActorAddress external;
  std::vector<Refob> refobs;
  friend auto operator<=>(const OutEvent&, const OutEvent&) = default;
};
struct ReleaseOutEvent {
  Token x;
  ActorAddress external;
  friend auto operator<=>(const ReleaseOutEvent&, const ReleaseOutEvent&) = default;
};
struct InfoOutEvent {
  Token y;
  Refob created;  // target is the external recipient
  friend auto operator<=>(const InfoOutEvent&, const InfoOutEvent&) = default;
};

using Event = std::variant<SpawnEvent, SendEvent, ReceiveEvent, IdleEvent, SendInfoEvent, InfoEvent,
                           SendReleaseEvent, ReleaseEvent, CompactionEvent, SnapshotEvent, InEvent, OutEvent,
                           ReleaseOutEvent, InfoOutEvent>;

enum class Rule : std::uint8_t {
  Spawn,
  Send,
  Receive,
  Idle,
  SendInfo,
  Info,
  SendRelease,
  Release,
  Compaction,
  Snapshot,
  In,
  Out,
  ReleaseOut,
  InfoOut,
};
inline constexpr std::size_t kRuleCount = 14;

Rule rule_of(const Event& e);
std::string_view rule_name(Rule r);
/// Inverse of rule_name; throws std::invalid_argument on unknown labels.
Rule rule_from_name(std::string_view name);

/// Human-readable rendering used in diagnostics.
std::string to_string(ActorAddress a);
std::string to_string(Token t);
std::string to_string(const Refob& r);
std::string to_string(const Fact& f);
std::string to_string(const Message& m);
std::string to_string(const Event& e);

}  // namespace drl
