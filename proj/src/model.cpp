#include "drl/model.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace drl {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::array<std::string_view, kRuleCount> kRuleNames = {
    "Spawn", "Send",       "Receive", "Idle", "SendInfo", "Info",       "SendRelease",
    "Release", "Compaction", "Snapshot", "In", "Out",      "ReleaseOut", "InfoOut",
};

}  // namespace

KnowledgeSet::KnowledgeSet(std::initializer_list<Fact> facts) {
  for (const auto& f : facts) insert(f);
}

void KnowledgeSet::insert(const Fact& fact) {
  std::visit(Overloaded{
                 [&](const Created& f) { created_.insert(f.refob); },
                 [&](const Released& f) { released_.insert(f.refob); },
                 [&](const CreatedUsing& f) {
                   if (f.used.target != f.created.target) {
                     throw std::invalid_argument("CreatedUsing refobs must share a target: " + to_string(fact));
                   }
                   created_using_.insert({f.used, f.created});
                 },
                 [&](const Activated& f) { activated_.insert(f.refob); },
                 [&](const SentCount& f) { sent_[f.token] = f.n; },
                 [&](const RecvCount& f) { recv_[f.token] = f.n; },
             },
             fact);
}

bool KnowledgeSet::erase(const Fact& fact) {
  return std::visit(Overloaded{
                        [&](const Created& f) { return created_.erase(f.refob) > 0; },
                        [&](const Released& f) { return released_.erase(f.refob) > 0; },
                        [&](const CreatedUsing& f) { return created_using_.erase({f.used, f.created}) > 0; },
                        [&](const Activated& f) { return activated_.erase(f.refob) > 0; },
                        [&](const SentCount& f) {
                          auto it = sent_.find(f.token);
                          if (it == sent_.end() || it->second != f.n) return false;
                          sent_.erase(it);
                          return true;
                        },
                        [&](const RecvCount& f) {
                          auto it = recv_.find(f.token);
                          if (it == recv_.end() || it->second != f.n) return false;
                          recv_.erase(it);
                          return true;
                        },
                    },
                    fact);
}

bool KnowledgeSet::contains(const Fact& fact) const {
  return std::visit(Overloaded{
                        [&](const Created& f) { return created_.contains(f.refob); },
                        [&](const Released& f) { return released_.contains(f.refob); },
                        [&](const CreatedUsing& f) { return created_using_.contains({f.used, f.created}); },
                        [&](const Activated& f) { return activated_.contains(f.refob); },
                        [&](const SentCount& f) {
                          auto it = sent_.find(f.token);
                          return it != sent_.end() && it->second == f.n;
                        },
                        [&](const RecvCount& f) {
                          auto it = recv_.find(f.token);
                          return it != recv_.end() && it->second == f.n;
                        },
                    },
                    fact);
}

std::vector<Fact> KnowledgeSet::facts() const {
  std::vector<Fact> out;
  out.reserve(size());
  for (const auto& r : created_) out.emplace_back(Created{r});
  for (const auto& r : released_) out.emplace_back(Released{r});
  for (const auto& [u, c] : created_using_) out.emplace_back(CreatedUsing{u, c});
  for (const auto& r : activated_) out.emplace_back(Activated{r});
  for (const auto& [t, n] : sent_) out.emplace_back(SentCount{t, n});
  for (const auto& [t, n] : recv_) out.emplace_back(RecvCount{t, n});
  return out;
}

std::size_t KnowledgeSet::size() const {
  return created_.size() + released_.size() + created_using_.size() + activated_.size() + sent_.size() +
         recv_.size();
}

Token message_token(const Message& message) {
  return std::visit(Overloaded{
                        [](const AppMsg& m) { return m.along; },
                        [](const InfoMsg& m) { return m.along; },
                        [](const ReleaseMsg& m) { return m.released.token; },
                    },
                    message);
}

ActorAddress NameSupply::fresh_address() { return ActorAddress{next_address_++}; }

Token NameSupply::fresh_token(ActorAddress creator) {
  auto& seq = next_sequence_[creator];
  return Token{creator, seq++};
}

std::vector<Token> NameSupply::peek_tokens(ActorAddress creator, std::size_t count) const {
  std::uint32_t seq = 0;
  if (auto it = next_sequence_.find(creator); it != next_sequence_.end()) seq = it->second;
  std::vector<Token> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(Token{creator, seq + static_cast<std::uint32_t>(i)});
  return out;
}

bool NameSupply::is_fresh(Token token) const {
  if (token.is_external()) return false;
  auto it = next_sequence_.find(token.creator);
  return it == next_sequence_.end() || token.sequence >= it->second;
}

void NameSupply::claim(Token token) {
  auto& seq = next_sequence_[token.creator];
  seq = std::max(seq, token.sequence + 1);
}

void NameSupply::claim(ActorAddress address) { next_address_ = std::max(next_address_, address.value + 1); }

void NameSupply::restore(std::uint32_t next_address, boost::container::flat_map<ActorAddress, std::uint32_t> sequences,
                         std::uint32_t spawned, std::uint32_t injections) {
  next_address_ = next_address;
  next_sequence_ = std::move(sequences);
  spawned_ = spawned;
  injections_ = injections;
}

const ActorState& Configuration::actor(ActorAddress a) const {
  auto it = actors.find(a);
  if (it == actors.end()) throw std::out_of_range("not an internal actor: " + to_string(a));
  return it->second;
}

ActorState& Configuration::actor(ActorAddress a) {
  auto it = actors.find(a);
  if (it == actors.end()) throw std::out_of_range("not an internal actor: " + to_string(a));
  return it->second;
}

const std::vector<Message>& Configuration::mailbox(ActorAddress a) const {
  static const std::vector<Message> kEmpty;
  auto it = mailboxes.find(a);
  return it == mailboxes.end() ? kEmpty : it->second;
}

Configuration initial_configuration() {
  Configuration k;
  const ActorAddress a = k.names.fresh_address();
  const ActorAddress e = k.names.fresh_address();
  const Token x = k.names.fresh_token(a);
  const Token y = k.names.fresh_token(a);
  k.names.note_spawn();
  ActorState state;
  state.mode = Mode::Busy;
  state.knowledge.insert(Activated{Refob{x, a, e}});
  state.knowledge.insert(Created{Refob{y, a, a}});
  state.knowledge.insert(Activated{Refob{y, a, a}});
  k.actors.emplace(a, std::move(state));
  k.externals.insert(e);
  return k;
}

std::vector<std::string> configuration_invariant_violations(const Configuration& k) {
  std::vector<std::string> out;
  for (auto r : k.receptionists) {
    if (!k.is_internal(r)) out.push_back("receptionist " + to_string(r) + " is not internal");
  }
  for (auto e : k.externals) {
    if (k.is_internal(e)) out.push_back("actor " + to_string(e) + " is both internal and external");
  }
  for (const auto& [addr, msgs] : k.mailboxes) {
    if (!k.is_internal(addr) && !k.is_external(addr)) {
      out.push_back("mailbox for unknown actor " + to_string(addr));
    }
    if (msgs.empty()) out.push_back("empty mailbox entry for " + to_string(addr));
  }
  for (const auto& entry : k.actors) {
    if (k.names.is_fresh(entry.first)) out.push_back("actor " + to_string(entry.first) + " has an unissued address");
  }
  return out;
}

Rule rule_of(const Event& e) { return static_cast<Rule>(e.index()); }

std::string_view rule_name(Rule r) { return kRuleNames.at(static_cast<std::size_t>(r)); }

Rule rule_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kRuleNames.size(); ++i) {
    if (kRuleNames[i] == name) return static_cast<Rule>(i);
  }
  throw std::invalid_argument("unknown rule label: " + std::string(name));
}

std::string to_string(ActorAddress a) { return "@" + std::to_string(a.value); }

std::string to_string(Token t) {
  if (t.is_external()) return "bot";
  return std::to_string(t.creator.value) + "." + std::to_string(t.sequence);
}

std::string to_string(const Refob& r) {
  return "<" + to_string(r.token) + ":" + to_string(r.owner) + "->" + to_string(r.target) + ">";
}

std::string to_string(const Fact& f) {
  return std::visit(Overloaded{
                        [](const Created& x) { return "Created(" + to_string(x.refob) + ")"; },
                        [](const Released& x) { return "Released(" + to_string(x.refob) + ")"; },
                        [](const CreatedUsing& x) {
                          return "CreatedUsing(" + to_string(x.used) + "," + to_string(x.created) + ")";
                        },
                        [](const Activated& x) { return "Activated(" + to_string(x.refob) + ")"; },
                        [](const SentCount& x) {
                          return "SentCount(" + to_string(x.token) + "," + std::to_string(x.n) + ")";
                        },
                        [](const RecvCount& x) {
                          return "RecvCount(" + to_string(x.token) + "," + std::to_string(x.n) + ")";
                        },
                    },
                    f);
}

namespace {
std::string join_refobs(const std::vector<Refob>& rs) {
  std::string out = "{";
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (i) out += ",";
    out += to_string(rs[i]);
  }
  return out + "}";
}
}  // namespace

std::string to_string(const Message& m) {
  return std::visit(Overloaded{
                        [](const AppMsg& x) { return "AppMsg(" + to_string(x.along) + "," + join_refobs(x.refobs) + ")"; },
                        [](const InfoMsg& x) {
                          return "InfoMsg(" + to_string(x.along) + "," + to_string(x.created) + ")";
                        },
                        [](const ReleaseMsg& x) {
                          return "ReleaseMsg(" + to_string(x.released) + "," + std::to_string(x.count) + ")";
                        },
                    },
                    m);
}

std::string to_string(const Event& e) {
  std::ostringstream os;
  os << rule_name(rule_of(e)) << "(";
  std::visit(Overloaded{
                 [&](const SpawnEvent& x) {
                   os << to_string(x.x) << "," << to_string(x.parent) << "," << to_string(x.child);
                 },
                 [&](const SendEvent& x) {
                   os << to_string(x.x) << ",[";
                   for (std::size_t i = 0; i < x.ys.size(); ++i) os << (i ? "," : "") << to_string(x.ys[i]);
                   os << "],[";
                   for (std::size_t i = 0; i < x.zs.size(); ++i) os << (i ? "," : "") << to_string(x.zs[i]);
                   os << "]," << to_string(x.sender) << "," << to_string(x.recipient) << ",[";
                   for (std::size_t i = 0; i < x.targets.size(); ++i) os << (i ? "," : "") << to_string(x.targets[i]);
                   os << "]";
                 },
                 [&](const ReceiveEvent& x) {
                   os << to_string(x.x) << "," << to_string(x.recipient) << "," << join_refobs(x.refobs);
                 },
                 [&](const IdleEvent& x) { os << to_string(x.actor); },
                 [&](const SendInfoEvent& x) {
                   os << to_string(x.y) << "," << to_string(x.z) << "," << to_string(x.sender) << ","
                      << to_string(x.owner) << "," << to_string(x.target);
                 },
                 [&](const InfoEvent& x) { os << to_string(x.y) << "," << to_string(x.created); },
                 [&](const SendReleaseEvent& x) {
                   os << to_string(x.x) << "," << to_string(x.owner) << "," << to_string(x.target);
                 },
                 [&](const ReleaseEvent& x) {
                   os << to_string(x.x) << "," << to_string(x.owner) << "," << to_string(x.target);
                 },
                 [&](const CompactionEvent& x) {
                   os << to_string(x.x) << "," << to_string(x.owner) << "," << to_string(x.target);
                 },
                 [&](const SnapshotEvent& x) { os << to_string(x.actor); },
                 [&](const InEvent& x) { os << to_string(x.receptionist) << "," << join_refobs(x.refobs); },
                 [&](const OutEvent& x) {
                   os << to_string(x.x) << "," << to_string(x.external) << "," << join_refobs(x.refobs);
                 },
                 [&](const ReleaseOutEvent& x) { os << to_string(x.x) << "," << to_string(x.external); },
                 [&](const InfoOutEvent& x) { os << to_string(x.y) << "," << to_string(x.created); },
             },
             e);
  os << ")";
  return os.str();
}

}  // namespace drl
