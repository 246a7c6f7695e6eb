#include "drl/oracle.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "drl/deduction.hpp"

namespace drl {

bool blocked(const Configuration& k, ActorAddress a) {
  const auto& state = k.actor(a);
  return state.idle() && !k.receptionists.contains(a) && k.mailbox(a).empty();
}

std::set<ActorAddress> terminated_set(const Configuration& k, const Ledger& ledger) {
  std::map<ActorAddress, std::vector<ActorAddress>> edges;
  for (const auto& [token, rec] : ledger.refobs()) {
    if (rec.state == RefobState::Released) continue;
    const auto owner = rec.refob.owner;
    if (!k.is_internal(owner) && !k.is_external(owner)) continue;  // collected
    edges[owner].push_back(rec.refob.target);
  }

  std::set<ActorAddress> reached;
  std::deque<ActorAddress> frontier;
  auto visit = [&](ActorAddress a) {
    if (reached.insert(a).second) frontier.push_back(a);
  };
  for (auto e : k.externals) visit(e);
  for (const auto& [a, state] : k.actors) {
    if (!blocked(k, a)) visit(a);
  }
  while (!frontier.empty()) {
    const auto a = frontier.front();
    frontier.pop_front();
    if (auto it = edges.find(a); it != edges.end()) {
      for (auto b : it->second) visit(b);
    }
  }

  std::set<ActorAddress> out;
  for (const auto& [a, state] : k.actors) {
    if (!reached.contains(a)) out.insert(a);
  }
  return out;
}

std::set<ActorAddress> root_set(const Configuration& k) {
  std::set<ActorAddress> out(k.receptionists.begin(), k.receptionists.end());
  for (auto e : k.externals) {
    for (const auto& m : k.mailbox(e)) {
      if (const auto* app = std::get_if<AppMsg>(&m)) {
        for (const auto& r : app->refobs) out.insert(r.target);
      }
    }
  }
  return out;
}

namespace {

/// Breadth-first search over chain links into b. Returns the predecessor map:
/// every reached refob maps to the refob before it (itself for chain heads).
std::map<Token, Refob> chain_search(const Configuration& k, const Ledger& ledger, ActorAddress b) {
  std::map<Token, Refob> unreleased;
  for (const auto& [token, rec] : ledger.refobs()) {
    if (rec.state != RefobState::Released && rec.refob.target == b) unreleased.emplace(token, rec.refob);
  }

  std::map<Token, Refob> parent;
  std::deque<Refob> frontier;
  const auto& phi_b = k.actor(b).knowledge;
  for (const auto& [token, r] : unreleased) {
    if (derives_created(phi_b, r)) {
      parent.emplace(token, r);
      frontier.push_back(r);
    }
  }
  auto link = [&](const Refob& from, const Refob& to) {
    auto it = unreleased.find(to.token);
    if (it == unreleased.end() || it->second != to) return;
    if (parent.emplace(to.token, from).second) frontier.push_back(to);
  };
  while (!frontier.empty()) {
    const Refob r = frontier.front();
    frontier.pop_front();
    if (k.is_internal(r.owner)) {
      for (const auto& [used, created] : k.actor(r.owner).knowledge.created_using()) {
        if (used == r) link(r, created);
      }
    }
    for (const auto& m : k.mailbox(b)) {
      if (const auto* info = std::get_if<InfoMsg>(&m); info != nullptr && info->along == r.token) {
        link(r, info->created);
      }
    }
  }
  return parent;
}

}  // namespace

std::optional<std::vector<Refob>> find_chain(const Configuration& k, const Ledger& ledger, const Refob& x) {
  if (!ledger.is_unreleased(x.token)) throw std::invalid_argument("find_chain: " + to_string(x) + " is released");
  if (!k.is_internal(x.target)) throw std::invalid_argument("find_chain: target of " + to_string(x) + " is external");
  const auto parent = chain_search(k, ledger, x.target);
  auto it = parent.find(x.token);
  if (it == parent.end() || ledger.find(x.token)->refob != x) return std::nullopt;

  std::vector<Refob> chain{x};
  while (it->second != chain.back()) {
    chain.push_back(it->second);
    it = parent.find(it->second.token);
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

std::vector<Violation> check_chain_lemma(const Configuration& k, const Ledger& ledger) {
  std::vector<Violation> out;
  const auto roots = root_set(k);
  for (const auto& [b, state] : k.actors) {
    const auto reached = chain_search(k, ledger, b);
    if (!roots.contains(b)) {
      for (const auto& [token, rec] : ledger.refobs()) {
        if (rec.state == RefobState::Released || rec.refob.target != b) continue;
        if (!k.is_internal(rec.refob.owner) && !k.is_external(rec.refob.owner)) continue;
        if (!reached.contains(token)) out.push_back({"chain-lemma", "no chain to " + to_string(rec.refob)});
      }
    } else {
      const bool some = std::any_of(reached.begin(), reached.end(),
                                    [&](const auto& kv) { return k.is_external(ledger.find(kv.first)->refob.owner); });
      if (!some) out.push_back({"chain-lemma", "no chain to any external refob into root " + to_string(b)});
    }
  }
  return out;
}

namespace {

std::vector<Refob> derivable_created_into(ActorAddress b, const KnowledgeSet& phi) {
  std::vector<Refob> out;
  for (const auto& r : phi.created()) {
    if (r.target == b) out.push_back(r);
  }
  for (const auto& [used, created] : phi.created_using()) {
    if (created.target == b) out.push_back(created);
  }
  return out;
}

}  // namespace

bool is_simple_garbage_local(ActorAddress b, const KnowledgeSet& phi) {
  for (const auto& x : derivable_created_into(b, phi)) {
    if (x.owner != b) return false;
    if (derives_released(phi, x)) continue;
    if (!phi.activated().contains(x)) return false;
    if (sent_count(phi, x.token) != recv_count(phi, x.token)) return false;
  }
  return true;
}

bool is_simple_garbage_literal(ActorAddress b, const KnowledgeSet& phi) {
  for (const auto& x : phi.created()) {
    if (x.target != b) continue;
    if (x.owner != b) return false;
    if (sent_count(phi, x.token) != recv_count(phi, x.token)) return false;
  }
  return true;
}

std::vector<Violation> check_release_is_final(const Configuration& k, const Ledger& ledger) {
  std::vector<Violation> out;
  for (const auto& [to, box] : k.mailboxes) {
    for (const auto& m : box) {
      const Token x = message_token(m);
      if (x.is_external()) continue;
      if (!ledger.is_unreleased(x)) {
        out.push_back({"release-is-final", to_string(m) + " to " + to_string(to) + " travels along a released refob"});
      }
    }
  }
  return out;
}

std::vector<Violation> check_conservation(const Configuration& k, const Ledger& ledger) {
  std::vector<std::pair<ActorAddress, Message>> in_mailboxes;
  for (const auto& [to, box] : k.mailboxes) {
    for (const auto& m : box) in_mailboxes.emplace_back(to, m);
  }
  std::vector<std::pair<ActorAddress, Message>> in_ledger;
  for (const auto* rec : ledger.in_transit()) in_ledger.emplace_back(rec->recipient, rec->message);
  std::sort(in_mailboxes.begin(), in_mailboxes.end());
  std::sort(in_ledger.begin(), in_ledger.end());
  if (in_mailboxes == in_ledger) return {};
  return {{"conservation", std::to_string(in_mailboxes.size()) + " messages in mailboxes but " +
                               std::to_string(in_ledger.size()) + " in transit per ledger"}};
}

}  // namespace drl
