#include "drl/deduction.hpp"

#include <algorithm>

namespace drl {

bool derives_created(const KnowledgeSet& phi, const Refob& x) {
  if (phi.created().contains(x)) return true;
  const auto& cu = phi.created_using();
  return std::any_of(cu.begin(), cu.end(), [&](const auto& pair) { return pair.second == x; });
}

bool derives_released(const KnowledgeSet& phi, const Refob& x) { return phi.released().contains(x); }

bool derives_unreleased(const KnowledgeSet& phi, const Refob& x) {
  return derives_created(phi, x) && !derives_released(phi, x);
}

Count sent_count(const KnowledgeSet& phi, Token x) {
  auto it = phi.sent_counts().find(x);
  return it == phi.sent_counts().end() ? 0 : it->second;
}

Count recv_count(const KnowledgeSet& phi, Token x) {
  auto it = phi.recv_counts().find(x);
  return it == phi.recv_counts().end() ? 0 : it->second;
}

bool derives(const KnowledgeSet& phi, const Query& q) {
  if (const auto* f = std::get_if<Created>(&q)) return derives_created(phi, f->refob);
  if (const auto* f = std::get_if<Released>(&q)) return derives_released(phi, f->refob);
  if (const auto* f = std::get_if<Unreleased>(&q)) return derives_unreleased(phi, f->refob);
  if (const auto* f = std::get_if<Activated>(&q)) return phi.activated().contains(f->refob);
  if (const auto* f = std::get_if<CreatedUsing>(&q)) return phi.created_using().contains({f->used, f->created});
  if (const auto* f = std::get_if<SentCount>(&q)) return sent_count(phi, f->token) == f->n;
  const auto& f = std::get<RecvCount>(q);
  return recv_count(phi, f.token) == f.n;
}

void inc_sent_in_place(Token x, KnowledgeSet& phi) { phi.set_sent_count(x, sent_count(phi, x) + 1); }

void inc_recv_in_place(Token x, KnowledgeSet& phi) { phi.set_recv_count(x, recv_count(phi, x) + 1); }

KnowledgeSet inc_sent(Token x, KnowledgeSet phi) {
  inc_sent_in_place(x, phi);
  return phi;
}

KnowledgeSet inc_recv(Token x, KnowledgeSet phi) {
  inc_recv_in_place(x, phi);
  return phi;
}

bool has_created_using_from(const KnowledgeSet& phi, Token x) {
  const auto& cu = phi.created_using();
  return std::any_of(cu.begin(), cu.end(), [&](const auto& pair) { return pair.first.token == x; });
}

std::string to_string(const Query& q) {
  if (const auto* f = std::get_if<Unreleased>(&q)) return "Unreleased(" + to_string(f->refob) + ")";
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Unreleased>) {
          return {};
        } else {
          return to_string(Fact{f});
        }
      },
      q);
}

}  // namespace drl
