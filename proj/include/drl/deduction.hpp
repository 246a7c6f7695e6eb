#pragma once

// The derivation relation over knowledge sets. Beyond membership it adds four
// rules: default-zero send and receive counts, Unreleased as Created without
// Released (negation as failure), and Created(z) from any CreatedUsing(_, z).

#include <variant>

#include "drl/model.hpp"

namespace drl {

struct Unreleased {
  Refob refob;
  friend auto operator<=>(const Unreleased&, const Unreleased&) = default;
};

using Query = std::variant<Created, Released, Unreleased, Activated, CreatedUsing, SentCount, RecvCount>;

bool derives(const KnowledgeSet& phi, const Query& q);

// Shorthands for the most common queries.
bool derives_created(const KnowledgeSet& phi, const Refob& x);
bool derives_released(const KnowledgeSet& phi, const Refob& x);
bool derives_unreleased(const KnowledgeSet& phi, const Refob& x);

/// The unique n with phi |- SentCount(x, n).
Count sent_count(const KnowledgeSet& phi, Token x);
/// The unique n with phi |- RecvCount(x, n).
Count recv_count(const KnowledgeSet& phi, Token x);

KnowledgeSet inc_sent(Token x, KnowledgeSet phi);
KnowledgeSet inc_recv(Token x, KnowledgeSet phi);

// In-place variants used by the transition rules.
void inc_sent_in_place(Token x, KnowledgeSet& phi);
void inc_recv_in_place(Token x, KnowledgeSet& phi);

/// Does phi hold a CreatedUsing fact whose first refob has token x?
bool has_created_using_from(const KnowledgeSet& phi, Token x);

std::string to_string(const Query& q);

}  // namespace drl
