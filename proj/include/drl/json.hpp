#pragma once

// JSON forms for model values, used by traces, reports and store dumps.
// Tokens are written as "creator.seq" strings ("bot" for the external token),
// addresses as plain integers.

#include <nlohmann/json.hpp>

#include "drl/aggregator.hpp"
#include "drl/model.hpp"

namespace drl {

using nlohmann::json;

void to_json(json& j, ActorAddress a);
void from_json(const json& j, ActorAddress& a);
void to_json(json& j, Token t);
void from_json(const json& j, Token& t);
void to_json(json& j, const Refob& r);
void from_json(const json& j, Refob& r);
void to_json(json& j, const KnowledgeSet& k);
void from_json(const json& j, KnowledgeSet& k);
void to_json(json& j, const Message& m);
void from_json(const json& j, Message& m);
void to_json(json& j, const Event& e);
void from_json(const json& j, Event& e);
void to_json(json& j, const Configuration& k);
void from_json(const json& j, Configuration& k);
void to_json(json& j, const SnapshotStore& s);
void from_json(const json& j, SnapshotStore& s);

Token parse_token(std::string_view text);

}  // namespace drl
