#include "drl/json.hpp"

#include <charconv>

namespace drl {

namespace {

std::uint32_t parse_u32(std::string_view s) {
  std::uint32_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) throw std::invalid_argument("bad number: " + std::string(s));
  return v;
}

std::vector<Refob> refobs_from(const json& j) { return j.get<std::vector<Refob>>(); }

}  // namespace

Token parse_token(std::string_view text) {
  if (text == "bot") return Token::external();
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) throw std::invalid_argument("bad token: " + std::string(text));
  return Token{ActorAddress{parse_u32(text.substr(0, dot))}, parse_u32(text.substr(dot + 1))};
}

void to_json(json& j, ActorAddress a) { j = a.value; }
void from_json(const json& j, ActorAddress& a) { a.value = j.get<std::uint32_t>(); }

void to_json(json& j, Token t) { j = to_string(t); }
void from_json(const json& j, Token& t) { t = parse_token(j.get<std::string>()); }

void to_json(json& j, const Refob& r) { j = json{{"token", r.token}, {"owner", r.owner}, {"target", r.target}}; }
void from_json(const json& j, Refob& r) {
  r.token = j.at("token").get<Token>();
  r.owner = j.at("owner").get<ActorAddress>();
  r.target = j.at("target").get<ActorAddress>();
}

void to_json(json& j, const KnowledgeSet& k) {
  j = json::object();
  j["created"] = std::vector<Refob>(k.created().begin(), k.created().end());
  j["released"] = std::vector<Refob>(k.released().begin(), k.released().end());
  j["activated"] = std::vector<Refob>(k.activated().begin(), k.activated().end());
  json pairs = json::array();
  for (const auto& [used, created] : k.created_using()) pairs.push_back(json{{"used", used}, {"created", created}});
  j["created_using"] = std::move(pairs);
  json sent = json::object();
  for (const auto& [t, n] : k.sent_counts()) sent[to_string(t)] = n;
  j["sent"] = std::move(sent);
  json recv = json::object();
  for (const auto& [t, n] : k.recv_counts()) recv[to_string(t)] = n;
  j["recv"] = std::move(recv);
}

void from_json(const json& j, KnowledgeSet& k) {
  k = KnowledgeSet{};
  for (const auto& r : refobs_from(j.at("created"))) k.insert(Created{r});
  for (const auto& r : refobs_from(j.at("released"))) k.insert(Released{r});
  for (const auto& r : refobs_from(j.at("activated"))) k.insert(Activated{r});
  for (const auto& p : j.at("created_using")) {
    k.insert(CreatedUsing{p.at("used").get<Refob>(), p.at("created").get<Refob>()});
  }
  for (const auto& [t, n] : j.at("sent").items()) k.set_sent_count(parse_token(t), n.get<Count>());
  for (const auto& [t, n] : j.at("recv").items()) k.set_recv_count(parse_token(t), n.get<Count>());
}

void to_json(json& j, const Message& m) {
  if (const auto* app = std::get_if<AppMsg>(&m)) {
    j = json{{"kind", "AppMsg"}, {"along", app->along}, {"refobs", app->refobs}};
  } else if (const auto* info = std::get_if<InfoMsg>(&m)) {
    j = json{{"kind", "InfoMsg"}, {"along", info->along}, {"created", info->created}};
  } else {
    const auto& rel = std::get<ReleaseMsg>(m);
    j = json{{"kind", "ReleaseMsg"}, {"released", rel.released}, {"count", rel.count}};
  }
}

void from_json(const json& j, Message& m) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "AppMsg") {
    m = AppMsg{j.at("along").get<Token>(), refobs_from(j.at("refobs"))};
  } else if (kind == "InfoMsg") {
    m = InfoMsg{j.at("along").get<Token>(), j.at("created").get<Refob>()};
  } else if (kind == "ReleaseMsg") {
    m = ReleaseMsg{j.at("released").get<Refob>(), j.at("count").get<Count>()};
  } else {
    throw std::invalid_argument("unknown message kind: " + kind);
  }
}

void to_json(json& j, const Event& e) {
  j = json{{"rule", rule_name(rule_of(e))}};
  std::visit(
      [&](const auto& ev) {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, SpawnEvent>) {
          j["x"] = ev.x, j["parent"] = ev.parent, j["child"] = ev.child, j["self"] = ev.self;
        } else if constexpr (std::is_same_v<T, SendEvent>) {
          j["x"] = ev.x, j["ys"] = ev.ys, j["zs"] = ev.zs;
          j["sender"] = ev.sender, j["recipient"] = ev.recipient, j["targets"] = ev.targets;
        } else if constexpr (std::is_same_v<T, ReceiveEvent>) {
          j["x"] = ev.x, j["recipient"] = ev.recipient, j["refobs"] = ev.refobs;
        } else if constexpr (std::is_same_v<T, IdleEvent> || std::is_same_v<T, SnapshotEvent>) {
          j["actor"] = ev.actor;
        } else if constexpr (std::is_same_v<T, SendInfoEvent>) {
          j["y"] = ev.y, j["z"] = ev.z, j["sender"] = ev.sender, j["owner"] = ev.owner, j["target"] = ev.target;
        } else if constexpr (std::is_same_v<T, InfoEvent> || std::is_same_v<T, InfoOutEvent>) {
          j["y"] = ev.y, j["created"] = ev.created;
        } else if constexpr (std::is_same_v<T, SendReleaseEvent> || std::is_same_v<T, ReleaseEvent> ||
                             std::is_same_v<T, CompactionEvent>) {
          j["x"] = ev.x, j["owner"] = ev.owner, j["target"] = ev.target;
        } else if constexpr (std::is_same_v<T, InEvent>) {
          j["receptionist"] = ev.receptionist, j["refobs"] = ev.refobs;
        } else if constexpr (std::is_same_v<T, OutEvent>) {
          j["x"] = ev.x, j["external"] = ev.external, j["refobs"] = ev.refobs;
        } else {
          static_assert(std::is_same_v<T, ReleaseOutEvent>);
          j["x"] = ev.x, j["external"] = ev.external;
        }
      },
      e);
}

void from_json(const json& j, Event& e) {
  auto tok = [&](const char* key) { return j.at(key).get<Token>(); };
  auto addr = [&](const char* key) { return j.at(key).get<ActorAddress>(); };
  switch (rule_from_name(j.at("rule").get<std::string>())) {
    case Rule::Spawn: e = SpawnEvent{tok("x"), addr("parent"), addr("child"), tok("self")}; break;
    case Rule::Send:
      e = SendEvent{tok("x"),          j.at("ys").get<std::vector<Token>>(), j.at("zs").get<std::vector<Token>>(),
                    addr("sender"),    addr("recipient"),                    j.at("targets").get<std::vector<ActorAddress>>()};
      break;
    case Rule::Receive: e = ReceiveEvent{tok("x"), addr("recipient"), refobs_from(j.at("refobs"))}; break;
    case Rule::Idle: e = IdleEvent{addr("actor")}; break;
    case Rule::SendInfo: e = SendInfoEvent{tok("y"), tok("z"), addr("sender"), addr("owner"), addr("target")}; break;
    case Rule::Info: e = InfoEvent{tok("y"), j.at("created").get<Refob>()}; break;
    case Rule::SendRelease: e = SendReleaseEvent{tok("x"), addr("owner"), addr("target")}; break;
    case Rule::Release: e = ReleaseEvent{tok("x"), addr("owner"), addr("target")}; break;
    case Rule::Compaction: e = CompactionEvent{tok("x"), addr("owner"), addr("target")}; break;
    case Rule::Snapshot: e = SnapshotEvent{addr("actor")}; break;
    case Rule::In: e = InEvent{addr("receptionist"), refobs_from(j.at("refobs"))}; break;
    case Rule::Out: e = OutEvent{tok("x"), addr("external"), refobs_from(j.at("refobs"))}; break;
    case Rule::ReleaseOut: e = ReleaseOutEvent{tok("x"), addr("external")}; break;
    case Rule::InfoOut: e = InfoOutEvent{tok("y"), j.at("created").get<Refob>()}; break;
  }
}

void to_json(json& j, const Configuration& k) {
  json actors = json::array();
  for (const auto& [a, st] : k.actors) {
    actors.push_back(json{{"address", a}, {"mode", st.busy() ? "busy" : "idle"}, {"knowledge", st.knowledge}});
  }
  json boxes = json::array();
  for (const auto& [a, msgs] : k.mailboxes) boxes.push_back(json{{"to", a}, {"messages", msgs}});
  json seqs = json::object();
  for (const auto& [a, n] : k.names.sequences()) seqs[std::to_string(a.value)] = n;
  j = json{{"actors", std::move(actors)},
           {"mailboxes", std::move(boxes)},
           {"receptionists", k.receptionists},
           {"externals", k.externals},
           {"names",
            {{"next_address", k.names.next_address()},
             {"sequences", std::move(seqs)},
             {"spawned", k.names.spawned()},
             {"injections", k.names.injections()}}}};
}

void from_json(const json& j, Configuration& k) {
  k = Configuration{};
  for (const auto& a : j.at("actors")) {
    ActorState st;
    st.mode = a.at("mode").get<std::string>() == "busy" ? Mode::Busy : Mode::Idle;
    st.knowledge = a.at("knowledge").get<KnowledgeSet>();
    k.actors.emplace(a.at("address").get<ActorAddress>(), std::move(st));
  }
  for (const auto& b : j.at("mailboxes")) {
    k.mailboxes[b.at("to").get<ActorAddress>()] = b.at("messages").get<std::vector<Message>>();
  }
  k.receptionists = j.at("receptionists").get<std::set<ActorAddress>>();
  k.externals = j.at("externals").get<std::set<ActorAddress>>();
  const auto& names = j.at("names");
  boost::container::flat_map<ActorAddress, std::uint32_t> seqs;
  for (const auto& [a, n] : names.at("sequences").items()) seqs[ActorAddress{parse_u32(a)}] = n.get<std::uint32_t>();
  k.names.restore(names.at("next_address").get<std::uint32_t>(), std::move(seqs), names.at("spawned").get<std::uint32_t>(),
                  names.at("injections").get<std::uint32_t>());
}

void to_json(json& j, const SnapshotStore& s) {
  j = json::array();
  for (const auto& [a, snap] : s.entries()) {
    j.push_back(json{{"actor", a}, {"taken_at", snap.taken_at}, {"knowledge", snap.knowledge}});
  }
}

void from_json(const json& j, SnapshotStore& s) {
  s = SnapshotStore{};
  for (const auto& e : j) {
    s.record(e.at("actor").get<ActorAddress>(), e.at("knowledge").get<KnowledgeSet>(), e.at("taken_at").get<EventIndex>());
  }
}

}  // namespace drl
