#include "drl/canonical.hpp"

#include <algorithm>
#include <tuple>
#include <vector>

#include "drl/hash.hpp"

namespace drl {

namespace {

constexpr int kRefinementRounds = 3;
constexpr std::size_t kMaxPermutedActors = 4;

// Word-at-a-time combining; the byte-wise Hasher is too slow for a key
// computed on every transition.
class Mixer {
 public:
  void add(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x ^= x >> 31;
    h_ = (h_ ^ x) * 0xff51afd7ed558ccdULL;
    h_ = (h_ << 29) | (h_ >> 35);
  }
  std::uint64_t digest() const { return h_ ^ (h_ >> 33); }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::uint64_t mix(std::initializer_list<std::uint64_t> parts) {
  Mixer m;
  for (auto p : parts) m.add(p);
  return m.digest();
}

std::uint64_t digest_of(std::vector<std::uint64_t>& parts) {
  std::sort(parts.begin(), parts.end());
  Mixer m;
  m.add(parts.size());
  for (auto p : parts) m.add(p);
  return m.digest();
}

/// Renaming of internal actor addresses; identity outside the permuted range.
class AddressMap {
 public:
  AddressMap() = default;
  AddressMap(std::vector<ActorAddress> from, std::vector<ActorAddress> to) : from_(std::move(from)), to_(std::move(to)) {}
  ActorAddress operator()(ActorAddress a) const {
    for (std::size_t i = 0; i < from_.size(); ++i) {
      if (from_[i] == a) return to_[i];
    }
    return a;
  }
  Token operator()(Token t) const { return t.is_external() ? t : Token{(*this)(t.creator), t.sequence}; }

 private:
  std::vector<ActorAddress> from_;
  std::vector<ActorAddress> to_;
};

/// Colour refinement over the tokens of a state seen through an address map.
/// Tokens are identified by their mapped value.
class Coloring {
 public:
  Coloring(const Configuration& k, const Ledger& ledger, const SnapshotStore& store, const AddressMap& am)
      : k_(k), ledger_(ledger), store_(store), am_(am) {
    for (const auto& [token, rec] : ledger.refobs()) {
      if (rec.state != RefobState::Released) note(token);
    }
    for (const auto& [a, st] : k.actors) note_all(st.knowledge);
    for (const auto& [a, snap] : store.entries()) note_all(snap.knowledge);
    for (const auto& [r, msgs] : k.mailboxes) {
      for (const auto& m : msgs) {
        std::visit([&](const auto& msg) { note_message(msg); }, m);
      }
    }
    std::sort(tokens_.begin(), tokens_.end());
    tokens_.erase(std::unique(tokens_.begin(), tokens_.end()), tokens_.end());
    color_.resize(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) color_[i] = initial_color(i);
    for (int round = 0; round < kRefinementRounds; ++round) refine();
  }

  /// Keys are original tokens; values are relabelled tokens under mapped creators.
  TokenMap relabel() const {
    std::vector<std::tuple<ActorAddress, std::uint64_t, Token, Token>> order;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      order.emplace_back(mapped_[i].creator, color_[i], mapped_[i], tokens_[i]);
    }
    std::sort(order.begin(), order.end());
    TokenMap out;
    std::uint32_t seq = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto creator = std::get<0>(order[i]);
      if (i == 0 || std::get<0>(order[i - 1]) != creator) seq = 0;
      out.emplace(std::get<3>(order[i]), Token{creator, seq++});
    }
    return out;
  }

 private:
  void note(Token t) {
    if (!t.is_external()) tokens_.push_back(t);
  }
  void note_all(const KnowledgeSet& ks) {
    for (const auto& r : ks.created()) note(r.token);
    for (const auto& r : ks.released()) note(r.token);
    for (const auto& r : ks.activated()) note(r.token);
    for (const auto& [u, c] : ks.created_using()) {
      note(u.token);
      note(c.token);
    }
    for (const auto& [t, n] : ks.sent_counts()) note(t);
    for (const auto& [t, n] : ks.recv_counts()) note(t);
  }
  void note_message(const AppMsg& m) {
    note(m.along);
    for (const auto& r : m.refobs) note(r.token);
  }
  void note_message(const InfoMsg& m) {
    note(m.along);
    note(m.created.token);
  }
  void note_message(const ReleaseMsg& m) { note(m.released.token); }

  std::size_t index(Token t) const {
    return static_cast<std::size_t>(std::lower_bound(tokens_.begin(), tokens_.end(), t) - tokens_.begin());
  }

  std::uint64_t initial_color(std::size_t i) {
    const Token t = tokens_[i];
    mapped_.push_back(am_(t));
    const auto* rec = ledger_.find(t);
    if (rec == nullptr) return mix({am_(t.creator).value, 0xffu});
    return mix({am_(t.creator).value, am_(rec->refob.owner).value, am_(rec->refob.target).value,
                static_cast<std::uint64_t>(rec->state)});
  }

  std::uint64_t color(Token t) const { return t.is_external() ? 0x5eedu : color_[index(t)]; }

  void add(Token t, std::uint64_t f) {
    if (!t.is_external()) features_[index(t)].push_back(f);
  }

  void knowledge_features(std::uint64_t tag, ActorAddress actor, const KnowledgeSet& ks) {
    const std::uint64_t a = am_(actor).value;
    for (const auto& r : ks.created()) add(r.token, mix({tag, a, 1}));
    for (const auto& r : ks.released()) add(r.token, mix({tag, a, 2}));
    for (const auto& r : ks.activated()) add(r.token, mix({tag, a, 3}));
    for (const auto& [u, c] : ks.created_using()) {
      add(u.token, mix({tag, a, 4, color(c.token)}));
      add(c.token, mix({tag, a, 5, color(u.token)}));
    }
    for (const auto& [t, n] : ks.sent_counts()) add(t, mix({tag, a, 6, n}));
    for (const auto& [t, n] : ks.recv_counts()) add(t, mix({tag, a, 7, n}));
  }

  void refine() {
    features_.assign(tokens_.size(), {});
    for (const auto& [a, st] : k_.actors) knowledge_features(1 + static_cast<std::uint64_t>(st.mode), a, st.knowledge);
    for (const auto& [a, snap] : store_.entries()) knowledge_features(3, a, snap.knowledge);
    std::vector<std::uint64_t> carried;
    for (const auto& [recipient, msgs] : k_.mailboxes) {
      const std::uint64_t r = am_(recipient).value;
      for (const auto& m : msgs) {
        if (const auto* app = std::get_if<AppMsg>(&m)) {
          carried.clear();
          for (const auto& ref : app->refobs) carried.push_back(mix({color(ref.token), am_(ref.target).value}));
          const auto payload = digest_of(carried);
          add(app->along, mix({4, r, 1, payload}));
          for (const auto& ref : app->refobs) add(ref.token, mix({4, r, 2, color(app->along), payload}));
        } else if (const auto* info = std::get_if<InfoMsg>(&m)) {
          add(info->along, mix({4, r, 3, color(info->created.token)}));
          add(info->created.token, mix({4, r, 4, color(info->along)}));
        } else {
          const auto& rel = std::get<ReleaseMsg>(m);
          add(rel.released.token, mix({4, r, 5, rel.count}));
        }
      }
    }
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      features_[i].push_back(color_[i]);
      color_[i] = digest_of(features_[i]);
    }
  }

  const Configuration& k_;
  const Ledger& ledger_;
  const SnapshotStore& store_;
  const AddressMap& am_;
  std::vector<Token> tokens_;
  std::vector<Token> mapped_;
  std::vector<std::uint64_t> color_;
  std::vector<std::vector<std::uint64_t>> features_;
};

/// Hashes a state through an address map and a token relabelling without
/// materializing the renamed state.
class KeyWriter {
 public:
  KeyWriter(const AddressMap& am, const TokenMap& tm) : am_(am), tm_(tm) {}

  std::uint64_t addr(ActorAddress a) const { return am_(a).value; }
  std::uint64_t tok(Token t) const {
    if (t.is_external()) return ~0ULL;
    auto it = tm_.find(t);
    const Token u = it == tm_.end() ? am_(t) : it->second;
    return (std::uint64_t{u.creator.value} << 32) | u.sequence;
  }
  std::uint64_t ref(const Refob& r) const { return mix({tok(r.token), addr(r.owner), addr(r.target)}); }

  std::uint64_t knowledge(const KnowledgeSet& ks) const {
    std::vector<std::uint64_t> parts;
    for (const auto& r : ks.created()) parts.push_back(mix({1, ref(r)}));
    for (const auto& r : ks.released()) parts.push_back(mix({2, ref(r)}));
    for (const auto& r : ks.activated()) parts.push_back(mix({3, ref(r)}));
    for (const auto& [u, c] : ks.created_using()) parts.push_back(mix({4, ref(u), ref(c)}));
    for (const auto& [t, n] : ks.sent_counts()) parts.push_back(mix({5, tok(t), n}));
    for (const auto& [t, n] : ks.recv_counts()) parts.push_back(mix({6, tok(t), n}));
    return digest_of(parts);
  }

  std::uint64_t message(const Message& m) const {
    if (const auto* app = std::get_if<AppMsg>(&m)) {
      std::vector<std::uint64_t> refs;
      for (const auto& r : app->refobs) refs.push_back(ref(r));
      return mix({1, tok(app->along), digest_of(refs)});
    }
    if (const auto* info = std::get_if<InfoMsg>(&m)) return mix({2, tok(info->along), ref(info->created)});
    const auto& rel = std::get<ReleaseMsg>(m);
    return mix({3, ref(rel.released), rel.count});
  }

  std::uint64_t state(const Configuration& k, const Ledger& ledger, const SnapshotStore& store) const {
    std::vector<std::uint64_t> parts;
    for (const auto& [a, st] : k.actors) {
      parts.push_back(mix({1, addr(a), static_cast<std::uint64_t>(st.mode), knowledge(st.knowledge)}));
    }
    std::vector<std::uint64_t> box;
    for (const auto& [a, msgs] : k.mailboxes) {
      if (msgs.empty()) continue;
      box.clear();
      for (const auto& m : msgs) box.push_back(message(m));
      parts.push_back(mix({2, addr(a), digest_of(box)}));
    }
    for (auto a : k.receptionists) parts.push_back(mix({3, addr(a)}));
    for (auto a : k.externals) parts.push_back(mix({4, addr(a)}));
    for (const auto& [a, s] : k.names.sequences()) parts.push_back(mix({5, addr(a), s}));
    parts.push_back(mix({6, k.names.next_address(), k.names.spawned(), k.names.injections()}));
    for (const auto& [token, rec] : ledger.refobs()) {
      if (!tm_.contains(token)) continue;
      parts.push_back(mix({7, ref(rec.refob), static_cast<std::uint64_t>(rec.state)}));
    }
    for (const auto& [a, snap] : store.entries()) parts.push_back(mix({8, addr(a), knowledge(snap.knowledge)}));
    return digest_of(parts);
  }

 private:
  const AddressMap& am_;
  const TokenMap& tm_;
};

Token renamed(Token t, const TokenMap& map) {
  auto it = map.find(t);
  return it == map.end() ? t : it->second;
}

}  // namespace

TokenMap canonical_token_map(const Configuration& k, const Ledger& ledger, const SnapshotStore& store) {
  const AddressMap identity;
  return Coloring(k, ledger, store, identity).relabel();
}

Refob renamed(const Refob& r, const TokenMap& map) { return Refob{renamed(r.token, map), r.owner, r.target}; }

KnowledgeSet renamed(const KnowledgeSet& ks, const TokenMap& map) {
  KnowledgeSet out;
  for (const auto& r : ks.created()) out.insert(Created{renamed(r, map)});
  for (const auto& r : ks.released()) out.insert(Released{renamed(r, map)});
  for (const auto& r : ks.activated()) out.insert(Activated{renamed(r, map)});
  for (const auto& [u, c] : ks.created_using()) out.insert(CreatedUsing{renamed(u, map), renamed(c, map)});
  for (const auto& [t, n] : ks.sent_counts()) out.set_sent_count(renamed(t, map), n);
  for (const auto& [t, n] : ks.recv_counts()) out.set_recv_count(renamed(t, map), n);
  return out;
}

Message renamed(const Message& m, const TokenMap& map) {
  if (const auto* app = std::get_if<AppMsg>(&m)) {
    AppMsg out{renamed(app->along, map), {}};
    for (const auto& r : app->refobs) out.refobs.push_back(renamed(r, map));
    std::sort(out.refobs.begin(), out.refobs.end());
    return out;
  }
  if (const auto* info = std::get_if<InfoMsg>(&m)) return InfoMsg{renamed(info->along, map), renamed(info->created, map)};
  const auto& rel = std::get<ReleaseMsg>(m);
  return ReleaseMsg{renamed(rel.released, map), rel.count};
}

Configuration renamed(const Configuration& k, const TokenMap& map) {
  Configuration out;
  for (const auto& [a, st] : k.actors) out.actors.emplace(a, ActorState{st.mode, renamed(st.knowledge, map)});
  for (const auto& [r, msgs] : k.mailboxes) {
    auto& box = out.mailboxes[r];
    for (const auto& m : msgs) box.push_back(renamed(m, map));
  }
  out.receptionists = k.receptionists;
  out.externals = k.externals;
  out.names = k.names;
  return out;
}

namespace {

struct Choice {
  AddressMap am;
  TokenMap tm;
};

Choice best_choice(const Configuration& k, const Ledger& ledger, const SnapshotStore& store) {
  std::vector<ActorAddress> movable;
  for (const auto& [a, st] : k.actors) {
    if (a != kInitialActor) movable.push_back(a);
  }
  if (movable.size() > kMaxPermutedActors) movable.clear();
  auto image = movable;
  Choice best;
  std::uint64_t best_key = 0;
  bool first = true;
  do {
    AddressMap am(movable, image);
    auto tm = Coloring(k, ledger, store, am).relabel();
    const auto key = KeyWriter(am, tm).state(k, ledger, store);
    if (first || key < best_key) {
      best = Choice{std::move(am), std::move(tm)};
      best_key = key;
      first = false;
    }
  } while (std::next_permutation(image.begin(), image.end()));
  return best;
}

Token apply_maps(Token t, const Choice& c) {
  if (t.is_external()) return t;
  auto it = c.tm.find(t);
  return it == c.tm.end() ? c.am(t) : it->second;
}

Refob apply_maps(const Refob& r, const Choice& c) { return Refob{apply_maps(r.token, c), c.am(r.owner), c.am(r.target)}; }

KnowledgeSet apply_maps(const KnowledgeSet& ks, const Choice& c) {
  KnowledgeSet out;
  for (const auto& r : ks.created()) out.insert(Created{apply_maps(r, c)});
  for (const auto& r : ks.released()) out.insert(Released{apply_maps(r, c)});
  for (const auto& r : ks.activated()) out.insert(Activated{apply_maps(r, c)});
  for (const auto& [u, z] : ks.created_using()) out.insert(CreatedUsing{apply_maps(u, c), apply_maps(z, c)});
  for (const auto& [t, n] : ks.sent_counts()) out.set_sent_count(apply_maps(t, c), n);
  for (const auto& [t, n] : ks.recv_counts()) out.set_recv_count(apply_maps(t, c), n);
  return out;
}

Message apply_maps(const Message& m, const Choice& c) {
  if (const auto* app = std::get_if<AppMsg>(&m)) {
    AppMsg out{apply_maps(app->along, c), {}};
    for (const auto& r : app->refobs) out.refobs.push_back(apply_maps(r, c));
    std::sort(out.refobs.begin(), out.refobs.end());
    return out;
  }
  if (const auto* info = std::get_if<InfoMsg>(&m)) return InfoMsg{apply_maps(info->along, c), apply_maps(info->created, c)};
  const auto& rel = std::get<ReleaseMsg>(m);
  return ReleaseMsg{apply_maps(rel.released, c), rel.count};
}

}  // namespace

CanonicalForm canonical_form(const Configuration& k, const Ledger& ledger, const SnapshotStore& store) {
  const auto c = best_choice(k, ledger, store);
  CanonicalForm out;
  for (const auto& [a, st] : k.actors) out.k.actors.emplace(c.am(a), ActorState{st.mode, apply_maps(st.knowledge, c)});
  for (const auto& [a, msgs] : k.mailboxes) {
    if (msgs.empty()) continue;
    auto& box = out.k.mailboxes[c.am(a)];
    for (const auto& m : msgs) box.push_back(apply_maps(m, c));
    std::sort(box.begin(), box.end());
  }
  for (auto a : k.receptionists) out.k.receptionists.insert(c.am(a));
  for (auto a : k.externals) out.k.externals.insert(c.am(a));
  boost::container::flat_map<ActorAddress, std::uint32_t> sequences;
  for (const auto& [a, n] : k.names.sequences()) sequences.emplace(c.am(a), n);
  out.k.names.restore(k.names.next_address(), std::move(sequences), k.names.spawned(), k.names.injections());
  for (const auto& [token, rec] : ledger.refobs()) {
    if (c.tm.contains(token)) out.refobs.emplace_back(apply_maps(rec.refob, c), rec.state);
  }
  std::sort(out.refobs.begin(), out.refobs.end());
  for (const auto& [a, snap] : store.entries()) out.store.emplace(c.am(a), apply_maps(snap.knowledge, c));
  return out;
}

std::uint64_t canonical_key(const Configuration& k, const Ledger& ledger, const SnapshotStore& store) {
  const auto c = best_choice(k, ledger, store);
  return KeyWriter(c.am, c.tm).state(k, ledger, store);
}

}  // namespace drl
