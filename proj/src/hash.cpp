#include "drl/hash.hpp"

#include <algorithm>
#include <cstdio>

namespace drl {

void hash_append(Hasher& h, ActorAddress a) { h.u32(a.value); }

void hash_append(Hasher& h, Token t) {
  h.u32(t.creator.value);
  h.u32(t.sequence);
}

void hash_append(Hasher& h, const Refob& r) {
  hash_append(h, r.token);
  hash_append(h, r.owner);
  hash_append(h, r.target);
}

void hash_append(Hasher& h, const KnowledgeSet& k) {
  h.u64(k.created().size());
  for (const auto& r : k.created()) hash_append(h, r);
  h.u64(k.released().size());
  for (const auto& r : k.released()) hash_append(h, r);
  h.u64(k.created_using().size());
  for (const auto& [u, c] : k.created_using()) {
    hash_append(h, u);
    hash_append(h, c);
  }
  h.u64(k.activated().size());
  for (const auto& r : k.activated()) hash_append(h, r);
  h.u64(k.sent_counts().size());
  for (const auto& [t, n] : k.sent_counts()) {
    hash_append(h, t);
    h.u64(n);
  }
  h.u64(k.recv_counts().size());
  for (const auto& [t, n] : k.recv_counts()) {
    hash_append(h, t);
    h.u64(n);
  }
}

void hash_append(Hasher& h, const Message& m) {
  h.u8(static_cast<std::uint8_t>(m.index()));
  if (const auto* app = std::get_if<AppMsg>(&m)) {
    hash_append(h, app->along);
    h.u64(app->refobs.size());
    for (const auto& r : app->refobs) hash_append(h, r);
  } else if (const auto* info = std::get_if<InfoMsg>(&m)) {
    hash_append(h, info->along);
    hash_append(h, info->created);
  } else {
    const auto& rel = std::get<ReleaseMsg>(m);
    hash_append(h, rel.released);
    h.u64(rel.count);
  }
}

void hash_append(Hasher& h, const Configuration& k) {
  h.u64(k.actors.size());
  for (const auto& [addr, state] : k.actors) {
    hash_append(h, addr);
    h.u8(static_cast<std::uint8_t>(state.mode));
    hash_append(h, state.knowledge);
  }
  h.u64(k.mailboxes.size());
  std::vector<const Message*> sorted;
  for (const auto& [addr, msgs] : k.mailboxes) {
    hash_append(h, addr);
    sorted.clear();
    for (const auto& m : msgs) sorted.push_back(&m);
    std::sort(sorted.begin(), sorted.end(), [](const Message* a, const Message* b) { return *a < *b; });
    h.u64(sorted.size());
    for (const auto* m : sorted) hash_append(h, *m);
  }
  h.u64(k.receptionists.size());
  for (auto a : k.receptionists) hash_append(h, a);
  h.u64(k.externals.size());
  for (auto a : k.externals) hash_append(h, a);
  h.u32(k.names.next_address());
  h.u64(k.names.sequences().size());
  for (const auto& [a, s] : k.names.sequences()) {
    hash_append(h, a);
    h.u32(s);
  }
  h.u32(k.names.spawned());
  h.u32(k.names.injections());
}

std::uint64_t hash_of(const Configuration& k) {
  Hasher h;
  hash_append(h, k);
  return h.digest();
}

std::uint64_t hash_of(const KnowledgeSet& k) {
  Hasher h;
  hash_append(h, k);
  return h.digest();
}

std::string hex_digest(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

}  // namespace drl
