#pragma once

// Canonical 64-bit fingerprints (FNV-1a) for configurations and knowledge
// sets. Mailbox multisets are hashed in sorted order, so the insertion order
// of undelivered messages never affects a fingerprint.

#include <cstdint>
#include <string>

#include "drl/model.hpp"

namespace drl {

class Hasher {
 public:
  void bytes(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
  }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void u32(std::uint32_t v) { bytes(&v, sizeof v); }
  void u8(std::uint8_t v) { bytes(&v, sizeof v); }

  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

void hash_append(Hasher& h, ActorAddress a);
void hash_append(Hasher& h, Token t);
void hash_append(Hasher& h, const Refob& r);
void hash_append(Hasher& h, const KnowledgeSet& k);
void hash_append(Hasher& h, const Message& m);
void hash_append(Hasher& h, const Configuration& k);

std::uint64_t hash_of(const Configuration& k);
std::uint64_t hash_of(const KnowledgeSet& k);

/// 16 lowercase hex digits.
std::string hex_digest(std::uint64_t digest);

}  // namespace drl
