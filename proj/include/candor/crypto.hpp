#pragma once

#include <array>
#include <compare>
#include <optional>

#include "candor/bytes.hpp"

// Algorithm-agile primitives. Every other module consumes these; nothing
// here reads a clock or an entropy source, so any two replicas given the
// same inputs produce the same octets.

namespace candor::crypto {

// One-octet algorithm tags. Exactly one suite ships today; the tag travels
// in every encoding so a future suite swap does not break formats.
inline constexpr std::uint8_t kHashSha256 = 1;
inline constexpr std::uint8_t kSigEd25519 = 1;
inline constexpr std::uint8_t kAeadChaCha20Poly1305 = 1;

inline constexpr std::size_t kDigestSize = 32;
inline constexpr std::size_t kNonceSize = 12;
inline constexpr std::size_t kTagSize = 16;

struct Digest {
  std::uint8_t algorithm_id = kHashSha256;
  std::array<std::uint8_t, kDigestSize> bytes{};

  auto operator<=>(const Digest&) const = default;

  std::string hex() const { return hex_encode(bytes); }
  Bytes encoded() const {
    Encoder e;
    e.u8(algorithm_id).raw(bytes);
    return e.take();
  }
  static Digest decode(Decoder& d) {
    Digest out;
    out.algorithm_id = d.u8();
    Bytes raw = d.raw(kDigestSize);
    std::copy(raw.begin(), raw.end(), out.bytes.begin());
    return out;
  }
  static std::optional<Digest> from_hex(std::string_view h) {
    auto raw = hex_decode(h);
    if (!raw || raw->size() != kDigestSize) return std::nullopt;
    Digest out;
    std::copy(raw->begin(), raw->end(), out.bytes.begin());
    return out;
  }
};

Digest hash(ByteView data);

// Incremental variant for composite inputs that are cheaper to feed in
// pieces than to concatenate.
class Hasher {
 public:
  Hasher();
  Hasher& update(ByteView data);
  Digest finish();

 private:
  std::array<std::uint8_t, 128> state_{};
};

// ---------------------------------------------------------------------------
// Signatures (Ed25519): deterministic, so signing is itself replayable.
// ---------------------------------------------------------------------------

struct Signature {
  std::uint8_t algorithm_id = kSigEd25519;
  std::array<std::uint8_t, 64> bytes{};

  auto operator<=>(const Signature&) const = default;

  Bytes encoded() const {
    Encoder e;
    e.u8(algorithm_id).raw(bytes);
    return e.take();
  }
  static Signature decode(Decoder& d) {
    Signature out;
    out.algorithm_id = d.u8();
    Bytes raw = d.raw(64);
    std::copy(raw.begin(), raw.end(), out.bytes.begin());
    return out;
  }
};

struct VerifyKey {
  std::uint8_t algorithm_id = kSigEd25519;
  std::array<std::uint8_t, 32> material{};

  auto operator<=>(const VerifyKey&) const = default;

  Bytes encoded() const {
    Encoder e;
    e.u8(algorithm_id).raw(material);
    return e.take();
  }
  static VerifyKey decode(Decoder& d) {
    VerifyKey out;
    out.algorithm_id = d.u8();
    Bytes raw = d.raw(32);
    std::copy(raw.begin(), raw.end(), out.material.begin());
    return out;
  }
  // Stable identity of the key: hash of its canonical encoding.
  Digest fingerprint() const { return hash(encoded()); }
};

struct SigningKey {
  std::uint8_t algorithm_id = kSigEd25519;
  std::array<std::uint8_t, 64> material{};  // ed25519 secret + public half
};

struct Keypair {
  SigningKey sk;
  VerifyKey vk;
};

// Deterministic key derivation from a 32-octet seed.
Keypair keypair_from_seed(ByteView seed32);

Signature sign(const SigningKey& sk, ByteView msg);
// Verification failure is an ordinary false, never an exception.
bool verify(const VerifyKey& vk, ByteView msg, const Signature& sig);

// ---------------------------------------------------------------------------
// Ephemeral key agreement (X25519), used by attestation handshakes. The
// shared secret is symmetric; sessions hash it with context into AeadKeys.
// ---------------------------------------------------------------------------

struct EcdhKeypair {
  std::array<std::uint8_t, 32> sk{};
  std::array<std::uint8_t, 32> pk{};
};

EcdhKeypair ecdh_from_seed(ByteView seed32);
std::array<std::uint8_t, 32> ecdh_shared(
    const std::array<std::uint8_t, 32>& own_sk,
    const std::array<std::uint8_t, 32>& peer_pk);

// ---------------------------------------------------------------------------
// Authenticated encryption. Nonces are explicit caller-owned counters.
// ---------------------------------------------------------------------------

struct AeadKey {
  std::uint8_t algorithm_id = kAeadChaCha20Poly1305;
  std::array<std::uint8_t, 32> key{};

  auto operator<=>(const AeadKey&) const = default;
};

struct Ciphertext {
  std::array<std::uint8_t, kNonceSize> nonce{};
  Bytes body;
  std::array<std::uint8_t, kTagSize> tag{};

  bool operator==(const Ciphertext&) const = default;

  Bytes encoded() const {
    Encoder e;
    e.raw(nonce).bytes(body).raw(tag);
    return e.take();
  }
  static Ciphertext decode(Decoder& d) {
    Ciphertext out;
    Bytes n = d.raw(kNonceSize);
    std::copy(n.begin(), n.end(), out.nonce.begin());
    out.body = d.bytes();
    Bytes t = d.raw(kTagSize);
    std::copy(t.begin(), t.end(), out.tag.begin());
    return out;
  }
};

// Builds the conventional 12-octet nonce from a direction octet and a
// 64-bit counter; callers never invent nonces any other way.
std::array<std::uint8_t, kNonceSize> counter_nonce(std::uint8_t direction,
                                                   std::uint64_t counter);

Ciphertext aead_seal(const AeadKey& key,
                     const std::array<std::uint8_t, kNonceSize>& nonce,
                     ByteView aad, ByteView plaintext);

// nullopt is the typed authentication failure: wrong key, wrong aad, or any
// modified octet of nonce/body/tag.
std::optional<Bytes> aead_open(const AeadKey& key, ByteView aad,
                               const Ciphertext& ct);

// ---------------------------------------------------------------------------
// Deterministic randomness: a pure function of (seed, counter, n).
// ---------------------------------------------------------------------------

Bytes rng_stream(const std::array<std::uint8_t, 32>& seed,
                 std::uint64_t counter, std::size_t n_octets);

class SeededRng {
 public:
  SeededRng() = default;
  explicit SeededRng(const std::array<std::uint8_t, 32>& seed,
                     std::uint64_t counter = 0)
      : seed_(seed), counter_(counter) {}

  // Convenience: expand a short label+number into a 32-octet seed.
  static SeededRng from_label(std::string_view label, std::uint64_t n);

  Bytes next_bytes(std::size_t n);
  std::uint64_t next_u64();
  // Uniform draw in [lo, hi], inclusive.
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);
  // Derive an independent child generator; the parent advances by one.
  SeededRng fork(std::string_view label);

  const std::array<std::uint8_t, 32>& seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::array<std::uint8_t, 32> seed_{};
  std::uint64_t counter_ = 0;
};

}  // namespace candor::crypto
