#include "candor/crypto.hpp"

#include <sodium.h>

#include <cassert>
#include <mutex>

namespace candor::crypto {

namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0)
      throw std::runtime_error("libsodium initialization failed");
  });
}

}  // namespace

Digest hash(ByteView data) {
  ensure_sodium();
  Digest out;
  crypto_hash_sha256(out.bytes.data(), data.data(), data.size());
  return out;
}

Hasher::Hasher() {
  ensure_sodium();
  static_assert(sizeof(crypto_hash_sha256_state) <= sizeof(state_));
  auto* st = reinterpret_cast<crypto_hash_sha256_state*>(state_.data());
  crypto_hash_sha256_init(st);
}

Hasher& Hasher::update(ByteView data) {
  auto* st = reinterpret_cast<crypto_hash_sha256_state*>(state_.data());
  crypto_hash_sha256_update(st, data.data(), data.size());
  return *this;
}

Digest Hasher::finish() {
  auto* st = reinterpret_cast<crypto_hash_sha256_state*>(state_.data());
  Digest out;
  crypto_hash_sha256_final(st, out.bytes.data());
  return out;
}

Keypair keypair_from_seed(ByteView seed32) {
  ensure_sodium();
  if (seed32.size() != crypto_sign_SEEDBYTES)
    fail(Errc::parameter_violation, "signing seed must be 32 octets");
  Keypair kp;
  crypto_sign_seed_keypair(kp.vk.material.data(), kp.sk.material.data(),
                           seed32.data());
  return kp;
}

Signature sign(const SigningKey& sk, ByteView msg) {
  ensure_sodium();
  if (sk.algorithm_id != kSigEd25519)
    fail(Errc::parameter_violation, "unsupported signature algorithm");
  Signature sig;
  unsigned long long len = 0;
  crypto_sign_detached(sig.bytes.data(), &len, msg.data(), msg.size(),
                       sk.material.data());
  assert(len == sig.bytes.size());
  return sig;
}

bool verify(const VerifyKey& vk, ByteView msg, const Signature& sig) {
  ensure_sodium();
  if (vk.algorithm_id != kSigEd25519 || sig.algorithm_id != kSigEd25519)
    return false;
  return crypto_sign_verify_detached(sig.bytes.data(), msg.data(), msg.size(),
                                     vk.material.data()) == 0;
}

EcdhKeypair ecdh_from_seed(ByteView seed32) {
  ensure_sodium();
  if (seed32.size() != 32)
    fail(Errc::parameter_violation, "ecdh seed must be 32 octets");
  EcdhKeypair kp;
  std::copy(seed32.begin(), seed32.end(), kp.sk.begin());
  crypto_scalarmult_base(kp.pk.data(), kp.sk.data());
  return kp;
}

std::array<std::uint8_t, 32> ecdh_shared(
    const std::array<std::uint8_t, 32>& own_sk,
    const std::array<std::uint8_t, 32>& peer_pk) {
  ensure_sodium();
  std::array<std::uint8_t, 32> shared{};
  if (crypto_scalarmult(shared.data(), own_sk.data(), peer_pk.data()) != 0)
    fail(Errc::parameter_violation, "degenerate ecdh public value");
  return shared;
}

std::array<std::uint8_t, kNonceSize> counter_nonce(std::uint8_t direction,
                                                   std::uint64_t counter) {
  std::array<std::uint8_t, kNonceSize> nonce{};
  nonce[0] = direction;
  for (int i = 0; i < 8; ++i)
    nonce[4 + i] = static_cast<std::uint8_t>(counter >> (56 - 8 * i));
  return nonce;
}

Ciphertext aead_seal(const AeadKey& key,
                     const std::array<std::uint8_t, kNonceSize>& nonce,
                     ByteView aad, ByteView plaintext) {
  ensure_sodium();
  if (key.algorithm_id != kAeadChaCha20Poly1305)
    fail(Errc::parameter_violation, "unsupported aead algorithm");
  Ciphertext ct;
  ct.nonce = nonce;
  ct.body.resize(plaintext.size());
  unsigned long long maclen = 0;
  crypto_aead_chacha20poly1305_ietf_encrypt_detached(
      ct.body.data(), ct.tag.data(), &maclen, plaintext.data(),
      plaintext.size(), aad.data(), aad.size(), nullptr, nonce.data(),
      key.key.data());
  assert(maclen == ct.tag.size());
  return ct;
}

std::optional<Bytes> aead_open(const AeadKey& key, ByteView aad,
                               const Ciphertext& ct) {
  ensure_sodium();
  if (key.algorithm_id != kAeadChaCha20Poly1305) return std::nullopt;
  Bytes plain(ct.body.size());
  int rc = crypto_aead_chacha20poly1305_ietf_decrypt_detached(
      plain.data(), nullptr, ct.body.data(), ct.body.size(), ct.tag.data(),
      aad.data(), aad.size(), ct.nonce.data(), key.key.data());
  if (rc != 0) return std::nullopt;
  return plain;
}

Bytes rng_stream(const std::array<std::uint8_t, 32>& seed,
                 std::uint64_t counter, std::size_t n_octets) {
  ensure_sodium();
  Bytes out(n_octets, 0);
  if (n_octets == 0) return out;
  std::array<std::uint8_t, crypto_stream_chacha20_NONCEBYTES> nonce{};
  for (int i = 0; i < 8; ++i)
    nonce[i] = static_cast<std::uint8_t>(counter >> (56 - 8 * i));
  crypto_stream_chacha20(out.data(), out.size(), nonce.data(), seed.data());
  return out;
}

SeededRng SeededRng::from_label(std::string_view label, std::uint64_t n) {
  Encoder e;
  e.str(label).u64(n);
  return SeededRng(hash(e.get()).bytes);
}

Bytes SeededRng::next_bytes(std::size_t n) {
  return rng_stream(seed_, counter_++, n);
}

std::uint64_t SeededRng::next_u64() {
  Bytes b = next_bytes(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t SeededRng::uniform(std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi) fail(Errc::parameter_violation, "uniform: lo > hi");
  std::uint64_t span = hi - lo + 1;
  if (span == 0) return next_u64();  // full range
  return lo + next_u64() % span;
}

SeededRng SeededRng::fork(std::string_view label) {
  Encoder e;
  e.raw(seed_).u64(counter_++).str(label);
  return SeededRng(hash(e.get()).bytes);
}

}  // namespace candor::crypto
