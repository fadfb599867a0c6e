#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "candor/crypto.hpp"

// Threshold sharing of the cluster secret. One polynomial of degree k-1 per
// secret octet over GF(p); the secret octet is the constant term and shard i
// holds the evaluations at x = i. Epochs advance by zero-constant proactive
// refresh, so shards from different epochs never combine.

namespace candor::shamir {

inline constexpr std::uint32_t kProductionField = 257;

struct ShardedSecret {
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  std::uint64_t epoch = 0;
  std::uint32_t field_modulus = kProductionField;
  std::uint32_t secret_len = 0;
  // One digest per polynomial coefficient order (k entries): binds the
  // coefficient vectors across all octet positions.
  std::vector<crypto::Digest> commitments;
  // One digest per shard (n entries): what verify_shard checks a single
  // shard against. Hash commitments cannot be opened per-coefficient, so
  // single-shard verification needs these alongside the k coefficient
  // digests.
  std::vector<crypto::Digest> share_checks;

  bool operator==(const ShardedSecret&) const = default;

  Bytes encoded() const;
  static ShardedSecret decode(ByteView data);
};

struct Shard {
  std::uint32_t index = 0;  // 1..n
  std::uint64_t epoch = 0;
  std::vector<std::uint16_t> values;  // one field element per secret octet

  bool operator==(const Shard&) const = default;
};

// Canonical export record {epoch, index, field_modulus, values}.
Bytes encode_shard(const Shard& s, std::uint32_t field_modulus);
std::pair<Shard, std::uint32_t> decode_shard(ByteView data);

std::pair<ShardedSecret, std::vector<Shard>> split(
    ByteView secret, std::uint32_t n, std::uint32_t k, crypto::SeededRng& rng,
    std::uint32_t field_modulus = kProductionField);

Bytes reconstruct(std::span<const Shard> shards, const ShardedSecret& meta);

bool verify_shard(const Shard& shard, const ShardedSecret& meta);

// Requires the full shard set of the current epoch; adds a fresh random
// polynomial with zero constant term and advances the epoch.
std::pair<ShardedSecret, std::vector<Shard>> rotate(
    std::span<const Shard> shards, const ShardedSecret& meta,
    crypto::SeededRng& rng);

// GF(p) helpers, exposed for the exhaustive test oracles.
namespace gf {
std::uint32_t add(std::uint32_t a, std::uint32_t b, std::uint32_t p);
std::uint32_t sub(std::uint32_t a, std::uint32_t b, std::uint32_t p);
std::uint32_t mul(std::uint32_t a, std::uint32_t b, std::uint32_t p);
std::uint32_t pow(std::uint32_t a, std::uint64_t e, std::uint32_t p);
std::uint32_t inv(std::uint32_t a, std::uint32_t p);
// Evaluate a coefficient-vector polynomial at x.
std::uint32_t eval(std::span<const std::uint16_t> coeffs, std::uint32_t x,
                   std::uint32_t p);
// Coefficients of the unique degree <= points-1 polynomial through the
// given (x, y) points.
std::vector<std::uint16_t> interpolate_coeffs(
    std::span<const std::pair<std::uint32_t, std::uint32_t>> points,
    std::uint32_t p);
}  // namespace gf

}  // namespace candor::shamir
