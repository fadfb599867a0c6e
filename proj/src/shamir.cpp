#include "candor/shamir.hpp"

#include <algorithm>
#include <set>

namespace candor::shamir {

namespace gf {

std::uint32_t add(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
  return (a + b) % p;
}

std::uint32_t sub(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
  return (a + p - b % p) % p;
}

std::uint32_t mul(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
  return static_cast<std::uint32_t>(
      (static_cast<std::uint64_t>(a) * b) % p);
}

std::uint32_t pow(std::uint32_t a, std::uint64_t e, std::uint32_t p) {
  std::uint64_t base = a % p, acc = 1;
  while (e > 0) {
    if (e & 1) acc = acc * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return static_cast<std::uint32_t>(acc);
}

std::uint32_t inv(std::uint32_t a, std::uint32_t p) {
  if (a % p == 0) fail(Errc::parameter_violation, "no inverse of 0");
  return pow(a, p - 2, p);
}

std::uint32_t eval(std::span<const std::uint16_t> coeffs, std::uint32_t x,
                   std::uint32_t p) {
  std::uint32_t acc = 0;
  for (std::size_t i = coeffs.size(); i-- > 0;)
    acc = add(mul(acc, x, p), coeffs[i], p);
  return acc;
}

std::vector<std::uint16_t> interpolate_coeffs(
    std::span<const std::pair<std::uint32_t, std::uint32_t>> points,
    std::uint32_t p) {
  std::size_t m = points.size();
  std::vector<std::uint32_t> acc(m, 0);
  // Sum of y_i * L_i(x), each basis polynomial expanded to coefficients.
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::uint32_t> basis(m, 0);
    basis[0] = 1;
    std::size_t degree = 0;
    std::uint32_t denom = 1;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      // basis *= (x - x_j)
      std::uint32_t neg_xj = sub(0, points[j].first % p, p);
      for (std::size_t d = degree + 1;; --d) {
        std::uint32_t carried = d > 0 ? basis[d - 1] : 0;
        basis[d] = add(mul(basis[d], neg_xj, p), carried, p);
        if (d == 0) break;
      }
      ++degree;
      denom = mul(denom, sub(points[i].first, points[j].first, p), p);
    }
    std::uint32_t scale = mul(points[i].second % p, inv(denom, p), p);
    for (std::size_t d = 0; d <= degree; ++d)
      acc[d] = add(acc[d], mul(basis[d], scale, p), p);
  }
  std::vector<std::uint16_t> out(m);
  for (std::size_t d = 0; d < m; ++d)
    out[d] = static_cast<std::uint16_t>(acc[d]);
  return out;
}

}  // namespace gf

namespace {

crypto::Digest coefficient_commitment(std::uint64_t epoch, std::uint32_t order,
                                      std::uint32_t field_modulus,
                                      std::span<const std::uint16_t> coeffs) {
  Encoder e;
  e.u64(epoch).u32(order).u32(field_modulus);
  e.u32(static_cast<std::uint32_t>(coeffs.size()));
  for (std::uint16_t c : coeffs) e.u16(c);
  return crypto::hash(e.get());
}

crypto::Digest share_check(const Shard& s, std::uint32_t field_modulus) {
  return crypto::hash(encode_shard(s, field_modulus));
}

void check_params(std::size_t secret_len, std::uint32_t n, std::uint32_t k,
                  std::uint32_t p) {
  if (secret_len == 0)
    fail(Errc::parameter_violation, "secret must be nonempty");
  if (k < 1 || k > n)
    fail(Errc::parameter_violation, "threshold must satisfy 1 <= k <= n");
  if (p < 3) fail(Errc::parameter_violation, "field modulus too small");
  if (n >= p)
    fail(Errc::parameter_violation,
         "participant count exceeds field capacity");
}

struct MetaBuild {
  ShardedSecret meta;
  std::vector<Shard> shards;
};

// Shared tail of split and rotate: given the full coefficient matrix
// (per octet position), evaluate shards and build the commitments.
MetaBuild build_epoch(const std::vector<std::vector<std::uint16_t>>& coeffs,
                      std::uint32_t n, std::uint32_t k, std::uint64_t epoch,
                      std::uint32_t p) {
  MetaBuild out;
  out.meta.n = n;
  out.meta.k = k;
  out.meta.epoch = epoch;
  out.meta.field_modulus = p;
  out.meta.secret_len = static_cast<std::uint32_t>(coeffs.size());

  out.shards.resize(n);
  for (std::uint32_t i = 1; i <= n; ++i) {
    Shard& s = out.shards[i - 1];
    s.index = i;
    s.epoch = epoch;
    s.values.resize(coeffs.size());
    for (std::size_t pos = 0; pos < coeffs.size(); ++pos)
      s.values[pos] = static_cast<std::uint16_t>(gf::eval(coeffs[pos], i, p));
  }

  out.meta.commitments.reserve(k);
  std::vector<std::uint16_t> order_vec(coeffs.size());
  for (std::uint32_t j = 0; j < k; ++j) {
    for (std::size_t pos = 0; pos < coeffs.size(); ++pos)
      order_vec[pos] = coeffs[pos][j];
    out.meta.commitments.push_back(
        coefficient_commitment(epoch, j, p, order_vec));
  }
  out.meta.share_checks.reserve(n);
  for (const Shard& s : out.shards)
    out.meta.share_checks.push_back(share_check(s, p));
  return out;
}

}  // namespace

Bytes ShardedSecret::encoded() const {
  Encoder e;
  e.u32(n).u32(k).u64(epoch).u32(field_modulus).u32(secret_len);
  e.u32(static_cast<std::uint32_t>(commitments.size()));
  for (const auto& c : commitments) e.raw(c.encoded());
  e.u32(static_cast<std::uint32_t>(share_checks.size()));
  for (const auto& c : share_checks) e.raw(c.encoded());
  return e.take();
}

ShardedSecret ShardedSecret::decode(ByteView data) {
  Decoder d(data);
  ShardedSecret out;
  out.n = d.u32();
  out.k = d.u32();
  out.epoch = d.u64();
  out.field_modulus = d.u32();
  out.secret_len = d.u32();
  std::uint32_t nc = d.u32();
  for (std::uint32_t i = 0; i < nc; ++i)
    out.commitments.push_back(crypto::Digest::decode(d));
  std::uint32_t ns = d.u32();
  for (std::uint32_t i = 0; i < ns; ++i)
    out.share_checks.push_back(crypto::Digest::decode(d));
  d.expect_done();
  return out;
}

Bytes encode_shard(const Shard& s, std::uint32_t field_modulus) {
  Encoder e;
  e.u64(s.epoch).u32(s.index).u32(field_modulus);
  e.u32(static_cast<std::uint32_t>(s.values.size()));
  for (std::uint16_t v : s.values) e.u16(v);
  return e.take();
}

std::pair<Shard, std::uint32_t> decode_shard(ByteView data) {
  Decoder d(data);
  Shard s;
  s.epoch = d.u64();
  s.index = d.u32();
  std::uint32_t field_modulus = d.u32();
  std::uint32_t count = d.u32();
  s.values.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) s.values[i] = d.u16();
  d.expect_done();
  return {std::move(s), field_modulus};
}

std::pair<ShardedSecret, std::vector<Shard>> split(ByteView secret,
                                                   std::uint32_t n,
                                                   std::uint32_t k,
                                                   crypto::SeededRng& rng,
                                                   std::uint32_t p) {
  check_params(secret.size(), n, k, p);
  std::vector<std::vector<std::uint16_t>> coeffs(secret.size());
  for (std::size_t pos = 0; pos < secret.size(); ++pos) {
    if (secret[pos] >= p)
      fail(Errc::parameter_violation,
           "secret octet out of field range");
    coeffs[pos].resize(k);
    coeffs[pos][0] = secret[pos];
    for (std::uint32_t j = 1; j < k; ++j)
      coeffs[pos][j] = static_cast<std::uint16_t>(rng.uniform(0, p - 1));
  }
  MetaBuild b = build_epoch(coeffs, n, k, 0, p);
  return {std::move(b.meta), std::move(b.shards)};
}

Bytes reconstruct(std::span<const Shard> shards, const ShardedSecret& meta) {
  if (shards.size() < meta.k)
    fail(Errc::below_threshold, "fewer shards than threshold");
  std::set<std::uint32_t> seen;
  for (const Shard& s : shards) {
    if (s.epoch != shards.front().epoch)
      fail(Errc::mixed_epoch, "shards span multiple epochs");
    if (!seen.insert(s.index).second)
      fail(Errc::duplicate_index, "duplicate shard index");
    if (s.index == 0 || s.index > meta.n)
      fail(Errc::parameter_violation, "shard index out of range");
    if (s.values.size() != meta.secret_len)
      fail(Errc::parameter_violation, "shard length mismatch");
  }
  if (shards.front().epoch != meta.epoch)
    fail(Errc::epoch_mismatch, "shards from a different epoch than meta");

  const std::uint32_t p = meta.field_modulus;
  // Lagrange weights at x = 0.
  std::vector<std::uint32_t> weights(shards.size());
  for (std::size_t i = 0; i < shards.size(); ++i) {
    std::uint32_t num = 1, den = 1;
    for (std::size_t j = 0; j < shards.size(); ++j) {
      if (j == i) continue;
      num = gf::mul(num, shards[j].index % p, p);
      den = gf::mul(den, gf::sub(shards[j].index, shards[i].index, p), p);
    }
    weights[i] = gf::mul(num, gf::inv(den, p), p);
  }
  Bytes secret(meta.secret_len);
  for (std::uint32_t pos = 0; pos < meta.secret_len; ++pos) {
    std::uint32_t acc = 0;
    for (std::size_t i = 0; i < shards.size(); ++i)
      acc = gf::add(acc, gf::mul(shards[i].values[pos], weights[i], p), p);
    secret[pos] = static_cast<std::uint8_t>(acc);
  }
  return secret;
}

bool verify_shard(const Shard& shard, const ShardedSecret& meta) {
  if (shard.index == 0 || shard.index > meta.n) return false;
  if (shard.epoch != meta.epoch) return false;
  if (shard.values.size() != meta.secret_len) return false;
  if (meta.share_checks.size() != meta.n) return false;
  return share_check(shard, meta.field_modulus) ==
         meta.share_checks[shard.index - 1];
}

std::pair<ShardedSecret, std::vector<Shard>> rotate(
    std::span<const Shard> shards, const ShardedSecret& meta,
    crypto::SeededRng& rng) {
  if (shards.size() != meta.n)
    fail(Errc::incomplete_set, "rotation requires the full shard set");
  std::set<std::uint32_t> seen;
  for (const Shard& s : shards) {
    if (s.epoch != meta.epoch)
      fail(Errc::epoch_mismatch, "shard from a different epoch");
    if (s.index == 0 || s.index > meta.n || !seen.insert(s.index).second)
      fail(Errc::incomplete_set, "shard indices must cover 1..n");
    if (s.values.size() != meta.secret_len)
      fail(Errc::parameter_violation, "shard length mismatch");
  }

  const std::uint32_t p = meta.field_modulus;
  // Recover the current coefficient matrix from k shards, then add a fresh
  // zero-constant refresh polynomial per octet position.
  std::vector<const Shard*> by_index(meta.n);
  for (const Shard& s : shards) by_index[s.index - 1] = &s;

  std::vector<std::vector<std::uint16_t>> coeffs(meta.secret_len);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pts(meta.k);
  for (std::uint32_t pos = 0; pos < meta.secret_len; ++pos) {
    for (std::uint32_t i = 0; i < meta.k; ++i)
      pts[i] = {by_index[i]->index, by_index[i]->values[pos]};
    coeffs[pos] = gf::interpolate_coeffs(pts, p);
    coeffs[pos].resize(meta.k, 0);
    for (std::uint32_t j = 1; j < meta.k; ++j) {
      std::uint32_t refresh = static_cast<std::uint32_t>(rng.uniform(0, p - 1));
      coeffs[pos][j] =
          static_cast<std::uint16_t>(gf::add(coeffs[pos][j], refresh, p));
    }
  }
  MetaBuild b = build_epoch(coeffs, meta.n, meta.k, meta.epoch + 1, p);
  return {std::move(b.meta), std::move(b.shards)};
}

}  // namespace candor::shamir
