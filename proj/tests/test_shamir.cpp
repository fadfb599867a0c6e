#include <doctest.h>

#include <algorithm>
#include <set>

#include "candor/shamir.hpp"

using namespace candor;
using namespace candor::shamir;

namespace {

crypto::SeededRng test_rng(std::uint64_t n = 0) {
  return crypto::SeededRng::from_label("shamir-tests", n);
}

// All k-subsets of {0, .., n-1}.
std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

std::vector<Shard> pick(const std::vector<Shard>& all,
                        const std::vector<std::size_t>& idx) {
  std::vector<Shard> out;
  for (std::size_t i : idx) out.push_back(all[i]);
  return out;
}

}  // namespace

TEST_CASE("degenerate 1-of-1 split reconstructs") {
  auto rng = test_rng(1);
  Bytes secret = to_bytes("solo");
  auto [meta, shards] = split(secret, 1, 1, rng);
  CHECK(reconstruct(shards, meta) == secret);
}

TEST_CASE("5-of-3: every 3-subset reconstructs, every 2-subset fails") {
  auto rng = test_rng(2);
  Bytes secret = to_bytes("cluster secret material");
  auto [meta, shards] = split(secret, 5, 3, rng);
  auto threes = subsets(5, 3);
  CHECK(threes.size() == 10);
  for (const auto& s : threes)
    CHECK(reconstruct(pick(shards, s), meta) == secret);
  for (const auto& s : subsets(5, 2))
    CHECK_THROWS_WITH_AS(reconstruct(pick(shards, s), meta),
                         "fewer shards than threshold", Error);
}

TEST_CASE("reconstruct with all n shards") {
  auto rng = test_rng(3);
  Bytes secret = test_rng(33).next_bytes(32);
  auto [meta, shards] = split(secret, 7, 4, rng);
  CHECK(reconstruct(shards, meta) == secret);
}

TEST_CASE("reconstruct rejects duplicates and mixed epochs") {
  auto rng = test_rng(4);
  Bytes secret = to_bytes("s");
  auto [meta, shards] = split(secret, 4, 2, rng);

  std::vector<Shard> dup{shards[0], shards[0]};
  CHECK_THROWS_AS(reconstruct(dup, meta), Error);

  auto [meta2, shards2] = rotate(shards, meta, rng);
  std::vector<Shard> mixed{shards[0], shards2[1]};
  try {
    reconstruct(mixed, meta2);
    FAIL("mixed epochs must not reconstruct");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::mixed_epoch);
  }
}

TEST_CASE("GF(7) privacy: one shard of k=2 leaves every secret possible") {
  // Enumerate every degree-1 polynomial over GF(7); for the held shard
  // value, each candidate secret must be realized by exactly one polynomial.
  const std::uint32_t p = 7;
  auto rng = test_rng(5);
  Bytes secret{3};
  auto [meta, shards] = split(secret, 3, 2, rng, p);
  const Shard& held = shards[0];  // index 1

  std::vector<int> realizations(p, 0);
  for (std::uint32_t c0 = 0; c0 < p; ++c0)
    for (std::uint32_t c1 = 0; c1 < p; ++c1) {
      std::vector<std::uint16_t> coeffs{static_cast<std::uint16_t>(c0),
                                        static_cast<std::uint16_t>(c1)};
      if (gf::eval(coeffs, held.index, p) == held.values[0])
        realizations[c0]++;
    }
  for (std::uint32_t s = 0; s < p; ++s) CHECK(realizations[s] == 1);
}

TEST_CASE("perturbed shard changes the output and fails verification") {
  auto rng = test_rng(6);
  Bytes secret = to_bytes("verifiable");
  auto [meta, shards] = split(secret, 5, 3, rng);
  for (std::size_t victim = 0; victim < 3; ++victim) {
    std::vector<Shard> subset{shards[0], shards[1], shards[2]};
    subset[victim].values[0] = static_cast<std::uint16_t>(
        (subset[victim].values[0] + 1) % meta.field_modulus);
    CHECK(reconstruct(subset, meta) != secret);
    CHECK_FALSE(verify_shard(subset[victim], meta));
    for (std::size_t other = 0; other < 3; ++other)
      if (other != victim) CHECK(verify_shard(subset[other], meta));
  }
}

TEST_CASE("verify_shard completeness and epoch binding") {
  auto rng = test_rng(7);
  Bytes secret = to_bytes("epochs");
  auto [meta, shards] = split(secret, 4, 3, rng);
  for (const Shard& s : shards) CHECK(verify_shard(s, meta));

  auto [meta2, shards2] = rotate(shards, meta, rng);
  CHECK(meta2.epoch == meta.epoch + 1);
  for (const Shard& s : shards2) CHECK(verify_shard(s, meta2));
  // Replay from the previous epoch fails against the new meta.
  for (const Shard& s : shards) CHECK_FALSE(verify_shard(s, meta2));
}

TEST_CASE("rotation preserves the secret and rejects stale shards") {
  auto rng = test_rng(8);
  Bytes secret = test_rng(88).next_bytes(24);
  auto [meta, shards] = split(secret, 5, 3, rng);

  auto [meta1, shards1] = rotate(shards, meta, rng);
  CHECK(reconstruct(shards1, meta1) == secret);

  auto [meta2, shards2] = rotate(shards1, meta1, rng);
  CHECK(meta2.epoch == meta.epoch + 2);
  CHECK(reconstruct(shards2, meta2) == secret);
  for (const Shard& s : shards) CHECK_FALSE(verify_shard(s, meta2));

  // Shard values actually changed across the refresh.
  CHECK(shards1[0].values != shards[0].values);
}

TEST_CASE("cross-epoch mixing fails for both metas, exhaustively at k=2") {
  auto rng = test_rng(9);
  Bytes secret{5};
  auto [meta, shards] = split(secret, 3, 2, rng, 7);
  auto [meta1, shards1] = rotate(shards, meta, rng);
  for (std::size_t i = 0; i < shards.size(); ++i)
    for (std::size_t j = 0; j < shards1.size(); ++j) {
      if (shards[i].index == shards1[j].index) continue;
      std::vector<Shard> mix{shards[i], shards1[j]};
      CHECK_THROWS_AS(reconstruct(mix, meta), Error);
      CHECK_THROWS_AS(reconstruct(mix, meta1), Error);
    }
}

TEST_CASE("rotate demands the full shard set") {
  auto rng = test_rng(10);
  Bytes secret = to_bytes("full house");
  auto [meta, shards] = split(secret, 4, 2, rng);
  std::vector<Shard> partial(shards.begin(), shards.begin() + 3);
  try {
    rotate(partial, meta, rng);
    FAIL("partial rotation must fail");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::incomplete_set);
  }
}

TEST_CASE("split validates parameters") {
  auto rng = test_rng(11);
  Bytes secret = to_bytes("x");
  CHECK_THROWS_AS(split(secret, 3, 4, rng), Error);       // k > n
  CHECK_THROWS_AS(split(secret, 3, 0, rng), Error);       // k < 1
  CHECK_THROWS_AS(split(Bytes{}, 3, 2, rng), Error);      // empty secret
  CHECK_THROWS_AS(split(secret, 300, 2, rng, 257), Error);  // n >= p
  CHECK_THROWS_AS(split(Bytes{200}, 3, 2, rng, 7), Error);  // octet >= p
}

TEST_CASE("shard export record round trips") {
  auto rng = test_rng(12);
  Bytes secret = to_bytes("wire");
  auto [meta, shards] = split(secret, 3, 2, rng);
  Bytes enc = encode_shard(shards[1], meta.field_modulus);
  auto [back, modulus] = decode_shard(enc);
  CHECK(back == shards[1]);
  CHECK(modulus == meta.field_modulus);

  Bytes meta_enc = meta.encoded();
  CHECK(ShardedSecret::decode(meta_enc) == meta);
}

TEST_CASE("coefficient commitments have k entries and bind the epoch") {
  auto rng = test_rng(13);
  Bytes secret = to_bytes("commit");
  auto [meta, shards] = split(secret, 5, 3, rng);
  CHECK(meta.commitments.size() == meta.k);
  CHECK(meta.share_checks.size() == meta.n);
  auto [meta1, shards1] = rotate(shards, meta, rng);
  CHECK(meta1.commitments != meta.commitments);
}
