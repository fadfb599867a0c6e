#include <doctest.h>

#include <algorithm>

#include "candor/attestation.hpp"

using namespace candor;
using namespace candor::attest;

namespace {

struct Setup {
  VendorAuthority authority;
  TrustAnchors trusted;
  crypto::Digest measurement;
  CodeManifest manifest;
  crypto::SeededRng rng;

  EnclaveIdentity make_node(std::uint32_t platform_id, Vendor vendor,
                            const crypto::Digest& m) {
    EnclaveIdentity id;
    id.measurement = m;
    id.vendor = vendor;
    id.platform_id = platform_id;
    crypto::Keypair kp = crypto::keypair_from_seed(rng.next_bytes(32));
    id.aik_sk = kp.sk;
    id.aik_vk = kp.vk;
    authority.endorse(id);
    return id;
  }
};

Setup make_setup(std::uint64_t seed = 0) {
  Setup s{VendorAuthority{},
          {},
          {},
          {},
          crypto::SeededRng::from_label("attest-tests", seed)};
  s.authority =
      VendorAuthority::create(s.rng, {Vendor::A, Vendor::B, Vendor::C});
  s.trusted = s.authority.roots();
  crypto::Keypair author = crypto::keypair_from_seed(s.rng.next_bytes(32));
  s.manifest = make_manifest("app", 1, to_bytes("program-bytes"), author);
  s.measurement = s.manifest.measurement();
  return s;
}

Nonce make_nonce(crypto::SeededRng& rng) {
  Nonce n{};
  Bytes b = rng.next_bytes(n.size());
  std::copy(b.begin(), b.end(), n.begin());
  return n;
}

}  // namespace

TEST_CASE("quote round trip: generate then verify accepts") {
  Setup s = make_setup(1);
  EnclaveIdentity id = s.make_node(10, Vendor::A, s.measurement);
  Nonce nonce = make_nonce(s.rng);
  ReportData rd = make_report_data(to_bytes("bound payload"));

  AttestationQuote q = s.authority.issue_quote(id, rd, nonce);
  CHECK(verify_quote(q, s.measurement, s.trusted, nonce).accepted);

  SUBCASE("a different nonce is stale") {
    Nonce other = make_nonce(s.rng);
    auto v = verify_quote(q, s.measurement, s.trusted, other);
    CHECK_FALSE(v.accepted);
    CHECK(v.reason == QuoteReject::stale_nonce);
  }
  SUBCASE("a different expected measurement rejects") {
    crypto::Digest other = crypto::hash(to_bytes("another manifest"));
    auto v = verify_quote(q, other, s.trusted, nonce);
    CHECK_FALSE(v.accepted);
    CHECK(v.reason == QuoteReject::wrong_measurement);
  }
  SUBCASE("a vendor outside the trusted set rejects") {
    TrustAnchors only_b{{Vendor::B, s.trusted.at(Vendor::B)}};
    auto v = verify_quote(q, s.measurement, only_b, nonce);
    CHECK_FALSE(v.accepted);
    CHECK(v.reason == QuoteReject::untrusted_vendor);
  }
  SUBCASE("one flipped signature bit rejects") {
    AttestationQuote bad = q;
    bad.signature.bytes[5] ^= 0x20;
    auto v = verify_quote(bad, s.measurement, s.trusted, nonce);
    CHECK_FALSE(v.accepted);
    CHECK(v.reason == QuoteReject::bad_signature);
  }
}

TEST_CASE("unendorsed identities cannot obtain quotes") {
  Setup s = make_setup(2);
  EnclaveIdentity ghost;
  ghost.measurement = s.measurement;
  ghost.vendor = Vendor::A;
  ghost.platform_id = 99;
  crypto::Keypair kp = crypto::keypair_from_seed(s.rng.next_bytes(32));
  ghost.aik_sk = kp.sk;
  ghost.aik_vk = kp.vk;
  CHECK_THROWS_AS(s.authority.issue_quote(ghost, ReportData{}, Nonce{}),
                  Error);
}

TEST_CASE("no quote verifies outside the exact binding it carries") {
  Setup s = make_setup(3);
  EnclaveIdentity id = s.make_node(7, Vendor::B, s.measurement);
  Nonce nonce = make_nonce(s.rng);
  AttestationQuote q =
      s.authority.issue_quote(id, make_report_data(to_bytes("x")), nonce);

  for (int trial = 0; trial < 60; ++trial) {
    AttestationQuote mod = q;
    switch (s.rng.uniform(0, 3)) {
      case 0:
        mod.measurement.bytes[s.rng.uniform(0, 31)] ^= 0x01;
        break;
      case 1:
        mod.report_data[s.rng.uniform(0, 63)] ^= 0x02;
        break;
      case 2:
        mod.freshness_nonce[s.rng.uniform(0, 15)] ^= 0x04;
        break;
      default:
        mod.platform_id ^= 1;
        break;
    }
    CHECK_FALSE(verify_quote(mod, s.measurement, s.trusted, nonce).accepted);
  }
}

TEST_CASE("deleting a vendor root orphans every quote of that vendor") {
  Setup s = make_setup(4);
  EnclaveIdentity id = s.make_node(3, Vendor::C, s.measurement);
  Nonce nonce = make_nonce(s.rng);
  AttestationQuote q =
      s.authority.issue_quote(id, make_report_data(to_bytes("r")), nonce);
  CHECK(verify_quote(q, s.measurement, s.trusted, nonce).accepted);
  TrustAnchors reduced = s.trusted;
  reduced.erase(Vendor::C);
  auto v = verify_quote(q, s.measurement, reduced, nonce);
  CHECK_FALSE(v.accepted);
  CHECK(v.reason == QuoteReject::untrusted_vendor);
}

TEST_CASE("mutual attestation of two honest nodes succeeds") {
  Setup s = make_setup(5);
  EnclaveIdentity a = s.make_node(1, Vendor::A, s.measurement);
  EnclaveIdentity b = s.make_node(2, Vendor::B, s.measurement);

  MutualResult r1 =
      mutual_attest(s.authority, s.trusted, a, b, s.measurement, s.rng);
  REQUIRE(r1.ok());
  CHECK(r1.trust->initiator == 1);
  CHECK(r1.trust->responder == 2);
  MutualResult r2 =
      mutual_attest(s.authority, s.trusted, a, b, s.measurement, s.rng);
  REQUIRE(r2.ok());
  // Distinct handshakes derive distinct keys.
  CHECK(r1.trust->pairwise_key != r2.trust->pairwise_key);
}

TEST_CASE("pairwise key derivation is symmetric across endpoints") {
  auto rng = crypto::SeededRng::from_label("attest-tests", 55);
  crypto::EcdhKeypair ea = crypto::ecdh_from_seed(rng.next_bytes(32));
  crypto::EcdhKeypair eb = crypto::ecdh_from_seed(rng.next_bytes(32));
  crypto::Digest fa = crypto::hash(to_bytes("a"));
  crypto::Digest fb = crypto::hash(to_bytes("b"));
  CHECK(derive_pairwise_key(ea.sk, eb.pk, fa, fb) ==
        derive_pairwise_key(eb.sk, ea.pk, fa, fb));
}

TEST_CASE("mutual attestation rejects a modified responder manifest") {
  Setup s = make_setup(6);
  EnclaveIdentity a = s.make_node(1, Vendor::A, s.measurement);
  crypto::Digest tampered = crypto::hash(to_bytes("modified manifest"));
  EnclaveIdentity b = s.make_node(2, Vendor::B, tampered);

  MutualResult r =
      mutual_attest(s.authority, s.trusted, a, b, s.measurement, s.rng);
  CHECK_FALSE(r.ok());
  CHECK(r.initiator_rejected);
  CHECK(r.reason == QuoteReject::wrong_measurement);
}

TEST_CASE("a replayed quote fails the freshness check") {
  Setup s = make_setup(7);
  EnclaveIdentity a = s.make_node(1, Vendor::A, s.measurement);
  Nonce old_nonce = make_nonce(s.rng);
  AttestationQuote replayed = s.authority.issue_quote(
      a, make_report_data(to_bytes("old session")), old_nonce);
  Nonce fresh = make_nonce(s.rng);
  auto v = verify_quote(replayed, s.measurement, s.trusted, fresh);
  CHECK_FALSE(v.accepted);
  CHECK(v.reason == QuoteReject::stale_nonce);
}

TEST_CASE("cross-vendor validation") {
  Setup s = make_setup(8);
  EnclaveIdentity a = s.make_node(1, Vendor::A, s.measurement);
  EnclaveIdentity b = s.make_node(2, Vendor::B, s.measurement);
  EnclaveIdentity a2 = s.make_node(3, Vendor::A, s.measurement);
  Nonce nonce = make_nonce(s.rng);
  ReportData report = make_report_data(to_bytes("shared computation result"));

  AttestationQuote qa = s.authority.issue_quote(a, report, nonce);
  AttestationQuote qb = s.authority.issue_quote(b, report, nonce);
  AttestationQuote qa2 = s.authority.issue_quote(a2, report, nonce);

  SUBCASE("two distinct vendors over identical reports accept") {
    std::vector<AttestationQuote> quotes{qa, qb};
    CHECK(cross_vendor_validate(quotes, s.trusted, nonce).accepted);
  }
  SUBCASE("two quotes from one vendor reject") {
    std::vector<AttestationQuote> quotes{qa, qa2};
    auto v = cross_vendor_validate(quotes, s.trusted, nonce);
    CHECK_FALSE(v.accepted);
    CHECK(v.reason == CrossVendorReject::single_vendor);
  }
  SUBCASE("fewer than two quotes reject") {
    std::vector<AttestationQuote> quotes{qa};
    CHECK_FALSE(cross_vendor_validate(quotes, s.trusted, nonce).accepted);
  }
  SUBCASE("a lying vendor's differing report rejects") {
    ReportData lie = report;
    lie[10] ^= 0x01;
    AttestationQuote forged =
        s.authority.issue_forged_quote(Vendor::B, s.measurement, 2, lie, nonce);
    std::vector<AttestationQuote> quotes{qa, forged};
    auto v = cross_vendor_validate(quotes, s.trusted, nonce);
    CHECK_FALSE(v.accepted);
    CHECK(v.reason == CrossVendorReject::mismatched_report);
  }
  SUBCASE("an invalid member signature rejects the lot") {
    AttestationQuote bad = qb;
    bad.signature.bytes[8] ^= 0x01;
    std::vector<AttestationQuote> quotes{qa, bad};
    auto v = cross_vendor_validate(quotes, s.trusted, nonce);
    CHECK_FALSE(v.accepted);
    CHECK(v.reason == CrossVendorReject::invalid_member);
  }
}

TEST_CASE("manifest registration") {
  Setup s = make_setup(9);
  ManifestRegistry registry;

  SUBCASE("valid manifest returns its canonical digest") {
    crypto::Digest m = registry.register_manifest(s.manifest);
    CHECK(m == crypto::hash(s.manifest.encoded()));
    CHECK(registry.is_registered(m));
    REQUIRE(registry.find(m) != nullptr);
    CHECK(*registry.find(m) == s.manifest);
  }
  SUBCASE("broken author signature is refused") {
    CodeManifest bad = s.manifest;
    bad.author_signature.bytes[0] ^= 0x01;
    try {
      registry.register_manifest(bad);
      FAIL("must throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::bad_author_signature);
    }
  }
  SUBCASE("re-registering the same app_id+version is a duplicate") {
    registry.register_manifest(s.manifest);
    try {
      registry.register_manifest(s.manifest);
      FAIL("must throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::duplicate_manifest);
    }
  }
}

TEST_CASE("quote and manifest encodings round trip") {
  Setup s = make_setup(10);
  EnclaveIdentity id = s.make_node(5, Vendor::B, s.measurement);
  Nonce nonce = make_nonce(s.rng);
  AttestationQuote q = s.authority.issue_quote(
      id, make_report_data(to_bytes("round trip")), nonce);
  CHECK(AttestationQuote::decode(q.encoded()) == q);
  CHECK(CodeManifest::decode(s.manifest.encoded()) == s.manifest);
}

TEST_CASE("report data hashes oversized payloads") {
  Bytes small = to_bytes("short");
  ReportData rd_small = make_report_data(small);
  CHECK(std::equal(small.begin(), small.end(), rd_small.begin()));

  Bytes big(100, 0xab);
  ReportData rd_big = make_report_data(big);
  crypto::Digest d = crypto::hash(big);
  CHECK(std::equal(d.bytes.begin(), d.bytes.end(), rd_big.begin()));
}
