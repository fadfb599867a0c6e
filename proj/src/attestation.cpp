#include "candor/attestation.hpp"

#include <algorithm>

namespace candor::attest {

const char* to_string(Vendor v) {
  switch (v) {
    case Vendor::A: return "A";
    case Vendor::B: return "B";
    case Vendor::C: return "C";
  }
  return "?";
}

std::optional<Vendor> vendor_from_string(std::string_view s) {
  if (s == "A" || s == "a") return Vendor::A;
  if (s == "B" || s == "b") return Vendor::B;
  if (s == "C" || s == "c") return Vendor::C;
  return std::nullopt;
}

ReportData make_report_data(ByteView payload) {
  ReportData out{};
  if (payload.size() <= kReportDataSize) {
    std::copy(payload.begin(), payload.end(), out.begin());
  } else {
    crypto::Digest d = crypto::hash(payload);
    std::copy(d.bytes.begin(), d.bytes.end(), out.begin());
  }
  return out;
}

Bytes AttestationQuote::sign_payload() const {
  Encoder e;
  e.str("quote");
  e.raw(measurement.encoded());
  e.u8(static_cast<std::uint8_t>(vendor));
  e.u32(platform_id);
  e.raw(report_data);
  e.raw(freshness_nonce);
  return e.take();
}

Bytes AttestationQuote::encoded() const {
  Encoder e;
  e.raw(sign_payload());
  e.raw(signature.encoded());
  return e.take();
}

AttestationQuote AttestationQuote::decode(ByteView data) {
  Decoder d(data);
  AttestationQuote q;
  std::string tag = d.str();
  if (tag != "quote") fail(Errc::malformed_input, "not a quote encoding");
  q.measurement = crypto::Digest::decode(d);
  q.vendor = static_cast<Vendor>(d.u8());
  q.platform_id = d.u32();
  Bytes rd = d.raw(kReportDataSize);
  std::copy(rd.begin(), rd.end(), q.report_data.begin());
  Bytes nn = d.raw(kNonceSize);
  std::copy(nn.begin(), nn.end(), q.freshness_nonce.begin());
  q.signature = crypto::Signature::decode(d);
  d.expect_done();
  return q;
}

VendorAuthority VendorAuthority::create(crypto::SeededRng& rng,
                                        const std::vector<Vendor>& vendors) {
  VendorAuthority out;
  for (Vendor v : vendors) {
    crypto::Keypair kp = crypto::keypair_from_seed(rng.next_bytes(32));
    out.anchors_[v] = kp.vk;
    out.roots_[v] = kp;
  }
  return out;
}

void VendorAuthority::endorse(const EnclaveIdentity& id) {
  endorsements_.insert({id.platform_id, id.aik_vk.material});
}

bool VendorAuthority::endorsed(const EnclaveIdentity& id) const {
  return endorsements_.count({id.platform_id, id.aik_vk.material}) > 0;
}

AttestationQuote VendorAuthority::issue_quote(const EnclaveIdentity& id,
                                              const ReportData& report_data,
                                              const Nonce& nonce) const {
  if (!endorsed(id))
    fail(Errc::unendorsed_identity, "platform AIK is not vendor-endorsed");
  auto it = roots_.find(id.vendor);
  if (it == roots_.end())
    fail(Errc::unendorsed_identity, "no root for this vendor");
  AttestationQuote q;
  q.measurement = id.measurement;
  q.vendor = id.vendor;
  q.platform_id = id.platform_id;
  q.report_data = report_data;
  q.freshness_nonce = nonce;
  q.signature = crypto::sign(it->second.sk, q.sign_payload());
  return q;
}

AttestationQuote VendorAuthority::issue_forged_quote(
    Vendor vendor, const crypto::Digest& claimed_measurement,
    std::uint32_t platform_id, const ReportData& report_data,
    const Nonce& nonce) const {
  auto it = roots_.find(vendor);
  if (it == roots_.end())
    fail(Errc::unendorsed_identity, "no root for this vendor");
  AttestationQuote q;
  q.measurement = claimed_measurement;
  q.vendor = vendor;
  q.platform_id = platform_id;
  q.report_data = report_data;
  q.freshness_nonce = nonce;
  q.signature = crypto::sign(it->second.sk, q.sign_payload());
  return q;
}

const char* to_string(QuoteReject r) {
  switch (r) {
    case QuoteReject::bad_signature: return "bad-signature";
    case QuoteReject::untrusted_vendor: return "untrusted-vendor";
    case QuoteReject::wrong_measurement: return "wrong-measurement";
    case QuoteReject::stale_nonce: return "stale-nonce";
  }
  return "unknown";
}

QuoteVerdict verify_quote(const AttestationQuote& q,
                          const crypto::Digest& expected_measurement,
                          const TrustAnchors& trusted, const Nonce& nonce) {
  auto root = trusted.find(q.vendor);
  if (root == trusted.end())
    return QuoteVerdict::reject(QuoteReject::untrusted_vendor);
  if (!crypto::verify(root->second, q.sign_payload(), q.signature))
    return QuoteVerdict::reject(QuoteReject::bad_signature);
  if (q.measurement != expected_measurement)
    return QuoteVerdict::reject(QuoteReject::wrong_measurement);
  if (q.freshness_nonce != nonce)
    return QuoteVerdict::reject(QuoteReject::stale_nonce);
  return QuoteVerdict::accept();
}

ReportData handshake_report(const std::array<std::uint8_t, 32>& own_eph_pk,
                            ByteView challenger_contribution) {
  ReportData out{};
  std::copy(own_eph_pk.begin(), own_eph_pk.end(), out.begin());
  crypto::Digest bind = crypto::hash(challenger_contribution);
  std::copy(bind.bytes.begin(), bind.bytes.end(), out.begin() + 32);
  return out;
}

crypto::AeadKey derive_pairwise_key(
    const std::array<std::uint8_t, 32>& own_eph_sk,
    const std::array<std::uint8_t, 32>& peer_eph_pk,
    const crypto::Digest& initiator_fp, const crypto::Digest& responder_fp) {
  auto shared = crypto::ecdh_shared(own_eph_sk, peer_eph_pk);
  Encoder e;
  e.str("pairwise");
  e.raw(shared);
  e.raw(initiator_fp.encoded());
  e.raw(responder_fp.encoded());
  crypto::Digest d = crypto::hash(e.get());
  crypto::AeadKey key;
  key.key = d.bytes;
  return key;
}

MutualResult mutual_attest(const VendorAuthority& authority,
                           const TrustAnchors& trusted,
                           const EnclaveIdentity& initiator,
                           const EnclaveIdentity& responder,
                           const crypto::Digest& expected_measurement,
                           crypto::SeededRng& rng) {
  MutualResult out;

  // Fresh contributions per handshake.
  crypto::EcdhKeypair eph_i = crypto::ecdh_from_seed(rng.next_bytes(32));
  crypto::EcdhKeypair eph_r = crypto::ecdh_from_seed(rng.next_bytes(32));
  Nonce nonce_i{}, nonce_r{};
  Bytes ni = rng.next_bytes(kNonceSize);
  Bytes nr = rng.next_bytes(kNonceSize);
  std::copy(ni.begin(), ni.end(), nonce_i.begin());
  std::copy(nr.begin(), nr.end(), nonce_r.begin());

  // Responder answers the initiator's challenge, and vice versa.
  AttestationQuote quote_r = authority.issue_quote(
      responder, handshake_report(eph_r.pk, eph_i.pk), nonce_i);
  AttestationQuote quote_i = authority.issue_quote(
      initiator, handshake_report(eph_i.pk, eph_r.pk), nonce_r);

  QuoteVerdict v1 =
      verify_quote(quote_r, expected_measurement, trusted, nonce_i);
  if (!v1.accepted) {
    out.initiator_rejected = true;
    out.reason = v1.reason;
    return out;
  }
  QuoteVerdict v2 =
      verify_quote(quote_i, expected_measurement, trusted, nonce_r);
  if (!v2.accepted) {
    out.initiator_rejected = false;
    out.reason = v2.reason;
    return out;
  }
  // Each side also checks the peer's report binds its own contribution.
  if (quote_r.report_data != handshake_report(eph_r.pk, eph_i.pk)) {
    out.initiator_rejected = true;
    out.reason = QuoteReject::stale_nonce;
    return out;
  }
  if (quote_i.report_data != handshake_report(eph_i.pk, eph_r.pk)) {
    out.initiator_rejected = false;
    out.reason = QuoteReject::stale_nonce;
    return out;
  }

  PeerTrust trust;
  trust.initiator = initiator.platform_id;
  trust.responder = responder.platform_id;
  trust.pairwise_key =
      derive_pairwise_key(eph_i.sk, eph_r.pk, initiator.aik_vk.fingerprint(),
                          responder.aik_vk.fingerprint());
  out.trust = trust;
  return out;
}

const char* to_string(CrossVendorReject r) {
  switch (r) {
    case CrossVendorReject::single_vendor: return "single-vendor";
    case CrossVendorReject::mismatched_report: return "mismatched-report";
    case CrossVendorReject::invalid_member: return "invalid-member";
  }
  return "unknown";
}

CrossVendorVerdict cross_vendor_validate(
    std::span<const AttestationQuote> quotes, const TrustAnchors& trusted,
    const Nonce& nonce) {
  if (quotes.size() < 2)
    return CrossVendorVerdict::reject(CrossVendorReject::single_vendor);
  std::set<Vendor> vendors;
  for (const auto& q : quotes) vendors.insert(q.vendor);
  if (vendors.size() < 2)
    return CrossVendorVerdict::reject(CrossVendorReject::single_vendor);
  for (const auto& q : quotes) {
    auto root = trusted.find(q.vendor);
    if (root == trusted.end() ||
        !crypto::verify(root->second, q.sign_payload(), q.signature) ||
        q.freshness_nonce != nonce)
      return CrossVendorVerdict::reject(CrossVendorReject::invalid_member);
  }
  for (const auto& q : quotes) {
    if (q.measurement != quotes[0].measurement ||
        q.report_data != quotes[0].report_data)
      return CrossVendorVerdict::reject(CrossVendorReject::mismatched_report);
  }
  return CrossVendorVerdict::accept();
}

Bytes CodeManifest::sign_payload() const {
  Encoder e;
  e.str("manifest");
  e.str(app_id);
  e.u32(version);
  e.raw(code_digest.encoded());
  e.raw(author_vk.encoded());
  return e.take();
}

Bytes CodeManifest::encoded() const {
  Encoder e;
  e.raw(sign_payload());
  e.raw(author_signature.encoded());
  return e.take();
}

CodeManifest CodeManifest::decode(ByteView data) {
  Decoder d(data);
  CodeManifest m;
  std::string tag = d.str();
  if (tag != "manifest")
    fail(Errc::malformed_input, "not a manifest encoding");
  m.app_id = d.str();
  m.version = d.u32();
  m.code_digest = crypto::Digest::decode(d);
  m.author_vk = crypto::VerifyKey::decode(d);
  m.author_signature = crypto::Signature::decode(d);
  d.expect_done();
  return m;
}

CodeManifest make_manifest(std::string app_id, std::uint32_t version,
                           ByteView program, const crypto::Keypair& author) {
  CodeManifest m;
  m.app_id = std::move(app_id);
  m.version = version;
  m.code_digest = crypto::hash(program);
  m.author_vk = author.vk;
  m.author_signature = crypto::sign(author.sk, m.sign_payload());
  return m;
}

crypto::Digest ManifestRegistry::register_manifest(
    const CodeManifest& manifest) {
  if (!crypto::verify(manifest.author_vk, manifest.sign_payload(),
                      manifest.author_signature))
    fail(Errc::bad_author_signature, "manifest author signature is invalid");
  if (!seen_.insert({manifest.app_id, manifest.version}).second)
    fail(Errc::duplicate_manifest, "app_id+version is already registered");
  crypto::Digest m = manifest.measurement();
  by_measurement_.emplace(m, manifest);
  return m;
}

bool ManifestRegistry::is_registered(const crypto::Digest& measurement) const {
  return by_measurement_.count(measurement) > 0;
}

const CodeManifest* ManifestRegistry::find(
    const crypto::Digest& measurement) const {
  auto it = by_measurement_.find(measurement);
  return it == by_measurement_.end() ? nullptr : &it->second;
}

}  // namespace candor::attest
