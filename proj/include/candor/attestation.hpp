#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "candor/crypto.hpp"

// Simulated TEE attestation. Vendor roots are ordinary signing keypairs
// created at simulation setup; they are the only trust anchors. A quote is
// the vendor root's signature over (measurement, platform, report data,
// freshness nonce) and is worthless outside that exact binding.

namespace candor::attest {

enum class Vendor : std::uint8_t { A = 1, B = 2, C = 3 };

const char* to_string(Vendor v);
std::optional<Vendor> vendor_from_string(std::string_view s);

// Simulation-only clock multiplier, kept rational for determinism.
struct ClockRate {
  std::uint32_t num = 1;
  std::uint32_t den = 1;
};

struct EnclaveIdentity {
  crypto::Digest measurement;  // digest of the code manifest it runs
  Vendor vendor = Vendor::A;
  std::uint32_t platform_id = 0;
  crypto::SigningKey aik_sk;
  crypto::VerifyKey aik_vk;
  ClockRate clock_rate;
};

inline constexpr std::size_t kReportDataSize = 64;
inline constexpr std::size_t kNonceSize = 16;

using ReportData = std::array<std::uint8_t, kReportDataSize>;
using Nonce = std::array<std::uint8_t, kNonceSize>;

// Payloads up to 64 octets are zero-padded; longer ones are replaced by
// their digest in the first 32 octets.
ReportData make_report_data(ByteView payload);

struct AttestationQuote {
  crypto::Digest measurement;
  Vendor vendor = Vendor::A;
  std::uint32_t platform_id = 0;
  ReportData report_data{};
  Nonce freshness_nonce{};
  crypto::Signature signature;  // vendor root over sign_payload()

  bool operator==(const AttestationQuote&) const = default;

  Bytes sign_payload() const;
  Bytes encoded() const;
  static AttestationQuote decode(ByteView data);
};

using TrustAnchors = std::map<Vendor, crypto::VerifyKey>;

// Holds the vendor root signing keys and the endorsement list. In a real
// deployment this splits across vendor infrastructure; the simulation owns
// all of it in one place.
class VendorAuthority {
 public:
  static VendorAuthority create(crypto::SeededRng& rng,
                                const std::vector<Vendor>& vendors);

  const TrustAnchors& roots() const { return anchors_; }

  void endorse(const EnclaveIdentity& id);
  bool endorsed(const EnclaveIdentity& id) const;

  // errors: unendorsed-identity.
  AttestationQuote issue_quote(const EnclaveIdentity& id,
                               const ReportData& report_data,
                               const Nonce& nonce) const;

  // A compromised vendor root signing whatever it is told to: the E2
  // adversary. Valid signature, lying content.
  AttestationQuote issue_forged_quote(Vendor vendor,
                                      const crypto::Digest& claimed_measurement,
                                      std::uint32_t platform_id,
                                      const ReportData& report_data,
                                      const Nonce& nonce) const;

 private:
  std::map<Vendor, crypto::Keypair> roots_;
  TrustAnchors anchors_;
  std::set<std::pair<std::uint32_t, std::array<std::uint8_t, 32>>>
      endorsements_;
};

enum class QuoteReject {
  bad_signature,
  untrusted_vendor,
  wrong_measurement,
  stale_nonce,
};

const char* to_string(QuoteReject r);

struct QuoteVerdict {
  bool accepted = false;
  QuoteReject reason = QuoteReject::bad_signature;

  static QuoteVerdict accept() { return {true, QuoteReject::bad_signature}; }
  static QuoteVerdict reject(QuoteReject r) { return {false, r}; }
};

QuoteVerdict verify_quote(const AttestationQuote& q,
                          const crypto::Digest& expected_measurement,
                          const TrustAnchors& trusted, const Nonce& nonce);

// ---------------------------------------------------------------------------
// Mutual attestation (IFF admission handshake)
// ---------------------------------------------------------------------------

struct PeerTrust {
  std::uint32_t initiator = 0;
  std::uint32_t responder = 0;
  crypto::AeadKey pairwise_key;
};

struct MutualResult {
  std::optional<PeerTrust> trust;
  // Which direction rejected, when !trust: true means the initiator
  // rejected the responder's quote.
  bool initiator_rejected = false;
  QuoteReject reason = QuoteReject::bad_signature;

  bool ok() const { return trust.has_value(); }
};

// Both sides challenge each other with fresh nonces and exchange quotes
// whose report data binds their ephemeral key-agreement values. Either
// direction's rejection aborts with that direction's reason.
MutualResult mutual_attest(const VendorAuthority& authority,
                           const TrustAnchors& trusted,
                           const EnclaveIdentity& initiator,
                           const EnclaveIdentity& responder,
                           const crypto::Digest& expected_measurement,
                           crypto::SeededRng& rng);

// Exposed so tests can recompute the key from both endpoints' views.
crypto::AeadKey derive_pairwise_key(
    const std::array<std::uint8_t, 32>& own_eph_sk,
    const std::array<std::uint8_t, 32>& peer_eph_pk,
    const crypto::Digest& initiator_fp, const crypto::Digest& responder_fp);

// Report data layout used by handshake quotes: own ephemeral public value
// followed by the digest of the challenger's contribution.
ReportData handshake_report(const std::array<std::uint8_t, 32>& own_eph_pk,
                            ByteView challenger_contribution);

// ---------------------------------------------------------------------------
// Cross-vendor (horizontal) validation
// ---------------------------------------------------------------------------

enum class CrossVendorReject {
  single_vendor,
  mismatched_report,
  invalid_member,
};

const char* to_string(CrossVendorReject r);

struct CrossVendorVerdict {
  bool accepted = false;
  CrossVendorReject reason = CrossVendorReject::single_vendor;

  static CrossVendorVerdict accept() {
    return {true, CrossVendorReject::single_vendor};
  }
  static CrossVendorVerdict reject(CrossVendorReject r) { return {false, r}; }
};

// Accepts iff >= 2 distinct vendors, every quote verifies under its trusted
// root with the shared nonce, and all quotes bind the identical
// (measurement, report_data). Unanimity: one bad member rejects the lot.
CrossVendorVerdict cross_vendor_validate(
    std::span<const AttestationQuote> quotes, const TrustAnchors& trusted,
    const Nonce& nonce);

// ---------------------------------------------------------------------------
// Code manifests
// ---------------------------------------------------------------------------

struct CodeManifest {
  std::string app_id;
  std::uint32_t version = 0;
  crypto::Digest code_digest;  // digest of the transaction program
  crypto::VerifyKey author_vk;
  crypto::Signature author_signature;

  bool operator==(const CodeManifest&) const = default;

  Bytes sign_payload() const;
  Bytes encoded() const;
  static CodeManifest decode(ByteView data);
  // The value attestation binds: digest of the full canonical encoding.
  crypto::Digest measurement() const { return crypto::hash(encoded()); }
};

CodeManifest make_manifest(std::string app_id, std::uint32_t version,
                           ByteView program, const crypto::Keypair& author);

class ManifestRegistry {
 public:
  // errors: bad-author-signature, duplicate app_id+version.
  crypto::Digest register_manifest(const CodeManifest& manifest);
  bool is_registered(const crypto::Digest& measurement) const;
  const CodeManifest* find(const crypto::Digest& measurement) const;

 private:
  std::set<std::pair<std::string, std::uint32_t>> seen_;
  std::map<crypto::Digest, CodeManifest> by_measurement_;
};

}  // namespace candor::attest
