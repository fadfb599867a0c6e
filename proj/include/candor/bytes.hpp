#pragma once

#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace candor {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline Bytes to_bytes(std::string_view s) {
  return Bytes(s.begin(), s.end());
}

inline std::string to_string(ByteView b) {
  return std::string(b.begin(), b.end());
}

// Stable error codes shared across modules; the CLI prints the
// to_string form as `error_code` in its JSON output.
enum class Errc {
  parameter_violation,
  below_threshold,
  mixed_epoch,
  duplicate_index,
  incomplete_set,
  epoch_mismatch,
  oversized_key,
  oversized_value,
  bad_quorum,
  gap_in_index,
  unknown_id,
  bad_client_signature,
  unknown_input,
  unregistered_code,
  unknown_data_id,
  unknown_grant,
  already_revoked,
  bad_author_signature,
  duplicate_manifest,
  unendorsed_identity,
  unknown_action,
  duplicate_member,
  failed_attestation,
  insufficient_observations,
  invalid_config,
  malformed_input,
  io_error,
  usage,
};

inline const char* to_string(Errc c) {
  switch (c) {
    case Errc::parameter_violation: return "parameter-violation";
    case Errc::below_threshold: return "below-threshold";
    case Errc::mixed_epoch: return "mixed-epoch";
    case Errc::duplicate_index: return "duplicate-index";
    case Errc::incomplete_set: return "incomplete-set";
    case Errc::epoch_mismatch: return "epoch-mismatch";
    case Errc::oversized_key: return "oversized-key";
    case Errc::oversized_value: return "oversized-value";
    case Errc::bad_quorum: return "bad-quorum";
    case Errc::gap_in_index: return "gap-in-index";
    case Errc::unknown_id: return "unknown-id";
    case Errc::bad_client_signature: return "bad-client-signature";
    case Errc::unknown_input: return "unknown-input";
    case Errc::unregistered_code: return "unregistered-code";
    case Errc::unknown_data_id: return "unknown-data-id";
    case Errc::unknown_grant: return "unknown-grant";
    case Errc::already_revoked: return "already-revoked";
    case Errc::bad_author_signature: return "bad-author-signature";
    case Errc::duplicate_manifest: return "duplicate-manifest";
    case Errc::unendorsed_identity: return "unendorsed-identity";
    case Errc::unknown_action: return "unknown-action";
    case Errc::duplicate_member: return "duplicate-member";
    case Errc::failed_attestation: return "failed-attestation";
    case Errc::insufficient_observations: return "insufficient-observations";
    case Errc::invalid_config: return "invalid-config";
    case Errc::malformed_input: return "malformed-input";
    case Errc::io_error: return "io-error";
    case Errc::usage: return "usage";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

// ---------------------------------------------------------------------------
// Hex
// ---------------------------------------------------------------------------

inline std::string hex_encode(ByteView data) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0x0f]);
  }
  return out;
}

inline std::optional<Bytes> hex_decode(std::string_view hex) {
  if (hex.size() % 2 != 0) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = nibble(hex[i]);
    int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Canonical binary encoding: fixed field order, length-prefixed, big-endian.
// Every signed payload, key fingerprint, trie node and wire message goes
// through these two classes so replicas agree bit-exactly.
// ---------------------------------------------------------------------------

class Encoder {
 public:
  Encoder& u8(std::uint8_t v) {
    out_.push_back(v);
    return *this;
  }
  Encoder& u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v));
    return *this;
  }
  Encoder& u32(std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8)
      out_.push_back(static_cast<std::uint8_t>(v >> s));
    return *this;
  }
  Encoder& u64(std::uint64_t v) {
    for (int s = 56; s >= 0; s -= 8)
      out_.push_back(static_cast<std::uint8_t>(v >> s));
    return *this;
  }
  // Raw octets, no length prefix. For fixed-width fields only.
  Encoder& raw(ByteView b) {
    out_.insert(out_.end(), b.begin(), b.end());
    return *this;
  }
  // u32 length prefix + octets.
  Encoder& bytes(ByteView b) {
    u32(static_cast<std::uint32_t>(b.size()));
    return raw(b);
  }
  Encoder& str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
    return *this;
  }

  const Bytes& get() const { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Decoder {
 public:
  explicit Decoder(ByteView data) : data_(data) {}

  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = (std::uint16_t(data_[pos_]) << 8) | data_[pos_ + 1];
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_ + i];
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_ + i];
    pos_ += 8;
    return v;
  }
  Bytes raw(std::size_t n) {
    need(n);
    Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
    pos_ += n;
    return out;
  }
  Bytes bytes() {
    std::uint32_t n = u32();
    return raw(n);
  }
  std::string str() {
    Bytes b = bytes();
    return std::string(b.begin(), b.end());
  }

  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return remaining() == 0; }
  void expect_done() const {
    if (!done()) fail(Errc::malformed_input, "trailing octets in encoding");
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n)
      fail(Errc::malformed_input, "truncated encoding");
  }
  ByteView data_;
  std::size_t pos_ = 0;
};

}  // namespace candor
