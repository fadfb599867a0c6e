#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "candor/crypto.hpp"

// Merkle Patricia Trie over a nibble (4-bit) path alphabet. Nodes are
// immutable and referenced by the digest of their canonical encoding, so a
// Trie value is a persistent snapshot: operations return new handles and
// never touch prior versions.

namespace candor::mpt {

inline constexpr std::size_t kMaxKeyOctets = 64;
inline constexpr std::size_t kMaxInlineValue = 1024;

using Nibbles = std::vector<std::uint8_t>;

Nibbles key_to_nibbles(ByteView key);

struct RootHash {
  crypto::Digest digest;
  auto operator<=>(const RootHash&) const = default;
  std::string hex() const { return digest.hex(); }
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind : std::uint8_t { leaf = 1, extension = 2, branch = 3 };

  Kind kind = Kind::leaf;
  Nibbles path;  // leaf: key remainder; extension: shared prefix (nonempty)
  Bytes value;   // leaf payload
  std::array<NodePtr, 16> children{};   // branch
  std::optional<Bytes> branch_value;    // branch
  crypto::Digest digest;                // of canonical encoding

  static NodePtr make_leaf(Nibbles path, Bytes value);
  static NodePtr make_extension(Nibbles path, NodePtr child);
  static NodePtr make_branch(std::array<NodePtr, 16> children,
                             std::optional<Bytes> value);

  Bytes encoded() const;
};

// Digest of the canonical empty-trie sentinel encoding.
RootHash empty_root();

struct InclusionProof {
  Bytes key;
  std::optional<Bytes> value;  // nullopt claims absence
  std::vector<Bytes> path;     // canonical node encodings, root to terminal

  Bytes encoded() const;
  static InclusionProof decode(ByteView data);
};

enum class ProofReject {
  digest_mismatch,
  path_malformed,
  key_mismatch,
};

struct ProofVerdict {
  bool accepted = false;
  ProofReject reason = ProofReject::digest_mismatch;

  static ProofVerdict accept() { return {true, ProofReject::digest_mismatch}; }
  static ProofVerdict reject(ProofReject r) { return {false, r}; }
};

const char* to_string(ProofReject r);

ProofVerdict verify_proof(const RootHash& root, const InclusionProof& proof);

class Trie {
 public:
  Trie() = default;

  // key: nonempty, <= 64 octets. value: <= 1 KiB inline (larger payloads go
  // through BlobRef). Returns the new version; this one is untouched.
  Trie insert(ByteView key, ByteView value) const;
  // Deleting an absent key is a no-op.
  Trie erase(ByteView key) const;
  std::optional<Bytes> get(ByteView key) const;
  RootHash root_hash() const;
  InclusionProof prove(ByteView key) const;
  bool empty() const { return root_ == nullptr; }

  // Every (key, value) pair in lexicographic key order.
  std::vector<std::pair<Bytes, Bytes>> items() const;

  // Snapshot: header {magic, version, algorithm_id, field_modulus}, root
  // digest, then canonical node encodings in depth-first preorder.
  Bytes snapshot(std::uint32_t field_modulus) const;
  static Trie from_snapshot(ByteView data);
  // Recompute the root committed to by a snapshot, validating every node
  // encoding and child link along the way.
  static RootHash snapshot_root(ByteView data);

 private:
  explicit Trie(NodePtr root) : root_(std::move(root)) {}
  NodePtr root_;
};

// ---------------------------------------------------------------------------
// Append-only root history, quorum-signed per block.
// ---------------------------------------------------------------------------

Bytes block_sign_payload(std::uint64_t block_index, const RootHash& root,
                         std::uint64_t term);

struct BlockRecord {
  std::uint64_t block_index = 0;
  RootHash root;
  std::uint64_t term = 0;
  std::uint32_t leader = 0;
  std::vector<std::pair<std::uint32_t, crypto::Signature>> quorum_sigs;
  // Members whose submitted signature failed verification; kept for audit.
  std::vector<std::uint32_t> flagged_invalid;
};

class RootHistory {
 public:
  const std::vector<BlockRecord>& blocks() const { return blocks_; }
  std::uint64_t next_index() const { return blocks_.size(); }

  // Appends iff block_index == next_index and at least `quorum` of the
  // signatures verify against `member_keys`. Invalid member signatures are
  // recorded and flagged, not fatal, as long as the quorum holds.
  void commit_block(
      std::uint64_t block_index, const RootHash& root, std::uint64_t term,
      std::uint32_t leader,
      const std::vector<std::pair<std::uint32_t, crypto::Signature>>& sigs,
      const std::map<std::uint32_t, crypto::VerifyKey>& member_keys,
      std::size_t quorum);

 private:
  std::vector<BlockRecord> blocks_;
};

// ---------------------------------------------------------------------------
// External blob storage for payloads that must remain erasable while their
// digests stay provable on-ledger.
// ---------------------------------------------------------------------------

struct BlobRef {
  std::uint64_t external_id = 0;
  crypto::Digest payload_digest;
  std::uint64_t size = 0;

  bool operator==(const BlobRef&) const = default;

  Bytes encoded() const;
  static BlobRef decode(ByteView data);
};

class BlobStore {
 public:
  BlobRef store(ByteView payload);
  // unknown-id once forgotten; the digest in any BlobRef stays verifiable.
  Bytes dereference(std::uint64_t external_id) const;
  void forget(std::uint64_t external_id);

 private:
  std::map<std::uint64_t, Bytes> blobs_;
  std::uint64_t next_id_ = 1;
};

}  // namespace candor::mpt
