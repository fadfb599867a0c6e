#include "candor/mpt.hpp"

#include <algorithm>
#include <cassert>

namespace candor::mpt {

namespace {

constexpr std::uint8_t kTagEmpty = 0x00;
constexpr std::uint8_t kTagLeaf = 0x01;
constexpr std::uint8_t kTagExtension = 0x02;
constexpr std::uint8_t kTagBranch = 0x03;

Bytes pack_nibbles(const Nibbles& n) {
  Bytes out((n.size() + 1) / 2, 0);
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (i % 2 == 0)
      out[i / 2] = static_cast<std::uint8_t>(n[i] << 4);
    else
      out[i / 2] |= n[i];
  }
  return out;
}

std::optional<Nibbles> unpack_nibbles(ByteView packed, std::size_t count) {
  if (packed.size() != (count + 1) / 2) return std::nullopt;
  Nibbles out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = (i % 2 == 0) ? (packed[i / 2] >> 4) : (packed[i / 2] & 0x0f);
  // Odd-length paths must zero-pad the trailing low nibble.
  if (count % 2 == 1 && (packed[count / 2] & 0x0f) != 0) return std::nullopt;
  return out;
}

std::size_t common_prefix(std::span<const std::uint8_t> a,
                          std::span<const std::uint8_t> b) {
  std::size_t n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return i;
}

Nibbles concat(std::span<const std::uint8_t> a,
               std::span<const std::uint8_t> b) {
  Nibbles out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Bytes empty_sentinel_encoding() { return Bytes{kTagEmpty}; }

void check_key(ByteView key) {
  if (key.empty() || key.size() > kMaxKeyOctets)
    fail(Errc::oversized_key, "key must be 1..64 octets");
}

}  // namespace

Nibbles key_to_nibbles(ByteView key) {
  Nibbles out;
  out.reserve(key.size() * 2);
  for (std::uint8_t b : key) {
    out.push_back(b >> 4);
    out.push_back(b & 0x0f);
  }
  return out;
}

RootHash empty_root() {
  return RootHash{crypto::hash(empty_sentinel_encoding())};
}

Bytes Node::encoded() const {
  Encoder e;
  switch (kind) {
    case Kind::leaf:
      e.u8(kTagLeaf)
          .u8(static_cast<std::uint8_t>(path.size() & 1))
          .u32(static_cast<std::uint32_t>(path.size()))
          .raw(pack_nibbles(path))
          .bytes(value);
      break;
    case Kind::extension:
      e.u8(kTagExtension)
          .u8(static_cast<std::uint8_t>(path.size() & 1))
          .u32(static_cast<std::uint32_t>(path.size()))
          .raw(pack_nibbles(path))
          .raw(children[0]->digest.encoded());
      break;
    case Kind::branch: {
      e.u8(kTagBranch);
      std::uint16_t bitmap = 0;
      for (int i = 0; i < 16; ++i)
        if (children[i]) bitmap |= static_cast<std::uint16_t>(1u << i);
      e.u16(bitmap);
      for (int i = 0; i < 16; ++i)
        if (children[i]) e.raw(children[i]->digest.encoded());
      e.u8(branch_value ? 1 : 0);
      if (branch_value) e.bytes(*branch_value);
      break;
    }
  }
  return e.take();
}

NodePtr Node::make_leaf(Nibbles path, Bytes value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::leaf;
  n->path = std::move(path);
  n->value = std::move(value);
  n->digest = crypto::hash(n->encoded());
  return n;
}

NodePtr Node::make_extension(Nibbles path, NodePtr child) {
  assert(!path.empty());
  assert(child);
  auto n = std::make_shared<Node>();
  n->kind = Kind::extension;
  n->path = std::move(path);
  n->children[0] = std::move(child);
  n->digest = crypto::hash(n->encoded());
  return n;
}

NodePtr Node::make_branch(std::array<NodePtr, 16> children,
                          std::optional<Bytes> value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::branch;
  n->children = std::move(children);
  n->branch_value = std::move(value);
  n->digest = crypto::hash(n->encoded());
  return n;
}

// ---------------------------------------------------------------------------
// Core recursion
// ---------------------------------------------------------------------------

namespace {

using PathView = std::span<const std::uint8_t>;

NodePtr insert_rec(const NodePtr& node, PathView path, ByteView value) {
  if (!node)
    return Node::make_leaf(Nibbles(path.begin(), path.end()),
                           Bytes(value.begin(), value.end()));

  switch (node->kind) {
    case Node::Kind::leaf: {
      std::size_t cp = common_prefix(path, node->path);
      if (cp == path.size() && cp == node->path.size())
        return Node::make_leaf(Nibbles(path.begin(), path.end()),
                               Bytes(value.begin(), value.end()));
      std::array<NodePtr, 16> kids{};
      std::optional<Bytes> bval;
      PathView old_rest = PathView(node->path).subspan(cp);
      PathView new_rest = path.subspan(cp);
      if (old_rest.empty())
        bval = node->value;
      else
        kids[old_rest[0]] = Node::make_leaf(
            Nibbles(old_rest.begin() + 1, old_rest.end()), node->value);
      if (new_rest.empty())
        bval = Bytes(value.begin(), value.end());
      else
        kids[new_rest[0]] =
            Node::make_leaf(Nibbles(new_rest.begin() + 1, new_rest.end()),
                            Bytes(value.begin(), value.end()));
      NodePtr branch = Node::make_branch(std::move(kids), std::move(bval));
      if (cp > 0)
        return Node::make_extension(Nibbles(path.begin(), path.begin() + cp),
                                    std::move(branch));
      return branch;
    }

    case Node::Kind::extension: {
      std::size_t cp = common_prefix(path, node->path);
      if (cp == node->path.size()) {
        NodePtr child = insert_rec(node->children[0], path.subspan(cp), value);
        return Node::make_extension(node->path, std::move(child));
      }
      // Split the extension at the divergence point.
      std::array<NodePtr, 16> kids{};
      std::optional<Bytes> bval;
      PathView ext_rest = PathView(node->path).subspan(cp);
      NodePtr ext_sub =
          ext_rest.size() == 1
              ? node->children[0]
              : Node::make_extension(
                    Nibbles(ext_rest.begin() + 1, ext_rest.end()),
                    node->children[0]);
      kids[ext_rest[0]] = std::move(ext_sub);
      PathView new_rest = path.subspan(cp);
      if (new_rest.empty())
        bval = Bytes(value.begin(), value.end());
      else
        kids[new_rest[0]] =
            Node::make_leaf(Nibbles(new_rest.begin() + 1, new_rest.end()),
                            Bytes(value.begin(), value.end()));
      NodePtr branch = Node::make_branch(std::move(kids), std::move(bval));
      if (cp > 0)
        return Node::make_extension(Nibbles(path.begin(), path.begin() + cp),
                                    std::move(branch));
      return branch;
    }

    case Node::Kind::branch: {
      if (path.empty()) {
        auto kids = node->children;
        return Node::make_branch(std::move(kids),
                                 Bytes(value.begin(), value.end()));
      }
      auto kids = node->children;
      kids[path[0]] = insert_rec(node->children[path[0]], path.subspan(1),
                                 value);
      return Node::make_branch(std::move(kids), node->branch_value);
    }
  }
  return nullptr;  // unreachable
}

// Re-establish canonical form above a shrunken branch.
NodePtr normalize_branch(const std::array<NodePtr, 16>& kids,
                         const std::optional<Bytes>& bval) {
  int occupied = 0, last = -1;
  for (int i = 0; i < 16; ++i)
    if (kids[i]) {
      ++occupied;
      last = i;
    }
  if (occupied == 0 && !bval) return nullptr;
  if (occupied == 0 && bval) return Node::make_leaf({}, *bval);
  if (occupied == 1 && !bval) {
    const NodePtr& child = kids[last];
    Nibbles nib{static_cast<std::uint8_t>(last)};
    switch (child->kind) {
      case Node::Kind::leaf:
        return Node::make_leaf(concat(nib, child->path), child->value);
      case Node::Kind::extension:
        return Node::make_extension(concat(nib, child->path),
                                    child->children[0]);
      case Node::Kind::branch:
        return Node::make_extension(std::move(nib), child);
    }
  }
  auto copy = kids;
  return Node::make_branch(std::move(copy), bval);
}

NodePtr wrap_extension(const Nibbles& prefix, const NodePtr& child) {
  if (!child) return nullptr;
  switch (child->kind) {
    case Node::Kind::leaf:
      return Node::make_leaf(concat(prefix, child->path), child->value);
    case Node::Kind::extension:
      return Node::make_extension(concat(prefix, child->path),
                                  child->children[0]);
    case Node::Kind::branch:
      return Node::make_extension(prefix, child);
  }
  return nullptr;  // unreachable
}

NodePtr erase_rec(const NodePtr& node, PathView path) {
  if (!node) return nullptr;

  switch (node->kind) {
    case Node::Kind::leaf: {
      if (path.size() == node->path.size() &&
          common_prefix(path, node->path) == path.size())
        return nullptr;  // removed
      return node;       // absent key: no-op
    }
    case Node::Kind::extension: {
      std::size_t cp = common_prefix(path, node->path);
      if (cp != node->path.size()) return node;  // diverges: no-op
      NodePtr child = erase_rec(node->children[0], path.subspan(cp));
      if (child == node->children[0]) return node;  // unchanged below
      return wrap_extension(node->path, child);
    }
    case Node::Kind::branch: {
      if (path.empty()) {
        if (!node->branch_value) return node;  // no-op
        return normalize_branch(node->children, std::nullopt);
      }
      const NodePtr& old_child = node->children[path[0]];
      if (!old_child) return node;  // no-op
      NodePtr child = erase_rec(old_child, path.subspan(1));
      if (child == old_child) return node;
      auto kids = node->children;
      kids[path[0]] = std::move(child);
      return normalize_branch(kids, node->branch_value);
    }
  }
  return nullptr;  // unreachable
}

const Node* find_rec(const Node* node, PathView path) {
  while (node) {
    switch (node->kind) {
      case Node::Kind::leaf:
        if (path.size() == node->path.size() &&
            common_prefix(path, node->path) == path.size())
          return node;
        return nullptr;
      case Node::Kind::extension: {
        std::size_t cp = common_prefix(path, node->path);
        if (cp != node->path.size()) return nullptr;
        path = path.subspan(cp);
        node = node->children[0].get();
        break;
      }
      case Node::Kind::branch: {
        if (path.empty()) return node->branch_value ? node : nullptr;
        const Node* child = node->children[path[0]].get();
        if (!child) return nullptr;
        path = path.subspan(1);
        node = child;
        break;
      }
    }
  }
  return nullptr;
}

void items_rec(const Node* node, Nibbles& prefix,
               std::vector<std::pair<Bytes, Bytes>>& out) {
  if (!node) return;
  switch (node->kind) {
    case Node::Kind::leaf: {
      Nibbles full = concat(prefix, node->path);
      assert(full.size() % 2 == 0);
      out.emplace_back(pack_nibbles(full), node->value);
      break;
    }
    case Node::Kind::extension: {
      std::size_t before = prefix.size();
      prefix.insert(prefix.end(), node->path.begin(), node->path.end());
      items_rec(node->children[0].get(), prefix, out);
      prefix.resize(before);
      break;
    }
    case Node::Kind::branch: {
      if (node->branch_value) {
        assert(prefix.size() % 2 == 0);
        out.emplace_back(pack_nibbles(prefix), *node->branch_value);
      }
      for (int i = 0; i < 16; ++i) {
        if (!node->children[i]) continue;
        prefix.push_back(static_cast<std::uint8_t>(i));
        items_rec(node->children[i].get(), prefix, out);
        prefix.pop_back();
      }
      break;
    }
  }
}

}  // namespace

Trie Trie::insert(ByteView key, ByteView value) const {
  check_key(key);
  if (value.size() > kMaxInlineValue)
    fail(Errc::oversized_value,
         "value exceeds the inline limit; store a BlobRef instead");
  Nibbles nib = key_to_nibbles(key);
  return Trie(insert_rec(root_, nib, value));
}

Trie Trie::erase(ByteView key) const {
  check_key(key);
  Nibbles nib = key_to_nibbles(key);
  return Trie(erase_rec(root_, nib));
}

std::optional<Bytes> Trie::get(ByteView key) const {
  check_key(key);
  Nibbles nib = key_to_nibbles(key);
  const Node* n = find_rec(root_.get(), nib);
  if (!n) return std::nullopt;
  return n->kind == Node::Kind::leaf ? n->value : *n->branch_value;
}

RootHash Trie::root_hash() const {
  if (!root_) return empty_root();
  return RootHash{root_->digest};
}

std::vector<std::pair<Bytes, Bytes>> Trie::items() const {
  std::vector<std::pair<Bytes, Bytes>> out;
  Nibbles prefix;
  items_rec(root_.get(), prefix, out);
  return out;
}

// ---------------------------------------------------------------------------
// Proofs
// ---------------------------------------------------------------------------

Bytes InclusionProof::encoded() const {
  Encoder e;
  e.bytes(key);
  e.u8(value ? 1 : 0);
  if (value) e.bytes(*value);
  e.u32(static_cast<std::uint32_t>(path.size()));
  for (const Bytes& p : path) e.bytes(p);
  return e.take();
}

InclusionProof InclusionProof::decode(ByteView data) {
  Decoder d(data);
  InclusionProof out;
  out.key = d.bytes();
  if (d.u8() != 0) out.value = d.bytes();
  std::uint32_t n = d.u32();
  for (std::uint32_t i = 0; i < n; ++i) out.path.push_back(d.bytes());
  d.expect_done();
  return out;
}

const char* to_string(ProofReject r) {
  switch (r) {
    case ProofReject::digest_mismatch: return "digest-mismatch";
    case ProofReject::path_malformed: return "path-malformed";
    case ProofReject::key_mismatch: return "key-mismatch";
  }
  return "unknown";
}

InclusionProof Trie::prove(ByteView key) const {
  check_key(key);
  InclusionProof proof;
  proof.key.assign(key.begin(), key.end());
  if (!root_) {
    proof.path.push_back(empty_sentinel_encoding());
    return proof;
  }
  Nibbles nib = key_to_nibbles(key);
  PathView rem = nib;
  const Node* cur = root_.get();
  while (true) {
    proof.path.push_back(cur->encoded());
    switch (cur->kind) {
      case Node::Kind::leaf:
        if (rem.size() == cur->path.size() &&
            common_prefix(rem, cur->path) == rem.size())
          proof.value = cur->value;
        return proof;
      case Node::Kind::extension: {
        std::size_t cp = common_prefix(rem, cur->path);
        if (cp != cur->path.size()) return proof;  // divergence: absence
        rem = rem.subspan(cp);
        cur = cur->children[0].get();
        break;
      }
      case Node::Kind::branch: {
        if (rem.empty()) {
          if (cur->branch_value) proof.value = *cur->branch_value;
          return proof;
        }
        const Node* child = cur->children[rem[0]].get();
        if (!child) return proof;  // no slot: absence
        rem = rem.subspan(1);
        cur = child;
        break;
      }
    }
  }
}

namespace {

struct ParsedNode {
  std::uint8_t tag = kTagEmpty;
  Nibbles path;
  Bytes value;
  bool has_value = false;
  std::array<std::optional<crypto::Digest>, 16> child_digests;
  std::optional<crypto::Digest> ext_child;
};

std::optional<ParsedNode> parse_node(ByteView enc) {
  try {
    Decoder d(enc);
    ParsedNode out;
    out.tag = d.u8();
    switch (out.tag) {
      case kTagEmpty:
        d.expect_done();
        return out;
      case kTagLeaf: {
        std::uint8_t odd = d.u8();
        std::uint32_t count = d.u32();
        auto nib = unpack_nibbles(d.raw((count + 1) / 2), count);
        if (!nib || odd != (count & 1)) return std::nullopt;
        out.path = std::move(*nib);
        out.value = d.bytes();
        out.has_value = true;
        d.expect_done();
        return out;
      }
      case kTagExtension: {
        std::uint8_t odd = d.u8();
        std::uint32_t count = d.u32();
        auto nib = unpack_nibbles(d.raw((count + 1) / 2), count);
        if (!nib || odd != (count & 1) || nib->empty()) return std::nullopt;
        out.path = std::move(*nib);
        out.ext_child = crypto::Digest::decode(d);
        d.expect_done();
        return out;
      }
      case kTagBranch: {
        std::uint16_t bitmap = d.u16();
        int occupied = 0;
        for (int i = 0; i < 16; ++i) {
          if (bitmap & (1u << i)) {
            out.child_digests[i] = crypto::Digest::decode(d);
            ++occupied;
          }
        }
        if (d.u8() != 0) {
          out.value = d.bytes();
          out.has_value = true;
        }
        d.expect_done();
        if (occupied == 0 || (occupied < 2 && !out.has_value))
          return std::nullopt;  // non-canonical
        return out;
      }
      default:
        return std::nullopt;
    }
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

ProofVerdict verify_proof(const RootHash& root, const InclusionProof& proof) {
  if (proof.path.empty() || proof.key.empty() ||
      proof.key.size() > kMaxKeyOctets)
    return ProofVerdict::reject(ProofReject::path_malformed);
  if (crypto::hash(proof.path[0]) != root.digest)
    return ProofVerdict::reject(ProofReject::digest_mismatch);

  Nibbles nib = key_to_nibbles(proof.key);
  PathView rem = nib;
  std::size_t i = 0;
  while (true) {
    auto node = parse_node(proof.path[i]);
    if (!node) return ProofVerdict::reject(ProofReject::path_malformed);
    bool last = (i + 1 == proof.path.size());

    auto terminal_value =
        [&](const std::optional<Bytes>& found) -> ProofVerdict {
      if (!last) return ProofVerdict::reject(ProofReject::path_malformed);
      if (proof.value.has_value() != found.has_value())
        return ProofVerdict::reject(ProofReject::key_mismatch);
      if (proof.value && *proof.value != *found)
        return ProofVerdict::reject(ProofReject::key_mismatch);
      return ProofVerdict::accept();
    };

    switch (node->tag) {
      case kTagEmpty:
        // Only valid as the root of an empty trie, proving absence.
        if (i != 0) return ProofVerdict::reject(ProofReject::path_malformed);
        return terminal_value(std::nullopt);
      case kTagLeaf: {
        bool match = rem.size() == node->path.size() &&
                     common_prefix(rem, node->path) == rem.size();
        if (match) return terminal_value(node->value);
        return terminal_value(std::nullopt);
      }
      case kTagExtension: {
        std::size_t cp = common_prefix(rem, node->path);
        if (cp != node->path.size()) return terminal_value(std::nullopt);
        if (last) return ProofVerdict::reject(ProofReject::path_malformed);
        if (crypto::hash(proof.path[i + 1]) != *node->ext_child)
          return ProofVerdict::reject(ProofReject::digest_mismatch);
        rem = rem.subspan(cp);
        ++i;
        break;
      }
      case kTagBranch: {
        if (rem.empty())
          return terminal_value(node->has_value
                                    ? std::optional<Bytes>(node->value)
                                    : std::nullopt);
        const auto& slot = node->child_digests[rem[0]];
        if (!slot) return terminal_value(std::nullopt);
        if (last) return ProofVerdict::reject(ProofReject::path_malformed);
        if (crypto::hash(proof.path[i + 1]) != *slot)
          return ProofVerdict::reject(ProofReject::digest_mismatch);
        rem = rem.subspan(1);
        ++i;
        break;
      }
      default:
        return ProofVerdict::reject(ProofReject::path_malformed);
    }
  }
}

// ---------------------------------------------------------------------------
// Snapshots
// ---------------------------------------------------------------------------

namespace {

constexpr char kSnapshotMagic[4] = {'C', 'S', 'N', 'P'};
constexpr std::uint8_t kSnapshotVersion = 1;

void emit_nodes(const Node* node, Encoder& e, std::uint32_t& count) {
  if (!node) return;
  Bytes enc = node->encoded();
  e.bytes(enc);
  ++count;
  if (node->kind == Node::Kind::extension)
    emit_nodes(node->children[0].get(), e, count);
  else if (node->kind == Node::Kind::branch)
    for (int i = 0; i < 16; ++i) emit_nodes(node->children[i].get(), e, count);
}

NodePtr rebuild(const crypto::Digest& want,
                const std::map<crypto::Digest, Bytes>& by_digest,
                int depth) {
  if (depth > 200) fail(Errc::malformed_input, "snapshot nesting too deep");
  auto it = by_digest.find(want);
  if (it == by_digest.end())
    fail(Errc::malformed_input, "snapshot is missing a referenced node");
  auto parsed = parse_node(it->second);
  if (!parsed || parsed->tag == kTagEmpty)
    fail(Errc::malformed_input, "snapshot contains a malformed node");
  NodePtr built;
  switch (parsed->tag) {
    case kTagLeaf:
      built = Node::make_leaf(parsed->path, parsed->value);
      break;
    case kTagExtension:
      built = Node::make_extension(
          parsed->path, rebuild(*parsed->ext_child, by_digest, depth + 1));
      break;
    case kTagBranch: {
      std::array<NodePtr, 16> kids{};
      for (int i = 0; i < 16; ++i)
        if (parsed->child_digests[i])
          kids[i] = rebuild(*parsed->child_digests[i], by_digest, depth + 1);
      built = Node::make_branch(
          std::move(kids),
          parsed->has_value ? std::optional<Bytes>(parsed->value)
                            : std::nullopt);
      break;
    }
  }
  if (built->digest != want)
    fail(Errc::malformed_input, "snapshot node digest does not recompute");
  return built;
}

}  // namespace

Bytes Trie::snapshot(std::uint32_t field_modulus) const {
  Encoder e;
  e.raw(ByteView(reinterpret_cast<const std::uint8_t*>(kSnapshotMagic), 4));
  e.u8(kSnapshotVersion);
  e.u8(crypto::kHashSha256);
  e.u32(field_modulus);
  e.u8(root_ ? 1 : 0);
  if (root_) e.raw(root_->digest.encoded());
  Encoder nodes;
  std::uint32_t count = 0;
  emit_nodes(root_.get(), nodes, count);
  e.u32(count);
  e.raw(nodes.get());
  return e.take();
}

Trie Trie::from_snapshot(ByteView data) {
  Decoder d(data);
  Bytes magic = d.raw(4);
  if (std::memcmp(magic.data(), kSnapshotMagic, 4) != 0)
    fail(Errc::malformed_input, "not a ledger snapshot");
  if (d.u8() != kSnapshotVersion)
    fail(Errc::malformed_input, "unsupported snapshot version");
  if (d.u8() != crypto::kHashSha256)
    fail(Errc::malformed_input, "unsupported hash algorithm");
  d.u32();  // field_modulus: recorded configuration, not needed to rebuild
  bool has_root = d.u8() != 0;
  crypto::Digest root_digest;
  if (has_root) root_digest = crypto::Digest::decode(d);
  std::uint32_t count = d.u32();
  std::map<crypto::Digest, Bytes> by_digest;
  for (std::uint32_t i = 0; i < count; ++i) {
    Bytes enc = d.bytes();
    by_digest.emplace(crypto::hash(enc), std::move(enc));
  }
  d.expect_done();
  if (!has_root) {
    if (count != 0)
      fail(Errc::malformed_input, "empty snapshot carries nodes");
    return Trie();
  }
  return Trie(rebuild(root_digest, by_digest, 0));
}

RootHash Trie::snapshot_root(ByteView data) {
  return from_snapshot(data).root_hash();
}

// ---------------------------------------------------------------------------
// Root history
// ---------------------------------------------------------------------------

Bytes block_sign_payload(std::uint64_t block_index, const RootHash& root,
                         std::uint64_t term) {
  Encoder e;
  e.str("block").u64(block_index).raw(root.digest.encoded()).u64(term);
  return e.take();
}

void RootHistory::commit_block(
    std::uint64_t block_index, const RootHash& root, std::uint64_t term,
    std::uint32_t leader,
    const std::vector<std::pair<std::uint32_t, crypto::Signature>>& sigs,
    const std::map<std::uint32_t, crypto::VerifyKey>& member_keys,
    std::size_t quorum) {
  if (block_index != next_index())
    fail(Errc::gap_in_index, "block index must equal previous + 1");
  Bytes payload = block_sign_payload(block_index, root, term);
  BlockRecord rec;
  rec.block_index = block_index;
  rec.root = root;
  rec.term = term;
  rec.leader = leader;
  std::size_t valid = 0;
  for (const auto& [member, sig] : sigs) {
    auto it = member_keys.find(member);
    bool ok = it != member_keys.end() &&
              crypto::verify(it->second, payload, sig);
    if (ok) {
      ++valid;
      rec.quorum_sigs.emplace_back(member, sig);
    } else {
      rec.flagged_invalid.push_back(member);
    }
  }
  if (valid < quorum)
    fail(Errc::bad_quorum, "insufficient valid quorum signatures");
  blocks_.push_back(std::move(rec));
}

// ---------------------------------------------------------------------------
// Blob store
// ---------------------------------------------------------------------------

Bytes BlobRef::encoded() const {
  Encoder e;
  e.u64(external_id).raw(payload_digest.encoded()).u64(size);
  return e.take();
}

BlobRef BlobRef::decode(ByteView data) {
  Decoder d(data);
  BlobRef out;
  out.external_id = d.u64();
  out.payload_digest = crypto::Digest::decode(d);
  out.size = d.u64();
  d.expect_done();
  return out;
}

BlobRef BlobStore::store(ByteView payload) {
  BlobRef ref;
  ref.external_id = next_id_++;
  ref.payload_digest = crypto::hash(payload);
  ref.size = payload.size();
  blobs_.emplace(ref.external_id, Bytes(payload.begin(), payload.end()));
  return ref;
}

Bytes BlobStore::dereference(std::uint64_t external_id) const {
  auto it = blobs_.find(external_id);
  if (it == blobs_.end())
    fail(Errc::unknown_id, "blob is unknown or has been forgotten");
  return it->second;
}

void BlobStore::forget(std::uint64_t external_id) {
  auto it = blobs_.find(external_id);
  if (it == blobs_.end())
    fail(Errc::unknown_id, "blob is unknown or has been forgotten");
  blobs_.erase(it);
}

}  // namespace candor::mpt
