#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fragstore {

// Client identity. Ids are drawn from a totally ordered set; the absent
// writer id inside a Tag sorts below every real client.
struct ClientId {
  std::uint32_t id = 0;
  auto operator<=>(const ClientId&) const = default;
};

std::string to_string(ClientId c);  // "c<id>"
std::optional<ClientId> parse_client_id(std::string_view s);

// Version stamp ordering the writes on one block: (counter, writer id),
// compared lexicographically with the nil writer lowest. A block that was
// never written carries (0,nil).
struct Tag {
  std::uint64_t ts = 0;
  std::optional<ClientId> wid;
  auto operator<=>(const Tag&) const = default;
};

// Reserved counter value marking a deleted file's genesis block. Maximal,
// so it wins over every regular write.
inline constexpr std::uint64_t kTombstoneTs = ~std::uint64_t{0};

inline bool tag_less(const Tag& a, const Tag& b) { return a < b; }
inline bool is_tombstone(const Tag& t) { return t.ts == kTombstoneTs; }

std::string to_string(const Tag& t);  // "(<ts>,<wid|nil>)"
std::optional<Tag> parse_tag(std::string_view s);

// File identity: creator plus the creator's file sequence number.
struct FileId {
  ClientId cfid;
  std::uint64_t cfseq = 0;
  auto operator<=>(const FileId&) const = default;
};

std::string to_string(const FileId& f);  // "c<cfid>_<cfseq>"
std::optional<FileId> parse_file_id(std::string_view s);

// Block identity: owning file, block creator, and the creator's per-file
// block sequence number. Uniqueness follows from counters never resetting.
struct BlockId {
  FileId fid;
  ClientId cid;
  std::uint64_t cseq = 0;
  auto operator<=>(const BlockId&) const = default;
};

std::string to_string(const BlockId& b);  // "<fileid>-c<cid>_<cseq>"
std::optional<BlockId> parse_block_id(std::string_view s);

// The first block a file's creator mints is the metadata-carrying head of
// the chain.
inline bool is_genesis(const BlockId& b) {
  return b.cid == b.fid.cfid && b.cseq == 0;
}

// A block's replicated value: payload bytes plus the link to the next
// block of the chain; an empty link terminates the chain. Empty data is
// legal and stands for logically cleared content.
struct BlockValue {
  std::optional<BlockId> next;
  std::string data;
  bool operator==(const BlockValue&) const = default;
};

struct ChainEntry {
  BlockId id;
  BlockValue value;
  Tag tag;
};

// Client-side view of a file chain, genesis first.
struct FileView {
  FileId fid;
  std::vector<ChainEntry> chain;
};

// Entry i must link to entry i+1 and the last entry must end the chain.
bool link_consistent(const FileView& v);

// Mints file and block ids for one client context. Counters only grow, so
// two ids minted here never collide, and ids from different clients differ
// in the embedded creator.
class IdMinter {
 public:
  explicit IdMinter(ClientId self) : self_(self) {}

  ClientId self() const { return self_; }

  FileId next_file_id() { return FileId{self_, file_seq_++}; }

  BlockId next_block_id(const FileId& fid) {
    return BlockId{fid, self_, block_seq_[fid]++};
  }

 private:
  ClientId self_;
  std::uint64_t file_seq_ = 0;
  std::map<FileId, std::uint64_t> block_seq_;
};

}  // namespace fragstore
