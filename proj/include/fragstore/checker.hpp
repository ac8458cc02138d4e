#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fragstore/core.hpp"
#include "fragstore/history.hpp"

namespace fragstore {

// Completed block-level operation reconstructed from a history.
struct BlockOp {
  enum class Kind { Read, Write, Tombstone };
  Kind kind = Kind::Read;
  ClientId process;
  BlockId block;
  std::uint64_t invoke_seq = 0;
  std::uint64_t respond_seq = 0;
  Tag supplied;          // read: caller's tag; write: supplied version
  std::string wdigest;   // write: digest of the submitted value
  Tag rtag;              // returned tag
  std::string rdigest;   // returned value digest
  bool changed = false;  // writes: chg/unchg
  std::size_t parent = SIZE_MAX;     // index of the enclosing file-level op
  std::size_t inv_event = SIZE_MAX;  // indices into the source event vector
  std::size_t res_event = SIZE_MAX;
};

// Completed file-level operation span.
struct FileOp {
  std::string op;  // fm_read | fm_update | fm_create | fm_delete | fm_list
  ClientId process;
  std::optional<FileId> fid;
  std::uint64_t invoke_seq = 0;
  std::uint64_t respond_seq = 0;
  std::string status;
  std::vector<ChainRecord> chain;          // fm_read result
  BlockId target;                          // fm_update target
  std::vector<std::string> part_digests;   // fm_update submitted parts
  std::vector<BlockId> created;            // fm_update created blocks
  std::size_t inv_event = SIZE_MAX;
  std::size_t res_event = SIZE_MAX;
};

struct ParsedHistory {
  std::vector<Event> events;
  std::vector<BlockOp> block_ops;
  std::vector<FileOp> file_ops;
  std::map<BlockId, std::vector<std::size_t>> by_block;
  std::map<FileId, std::vector<std::size_t>> by_file;
};

// Matches invocations to responses; throws HistoryIncomplete when any
// operation is left open or a response has no invocation.
ParsedHistory parse_history(std::vector<Event> events);

struct SerializationWitness {
  std::vector<std::size_t> order;        // positions into the checked op list
  std::vector<std::string> state_trace;  // register state after each step
};

struct Verdict {
  bool ok = true;
  std::string violated_property;
  std::string detail;
  std::vector<Event> counterexample;  // minimal failing subsequence
  SerializationWitness witness;
};

inline constexpr std::size_t kBruteForceCap = 12;

// Searches for a serialization of one block's completed operations that
// respects real-time order and the coverable register's sequential
// specification: reads and lost writes return the current pair, a winning
// write mints (version.ts+1, writer) above the current tag.
Verdict check_block_linearizable(const ParsedHistory& h, const BlockId& b,
                                 std::size_t cap = kBruteForceCap);

// Version-order properties of the successful writes on one block:
// consolidation (minted tags strictly grow along the version order),
// continuity (supplied versions were minted before, or are the initial
// version), evolution (each mint increments its supplied version by one).
Verdict check_coverability(const ParsedHistory& h, const BlockId& b);

// Strict variant used on contention-free histories: the k-th successful
// write in version order carries counter k.
Verdict check_version_sequence(const ParsedHistory& h, const BlockId& b);

// Per-block serializations constrained blockwise by file-level real-time
// precedence, plus chain connectivity of every read result and tag
// monotonicity across non-overlapping reads.
Verdict check_fragmented(const ParsedHistory& h, const FileId& f,
                         std::size_t cap = kBruteForceCap);

// Whole-object linearizability over file-level operations: reads must
// return the exact block sequence produced by the serialized updates.
// Strictly stronger than the fragmented check.
Verdict check_whole_object(const ParsedHistory& h, const FileId& f,
                           std::size_t cap = kBruteForceCap);

// Full suite: coverability on every block, brute-force linearizability on
// blocks within the cap, fragmented checks on every file.
Verdict check_all(const ParsedHistory& h, std::size_t cap = kBruteForceCap);

std::string render_verdict(const Verdict& v);

}  // namespace fragstore
