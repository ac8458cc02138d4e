#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>

#include "fragstore/catalog.hpp"
#include "fragstore/core.hpp"
#include "fragstore/history.hpp"
#include "fragstore/transport.hpp"

namespace fragstore {

// Test-only protocol defect switches. All off in production paths.
struct MutationFlags {
  bool skip_read_propagate = false;  // read returns the discovered max without the second phase
  bool no_wid_tiebreak = false;      // tags compare by counter only
  bool skip_version_check = false;   // writes mint unconditionally
};

inline bool protocol_tag_less(const Tag& a, const Tag& b, const MutationFlags& mut) {
  if (mut.no_wid_tiebreak) return a.ts < b.ts;
  return tag_less(a, b);
}

// Replica state machine for coverable blocks. Processes one message at a
// time; the tag for a block never decreases.
class ReplicaServer {
 public:
  ReplicaServer(ProcessId self, Network& net, MutationFlags mut = {});

  void on_message(const Envelope& m);

  struct Slot {
    Tag tag;
    BlockValue value;
  };
  // Unknown blocks read as ((0,nil), absent); only written blocks appear here.
  const std::map<BlockId, Slot>& state() const { return state_; }
  Tag tag_of(const BlockId& b) const;

 private:
  void reply(const Envelope& m, MsgKind kind, const Tag& tag,
             std::optional<BlockValue> payload);

  ProcessId self_;
  Network& net_;
  MutationFlags mut_;
  std::map<BlockId, Slot> state_;
};

struct CvrResult {
  BlockValue value;
  Tag tag;
  bool changed = false;
};

// Client side of the coverable register: versioned read and conditional
// write over majority quorums, one outstanding operation per block.
class RegisterClient {
 public:
  using ReadCb = std::function<void(const BlockValue&, const Tag&, bool fetched)>;
  using WriteCb = std::function<void(const CvrResult&)>;
  using TombCb = std::function<void(const Tag&)>;
  using CatalogCb = std::function<void(const std::vector<CatalogEntry>&)>;

  RegisterClient(ProcessId self, ClientId cid, Network& net, HistoryLog* log,
                 MutationFlags mut = {});

  // Versioned read. `local`/`local_val` are the caller's last known pair
  // for the block; when every replica is at or below `local` the reply
  // carries no content and the local pair is returned as-is.
  void read(const BlockId& b, const Tag& local, const BlockValue& local_val, ReadCb done);

  // Conditional write: succeeds (mints version+1) only when `version`
  // matches the discovered maximum; otherwise converts into a read and
  // returns the prevailing pair, after propagating it to a majority.
  void write(const BlockId& b, BlockValue value, const Tag& version, WriteCb done);

  // Unconditional maximal-tag write marking a deleted file's genesis.
  void write_tombstone(const BlockId& b, BlockValue value, TombCb done);

  // Majority catalog query; entries merged per file id by highest tag.
  void collect_catalog(CatalogCb done);

  void on_message(const Envelope& m);

  ClientId id() const { return cid_; }
  std::uint64_t fetched_payload_bytes() const { return fetched_bytes_; }
  std::uint64_t pushed_payload_bytes() const { return pushed_bytes_; }

 private:
  struct ReadOp {
    Tag local;
    BlockValue local_val;
    int phase = 1;
    QuorumCollector collect;
    Tag max_tag;
    std::optional<BlockValue> max_val;
    ReadCb done;
  };
  struct WriteOp {
    BlockValue value;
    Tag version;
    bool tombstone = false;
    int phase = 1;
    QuorumCollector collect;
    Tag result_tag;
    BlockValue result_value;
    bool changed = false;
    WriteCb done;
    TombCb tomb_done;
  };
  struct CatalogOp {
    QuorumCollector collect;
    CatalogCb done;
  };

  void handle_read_reply(const BlockId& b, ReadOp& op, const Envelope& m);
  void handle_write_reply(const BlockId& b, WriteOp& op, const Envelope& m);
  std::size_t quorum() const;

  ProcessId self_;
  ClientId cid_;
  Network& net_;
  HistoryLog* log_;
  MutationFlags mut_;
  std::map<BlockId, ReadOp> reads_;
  std::map<BlockId, WriteOp> writes_;
  std::optional<CatalogOp> catalog_;
  std::uint64_t fetched_bytes_ = 0;
  std::uint64_t pushed_bytes_ = 0;
};

}  // namespace fragstore
