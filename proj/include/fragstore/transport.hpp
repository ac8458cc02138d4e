#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fragstore/core.hpp"
#include "fragstore/errors.hpp"

namespace fragstore {

using ProcessId = std::uint32_t;

enum class MsgKind {
  Read,          // query, carries the requester's tag, no payload
  ReadReply,     // carries the replica tag, payload only when the requester is behind
  Write,         // carries tag + payload to store
  WriteAck,      // carries the replica tag after processing, no payload
  Catalog,       // catalog query, no payload
  CatalogReply,  // catalog result packed into the payload data bytes
};

std::string to_string(MsgKind k);
std::optional<MsgKind> parse_msg_kind(std::string_view s);

struct Envelope {
  std::uint64_t msg_id = 0;
  ProcessId from = 0;
  ProcessId to = 0;
  MsgKind kind = MsgKind::Read;
  Tag tag;
  BlockId block;
  std::optional<BlockValue> payload;
  std::uint64_t reply_to = 0;  // request msg_id a reply answers; 0 for requests
};

// Per-kind payload rules; a violation is a programming error.
bool envelope_well_formed(const Envelope& e);

// Message substrate seen by protocol code. Handlers run one at a time on
// the simulator; the socket backend serializes per process.
class Network {
 public:
  virtual ~Network() = default;
  virtual std::uint64_t send(Envelope e) = 0;
  virtual const std::vector<ProcessId>& server_ids() const = 0;
  // Servers that can still receive messages under the configured faults.
  virtual std::size_t reachable_server_count() const = 0;
};

inline std::size_t majority(std::size_t n) { return n / 2 + 1; }

// Collects replies for one broadcast phase: counts at most one reply per
// sender and only replies answering this phase's requests.
class QuorumCollector {
 public:
  QuorumCollector() = default;
  QuorumCollector(std::set<std::uint64_t> expected_requests, std::size_t needed)
      : expected_(std::move(expected_requests)), needed_(needed) {}

  // True exactly once, when the quorum is first reached. Later replies are
  // discarded.
  bool offer(const Envelope& e) {
    if (done_ || expected_.count(e.reply_to) == 0) return false;
    if (!replies_.emplace(e.from, e).second) return false;
    if (replies_.size() >= needed_) {
      done_ = true;
      return true;
    }
    return false;
  }

  bool done() const { return done_; }
  std::size_t needed() const { return needed_; }
  const std::map<ProcessId, Envelope>& replies() const { return replies_; }

  std::set<ProcessId> reply_set() const {
    std::set<ProcessId> s;
    for (const auto& [from, e] : replies_) s.insert(from);
    return s;
  }

 private:
  std::set<std::uint64_t> expected_;
  std::size_t needed_ = 0;
  bool done_ = false;
  std::map<ProcessId, Envelope> replies_;
};

// Broadcasts one request template to every server and hands back the
// collector tracking its replies. Throws QuorumUnreachable when the fault
// plan cannot leave enough live servers; that signals a misconfiguration,
// not a protocol state.
QuorumCollector broadcast(Network& net, ProcessId from, MsgKind kind, const Tag& tag,
                          const BlockId& block, std::optional<BlockValue> payload,
                          std::size_t quorum);

}  // namespace fragstore
