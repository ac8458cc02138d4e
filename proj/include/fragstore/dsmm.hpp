#pragma once

#include <cstdint>
#include <functional>
#include <map>

#include "fragstore/register.hpp"

namespace fragstore {

// Shared-memory facade over the coverable register. Keeps the client's
// last known (tag, value) per block and feeds it into every operation;
// the cache is private to one client context and never shared.
class DsmmClient {
 public:
  using ReadCb = std::function<void(const BlockValue&)>;
  using WriteCb = std::function<void(const BlockValue&, bool changed)>;
  using CreateCb = std::function<void()>;
  // Interleaving hook for tests: receives the action that would issue the
  // next register operation and decides when to run it.
  using Gate = std::function<void(std::function<void()> resume)>;

  DsmmClient(RegisterClient& reg, std::uint64_t max_value_bytes);

  void read(const BlockId& b, ReadCb done);
  void write(const BlockId& b, BlockValue value, WriteCb done);
  // First write of a freshly minted block; the underlying conditional
  // write cannot lose because nobody else can name this block.
  void create(const BlockId& b, BlockValue value, CreateCb done);

  void tombstone(const BlockId& b, BlockValue value, std::function<void()> done);
  void catalog(RegisterClient::CatalogCb done);

  struct CacheEntry {
    Tag tag;
    BlockValue value;
  };
  const CacheEntry* cached(const BlockId& b) const;
  // Restart semantics: a client that lost its state resumes from scratch.
  void drop_cache() { cache_.clear(); }

  void set_step_gate(Gate g) { gate_ = std::move(g); }
  std::uint64_t ops_issued() const { return ops_issued_; }
  std::uint64_t max_value_bytes() const { return max_bytes_; }

  RegisterClient& register_client() { return reg_; }

 private:
  void issue(std::function<void()> fn);
  void update_cache(const BlockId& b, const Tag& tag, const BlockValue& value);

  RegisterClient& reg_;
  std::uint64_t max_bytes_;
  std::map<BlockId, CacheEntry> cache_;
  Gate gate_;
  std::uint64_t ops_issued_ = 0;
};

}  // namespace fragstore
