#include "fragstore/dsmm.hpp"

namespace fragstore {

DsmmClient::DsmmClient(RegisterClient& reg, std::uint64_t max_value_bytes)
    : reg_(reg), max_bytes_(max_value_bytes) {}

const DsmmClient::CacheEntry* DsmmClient::cached(const BlockId& b) const {
  auto it = cache_.find(b);
  return it == cache_.end() ? nullptr : &it->second;
}

void DsmmClient::issue(std::function<void()> fn) {
  ++ops_issued_;
  if (gate_) {
    gate_(std::move(fn));
  } else {
    fn();
  }
}

void DsmmClient::update_cache(const BlockId& b, const Tag& tag, const BlockValue& value) {
  auto& entry = cache_[b];
  if (tag_less(tag, entry.tag)) {
    throw InvariantViolation("cache tag regressed on " + to_string(b));
  }
  entry = CacheEntry{tag, value};
}

void DsmmClient::read(const BlockId& b, ReadCb done) {
  issue([this, b, done = std::move(done)] {
    CacheEntry local = cached(b) ? *cached(b) : CacheEntry{};
    reg_.read(b, local.tag, local.value,
              [this, b, done](const BlockValue& value, const Tag& tag, bool) {
                update_cache(b, tag, value);
                done(value);
              });
  });
}

void DsmmClient::write(const BlockId& b, BlockValue value, WriteCb done) {
  if (value.data.size() > max_bytes_) {
    throw BadParams("block value exceeds the size bound");
  }
  issue([this, b, value = std::move(value), done = std::move(done)]() mutable {
    Tag version = cached(b) ? cached(b)->tag : Tag{};
    reg_.write(b, std::move(value), version, [this, b, done](const CvrResult& r) {
      update_cache(b, r.tag, r.value);
      done(r.value, r.changed);
    });
  });
}

void DsmmClient::create(const BlockId& b, BlockValue value, CreateCb done) {
  if (value.data.size() > max_bytes_) {
    throw BadParams("block value exceeds the size bound");
  }
  issue([this, b, value = std::move(value), done = std::move(done)]() mutable {
    reg_.write(b, std::move(value), Tag{}, [this, b, done](const CvrResult& r) {
      if (!r.changed) {
        // Ids embed their creator, so a lost create means id uniqueness broke.
        throw InvariantViolation("create lost the block it minted: " + to_string(b));
      }
      update_cache(b, r.tag, r.value);
      done();
    });
  });
}

void DsmmClient::tombstone(const BlockId& b, BlockValue value, std::function<void()> done) {
  issue([this, b, value = std::move(value), done = std::move(done)]() mutable {
    reg_.write_tombstone(b, std::move(value), [this, b, done](const Tag& tag) {
      cache_.erase(b);
      (void)tag;
      done();
    });
  });
}

void DsmmClient::catalog(RegisterClient::CatalogCb done) {
  reg_.collect_catalog(std::move(done));
}

}  // namespace fragstore
