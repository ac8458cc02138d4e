#include "fragstore/register.hpp"

#include <algorithm>

#include "fragstore/digest.hpp"

namespace fragstore {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

bool get_u32(std::string_view& s, std::uint32_t& v) {
  if (s.size() < 4) return false;
  v = static_cast<unsigned char>(s[0]) | (static_cast<unsigned char>(s[1]) << 8) |
      (static_cast<unsigned char>(s[2]) << 16) |
      (static_cast<std::uint32_t>(static_cast<unsigned char>(s[3])) << 24);
  s.remove_prefix(4);
  return true;
}

void put_str(std::string& out, std::string_view v) {
  put_u32(out, static_cast<std::uint32_t>(v.size()));
  out.append(v);
}

bool get_str(std::string_view& s, std::string& v) {
  std::uint32_t n = 0;
  if (!get_u32(s, n) || s.size() < n) return false;
  v.assign(s.substr(0, n));
  s.remove_prefix(n);
  return true;
}

}  // namespace

std::string encode_genesis_meta(const GenesisMeta& m) {
  std::string out;
  put_str(out, m.path);
  put_str(out, to_string(m.fid));
  out.push_back(m.deleted ? 1 : 0);
  return out;
}

std::optional<GenesisMeta> decode_genesis_meta(std::string_view data) {
  GenesisMeta m;
  std::string fid;
  if (!get_str(data, m.path) || !get_str(data, fid) || data.size() != 1) return std::nullopt;
  auto f = parse_file_id(fid);
  if (!f) return std::nullopt;
  m.fid = *f;
  m.deleted = data[0] != 0;
  return m;
}

std::string encode_catalog(const std::vector<CatalogEntry>& entries) {
  std::string out;
  put_u32(out, static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) {
    put_str(out, e.path);
    put_str(out, to_string(e.fid));
    put_str(out, to_string(e.genesis));
    out.push_back(e.deleted ? 1 : 0);
    put_str(out, to_string(e.tag));
  }
  return out;
}

std::optional<std::vector<CatalogEntry>> decode_catalog(std::string_view data) {
  std::uint32_t n = 0;
  if (!get_u32(data, n)) return std::nullopt;
  std::vector<CatalogEntry> out;
  out.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    CatalogEntry e;
    std::string fid, genesis, tag;
    if (!get_str(data, e.path) || !get_str(data, fid) || !get_str(data, genesis) ||
        data.empty()) {
      return std::nullopt;
    }
    e.deleted = data[0] != 0;
    data.remove_prefix(1);
    if (!get_str(data, tag)) return std::nullopt;
    auto f = parse_file_id(fid);
    auto g = parse_block_id(genesis);
    auto t = parse_tag(tag);
    if (!f || !g || !t) return std::nullopt;
    e.fid = *f;
    e.genesis = *g;
    e.tag = *t;
    out.push_back(std::move(e));
  }
  if (!data.empty()) return std::nullopt;
  return out;
}

ReplicaServer::ReplicaServer(ProcessId self, Network& net, MutationFlags mut)
    : self_(self), net_(net), mut_(mut) {}

Tag ReplicaServer::tag_of(const BlockId& b) const {
  auto it = state_.find(b);
  return it == state_.end() ? Tag{} : it->second.tag;
}

void ReplicaServer::reply(const Envelope& m, MsgKind kind, const Tag& tag,
                          std::optional<BlockValue> payload) {
  Envelope r;
  r.from = self_;
  r.to = m.from;
  r.kind = kind;
  r.tag = tag;
  r.block = m.block;
  r.payload = std::move(payload);
  r.reply_to = m.msg_id;
  net_.send(std::move(r));
}

void ReplicaServer::on_message(const Envelope& m) {
  switch (m.kind) {
    case MsgKind::Write: {
      auto& slot = state_[m.block];
      if (protocol_tag_less(slot.tag, m.tag, mut_)) {
        slot.tag = m.tag;
        slot.value = *m.payload;
      }
      reply(m, MsgKind::WriteAck, slot.tag, std::nullopt);
      break;
    }
    case MsgKind::Read: {
      auto it = state_.find(m.block);
      Tag tag = it == state_.end() ? Tag{} : it->second.tag;
      if (protocol_tag_less(m.tag, tag, mut_)) {
        reply(m, MsgKind::ReadReply, tag, it->second.value);  // requester is behind
      } else {
        reply(m, MsgKind::ReadReply, tag, std::nullopt);
      }
      break;
    }
    case MsgKind::Catalog: {
      std::vector<CatalogEntry> entries;
      for (const auto& [block, slot] : state_) {
        if (!is_genesis(block) || slot.tag == Tag{}) continue;
        auto meta = decode_genesis_meta(slot.value.data);
        if (!meta) continue;
        entries.push_back(CatalogEntry{meta->path, block.fid, block,
                                       meta->deleted || is_tombstone(slot.tag), slot.tag});
      }
      reply(m, MsgKind::CatalogReply, Tag{}, BlockValue{std::nullopt, encode_catalog(entries)});
      break;
    }
    default:
      break;  // replies addressed to a server are stray; ignore
  }
}

RegisterClient::RegisterClient(ProcessId self, ClientId cid, Network& net, HistoryLog* log,
                               MutationFlags mut)
    : self_(self), cid_(cid), net_(net), log_(log), mut_(mut) {}

std::size_t RegisterClient::quorum() const { return majority(net_.server_ids().size()); }

void RegisterClient::read(const BlockId& b, const Tag& local, const BlockValue& local_val,
                          ReadCb done) {
  if (reads_.count(b) || writes_.count(b)) {
    throw InvariantViolation("overlapping operations on " + to_string(b));
  }
  ReadOp op;
  op.local = local;
  op.local_val = local_val;
  op.done = std::move(done);
  op.collect = broadcast(net_, self_, MsgKind::Read, local, b, std::nullopt, quorum());
  if (log_) log_->invoke(cid_, "cvr_read", to_string(b), local);
  reads_.emplace(b, std::move(op));
}

void RegisterClient::write(const BlockId& b, BlockValue value, const Tag& version,
                           WriteCb done) {
  if (reads_.count(b) || writes_.count(b)) {
    throw InvariantViolation("overlapping operations on " + to_string(b));
  }
  WriteOp op;
  op.value = std::move(value);
  op.version = version;
  op.done = std::move(done);
  op.collect = broadcast(net_, self_, MsgKind::Read, version, b, std::nullopt, quorum());
  if (log_) log_->invoke(cid_, "cvr_write", to_string(b), version, value_digest(op.value));
  writes_.emplace(b, std::move(op));
}

void RegisterClient::write_tombstone(const BlockId& b, BlockValue value, TombCb done) {
  if (reads_.count(b) || writes_.count(b)) {
    throw InvariantViolation("overlapping operations on " + to_string(b));
  }
  WriteOp op;
  op.tombstone = true;
  op.phase = 2;
  op.result_tag = Tag{kTombstoneTs, cid_};
  op.result_value = value;
  op.changed = true;
  op.tomb_done = std::move(done);
  pushed_bytes_ += value.data.size();
  op.collect = broadcast(net_, self_, MsgKind::Write, op.result_tag, b, std::move(value),
                         quorum());
  if (log_) {
    log_->invoke(cid_, "cvr_tomb", to_string(b), op.result_tag,
                 value_digest(op.result_value));
  }
  writes_.emplace(b, std::move(op));
}

void RegisterClient::collect_catalog(CatalogCb done) {
  if (catalog_) throw InvariantViolation("overlapping catalog queries");
  CatalogOp op;
  op.done = std::move(done);
  op.collect =
      broadcast(net_, self_, MsgKind::Catalog, Tag{}, BlockId{}, std::nullopt, quorum());
  catalog_ = std::move(op);
}

void RegisterClient::handle_read_reply(const BlockId& b, ReadOp& op, const Envelope&) {
  // Quorum just completed; pick the max-tag reply.
  const Envelope* best = nullptr;
  for (const auto& [from, r] : op.collect.replies()) {
    if (!best || protocol_tag_less(best->tag, r.tag, mut_)) best = &r;
  }
  bool behind = protocol_tag_less(op.local, best->tag, mut_);
  if (behind) {
    if (!best->payload) {
      throw InvariantViolation("replica ahead of reader replied without content");
    }
    op.max_tag = best->tag;
    op.max_val = best->payload;
    fetched_bytes_ += best->payload->data.size();
    if (!mut_.skip_read_propagate) {
      op.phase = 2;
      pushed_bytes_ += best->payload->data.size();
      op.collect = broadcast(net_, self_, MsgKind::Write, op.max_tag, b, *op.max_val,
                             quorum());
      return;
    }
  }
  // Either nothing newer exists or the propagate phase is mutated away.
  BlockValue value = behind ? *op.max_val : op.local_val;
  Tag tag = behind ? op.max_tag : op.local;
  auto done = std::move(op.done);
  if (log_) log_->respond(cid_, "cvr_read", to_string(b), tag, {}, value_digest(value));
  reads_.erase(b);
  done(value, tag, behind);
}

void RegisterClient::handle_write_reply(const BlockId& b, WriteOp& op, const Envelope&) {
  if (op.phase == 1) {
    const Envelope* best = nullptr;
    for (const auto& [from, r] : op.collect.replies()) {
      if (!best || protocol_tag_less(best->tag, r.tag, mut_)) best = &r;
    }
    Tag found = best->tag;
    bool current = (found == op.version) || mut_.skip_version_check;
    op.phase = 2;
    if (current) {
      op.result_tag = Tag{found.ts + 1, cid_};
      op.result_value = op.value;
      op.changed = true;
    } else {
      if (tag_less(found, op.version)) {
        throw InvariantViolation("supplied version was never propagated: " +
                                 to_string(op.version));
      }
      if (!best->payload) {
        throw InvariantViolation("replica ahead of writer replied without content");
      }
      // Converted to a read: adopt and re-propagate the prevailing pair so
      // the caller can read its own result afterwards.
      op.result_tag = found;
      op.result_value = *best->payload;
      op.changed = false;
    }
    pushed_bytes_ += op.result_value.data.size();
    op.collect = broadcast(net_, self_, MsgKind::Write, op.result_tag, b, op.result_value,
                           quorum());
    return;
  }

  // Propagate acks collected; the operation is decided.
  CvrResult result{op.result_value, op.result_tag, op.changed};
  bool tombstone = op.tombstone;
  auto done = std::move(op.done);
  auto tomb_done = std::move(op.tomb_done);
  if (log_) {
    log_->respond(cid_, tombstone ? "cvr_tomb" : "cvr_write", to_string(b), result.tag,
                  result.changed ? "chg" : "unchg", value_digest(result.value));
  }
  writes_.erase(b);
  if (tombstone) {
    tomb_done(result.tag);
  } else {
    done(result);
  }
}

void RegisterClient::on_message(const Envelope& m) {
  switch (m.kind) {
    case MsgKind::ReadReply: {
      if (auto it = reads_.find(m.block);
          it != reads_.end() && it->second.phase == 1 && it->second.collect.offer(m)) {
        handle_read_reply(m.block, it->second, m);
        return;
      }
      if (auto it = writes_.find(m.block);
          it != writes_.end() && it->second.phase == 1 && it->second.collect.offer(m)) {
        handle_write_reply(m.block, it->second, m);
        return;
      }
      break;
    }
    case MsgKind::WriteAck: {
      if (auto it = reads_.find(m.block);
          it != reads_.end() && it->second.phase == 2 && it->second.collect.offer(m)) {
        ReadOp& op = it->second;
        BlockValue value = *op.max_val;
        Tag tag = op.max_tag;
        auto done = std::move(op.done);
        if (log_) {
          log_->respond(cid_, "cvr_read", to_string(m.block), tag, {}, value_digest(value));
        }
        reads_.erase(it);
        done(value, tag, true);
        return;
      }
      if (auto it = writes_.find(m.block);
          it != writes_.end() && it->second.phase == 2 && it->second.collect.offer(m)) {
        handle_write_reply(m.block, it->second, m);
        return;
      }
      break;
    }
    case MsgKind::CatalogReply: {
      if (catalog_ && catalog_->collect.offer(m)) {
        std::map<FileId, CatalogEntry> best;
        for (const auto& [from, r] : catalog_->collect.replies()) {
          auto entries = r.payload ? decode_catalog(r.payload->data)
                                   : std::optional<std::vector<CatalogEntry>>{};
          if (!entries) continue;
          for (auto& e : *entries) {
            auto it = best.find(e.fid);
            if (it == best.end() || tag_less(it->second.tag, e.tag)) best[e.fid] = e;
          }
        }
        std::vector<CatalogEntry> merged;
        for (auto& [fid, e] : best) {
          if (!e.deleted) merged.push_back(std::move(e));
        }
        auto done = std::move(catalog_->done);
        catalog_.reset();
        done(merged);
        return;
      }
      break;
    }
    default:
      break;
  }
}

}  // namespace fragstore
