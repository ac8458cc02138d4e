#include "fragstore/fm.hpp"

#include <algorithm>

#include "fragstore/digest.hpp"
#include "fragstore/errors.hpp"

namespace fragstore {

namespace {

std::string join_ids(const std::vector<BlockId>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out.push_back(',');
    out += to_string(id);
  }
  return out;
}

}  // namespace

FragmentationManager::FragmentationManager(IdMinter& ids, DsmmClient& mem, ChunkParams params,
                                           HistoryLog* log)
    : ids_(ids), mem_(mem), params_(params), log_(log) {
  validate(params_);
  if (params_.max_size > mem_.max_value_bytes()) {
    throw BadParams("chunk bound exceeds the store's block size bound");
  }
}

FragmentationManager::FileState& FragmentationManager::state_of(const FileId& f) {
  auto it = files_.find(f);
  if (it == files_.end()) throw UnknownFile("no such file: " + to_string(f));
  if (it->second.deleted) throw FileDeleted("file was deleted: " + to_string(f));
  return it->second;
}

const FileView* FragmentationManager::local_view(const FileId& f) const {
  auto it = files_.find(f);
  return it == files_.end() ? nullptr : &it->second.view;
}

std::optional<FileId> FragmentationManager::lookup(const std::string& path) const {
  auto it = by_path_.find(path);
  if (it == by_path_.end()) return std::nullopt;
  return it->second;
}

void FragmentationManager::adopt(const std::string& path, const FileId& f,
                                 const BlockId& genesis) {
  FileState st;
  st.path = path;
  st.genesis = genesis;
  st.view.fid = f;
  files_[f] = std::move(st);
  by_path_[path] = f;
}

std::string FragmentationManager::save_catalog() const {
  std::string out;
  for (const auto& [fid, st] : files_) {
    if (st.deleted) continue;
    out += st.path + "\t" + to_string(fid) + "\t" + to_string(st.genesis) + "\n";
  }
  return out;
}

void FragmentationManager::load_catalog(std::string_view text) {
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = line.rfind('\t');
    if (t1 == std::string_view::npos || t2 == t1) {
      throw BadParams("malformed catalog record");
    }
    auto fid = parse_file_id(line.substr(t1 + 1, t2 - t1 - 1));
    auto genesis = parse_block_id(line.substr(t2 + 1));
    if (!fid || !genesis) throw BadParams("malformed catalog record");
    adopt(std::string(line.substr(0, t1)), *fid, *genesis);
  }
}

void FragmentationManager::create_file(const std::string& path,
                                       std::function<void(FileId)> done) {
  if (by_path_.count(path)) throw DuplicatePath("path already mapped: " + path);
  if (path.find('\t') != std::string::npos || path.find('\n') != std::string::npos) {
    throw BadParams("path may not contain tabs or newlines");
  }
  FileId fid = ids_.next_file_id();
  BlockId genesis = ids_.next_block_id(fid);
  BlockValue value{std::nullopt, encode_genesis_meta(GenesisMeta{path, fid, false})};
  if (value.data.size() > mem_.max_value_bytes()) throw BadParams("path too long");

  if (log_) log_->invoke(mem_.register_client().id(), "fm_create", to_string(fid), std::nullopt, path);
  FileState st;
  st.path = path;
  st.genesis = genesis;
  st.view.fid = fid;
  st.view.chain.push_back(ChainEntry{genesis, value, Tag{}});
  st.view_valid = true;
  files_[fid] = std::move(st);
  by_path_[path] = fid;

  mem_.create(genesis, value, [this, fid, genesis, done = std::move(done)] {
    auto& st = files_[fid];
    st.view.chain[0].tag = mem_.cached(genesis)->tag;
    if (log_) {
      log_->respond(mem_.register_client().id(), "fm_create", to_string(fid), std::nullopt, {},
                    to_string(genesis));
    }
    done(fid);
  });
}

struct FragmentationManager::ReadCtx {
  FileId fid;
  std::vector<ChainEntry> chain;
  std::set<BlockId> visited;
  ReadCb done;
};

void FragmentationManager::read_file(const FileId& f, ReadCb done) {
  FileState& st = state_of(f);
  if (log_) log_->invoke(mem_.register_client().id(), "fm_read", to_string(f));
  auto ctx = std::make_shared<ReadCtx>();
  ctx->fid = f;
  ctx->done = std::move(done);
  read_step(ctx, st.genesis);
}

void FragmentationManager::read_step(std::shared_ptr<ReadCtx> ctx,
                                     const std::optional<BlockId>& next) {
  if (!next) {
    // Chain walked to its end; commit the view and assemble the content.
    auto& st = files_[ctx->fid];
    st.view.chain = ctx->chain;
    st.view_valid = true;
    std::string content;
    for (std::size_t i = 1; i < ctx->chain.size(); ++i) content += ctx->chain[i].value.data;
    if (log_) {
      log_->respond(mem_.register_client().id(), "fm_read", to_string(ctx->fid), std::nullopt,
                    {}, render_chain(ctx->chain));
    }
    ctx->done(content);
    return;
  }

  BlockId b = *next;
  if (!ctx->visited.insert(b).second) {
    throw BrokenChain("chain revisits " + to_string(b));
  }
  mem_.read(b, [this, ctx, b](const BlockValue& value) {
    Tag tag = mem_.cached(b)->tag;
    bool genesis_step = ctx->chain.empty();
    if (tag == Tag{} && !genesis_step) {
      throw BrokenChain("followed link reaches unwritten block " + to_string(b));
    }
    if (genesis_step) {
      auto meta = decode_genesis_meta(value.data);
      if (tag == Tag{} || !meta) {
        throw BrokenChain("genesis block unreadable for " + to_string(ctx->fid));
      }
      if (meta->deleted || is_tombstone(tag)) {
        auto& st = files_[ctx->fid];
        st.deleted = true;
        by_path_.erase(st.path);
        if (log_) {
          log_->respond(mem_.register_client().id(), "fm_read", to_string(ctx->fid),
                        std::nullopt, "deleted", {});
        }
        throw FileDeleted("file was deleted: " + to_string(ctx->fid));
      }
    }
    ctx->chain.push_back(ChainEntry{b, value, tag});
    read_step(ctx, value.next);
  });
}

struct FragmentationManager::UpdateCtx {
  FileId fid;
  BlockId target;
  std::vector<std::string> parts;
  // Blocks to create, back to front: index 0 links to the target's old
  // successor, the last one is what the target will link to.
  std::vector<std::pair<BlockId, BlockValue>> creates;
  std::size_t next_create = 0;
  std::vector<BlockId> created_ids;
  UpdateCb done;
};

void FragmentationManager::update_block(const FileId& f, const BlockId& b,
                                        std::vector<std::string> parts, UpdateCb done) {
  FileState& st = state_of(f);
  if (!st.view_valid) throw BadParams("local chain not populated; read the file first");
  if (parts.empty()) throw BadParams("update needs at least one part");
  for (const auto& p : parts) {
    if (p.size() > params_.max_size) throw BadParams("part exceeds the block size bound");
  }
  auto entry = std::find_if(st.view.chain.begin(), st.view.chain.end(),
                            [&](const ChainEntry& e) { return e.id == b; });
  if (entry == st.view.chain.end()) throw BadParams("block not in the local chain");

  auto ctx = std::make_shared<UpdateCtx>();
  ctx->fid = f;
  ctx->target = b;
  ctx->parts = std::move(parts);
  ctx->done = std::move(done);

  std::optional<BlockId> succ = entry->value.next;
  const std::size_t k = ctx->parts.size() - 1;
  std::optional<BlockId> link = succ;
  for (std::size_t j = k; j >= 1; --j) {
    BlockId id = ids_.next_block_id(f);
    ctx->creates.emplace_back(id, BlockValue{link, ctx->parts[j]});
    link = id;
  }

  if (log_) {
    std::string digests;
    for (const auto& p : ctx->parts) {
      if (!digests.empty()) digests.push_back(',');
      digests += short_digest(p);
    }
    log_->invoke(mem_.register_client().id(), "fm_update", to_string(f), std::nullopt,
                 "b=" + to_string(b) + ";d=" + digests);
  }
  create_step(ctx);
}

void FragmentationManager::create_step(std::shared_ptr<UpdateCtx> ctx) {
  if (ctx->next_create < ctx->creates.size()) {
    const auto& [id, value] = ctx->creates[ctx->next_create];
    mem_.create(id, value, [this, ctx, id] {
      ctx->created_ids.push_back(id);
      ++ctx->next_create;
      create_step(ctx);
    });
    return;
  }

  // All new blocks are in place and unreachable until this write lands.
  std::optional<BlockId> head;
  if (!ctx->creates.empty()) {
    head = ctx->creates.back().first;  // last created = first of the run
  } else {
    auto& st = files_[ctx->fid];
    auto entry = std::find_if(st.view.chain.begin(), st.view.chain.end(),
                              [&](const ChainEntry& e) { return e.id == ctx->target; });
    head = entry->value.next;
  }
  BlockValue value{head, ctx->parts[0]};
  mem_.write(ctx->target, value, [this, ctx, value](const BlockValue& result, bool changed) {
    auto& st = files_[ctx->fid];
    auto entry = std::find_if(st.view.chain.begin(), st.view.chain.end(),
                              [&](const ChainEntry& e) { return e.id == ctx->target; });
    if (changed) {
      entry->value = value;
      entry->tag = mem_.cached(ctx->target)->tag;
      std::vector<ChainEntry> inserted;
      for (auto it = ctx->creates.rbegin(); it != ctx->creates.rend(); ++it) {
        inserted.push_back(ChainEntry{it->first, it->second, mem_.cached(it->first)->tag});
      }
      st.view.chain.insert(entry + 1, inserted.begin(), inserted.end());
    } else {
      // Lost the conditional write: adopt the prevailing value; the rest of
      // the local chain is stale until the next read.
      entry->value = result;
      entry->tag = mem_.cached(ctx->target)->tag;
    }
    UpdateOutcome outcome{ctx->target, changed, ctx->created_ids};
    if (log_) {
      log_->respond(mem_.register_client().id(), "fm_update", to_string(ctx->fid),
                    std::nullopt, changed ? "chg" : "unchg",
                    "creates=" + join_ids(ctx->created_ids));
    }
    ctx->done(outcome);
  });
}

struct FragmentationManager::BatchCtx {
  FileId fid;
  struct Planned {
    BlockId target;
    std::vector<std::string> parts;
  };
  std::vector<Planned> plan;
  std::size_t next = 0;
  UpdateReport report;
  ReportCb done;
};

void FragmentationManager::update_file(const FileId& f, const std::string& content,
                                       ReportCb done) {
  FileState& st = state_of(f);
  if (!st.view_valid) throw BadParams("local chain not populated; read the file first");

  // Chunk and hash the fresh content. An empty file carries no segments;
  // the chunker's single empty segment stands for "clear everything".
  std::vector<Segment> segments;
  if (!content.empty()) segments = chunk(content, params_);
  std::vector<std::string> fresh;
  fresh.reserve(segments.size());
  for (const auto& s : segments) fresh.push_back(s.hash);

  std::vector<std::pair<BlockId, std::string>> cur;
  for (std::size_t i = 1; i < st.view.chain.size(); ++i) {
    cur.emplace_back(st.view.chain[i].id, hex_digest(st.view.chain[i].value.data));
  }

  DiffScript script = match_blocks(cur, fresh, st.genesis);

  auto ctx = std::make_shared<BatchCtx>();
  ctx->fid = f;
  ctx->done = std::move(done);
  ctx->report.comp_cost = 2 * content.size();  // one chunking pass, one hashing pass

  std::map<BlockId, std::optional<std::size_t>> mods;
  for (const auto& m : script.mods) mods[m.block] = m.new_index;
  std::map<BlockId, const DiffScript::Insert*> runs;
  for (const auto& ins : script.inserts) runs[ins.anchor] = &ins;

  auto plan_for = [&](const BlockId& b, const std::string& current_data) {
    auto mod = mods.find(b);
    auto run = runs.find(b);
    if (mod == mods.end() && run == runs.end()) return;
    std::vector<std::string> parts;
    if (mod != mods.end()) {
      parts.push_back(mod->second ? segments[*mod->second].data : std::string());
    } else {
      parts.push_back(current_data);  // pure insert rewrites the anchor as-is
    }
    if (run != runs.end()) {
      for (std::size_t t = 0; t < run->second->count; ++t) {
        parts.push_back(segments[run->second->first + t].data);
      }
    }
    ctx->plan.push_back(BatchCtx::Planned{b, std::move(parts)});
  };

  plan_for(st.genesis, st.view.chain[0].value.data);
  for (std::size_t i = 1; i < st.view.chain.size(); ++i) {
    plan_for(st.view.chain[i].id, st.view.chain[i].value.data);
  }

  run_batch(ctx);
}

void FragmentationManager::run_batch(std::shared_ptr<BatchCtx> ctx) {
  if (ctx->next >= ctx->plan.size()) {
    ctx->done(ctx->report);
    return;
  }
  auto& step = ctx->plan[ctx->next];
  ++ctx->next;
  update_block(ctx->fid, step.target, std::move(step.parts),
               [this, ctx](const UpdateOutcome& outcome) {
                 ctx->report.updates.push_back(outcome);
                 run_batch(ctx);
               });
}

void FragmentationManager::delete_file(const FileId& f, std::function<void()> done) {
  FileState& st = state_of(f);
  if (log_) log_->invoke(mem_.register_client().id(), "fm_delete", to_string(f));
  BlockValue tomb{std::nullopt, encode_genesis_meta(GenesisMeta{st.path, f, true})};
  BlockId genesis = st.genesis;
  mem_.tombstone(genesis, tomb, [this, f, done = std::move(done)] {
    auto& st = files_[f];
    st.deleted = true;
    by_path_.erase(st.path);
    if (log_) log_->respond(mem_.register_client().id(), "fm_delete", to_string(f));
    done();
  });
}

void FragmentationManager::list_files(std::function<void(const std::vector<ListEntry>&)> done) {
  if (log_) log_->invoke(mem_.register_client().id(), "fm_list", {});
  mem_.catalog([this, done = std::move(done)](const std::vector<CatalogEntry>& entries) {
    std::vector<ListEntry> out;
    for (const auto& e : entries) out.push_back(ListEntry{e.path, e.fid, e.genesis});
    if (log_) {
      log_->respond(mem_.register_client().id(), "fm_list", {}, std::nullopt, {},
                    std::to_string(out.size()) + " files");
    }
    done(out);
  });
}

}  // namespace fragstore
