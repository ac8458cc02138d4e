#include "fragstore/world.hpp"

namespace fragstore {

World::Client::Client(ProcessId pid, ClientId cid, Network& net, HistoryLog* log,
                      const WorldOptions& opts)
    : pid(pid),
      cid(cid),
      reg(pid, cid, net, log, opts.mutations),
      mem(reg, opts.block_bound),
      ids(cid),
      fm(ids, mem, opts.chunk, log) {}

World::World(WorldOptions opts) : opts_(std::move(opts)) {
  std::vector<ProcessId> server_ids;
  for (std::size_t s = 0; s < opts_.servers; ++s) {
    server_ids.push_back(static_cast<ProcessId>(s));
  }
  net_ = std::make_unique<SimNet>(server_ids, opts_.sim, opts_.faults);
  for (std::size_t s = 0; s < opts_.servers; ++s) {
    auto server = std::make_unique<ReplicaServer>(static_cast<ProcessId>(s), *net_,
                                                  opts_.mutations);
    net_->register_handler(static_cast<ProcessId>(s),
                           [srv = server.get()](const Envelope& m) { srv->on_message(m); });
    servers_.push_back(std::move(server));
  }
  for (std::size_t c = 0; c < opts_.clients; ++c) {
    ProcessId pid = static_cast<ProcessId>(opts_.servers + c);
    ClientId cid{static_cast<std::uint32_t>(c + 1)};
    auto client = std::make_unique<Client>(pid, cid, *net_, &history_, opts_);
    net_->register_handler(pid,
                           [cl = client.get()](const Envelope& m) { cl->reg.on_message(m); });
    clients_.push_back(std::move(client));
  }
}

FileId World::create_file(std::size_t client, const std::string& path) {
  std::optional<FileId> out;
  clients_[client]->fm.create_file(path, [&](FileId f) { out = f; });
  net_->run_until([&] { return out.has_value(); });
  return *out;
}

std::string World::read_file(std::size_t client, const FileId& f) {
  std::optional<std::string> out;
  clients_[client]->fm.read_file(f, [&](const std::string& s) { out = s; });
  net_->run_until([&] { return out.has_value(); });
  return *out;
}

UpdateReport World::update_file(std::size_t client, const FileId& f,
                                const std::string& content) {
  std::optional<UpdateReport> out;
  clients_[client]->fm.update_file(f, content, [&](const UpdateReport& r) { out = r; });
  net_->run_until([&] { return out.has_value(); });
  return *out;
}

UpdateOutcome World::update_block(std::size_t client, const FileId& f, const BlockId& b,
                                  std::vector<std::string> parts) {
  std::optional<UpdateOutcome> out;
  clients_[client]->fm.update_block(f, b, std::move(parts),
                                    [&](const UpdateOutcome& o) { out = o; });
  net_->run_until([&] { return out.has_value(); });
  return *out;
}

void World::delete_file(std::size_t client, const FileId& f) {
  bool done = false;
  clients_[client]->fm.delete_file(f, [&] { done = true; });
  net_->run_until([&] { return done; });
}

std::vector<ListEntry> World::list_files(std::size_t client) {
  std::optional<std::vector<ListEntry>> out;
  clients_[client]->fm.list_files([&](const std::vector<ListEntry>& l) { out = l; });
  net_->run_until([&] { return out.has_value(); });
  return *out;
}

BlockValue World::mem_read(std::size_t client, const BlockId& b) {
  std::optional<BlockValue> out;
  clients_[client]->mem.read(b, [&](const BlockValue& v) { out = v; });
  net_->run_until([&] { return out.has_value(); });
  return *out;
}

std::pair<BlockValue, bool> World::mem_write(std::size_t client, const BlockId& b,
                                             BlockValue v) {
  std::optional<std::pair<BlockValue, bool>> out;
  clients_[client]->mem.write(b, std::move(v), [&](const BlockValue& value, bool changed) {
    out = std::make_pair(value, changed);
  });
  net_->run_until([&] { return out.has_value(); });
  return *out;
}

void World::mem_create(std::size_t client, const BlockId& b, BlockValue v) {
  bool done = false;
  clients_[client]->mem.create(b, std::move(v), [&] { done = true; });
  net_->run_until([&] { return done; });
}

}  // namespace fragstore
