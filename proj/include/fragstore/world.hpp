#pragma once

#include <memory>
#include <vector>

#include "fragstore/fm.hpp"
#include "fragstore/register.hpp"
#include "fragstore/sim.hpp"

namespace fragstore {

struct WorldOptions {
  std::size_t servers = 3;
  std::size_t clients = 2;
  SimOptions sim;
  FaultPlan faults;
  MutationFlags mutations;
  ChunkParams chunk;
  std::uint64_t block_bound = 64 * 1024;  // per-block payload bound
};

// One simulated deployment: replicas plus client stacks wired to a shared
// deterministic network and history log. Server process ids are 0..S-1,
// client i runs as process S+i with client id i+1.
class World {
 public:
  explicit World(WorldOptions opts = {});

  struct Client {
    ProcessId pid;
    ClientId cid;
    RegisterClient reg;
    DsmmClient mem;
    IdMinter ids;
    FragmentationManager fm;

    Client(ProcessId pid, ClientId cid, Network& net, HistoryLog* log,
           const WorldOptions& opts);
  };

  SimNet& net() { return *net_; }
  HistoryLog& history() { return history_; }
  Client& client(std::size_t i) { return *clients_[i]; }
  ReplicaServer& server(std::size_t i) { return *servers_[i]; }
  std::size_t clients() const { return clients_.size(); }
  const WorldOptions& options() const { return opts_; }

  // Synchronous wrappers: start the operation and pump the network until
  // it completes. Only for tests and sequential setup phases.
  FileId create_file(std::size_t client, const std::string& path);
  std::string read_file(std::size_t client, const FileId& f);
  UpdateReport update_file(std::size_t client, const FileId& f, const std::string& content);
  UpdateOutcome update_block(std::size_t client, const FileId& f, const BlockId& b,
                             std::vector<std::string> parts);
  void delete_file(std::size_t client, const FileId& f);
  std::vector<ListEntry> list_files(std::size_t client);
  BlockValue mem_read(std::size_t client, const BlockId& b);
  std::pair<BlockValue, bool> mem_write(std::size_t client, const BlockId& b, BlockValue v);
  void mem_create(std::size_t client, const BlockId& b, BlockValue v);

 private:
  WorldOptions opts_;
  HistoryLog history_;
  std::unique_ptr<SimNet> net_;
  std::vector<std::unique_ptr<ReplicaServer>> servers_;
  std::vector<std::unique_ptr<Client>> clients_;
};

}  // namespace fragstore
