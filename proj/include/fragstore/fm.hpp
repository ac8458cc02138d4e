#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fragstore/catalog.hpp"
#include "fragstore/chunk.hpp"
#include "fragstore/core.hpp"
#include "fragstore/diff.hpp"
#include "fragstore/dsmm.hpp"
#include "fragstore/history.hpp"

namespace fragstore {

struct UpdateOutcome {
  BlockId target;
  bool changed = false;
  std::vector<BlockId> created;
};

struct UpdateReport {
  std::vector<UpdateOutcome> updates;
  std::uint64_t comp_cost = 0;  // deterministic compute units: bytes chunked + hashed

  bool all_changed() const {
    for (const auto& u : updates) {
      if (!u.changed) return false;
    }
    return true;
  }
};

struct ListEntry {
  std::string path;
  FileId fid;
  BlockId genesis;
};

// Fragmentation manager: keeps each file as a chain of bounded blocks,
// identifies changed blocks by content-defined chunking plus hash-sequence
// diffing, and maps file operations onto per-block shared-memory calls.
// One instance per client; operations run one at a time.
class FragmentationManager {
 public:
  using ReadCb = std::function<void(const std::string&)>;
  using UpdateCb = std::function<void(const UpdateOutcome&)>;
  using ReportCb = std::function<void(const UpdateReport&)>;

  FragmentationManager(IdMinter& ids, DsmmClient& mem, ChunkParams params, HistoryLog* log);

  // Registers the path and writes the metadata-carrying genesis block; the
  // new file is empty.
  void create_file(const std::string& path, std::function<void(FileId)> done);

  // Walks the chain from the genesis block, rebuilding the local view, and
  // returns the concatenated content.
  void read_file(const FileId& f, ReadCb done);

  // Rechunks `content`, diffs it against the local chain, and issues one
  // block update per modified block and per inserted run.
  void update_file(const FileId& f, const std::string& content, ReportCb done);

  // Updates one block with parts D0..Dk: k new blocks are created back to
  // front (the last linking to the block's current successor), then the
  // target is rewritten to link at the run's head. The whole update stands
  // or falls with that final conditional write.
  void update_block(const FileId& f, const BlockId& b, std::vector<std::string> parts,
                    UpdateCb done);

  // Drops the file locally and stamps the genesis block with the maximal
  // deleted tag.
  void delete_file(const FileId& f, std::function<void()> done);

  void list_files(std::function<void(const std::vector<ListEntry>&)> done);

  const FileView* local_view(const FileId& f) const;
  std::optional<FileId> lookup(const std::string& path) const;

  // Makes a remotely discovered file readable from this client.
  void adopt(const std::string& path, const FileId& f, const BlockId& genesis);

  // Catalog persistence: one record per file, "path TAB fid TAB genesis".
  std::string save_catalog() const;
  void load_catalog(std::string_view text);

  const ChunkParams& params() const { return params_; }

 private:
  struct FileState {
    std::string path;
    BlockId genesis;
    FileView view;
    bool view_valid = false;
    bool deleted = false;
  };

  struct ReadCtx;
  struct UpdateCtx;
  struct BatchCtx;

  FileState& state_of(const FileId& f);
  void read_step(std::shared_ptr<ReadCtx> ctx, const std::optional<BlockId>& next);
  void create_step(std::shared_ptr<UpdateCtx> ctx);
  void run_batch(std::shared_ptr<BatchCtx> ctx);

  IdMinter& ids_;
  DsmmClient& mem_;
  ChunkParams params_;
  HistoryLog* log_;
  std::map<FileId, FileState> files_;
  std::map<std::string, FileId> by_path_;
};

}  // namespace fragstore
