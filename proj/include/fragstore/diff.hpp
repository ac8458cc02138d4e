#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fragstore/core.hpp"

namespace fragstore {

// Alignment of a file's current block-hash sequence against the hash
// sequence of freshly chunked content. Clearing a block (new_index absent)
// stands in for deletion, so the chain itself never loses entries;
// inserted runs are contiguous and anchored to the preceding block.
struct DiffScript {
  struct Mod {
    BlockId block;
    std::optional<std::size_t> new_index;  // absent: set the block empty
  };
  struct Insert {
    BlockId anchor;
    std::size_t first = 0;  // first new-hash index of the run
    std::size_t count = 0;
  };

  std::vector<std::pair<BlockId, std::size_t>> equal;
  std::vector<Mod> mods;
  std::vector<Insert> inserts;

  bool empty() const { return mods.empty() && inserts.empty(); }
};

// Minimum-edit alignment of the two hash sequences. `cur` lists the data
// blocks of the client's chain in order (genesis excluded); `genesis`
// anchors insertions in front of the first data block.
DiffScript match_blocks(const std::vector<std::pair<BlockId, std::string>>& cur,
                        const std::vector<std::string>& fresh, const BlockId& genesis);

// Replays a script over the current hash sequence; used as the soundness
// oracle: the result must equal the fresh sequence exactly.
std::vector<std::string> apply_script(const std::vector<std::pair<BlockId, std::string>>& cur,
                                      const std::vector<std::string>& fresh,
                                      const DiffScript& script, const BlockId& genesis);

}  // namespace fragstore
