#include "fragstore/diff.hpp"

#include <map>

#include "fragstore/digest.hpp"
#include "fragstore/errors.hpp"

namespace fragstore {

namespace {

const std::string& empty_hash() {
  static const std::string h = hex_digest("");
  return h;
}

}  // namespace

DiffScript match_blocks(const std::vector<std::pair<BlockId, std::string>>& cur,
                        const std::vector<std::string>& fresh, const BlockId& genesis) {
  const std::size_t n = cur.size();
  const std::size_t m = fresh.size();

  // Longest common subsequence of the two hash sequences.
  std::vector<std::vector<std::uint32_t>> dp(n + 1, std::vector<std::uint32_t>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      if (cur[i].second == fresh[j]) {
        dp[i][j] = dp[i + 1][j + 1] + 1;
      } else {
        dp[i][j] = std::max(dp[i + 1][j], dp[i][j + 1]);
      }
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> matches;
  {
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
      if (cur[i].second == fresh[j] && dp[i][j] == dp[i + 1][j + 1] + 1) {
        matches.emplace_back(i, j);
        ++i;
        ++j;
      } else if (dp[i + 1][j] >= dp[i][j + 1]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  DiffScript script;
  auto process_gap = [&](std::size_t ci, std::size_t cj, std::size_t ni, std::size_t nj,
                         const BlockId& preceding) {
    const std::size_t cur_len = cj - ci;
    const std::size_t new_len = nj - ni;
    const std::size_t paired = std::min(cur_len, new_len);
    for (std::size_t t = 0; t < paired; ++t) {
      if (cur[ci + t].second == fresh[ni + t]) {
        script.equal.emplace_back(cur[ci + t].first, ni + t);  // same content, keep as-is
      } else {
        script.mods.push_back(DiffScript::Mod{cur[ci + t].first, ni + t});
      }
    }
    for (std::size_t t = paired; t < cur_len; ++t) {
      // Surplus old blocks are cleared, never unlinked. Re-clearing an
      // already empty block would be a wasted write.
      if (cur[ci + t].second != empty_hash()) {
        script.mods.push_back(DiffScript::Mod{cur[ci + t].first, std::nullopt});
      }
    }
    if (new_len > paired) {
      BlockId anchor = paired > 0 ? cur[ci + paired - 1].first
                                  : (ci > 0 ? cur[ci - 1].first : preceding);
      script.inserts.push_back(DiffScript::Insert{anchor, ni + paired, new_len - paired});
    }
  };

  std::size_t ci = 0, ni = 0;
  for (const auto& [mi, mj] : matches) {
    process_gap(ci, mi, ni, mj, genesis);
    script.equal.emplace_back(cur[mi].first, mj);
    ci = mi + 1;
    ni = mj + 1;
  }
  process_gap(ci, n, ni, m, genesis);
  return script;
}

std::vector<std::string> apply_script(const std::vector<std::pair<BlockId, std::string>>& cur,
                                      const std::vector<std::string>& fresh,
                                      const DiffScript& script, const BlockId& genesis) {
  std::map<BlockId, std::optional<std::size_t>> replace;
  for (const auto& [block, idx] : script.equal) replace[block] = idx;
  for (const auto& mod : script.mods) {
    if (!replace.emplace(mod.block, mod.new_index).second) {
      throw InvariantViolation("block appears twice in a diff script");
    }
  }
  std::map<BlockId, const DiffScript::Insert*> runs;
  for (const auto& ins : script.inserts) {
    if (!runs.emplace(ins.anchor, &ins).second) {
      throw InvariantViolation("two insert runs share an anchor");
    }
  }

  std::vector<std::string> out;
  auto emit_run = [&](const BlockId& anchor) {
    auto it = runs.find(anchor);
    if (it == runs.end()) return;
    for (std::size_t k = 0; k < it->second->count; ++k) {
      out.push_back(fresh[it->second->first + k]);
    }
  };

  emit_run(genesis);
  for (const auto& [block, hash] : cur) {
    auto it = replace.find(block);
    if (it == replace.end()) {
      if (hash != empty_hash()) {
        throw InvariantViolation("diff script leaves a non-empty block unaccounted");
      }
    } else if (it->second) {
      out.push_back(fresh[*it->second]);
    }
    emit_run(block);
  }
  return out;
}

}  // namespace fragstore
