#include "fragstore/checker.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

#include "fragstore/digest.hpp"
#include "fragstore/errors.hpp"

namespace fragstore {

namespace {

bool is_file_op(const std::string& op) { return op.rfind("fm_", 0) == 0; }

std::vector<std::string> split_list(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

ParsedHistory parse_history(std::vector<Event> events) {
  ParsedHistory h;
  h.events = std::move(events);

  struct Open {
    bool is_file = false;
    std::size_t op_idx = 0;
    std::string op;
    std::string object;
  };
  std::map<ClientId, std::vector<Open>> stacks;

  for (std::size_t i = 0; i < h.events.size(); ++i) {
    const Event& e = h.events[i];
    auto& stack = stacks[e.process];
    if (e.action == Action::Invoke) {
      if (is_file_op(e.op)) {
        FileOp op;
        op.op = e.op;
        op.process = e.process;
        if (!e.object.empty()) {
          auto fid = parse_file_id(e.object);
          if (!fid) throw HistoryIncomplete("bad file object at seq " + std::to_string(e.seq));
          op.fid = *fid;
        }
        op.invoke_seq = e.seq;
        op.inv_event = i;
        if (e.op == "fm_update") {
          // invoke payload: "b=<block>;d=<digest,digest,...>"
          auto semi = e.payload.find(';');
          if (semi == std::string::npos || e.payload.rfind("b=", 0) != 0) {
            throw HistoryIncomplete("bad fm_update payload at seq " + std::to_string(e.seq));
          }
          auto target = parse_block_id(e.payload.substr(2, semi - 2));
          if (!target) {
            throw HistoryIncomplete("bad fm_update target at seq " + std::to_string(e.seq));
          }
          op.target = *target;
          op.part_digests = split_list(std::string_view(e.payload).substr(semi + 3), ',');
        }
        h.file_ops.push_back(std::move(op));
        stack.push_back(Open{true, h.file_ops.size() - 1, e.op, e.object});
      } else {
        BlockOp op;
        if (e.op == "cvr_read") {
          op.kind = BlockOp::Kind::Read;
        } else if (e.op == "cvr_write") {
          op.kind = BlockOp::Kind::Write;
        } else if (e.op == "cvr_tomb") {
          op.kind = BlockOp::Kind::Tombstone;
        } else {
          throw HistoryIncomplete("unknown op " + e.op);
        }
        op.process = e.process;
        auto block = parse_block_id(e.object);
        if (!block || !e.tag) {
          throw HistoryIncomplete("bad block invoke at seq " + std::to_string(e.seq));
        }
        op.block = *block;
        op.supplied = *e.tag;
        op.wdigest = e.payload;
        op.invoke_seq = e.seq;
        op.inv_event = i;
        for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
          if (it->is_file) {
            op.parent = it->op_idx;
            break;
          }
        }
        h.block_ops.push_back(std::move(op));
        stack.push_back(Open{false, h.block_ops.size() - 1, e.op, e.object});
      }
    } else {
      if (stack.empty() || stack.back().op != e.op || stack.back().object != e.object) {
        throw HistoryIncomplete("response without matching invocation at seq " +
                                std::to_string(e.seq));
      }
      Open open = stack.back();
      stack.pop_back();
      if (open.is_file) {
        FileOp& op = h.file_ops[open.op_idx];
        op.respond_seq = e.seq;
        op.res_event = i;
        op.status = e.status;
        if (op.op == "fm_read" && e.status.empty()) {
          auto chain = parse_chain(e.payload);
          if (!chain) {
            throw HistoryIncomplete("bad fm_read chain at seq " + std::to_string(e.seq));
          }
          op.chain = *chain;
        } else if (op.op == "fm_update") {
          if (e.payload.rfind("creates=", 0) != 0) {
            throw HistoryIncomplete("bad fm_update response at seq " + std::to_string(e.seq));
          }
          for (const auto& part : split_list(std::string_view(e.payload).substr(8), ',')) {
            auto id = parse_block_id(part);
            if (!id) throw HistoryIncomplete("bad created id at seq " + std::to_string(e.seq));
            op.created.push_back(*id);
          }
        }
      } else {
        BlockOp& op = h.block_ops[open.op_idx];
        op.respond_seq = e.seq;
        op.res_event = i;
        if (!e.tag) throw HistoryIncomplete("block response without tag");
        op.rtag = *e.tag;
        op.rdigest = e.payload;
        op.changed = (e.status == "chg") || op.kind == BlockOp::Kind::Tombstone;
      }
    }
  }
  for (const auto& [process, stack] : stacks) {
    if (!stack.empty()) {
      throw HistoryIncomplete("operation left open by " + to_string(process) + ": " +
                              stack.back().op);
    }
  }

  for (std::size_t i = 0; i < h.block_ops.size(); ++i) {
    h.by_block[h.block_ops[i].block].push_back(i);
  }
  for (std::size_t i = 0; i < h.file_ops.size(); ++i) {
    if (h.file_ops[i].fid) h.by_file[*h.file_ops[i].fid].push_back(i);
  }
  return h;
}

namespace {

struct SeqState {
  Tag tag;
  std::string digest;

  std::string render() const { return to_string(tag) + "/" + digest; }
};

// Sequential specification of one coverable block. A winning write mints
// (supplied counter + 1, writer) strictly above the current tag; reads and
// lost writes return the current pair; a lost write's supplied version can
// never equal the current tag.
bool op_valid(const BlockOp& op, const SeqState& s, SeqState& out) {
  out = s;
  switch (op.kind) {
    case BlockOp::Kind::Read:
      return op.rtag == s.tag && op.rdigest == s.digest;
    case BlockOp::Kind::Write:
      if (op.changed) {
        Tag minted{op.supplied.ts + 1, op.process};
        if (op.rtag != minted || !tag_less(s.tag, minted) || op.rdigest != op.wdigest) {
          return false;
        }
        out = SeqState{minted, op.wdigest};
        return true;
      }
      return op.rtag == s.tag && op.rdigest == s.digest && op.supplied != s.tag;
    case BlockOp::Kind::Tombstone:
      if (!is_tombstone(op.rtag) || !tag_less(s.tag, op.rtag)) return false;
      out = SeqState{op.rtag, op.wdigest};
      return true;
  }
  return false;
}

std::optional<SerializationWitness> serialize_ops(
    const std::vector<const BlockOp*>& ops,
    const std::vector<std::vector<bool>>& precedes) {
  const std::size_t n = ops.size();
  SerializationWitness witness;
  std::unordered_set<std::string> visited;
  std::vector<std::size_t> order;
  std::vector<std::string> states;

  std::function<bool(std::uint32_t, const SeqState&)> dfs = [&](std::uint32_t done,
                                                                const SeqState& state) {
    if (done == (std::uint32_t{1} << n) - 1) {
      witness.order = order;
      witness.state_trace = states;
      return true;
    }
    std::string key = std::to_string(done) + "#" + state.render();
    if (visited.count(key)) return false;
    for (std::size_t i = 0; i < n; ++i) {
      if (done & (std::uint32_t{1} << i)) continue;
      bool minimal = true;
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && !(done & (std::uint32_t{1} << j)) && precedes[j][i]) {
          minimal = false;
          break;
        }
      }
      if (!minimal) continue;
      SeqState next;
      if (!op_valid(*ops[i], state, next)) continue;
      order.push_back(i);
      states.push_back(next.render());
      if (dfs(done | (std::uint32_t{1} << i), next)) return true;
      order.pop_back();
      states.pop_back();
    }
    visited.insert(std::move(key));
    return false;
  };

  if (dfs(0, SeqState{Tag{}, empty_value_digest()})) return witness;
  return std::nullopt;
}

std::vector<std::vector<bool>> realtime_precedence(const std::vector<const BlockOp*>& ops) {
  std::vector<std::vector<bool>> p(ops.size(), std::vector<bool>(ops.size(), false));
  for (std::size_t a = 0; a < ops.size(); ++a) {
    for (std::size_t b = 0; b < ops.size(); ++b) {
      if (a != b) p[a][b] = ops[a]->respond_seq < ops[b]->invoke_seq;
    }
  }
  return p;
}

std::vector<Event> events_of(const ParsedHistory& h, const std::vector<const BlockOp*>& ops) {
  std::vector<Event> out;
  for (const auto* op : ops) {
    out.push_back(h.events[op->inv_event]);
    out.push_back(h.events[op->res_event]);
  }
  std::sort(out.begin(), out.end(),
            [](const Event& a, const Event& b) { return a.seq < b.seq; });
  return out;
}

// Greedy shrink: drop every operation whose removal keeps the history
// unserializable. Precedence is rebuilt per candidate subset.
std::vector<const BlockOp*> shrink_unserializable(
    std::vector<const BlockOp*> ops,
    const std::function<std::vector<std::vector<bool>>(const std::vector<const BlockOp*>&)>&
        prec) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      std::vector<const BlockOp*> trial = ops;
      trial.erase(trial.begin() + i);
      if (trial.empty()) continue;
      if (!serialize_ops(trial, prec(trial))) {
        ops = std::move(trial);
        changed = true;
        break;
      }
    }
  }
  return ops;
}

}  // namespace

Verdict check_block_linearizable(const ParsedHistory& h, const BlockId& b, std::size_t cap) {
  Verdict v;
  auto it = h.by_block.find(b);
  if (it == h.by_block.end()) return v;
  std::vector<const BlockOp*> ops;
  for (auto idx : it->second) ops.push_back(&h.block_ops[idx]);
  if (ops.size() > cap) {
    throw ScaleExceeded("block " + to_string(b) + " has " + std::to_string(ops.size()) +
                        " operations, brute-force cap is " + std::to_string(cap));
  }
  auto witness = serialize_ops(ops, realtime_precedence(ops));
  if (witness) {
    v.witness = std::move(*witness);
    return v;
  }
  v.ok = false;
  v.violated_property = "linearizability";
  v.detail = "no serialization of the operations on " + to_string(b) +
             " satisfies the register specification";
  auto minimal = shrink_unserializable(ops, realtime_precedence);
  v.counterexample = events_of(h, minimal);
  return v;
}

Verdict check_coverability(const ParsedHistory& h, const BlockId& b) {
  Verdict v;
  auto it = h.by_block.find(b);
  if (it == h.by_block.end()) return v;

  std::vector<const BlockOp*> succ;
  for (auto idx : it->second) {
    const BlockOp& op = h.block_ops[idx];
    if (op.kind == BlockOp::Kind::Write && op.changed) succ.push_back(&op);
  }
  std::sort(succ.begin(), succ.end(),
            [](const BlockOp* a, const BlockOp* b) { return tag_less(a->rtag, b->rtag); });

  auto fail = [&](const BlockOp* op, const std::string& property, const std::string& detail) {
    v.ok = false;
    v.violated_property = property;
    v.detail = detail;
    v.counterexample = events_of(h, {op});
    return v;
  };

  std::set<Tag> minted;
  for (std::size_t i = 0; i < succ.size(); ++i) {
    const BlockOp* op = succ[i];
    if (i > 0 && !tag_less(succ[i - 1]->rtag, op->rtag)) {
      return fail(op, "consolidation",
                  "minted tag " + to_string(op->rtag) + " does not exceed " +
                      to_string(succ[i - 1]->rtag));
    }
    if (op->supplied != Tag{} && minted.count(op->supplied) == 0) {
      return fail(op, "continuity",
                  "supplied version " + to_string(op->supplied) + " was never minted");
    }
    if (op->rtag.ts != op->supplied.ts + 1) {
      return fail(op, "evolution",
                  "minted tag " + to_string(op->rtag) + " does not increment " +
                      to_string(op->supplied));
    }
    minted.insert(op->rtag);
  }
  return v;
}

Verdict check_version_sequence(const ParsedHistory& h, const BlockId& b) {
  Verdict v = check_coverability(h, b);
  if (!v.ok) return v;
  auto it = h.by_block.find(b);
  if (it == h.by_block.end()) return v;
  std::vector<const BlockOp*> succ;
  for (auto idx : it->second) {
    const BlockOp& op = h.block_ops[idx];
    if (op.kind == BlockOp::Kind::Write && op.changed) succ.push_back(&op);
  }
  std::sort(succ.begin(), succ.end(),
            [](const BlockOp* a, const BlockOp* b) { return tag_less(a->rtag, b->rtag); });
  for (std::size_t i = 0; i < succ.size(); ++i) {
    if (succ[i]->rtag.ts != i + 1) {
      v.ok = false;
      v.violated_property = "version-sequence";
      v.detail = "write " + std::to_string(i + 1) + " in version order carries counter " +
                 std::to_string(succ[i]->rtag.ts);
      v.counterexample = events_of(h, {succ[i]});
      return v;
    }
  }
  return v;
}

namespace {

Verdict check_chains(const ParsedHistory& h, const FileId& f) {
  Verdict v;
  auto it = h.by_file.find(f);
  if (it == h.by_file.end()) return v;
  for (auto idx : it->second) {
    const FileOp& op = h.file_ops[idx];
    if (op.op != "fm_read" || !op.status.empty()) continue;
    bool ok = !op.chain.empty() && is_genesis(op.chain[0].id) && op.chain[0].id.fid == f;
    for (std::size_t i = 0; ok && i < op.chain.size(); ++i) {
      if (i + 1 < op.chain.size()) {
        ok = op.chain[i].next && *op.chain[i].next == op.chain[i + 1].id;
      } else {
        ok = !op.chain[i].next.has_value();
      }
    }
    if (!ok) {
      v.ok = false;
      v.violated_property = "chain-connectivity";
      v.detail = "read at seq " + std::to_string(op.invoke_seq) +
                 " returned a disconnected chain";
      v.counterexample = {h.events[op.inv_event], h.events[op.res_event]};
      return v;
    }
  }
  return v;
}

Verdict check_monotonic(const ParsedHistory& h, const FileId& f) {
  Verdict v;
  auto it = h.by_file.find(f);
  if (it == h.by_file.end()) return v;
  std::vector<const FileOp*> reads;
  for (auto idx : it->second) {
    const FileOp& op = h.file_ops[idx];
    if (op.op == "fm_read" && op.status.empty()) reads.push_back(&op);
  }
  for (const FileOp* r1 : reads) {
    for (const FileOp* r2 : reads) {
      if (r1 == r2 || r1->respond_seq >= r2->invoke_seq) continue;
      for (const auto& entry : r1->chain) {
        const ChainRecord* found = nullptr;
        for (const auto& later : r2->chain) {
          if (later.id == entry.id) {
            found = &later;
            break;
          }
        }
        if (!found || tag_less(found->tag, entry.tag)) {
          v.ok = false;
          v.violated_property = "read-monotonicity";
          v.detail = "block " + to_string(entry.id) + " at " + to_string(entry.tag) +
                     (found ? " regressed to " + to_string(found->tag)
                            : " missing from the later read");
          v.counterexample = {h.events[r1->inv_event], h.events[r1->res_event],
                              h.events[r2->inv_event], h.events[r2->res_event]};
          return v;
        }
      }
    }
  }
  return v;
}

// Precedence projected through file-level operations: block actions of one
// file operation precede those of another only when the file operations do
// not overlap; within one file operation, program order applies.
std::vector<std::vector<bool>> file_projected_precedence(
    const ParsedHistory& h, const std::vector<const BlockOp*>& ops) {
  std::vector<std::vector<bool>> p(ops.size(), std::vector<bool>(ops.size(), false));
  auto interval = [&](const BlockOp* op) -> std::pair<std::uint64_t, std::uint64_t> {
    if (op->parent != SIZE_MAX) {
      const FileOp& f = h.file_ops[op->parent];
      return {f.invoke_seq, f.respond_seq};
    }
    return {op->invoke_seq, op->respond_seq};
  };
  for (std::size_t a = 0; a < ops.size(); ++a) {
    for (std::size_t b = 0; b < ops.size(); ++b) {
      if (a == b) continue;
      if (ops[a]->parent != SIZE_MAX && ops[a]->parent == ops[b]->parent) {
        p[a][b] = ops[a]->respond_seq < ops[b]->invoke_seq;
      } else {
        p[a][b] = interval(ops[a]).second < interval(ops[b]).first;
      }
    }
  }
  return p;
}

}  // namespace

Verdict check_fragmented(const ParsedHistory& h, const FileId& f, std::size_t cap) {
  Verdict v = check_chains(h, f);
  if (!v.ok) return v;
  v = check_monotonic(h, f);
  if (!v.ok) return v;

  for (const auto& [block, indices] : h.by_block) {
    if (block.fid != f) continue;
    if (indices.size() > cap) {
      throw ScaleExceeded("block " + to_string(block) + " has " +
                          std::to_string(indices.size()) + " operations");
    }
    std::vector<const BlockOp*> ops;
    for (auto idx : indices) ops.push_back(&h.block_ops[idx]);
    auto witness = serialize_ops(ops, file_projected_precedence(h, ops));
    if (!witness) {
      v.ok = false;
      v.violated_property = "fragmented-linearizability";
      v.detail = "no per-block serialization for " + to_string(block) +
                 " respects file-level precedence";
      auto minimal = shrink_unserializable(
          ops, [&](const std::vector<const BlockOp*>& subset) {
            return file_projected_precedence(h, subset);
          });
      v.counterexample = events_of(h, minimal);
      return v;
    }
  }
  return v;
}

namespace {

// Whole-object sequential state: the data-block sequence (genesis
// excluded), with per-block content digests.
struct WholeState {
  bool exists = false;
  bool deleted = false;
  std::vector<std::pair<BlockId, std::string>> blocks;

  std::string render() const {
    std::string s = exists ? (deleted ? "D" : "E") : "-";
    for (const auto& [id, d] : blocks) s += ";" + to_string(id) + "@" + d;
    return s;
  }
};

bool whole_valid(const FileOp& op, const FileId& f, const WholeState& s, WholeState& out) {
  out = s;
  if (op.op == "fm_create") {
    if (s.exists) return false;
    out.exists = true;
    return true;
  }
  if (!s.exists) return false;
  if (op.op == "fm_read") {
    if (op.status == "deleted") return s.deleted;
    if (s.deleted) return false;
    if (op.chain.size() != s.blocks.size() + 1) return false;
    for (std::size_t i = 0; i + 1 < op.chain.size(); ++i) {
      if (op.chain[i + 1].id != s.blocks[i].first ||
          op.chain[i + 1].data_digest != s.blocks[i].second) {
        return false;
      }
    }
    return true;
  }
  if (op.op == "fm_update") {
    if (s.deleted) return false;
    if (op.status != "chg") return true;  // a lost update leaves no trace
    if (op.created.size() + 1 != op.part_digests.size()) return false;
    std::vector<std::pair<BlockId, std::string>> inserted;
    for (std::size_t i = 0; i < op.created.size(); ++i) {
      inserted.emplace_back(op.created[i], op.part_digests[i + 1]);
    }
    if (is_genesis(op.target) && op.target.fid == f) {
      out.blocks.insert(out.blocks.begin(), inserted.begin(), inserted.end());
      return true;
    }
    for (std::size_t i = 0; i < out.blocks.size(); ++i) {
      if (out.blocks[i].first == op.target) {
        out.blocks[i].second = op.part_digests[0];
        out.blocks.insert(out.blocks.begin() + i + 1, inserted.begin(), inserted.end());
        return true;
      }
    }
    return false;
  }
  if (op.op == "fm_delete") {
    if (s.deleted) return false;
    out.deleted = true;
    return true;
  }
  return true;  // fm_list constrains nothing here
}

}  // namespace

Verdict check_whole_object(const ParsedHistory& h, const FileId& f, std::size_t cap) {
  Verdict v;
  auto it = h.by_file.find(f);
  if (it == h.by_file.end()) return v;
  std::vector<const FileOp*> ops;
  for (auto idx : it->second) ops.push_back(&h.file_ops[idx]);
  if (ops.size() > cap) {
    throw ScaleExceeded("file " + to_string(f) + " has " + std::to_string(ops.size()) +
                        " operations");
  }

  const std::size_t n = ops.size();
  std::vector<std::vector<bool>> precedes(n, std::vector<bool>(n, false));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b) precedes[a][b] = ops[a]->respond_seq < ops[b]->invoke_seq;
    }
  }

  std::unordered_set<std::string> visited;
  SerializationWitness witness;
  std::vector<std::size_t> order;
  std::vector<std::string> states;
  std::function<bool(std::uint32_t, const WholeState&)> dfs = [&](std::uint32_t done,
                                                                  const WholeState& state) {
    if (done == (std::uint32_t{1} << n) - 1) {
      witness.order = order;
      witness.state_trace = states;
      return true;
    }
    std::string key = std::to_string(done) + "#" + state.render();
    if (visited.count(key)) return false;
    for (std::size_t i = 0; i < n; ++i) {
      if (done & (std::uint32_t{1} << i)) continue;
      bool minimal = true;
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && !(done & (std::uint32_t{1} << j)) && precedes[j][i]) {
          minimal = false;
          break;
        }
      }
      if (!minimal) continue;
      WholeState next;
      if (!whole_valid(*ops[i], f, state, next)) continue;
      order.push_back(i);
      states.push_back(next.render());
      if (dfs(done | (std::uint32_t{1} << i), next)) return true;
      order.pop_back();
      states.pop_back();
    }
    visited.insert(std::move(key));
    return false;
  };

  if (dfs(0, WholeState{})) {
    v.witness = std::move(witness);
    return v;
  }
  v.ok = false;
  v.violated_property = "whole-object-linearizability";
  v.detail = "no serialization of the file-level operations on " + to_string(f) +
             " follows the sequential specification";
  for (const FileOp* op : ops) {
    v.counterexample.push_back(h.events[op->inv_event]);
    v.counterexample.push_back(h.events[op->res_event]);
  }
  std::sort(v.counterexample.begin(), v.counterexample.end(),
            [](const Event& a, const Event& b) { return a.seq < b.seq; });
  return v;
}

Verdict check_all(const ParsedHistory& h, std::size_t cap) {
  Verdict v;
  std::size_t lin_checked = 0, lin_skipped = 0;
  for (const auto& [block, indices] : h.by_block) {
    v = check_coverability(h, block);
    if (!v.ok) return v;
    if (indices.size() <= cap) {
      v = check_block_linearizable(h, block, cap);
      if (!v.ok) return v;
      ++lin_checked;
    } else {
      ++lin_skipped;  // brute force does not scale past the cap
    }
  }
  for (const auto& [fid, indices] : h.by_file) {
    v = check_chains(h, fid);
    if (!v.ok) return v;
    v = check_monotonic(h, fid);
    if (!v.ok) return v;
  }
  v.detail = std::to_string(h.by_block.size()) + " blocks (" + std::to_string(lin_checked) +
             " serialized, " + std::to_string(lin_skipped) + " over the brute-force cap), " +
             std::to_string(h.by_file.size()) + " files checked";
  return v;
}

std::string render_verdict(const Verdict& v) {
  std::ostringstream os;
  if (v.ok) {
    os << "OK";
    if (!v.detail.empty()) os << " " << v.detail;
    os << "\n";
    return os.str();
  }
  os << "FAIL " << v.violated_property << "\n";
  if (!v.detail.empty()) os << "# " << v.detail << "\n";
  for (const auto& e : v.counterexample) os << render_event(e) << "\n";
  return os.str();
}

}  // namespace fragstore
