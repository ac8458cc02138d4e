#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fragstore/core.hpp"

namespace fragstore {

enum class Action { Invoke, Respond };

// One recorded action. `seq` is a global monotone index assigned at append
// time; on the simulator backend all appends are serialized, so seq order
// is the real-time order of actions.
struct Event {
  std::uint64_t seq = 0;
  ClientId process;
  std::string op;       // cvr_read | cvr_write | cvr_tomb | fm_read | fm_update | fm_create | fm_delete | fm_list
  Action action = Action::Invoke;
  std::string object;   // rendered FileId or BlockId
  std::optional<Tag> tag;
  std::string status;   // chg | unchg | empty
  std::string payload;  // op-specific; value digests, chain encodings
};

std::string render_event(const Event& e);
std::optional<Event> parse_event(std::string_view line);

class HistoryLog {
 public:
  std::uint64_t invoke(ClientId p, std::string op, std::string object,
                       std::optional<Tag> tag = std::nullopt, std::string payload = {});
  std::uint64_t respond(ClientId p, std::string op, std::string object,
                        std::optional<Tag> tag = std::nullopt, std::string status = {},
                        std::string payload = {});

  const std::vector<Event>& events() const { return events_; }
  void clear() { events_.clear(); next_seq_ = 1; }

  std::string render() const;
  static std::vector<Event> parse(std::string_view text);

 private:
  std::uint64_t append(Event e);
  std::vector<Event> events_;
  std::uint64_t next_seq_ = 1;
};

// Chain encoding carried on fm_read responses, one field group per entry:
// "<block>@<tag>@<data-digest>@<next|nil>", entries joined by ';'.
struct ChainRecord {
  BlockId id;
  Tag tag;
  std::string data_digest;
  std::optional<BlockId> next;
};

std::string render_chain(const std::vector<ChainEntry>& chain);
std::optional<std::vector<ChainRecord>> parse_chain(std::string_view s);

}  // namespace fragstore
