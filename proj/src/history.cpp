#include "fragstore/history.hpp"

#include <charconv>
#include <sstream>

#include "fragstore/digest.hpp"
#include "fragstore/errors.hpp"

namespace fragstore {

namespace {

const char* kEmpty = "-";

std::string field(const std::string& s) { return s.empty() ? kEmpty : s; }

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string render_event(const Event& e) {
  std::ostringstream os;
  os << e.seq << '\t' << to_string(e.process) << '\t' << e.op << '\t'
     << (e.action == Action::Invoke ? "inv" : "res") << '\t' << field(e.object) << '\t'
     << (e.tag ? to_string(*e.tag) : kEmpty) << '\t' << field(e.status) << '\t'
     << field(e.payload);
  return os.str();
}

std::optional<Event> parse_event(std::string_view line) {
  auto f = split(line, '\t');
  if (f.size() != 8) return std::nullopt;
  Event e;
  {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), v);
    if (ec != std::errc{} || p != f[0].data() + f[0].size()) return std::nullopt;
    e.seq = v;
  }
  auto proc = parse_client_id(f[1]);
  if (!proc) return std::nullopt;
  e.process = *proc;
  e.op = std::string(f[2]);
  if (f[3] == "inv") {
    e.action = Action::Invoke;
  } else if (f[3] == "res") {
    e.action = Action::Respond;
  } else {
    return std::nullopt;
  }
  if (f[4] != kEmpty) e.object = std::string(f[4]);
  if (f[5] != kEmpty) {
    auto t = parse_tag(f[5]);
    if (!t) return std::nullopt;
    e.tag = *t;
  }
  if (f[6] != kEmpty) e.status = std::string(f[6]);
  if (f[7] != kEmpty) e.payload = std::string(f[7]);
  return e;
}

std::uint64_t HistoryLog::append(Event e) {
  e.seq = next_seq_++;
  events_.push_back(std::move(e));
  return events_.back().seq;
}

std::uint64_t HistoryLog::invoke(ClientId p, std::string op, std::string object,
                                 std::optional<Tag> tag, std::string payload) {
  return append(Event{0, p, std::move(op), Action::Invoke, std::move(object), tag, {},
                      std::move(payload)});
}

std::uint64_t HistoryLog::respond(ClientId p, std::string op, std::string object,
                                  std::optional<Tag> tag, std::string status,
                                  std::string payload) {
  return append(Event{0, p, std::move(op), Action::Respond, std::move(object), tag,
                      std::move(status), std::move(payload)});
}

std::string HistoryLog::render() const {
  std::string out;
  for (const auto& e : events_) {
    out += render_event(e);
    out.push_back('\n');
  }
  return out;
}

std::vector<Event> HistoryLog::parse(std::string_view text) {
  std::vector<Event> out;
  for (auto line : split(text, '\n')) {
    if (line.empty()) continue;
    auto e = parse_event(line);
    if (!e) throw HistoryIncomplete("unparseable history line: " + std::string(line));
    out.push_back(*e);
  }
  return out;
}

std::string render_chain(const std::vector<ChainEntry>& chain) {
  std::string out;
  for (const auto& entry : chain) {
    if (!out.empty()) out.push_back(';');
    out += to_string(entry.id);
    out.push_back('@');
    out += to_string(entry.tag);
    out.push_back('@');
    out += short_digest(entry.value.data);
    out.push_back('@');
    out += entry.value.next ? to_string(*entry.value.next) : "nil";
  }
  return out;
}

std::optional<std::vector<ChainRecord>> parse_chain(std::string_view s) {
  std::vector<ChainRecord> out;
  if (s.empty()) return out;
  for (auto part : split(s, ';')) {
    auto f = split(part, '@');
    if (f.size() != 4) return std::nullopt;
    ChainRecord r;
    auto id = parse_block_id(f[0]);
    auto tag = parse_tag(f[1]);
    if (!id || !tag) return std::nullopt;
    r.id = *id;
    r.tag = *tag;
    r.data_digest = std::string(f[2]);
    if (f[3] != "nil") {
      auto n = parse_block_id(f[3]);
      if (!n) return std::nullopt;
      r.next = *n;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace fragstore
