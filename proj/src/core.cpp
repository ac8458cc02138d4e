#include "fragstore/core.hpp"

#include <charconv>

namespace fragstore {

namespace {

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string to_string(ClientId c) { return "c" + std::to_string(c.id); }

std::optional<ClientId> parse_client_id(std::string_view s) {
  if (s.size() < 2 || s[0] != 'c') return std::nullopt;
  auto v = parse_u64(s.substr(1));
  if (!v || *v > ~std::uint32_t{0}) return std::nullopt;
  return ClientId{static_cast<std::uint32_t>(*v)};
}

std::string to_string(const Tag& t) {
  std::string w = t.wid ? to_string(*t.wid) : "nil";
  return "(" + std::to_string(t.ts) + "," + w + ")";
}

std::optional<Tag> parse_tag(std::string_view s) {
  if (s.size() < 5 || s.front() != '(' || s.back() != ')') return std::nullopt;
  s.remove_prefix(1);
  s.remove_suffix(1);
  auto comma = s.find(',');
  if (comma == std::string_view::npos) return std::nullopt;
  auto ts = parse_u64(s.substr(0, comma));
  if (!ts) return std::nullopt;
  auto w = s.substr(comma + 1);
  Tag t{*ts, std::nullopt};
  if (w != "nil") {
    auto c = parse_client_id(w);
    if (!c) return std::nullopt;
    t.wid = *c;
  }
  return t;
}

std::string to_string(const FileId& f) {
  return to_string(f.cfid) + "_" + std::to_string(f.cfseq);
}

std::optional<FileId> parse_file_id(std::string_view s) {
  auto us = s.find('_');
  if (us == std::string_view::npos) return std::nullopt;
  auto c = parse_client_id(s.substr(0, us));
  auto seq = parse_u64(s.substr(us + 1));
  if (!c || !seq) return std::nullopt;
  return FileId{*c, *seq};
}

std::string to_string(const BlockId& b) {
  return to_string(b.fid) + "-" + to_string(b.cid) + "_" + std::to_string(b.cseq);
}

std::optional<BlockId> parse_block_id(std::string_view s) {
  auto dash = s.find('-');
  if (dash == std::string_view::npos) return std::nullopt;
  auto fid = parse_file_id(s.substr(0, dash));
  auto rest = s.substr(dash + 1);
  auto us = rest.find('_');
  if (!fid || us == std::string_view::npos) return std::nullopt;
  auto c = parse_client_id(rest.substr(0, us));
  auto seq = parse_u64(rest.substr(us + 1));
  if (!c || !seq) return std::nullopt;
  return BlockId{*fid, *c, *seq};
}

bool link_consistent(const FileView& v) {
  for (std::size_t i = 0; i < v.chain.size(); ++i) {
    const auto& next = v.chain[i].value.next;
    if (i + 1 < v.chain.size()) {
      if (!next || *next != v.chain[i + 1].id) return false;
    } else {
      if (next) return false;
    }
  }
  return true;
}

}  // namespace fragstore
