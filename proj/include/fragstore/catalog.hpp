#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fragstore/core.hpp"

namespace fragstore {

// Metadata stored in a file's genesis block: length-prefixed path and file
// id, plus the deleted flag. Counts toward the block-size bound.
struct GenesisMeta {
  std::string path;
  FileId fid;
  bool deleted = false;

  bool operator==(const GenesisMeta&) const = default;
};

std::string encode_genesis_meta(const GenesisMeta& m);
std::optional<GenesisMeta> decode_genesis_meta(std::string_view data);

// One live-file record in a server's catalog reply.
struct CatalogEntry {
  std::string path;
  FileId fid;
  BlockId genesis;
  bool deleted = false;
  Tag tag;
};

std::string encode_catalog(const std::vector<CatalogEntry>& entries);
std::optional<std::vector<CatalogEntry>> decode_catalog(std::string_view data);

}  // namespace fragstore
