#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "fragstore/core.hpp"

namespace fragstore {

using Sha256 = std::array<unsigned char, 32>;

Sha256 sha256(std::string_view data);

// Full 64-char hex digest of a byte string.
std::string hex_digest(std::string_view data);

// Short (16 hex chars) digest used in hash-sequence diffs and history
// records, where collisions are negligible at this scale.
std::string short_digest(std::string_view data);

// Digest of a block value, covering both the link and the data so two
// values differing only in the chain pointer are distinguishable.
std::string value_digest(const BlockValue& v);

// Digest of the never-written block value.
const std::string& empty_value_digest();

}  // namespace fragstore
