#pragma once

#include <stdexcept>
#include <string>

namespace fragstore {

struct QuorumUnreachable : std::runtime_error {
  explicit QuorumUnreachable(const std::string& what) : std::runtime_error(what) {}
};

struct BadParams : std::runtime_error {
  explicit BadParams(const std::string& what) : std::runtime_error(what) {}
};

struct BadConfig : std::runtime_error {
  explicit BadConfig(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownFile : std::runtime_error {
  explicit UnknownFile(const std::string& what) : std::runtime_error(what) {}
};

struct DuplicatePath : std::runtime_error {
  explicit DuplicatePath(const std::string& what) : std::runtime_error(what) {}
};

struct FileDeleted : std::runtime_error {
  explicit FileDeleted(const std::string& what) : std::runtime_error(what) {}
};

// A followed chain link resolved to a block that was never written.
// This is a protocol bug, never a legal runtime state.
struct BrokenChain : std::runtime_error {
  explicit BrokenChain(const std::string& what) : std::runtime_error(what) {}
};

struct InvariantViolation : std::logic_error {
  explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

struct HistoryIncomplete : std::runtime_error {
  explicit HistoryIncomplete(const std::string& what) : std::runtime_error(what) {}
};

struct ScaleExceeded : std::runtime_error {
  explicit ScaleExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fragstore
