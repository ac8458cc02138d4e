#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fragstore/checker.hpp"
#include "fragstore/world.hpp"

namespace fragstore {

enum class Arm { Fragmented, WholeFile };
enum class WorkloadKind { RandomSplice, DisjointBlocks };

struct ScenarioConfig {
  std::size_t servers = 3;
  std::size_t writers = 2;
  std::size_t readers = 2;
  std::size_t ops_per_client = 20;
  SimTime r_int = 100;  // a read starts a uniform delay in [1, r_int] after the previous op
  SimTime w_int = 100;
  std::size_t initial_file_size = 64 * 1024;
  ChunkParams chunk;
  std::uint64_t seed = 1;
  Arm arm = Arm::Fragmented;
  WorkloadKind workload = WorkloadKind::RandomSplice;
  SimTime min_delay = 1;
  SimTime max_delay = 20;
  std::size_t max_splice = 512;  // random-splice edit size bound
};

void validate(const ScenarioConfig& cfg);  // throws BadConfig

struct OpSample {
  enum class Kind { Read, Update };
  Kind kind = Kind::Read;
  std::uint64_t comm = 0;     // simulated time units from invoke to respond
  std::uint64_t comp = 0;     // deterministic compute units (bytes chunked + hashed)
  std::uint64_t payload = 0;  // content bytes this operation moved
  bool success = true;        // updates: every block write prevailed
};

struct Metrics {
  std::vector<OpSample> samples;

  std::size_t count(OpSample::Kind k) const;
  // Fraction of updates whose block writes all prevailed; empty when the
  // run had no updates.
  std::optional<double> update_success_ratio() const;
  double mean_latency(OpSample::Kind k) const;  // comm + comp
  std::uint64_t total_payload(OpSample::Kind k) const;
  std::string render_tsv() const;
};

struct RunResult {
  Metrics metrics;
  std::string history;  // rendered event log
  std::string trace;    // simulator delivery trace
  Verdict verdict;      // consistency checks run over the history
};

// Runs one scenario on the simulator: writers read-edit-update in a loop,
// readers read, every client scheduling its next operation after a uniform
// random delay. The emitted history is fed through the checker.
RunResult run_scenario(const ScenarioConfig& cfg);

// Mean and standard error of series samples, rendered "x value stderr".
struct SeriesPoint {
  double x = 0;
  double mean = 0;
  double stderr_ = 0;
};

SeriesPoint summarize(double x, const std::vector<double>& samples);
std::string render_series(const std::vector<SeriesPoint>& points);

}  // namespace fragstore
