#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fragstore {

// Content-defined chunking parameters. `max_size` doubles as the block
// size bound of the store; `avg_size` must be a power of two because the
// boundary test masks the fingerprint to log2(avg_size) bits.
struct ChunkParams {
  std::size_t min_size = 2 * 1024;
  std::size_t avg_size = 8 * 1024;
  std::size_t max_size = 64 * 1024;
  std::size_t window = 48;
  // Irreducible degree-53 polynomial; the classic rsync-family constant.
  std::uint64_t polynomial = 0x3DA3358B4DC173ULL;
};

void validate(const ChunkParams& p);

struct Segment {
  std::string data;
  std::string hash;  // hex sha256 of data
};

// Splits `data` at positions where the rolling fingerprint of the trailing
// window hits the sentinel, at least min_size and at most max_size apart.
// Segment contents always concatenate back to the input; empty input maps
// to a single empty segment.
std::vector<Segment> chunk(std::string_view data, const ChunkParams& p);

// Rolling Rabin fingerprint over a fixed-width byte window, reduced modulo
// the configured polynomial. Exposed for tests probing boundary placement.
class RabinWindow {
 public:
  RabinWindow(std::uint64_t polynomial, std::size_t width);

  void reset();
  void push(unsigned char byte);
  std::uint64_t fingerprint() const { return fp_; }

 private:
  std::uint64_t append(std::uint64_t fp, unsigned char byte) const;

  std::uint64_t poly_;
  std::size_t width_;
  std::uint64_t push_table_[256];
  std::uint64_t pop_table_[256];
  std::vector<unsigned char> ring_;
  std::size_t filled_ = 0;
  std::size_t pos_ = 0;
  std::uint64_t fp_ = 0;
};

}  // namespace fragstore
