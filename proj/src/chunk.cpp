#include "fragstore/chunk.hpp"

#include "fragstore/digest.hpp"
#include "fragstore/errors.hpp"

namespace fragstore {

namespace {

constexpr int kDegree = 53;
constexpr std::uint64_t kFpMask = (std::uint64_t{1} << kDegree) - 1;

// Reduces an arbitrary 64-bit polynomial modulo a degree-53 polynomial.
std::uint64_t polymod(std::uint64_t f, std::uint64_t poly) {
  for (int i = 63; i >= kDegree; --i) {
    if ((f >> i) & 1) f ^= poly << (i - kDegree);
  }
  return f;
}

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace

void validate(const ChunkParams& p) {
  if (p.min_size > p.avg_size || p.avg_size > p.max_size) {
    throw BadParams("chunk sizes must satisfy min <= avg <= max");
  }
  if (!is_power_of_two(p.avg_size)) {
    throw BadParams("average chunk size must be a power of two");
  }
  if (p.window == 0) throw BadParams("window must be positive");
  if ((p.polynomial >> kDegree) != 1) {
    throw BadParams("polynomial must have degree 53");
  }
}

RabinWindow::RabinWindow(std::uint64_t polynomial, std::size_t width)
    : poly_(polynomial), width_(width), ring_(width, 0) {
  for (unsigned t = 0; t < 256; ++t) {
    push_table_[t] = polymod(static_cast<std::uint64_t>(t) << kDegree, poly_);
    // Contribution of a byte that is `width` positions old, i.e. about to
    // leave the window: t * x^(8*width) mod P.
    std::uint64_t f = t;
    for (std::size_t i = 0; i + 1 < width_; ++i) f = append(f, 0);
    pop_table_[t] = f;
  }
}

std::uint64_t RabinWindow::append(std::uint64_t fp, unsigned char byte) const {
  std::uint64_t top = fp >> (kDegree - 8);
  return (((fp << 8) | byte) & kFpMask) ^ push_table_[top];
}

void RabinWindow::reset() {
  filled_ = 0;
  pos_ = 0;
  fp_ = 0;
}

void RabinWindow::push(unsigned char byte) {
  if (filled_ == width_) {
    fp_ ^= pop_table_[ring_[pos_]];
  } else {
    ++filled_;
  }
  ring_[pos_] = byte;
  pos_ = (pos_ + 1) % width_;
  fp_ = append(fp_, byte);
}

std::vector<Segment> chunk(std::string_view data, const ChunkParams& p) {
  validate(p);
  std::vector<Segment> out;
  if (data.empty()) {
    out.push_back(Segment{"", hex_digest("")});
    return out;
  }

  const std::uint64_t mask = p.avg_size - 1;
  const std::uint64_t sentinel = p.avg_size - 1;
  RabinWindow window(p.polynomial, p.window);

  std::size_t start = 0;
  std::size_t len = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    window.push(static_cast<unsigned char>(data[i]));
    ++len;
    bool cut = false;
    if (len >= p.min_size && (window.fingerprint() & mask) == sentinel) cut = true;
    if (len >= p.max_size) cut = true;
    if (cut) {
      std::string piece(data.substr(start, len));
      out.push_back(Segment{piece, hex_digest(piece)});
      start = i + 1;
      len = 0;
      window.reset();  // each chunk's boundary depends only on its own bytes
    }
  }
  if (len > 0) {
    std::string piece(data.substr(start, len));
    out.push_back(Segment{piece, hex_digest(piece)});
  }
  return out;
}

}  // namespace fragstore
