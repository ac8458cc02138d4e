#include "fragstore/digest.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace fragstore {

Sha256 sha256(std::string_view data) {
  Sha256 out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size()) {
    throw std::runtime_error("sha256 failed");
  }
  return out;
}

namespace {

std::string to_hex(const unsigned char* p, std::size_t n) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    s.push_back(digits[p[i] >> 4]);
    s.push_back(digits[p[i] & 0xf]);
  }
  return s;
}

}  // namespace

std::string hex_digest(std::string_view data) {
  auto h = sha256(data);
  return to_hex(h.data(), h.size());
}

std::string short_digest(std::string_view data) {
  auto h = sha256(data);
  return to_hex(h.data(), 8);
}

std::string value_digest(const BlockValue& v) {
  std::string material = v.next ? to_string(*v.next) : "nil";
  material.push_back('\0');
  material += v.data;
  return short_digest(material);
}

const std::string& empty_value_digest() {
  static const std::string d = value_digest(BlockValue{});
  return d;
}

}  // namespace fragstore
