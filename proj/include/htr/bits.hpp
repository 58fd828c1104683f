#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "htr/error.hpp"

namespace htr {

// Packed bit string. Bit 0 is the most significant bit of byte 0; the final
// byte is zero-padded. This is the wire layout of every payload file.
class Bits {
public:
  Bits() = default;
  explicit Bits(std::size_t bit_count)
      : bytes_((bit_count + 7) / 8, 0), size_(bit_count) {}

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool get(std::size_t i) const {
    return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u;
  }

  void set(std::size_t i, bool v) {
    const std::uint8_t mask = static_cast<std::uint8_t>(1u << (7 - (i & 7)));
    if (v)
      bytes_[i >> 3] |= mask;
    else
      bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
  }

  void push_back(bool v) {
    if (size_ % 8 == 0) bytes_.push_back(0);
    ++size_;
    set(size_ - 1, v);
  }

  // Big-endian value of bits [pos, pos + width).
  std::uint32_t read_block(std::size_t pos, std::size_t width) const {
    std::uint32_t value = 0;
    for (std::size_t k = 0; k < width; ++k)
      value = (value << 1) | static_cast<std::uint32_t>(get(pos + k));
    return value;
  }

  void write_block(std::size_t pos, std::size_t width, std::uint32_t value) {
    for (std::size_t k = 0; k < width; ++k)
      set(pos + k, (value >> (width - 1 - k)) & 1u);
  }

  std::string to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes_.size() * 2);
    for (std::uint8_t b : bytes_) {
      out.push_back(digits[b >> 4]);
      out.push_back(digits[b & 0xF]);
    }
    return out;
  }

  static Bits from_hex(const std::string& hex, std::size_t bit_len) {
    if (hex.size() != ((bit_len + 7) / 8) * 2)
      throw HtrError(Err::ParseError, "hex length does not match bit_len");
    Bits out(bit_len);
    for (std::size_t i = 0; i < hex.size(); ++i) {
      const int nib = hex_nibble(hex[i]);
      if (nib < 0) throw HtrError(Err::ParseError, "invalid hex digit");
      out.bytes_[i / 2] |= static_cast<std::uint8_t>(
          (i % 2 == 0) ? nib << 4 : nib);
    }
    // Padding bits past bit_len must be zero.
    for (std::size_t i = bit_len; i < out.bytes_.size() * 8; ++i)
      if ((out.bytes_[i >> 3] >> (7 - (i & 7))) & 1u)
        throw HtrError(Err::ParseError, "nonzero padding bits");
    return out;
  }

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

  bool operator==(const Bits&) const = default;

private:
  static int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  }

  std::vector<std::uint8_t> bytes_;
  std::size_t size_ = 0;
};

}  // namespace htr
