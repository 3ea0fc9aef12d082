#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bitsmm/errors.hpp"

namespace bitsmm {

// Widest operand the word type encodes. All register files are sized from a
// runtime b_max <= kMaxWordWidth, so raising this one constant scales the
// whole simulator.
inline constexpr int kMaxWordWidth = 16;

enum class BitOrder { lsb_first, msb_first };

// A two's-complement integer with an explicit bit width. The unit of every
// operand in the simulator. Width 1 is still two's complement: bit 1 means -1.
class SignedWord {
 public:
  SignedWord() = default;  // zero at width 1

  SignedWord(std::int32_t value, int width) : value_(value), width_(width) {
    if (width < 1 || width > kMaxWordWidth)
      throw ConfigError("word width " + std::to_string(width) +
                        " outside [1, " + std::to_string(kMaxWordWidth) + "]");
    if (value < min_value(width) || value > max_value(width))
      throw ConfigError("value " + std::to_string(value) +
                        " not representable at width " + std::to_string(width));
  }

  std::int32_t value() const { return value_; }
  int width() const { return width_; }

  // Two's-complement encoding in the low `width` bits.
  std::uint32_t pattern() const {
    return static_cast<std::uint32_t>(value_) & width_mask(width_);
  }

  // Bit i of the encoding, i in [0, width). bit(width-1) is the sign bit.
  int bit(int i) const { return static_cast<int>((pattern() >> i) & 1u); }

  // Same value, sign-extended to a wider encoding.
  SignedWord extended(int new_width) const {
    if (new_width < width_)
      throw ConfigError("cannot narrow word from width " +
                        std::to_string(width_) + " to " +
                        std::to_string(new_width));
    return SignedWord(value_, new_width);
  }

  static SignedWord from_pattern(std::uint32_t bits, int width) {
    if (width < 1 || width > kMaxWordWidth)
      throw ConfigError("word width " + std::to_string(width) +
                        " outside [1, " + std::to_string(kMaxWordWidth) + "]");
    bits &= width_mask(width);
    std::int32_t v = static_cast<std::int32_t>(bits);
    if (bits >> (width - 1)) v -= std::int32_t{1} << width;
    return SignedWord(v, width);
  }

  static std::int32_t min_value(int width) {
    return -(std::int32_t{1} << (width - 1));
  }
  static std::int32_t max_value(int width) {
    return (std::int32_t{1} << (width - 1)) - 1;
  }
  static std::uint32_t width_mask(int width) {
    return (width >= 32) ? ~0u : ((1u << width) - 1u);
  }

  friend bool operator==(const SignedWord& a, const SignedWord& b) {
    return a.value_ == b.value_ && a.width_ == b.width_;
  }

 private:
  std::int32_t value_ = 0;
  int width_ = 1;
};

// Serialize the two's-complement encoding in the requested order.
inline std::vector<std::uint8_t> to_bits(const SignedWord& word,
                                         BitOrder order) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(word.width()));
  for (int i = 0; i < word.width(); ++i) {
    const int pos = (order == BitOrder::lsb_first) ? i : word.width() - 1 - i;
    bits[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(word.bit(pos));
  }
  return bits;
}

// Inverse of to_bits; the sequence length is the word width.
inline SignedWord word_from_bits(const std::vector<std::uint8_t>& bits,
                                 BitOrder order) {
  if (bits.empty()) throw ConfigError("empty bit sequence");
  const int width = static_cast<int>(bits.size());
  std::uint32_t pattern = 0;
  for (int i = 0; i < width; ++i) {
    const int pos = (order == BitOrder::lsb_first) ? i : width - 1 - i;
    if (bits[static_cast<std::size_t>(i)] > 1)
      throw ConfigError("bit values must be 0 or 1");
    pattern |= static_cast<std::uint32_t>(bits[static_cast<std::size_t>(i)])
               << pos;
  }
  return SignedWord::from_pattern(pattern, width);
}

}  // namespace bitsmm
