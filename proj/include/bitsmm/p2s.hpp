#pragma once

#include <cstdint>

#include "bitsmm/errors.hpp"
#include "bitsmm/signed_word.hpp"

namespace bitsmm {

// Parallel-to-serial converter. Stores one word and shifts it out over
// exactly `width` cycles. Vertical (multiplicand) units emit the MSb first
// and shift left; horizontal (multiplier) units emit the LSb first and shift
// right.
struct P2SState {
  std::uint32_t hold_reg = 0;
  int remaining = 0;
  int width = 0;
  BitOrder direction = BitOrder::msb_first;
  bool valid = false;

  explicit P2SState(BitOrder dir = BitOrder::msb_first) : direction(dir) {}

  bool empty() const { return remaining == 0; }

  void load(const SignedWord& word) {
    if (remaining != 0)
      throw ProtocolError("p2s load while a word is still draining");
    hold_reg = word.pattern();
    width = word.width();
    remaining = width;
    valid = true;
  }

  int step() {
    if (remaining == 0) throw ProtocolError("p2s step with no value loaded");
    int bit;
    if (direction == BitOrder::msb_first) {
      bit = static_cast<int>((hold_reg >> (width - 1)) & 1u);
      hold_reg = (hold_reg << 1) & SignedWord::width_mask(width);
    } else {
      bit = static_cast<int>(hold_reg & 1u);
      hold_reg >>= 1;
    }
    --remaining;
    if (remaining == 0) valid = false;
    return bit;
  }
};

}  // namespace bitsmm
