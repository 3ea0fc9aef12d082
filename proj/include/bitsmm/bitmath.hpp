#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bitsmm/errors.hpp"
#include "bitsmm/signed_word.hpp"

// Reference (non-cycle-accurate) arithmetic: the shift-add and Booth
// multipliers every simulation is checked against, plus the cycle formula of
// the bitwise-product (BISMO-style) serial method used as a comparator.

namespace bitsmm {

// Ground truth for every multiplier and MAC in the project: plain integer
// multiplication, kept deliberately independent of any bit-level path.
inline std::int64_t oracle_product(const SignedWord& a, const SignedWord& b) {
  return static_cast<std::int64_t>(a.value()) *
         static_cast<std::int64_t>(b.value());
}

// Unsigned shift-add multiplication over two equal-length bit sequences
// (LSb first). Each multiplier bit ANDs the multiplicand shifted by the bit
// position.
inline std::uint64_t unsigned_shift_add_multiply(
    const std::vector<std::uint8_t>& a_bits,
    const std::vector<std::uint8_t>& b_bits) {
  if (a_bits.size() != b_bits.size() || a_bits.empty())
    throw ConfigError("operands must be non-empty bit sequences of one length");
  std::uint64_t a = 0;
  for (std::size_t i = 0; i < a_bits.size(); ++i)
    a |= static_cast<std::uint64_t>(a_bits[i] & 1u) << i;
  std::uint64_t product = 0;
  for (std::size_t i = 0; i < b_bits.size(); ++i)
    if (b_bits[i] & 1u) product += a << i;
  return product;
}

// Standard binary multiplication with correction: unsigned shift-add over the
// multiplier bits below the sign position, then the multiplicand is
// subtracted (instead of added) at the multiplier sign bit. Operands of
// unequal width are sign-extended to the wider one first.
inline std::int64_t sbmwc_multiply_reference(const SignedWord& a,
                                             const SignedWord& b) {
  const int w = std::max(a.width(), b.width());
  const SignedWord mc = a.extended(w);
  const SignedWord ml = b.extended(w);
  std::int64_t product = 0;
  for (int i = 0; i + 1 < w; ++i)
    if (ml.bit(i))
      product += static_cast<std::int64_t>(mc.value()) << i;
  if (ml.bit(w - 1))
    product -= static_cast<std::int64_t>(mc.value()) << (w - 1);
  return product;
}

// Booth 2-bit recoding. Pairs are (current, previous) scanned LSb first with
// an implicit previous bit of 0 before the first bit.
enum class BoothAction { NOP, ADD_M, SUB_M };

inline const char* to_string(BoothAction a) {
  switch (a) {
    case BoothAction::ADD_M: return "ADD";
    case BoothAction::SUB_M: return "SUB";
    default: return "NOP";
  }
}

inline BoothAction booth_recode(int curr_bit, int prev_bit) {
  curr_bit &= 1;
  prev_bit &= 1;
  if (curr_bit == prev_bit) return BoothAction::NOP;
  return curr_bit ? BoothAction::SUB_M : BoothAction::ADD_M;
}

// One step of the classic arithmetic-right-shift formulation: the action
// taken, the accumulator after the add/sub (width bits), and the combined
// accumulator:multiplier register after the shift (2*width bits).
struct BoothReferenceStep {
  BoothAction action = BoothAction::NOP;
  std::uint32_t acc_after_add = 0;
  std::uint32_t combined_after_shift = 0;
};

// Booth's algorithm in its classic form: an accumulator on top of the
// multiplier register, arithmetic right shift after every recode step. The
// working accumulator carries one guard bit so the transient add/subtract
// never overflows (width 1 needs it: 0 - (-1) = +1 has no 1-bit encoding);
// the trace exposes the width-bit view of the worked layout. The optional
// trace captures each step for inspection.
inline std::int64_t booth_multiply_reference(
    const SignedWord& a, const SignedWord& b,
    std::vector<BoothReferenceStep>* trace = nullptr) {
  const int w = std::max(a.width(), b.width());
  const SignedWord mc = a.extended(w);
  const SignedWord ml = b.extended(w);
  const std::uint64_t wmask = SignedWord::width_mask(w);
  const std::uint64_t amask = (std::uint64_t{1} << (w + 1)) - 1;
  // multiplicand sign-extended into the wider accumulator
  const std::uint64_t m_ext =
      (mc.pattern() | ((mc.value() < 0) ? (std::uint64_t{1} << w) : 0)) &
      amask;

  std::uint64_t acc = 0;          // (width+1)-bit accumulator
  std::uint64_t q = ml.pattern(); // multiplier register, shifted out LSb first
  int q_prev = 0;
  if (trace) trace->clear();

  for (int i = 0; i < w; ++i) {
    const BoothAction action = booth_recode(static_cast<int>(q & 1u), q_prev);
    if (action == BoothAction::ADD_M) acc = (acc + m_ext) & amask;
    if (action == BoothAction::SUB_M) acc = (acc - m_ext) & amask;
    // arithmetic right shift of the combined acc:q pair
    q_prev = static_cast<int>(q & 1u);
    const std::uint64_t acc_after_add = acc;
    q = ((q >> 1) | ((acc & 1u) << (w - 1))) & wmask;
    const std::uint64_t sign = (acc >> w) & 1u;
    acc = ((acc >> 1) | (sign << w)) & amask;
    if (trace)
      trace->push_back({action,
                        static_cast<std::uint32_t>(acc_after_add & wmask),
                        static_cast<std::uint32_t>(((acc << w) | q) &
                                                   ((wmask << w) | wmask))});
  }

  const std::uint64_t combined = (acc << w) | q;  // 2w+1 bits
  std::int64_t product = static_cast<std::int64_t>(combined);
  if (combined >> (2 * w)) product -= std::int64_t{1} << (2 * w + 1);
  return product;
}

// Cycle count of the unparallelized bitwise-product serial method for a dot
// product: every multiplicand bit meets every multiplier bit once.
inline std::uint64_t bismo_cycle_count(std::uint64_t b_mc, std::uint64_t b_ml,
                                       std::uint64_t n_values) {
  if (b_mc < 1 || b_ml < 1 || n_values < 1)
    throw ConfigError("cycle-count arguments must be >= 1");
  return b_mc * b_ml * n_values;
}

}  // namespace bitsmm
