#pragma once

#include <bit>
#include <cstdint>
#include <string>

#include "bitsmm/bitmath.hpp"
#include "bitsmm/errors.hpp"
#include "bitsmm/signed_word.hpp"

// Cycle-accurate state machines for the two bit-serial MAC variants.
//
// Streaming protocol (one MAC, operand width w, n-value dot product):
//   - the multiplicand for value k arrives MSb first on mc during cycles
//     [k*w, (k+1)*w);
//   - the multiplier for value k arrives LSb first on ml one word later,
//     during cycles [(k+1)*w, (k+2)*w), concurrently with the *next*
//     multiplicand;
//   - the value toggle v_t holds one level per word and flips at every word
//     boundary; the first word rides at the reset level, so the first
//     observed edge already carries a full-width mask;
//   - the whole dot product takes exactly (n+1)*w cycles.
//
// Per cycle the model samples inputs, evaluates the combinational logic, and
// commits every register simultaneously (synchronous single-clock semantics).

namespace bitsmm {

inline constexpr int kDefaultBMax = 16;
// Accumulator headroom beyond a full-width product; bounds the dot-product
// length that cannot overflow.
inline constexpr int kAccGuardBits = 16;
inline constexpr std::uint64_t kMaxDotLength = std::uint64_t{1}
                                               << kAccGuardBits;

struct MacConfig {
  int b_max = kDefaultBMax;

  int acc_width() const { return 2 * b_max + kAccGuardBits; }

  void validate() const {
    if (b_max < 1 || b_max > kMaxWordWidth)
      throw ConfigError("b_max " + std::to_string(b_max) + " outside [1, " +
                        std::to_string(kMaxWordWidth) + "]");
  }
};

struct MacCycleInput {
  int mc_bit = 0;   // serial multiplicand, MSb first
  int ml_bit = 0;   // serial multiplier, LSb first
  int v_t = 0;      // value toggle; flips once per word boundary
  bool reset = false;
  int width = 1;    // configured operand precision, constant per dot product
};

// Wrap to `bits`-wide two's complement.
inline std::int64_t wrap_signed(std::int64_t v, int bits) {
  if (bits >= 64) return v;
  const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
  std::uint64_t u = static_cast<std::uint64_t>(v) & mask;
  if (u >> (bits - 1)) u |= ~mask;
  return static_cast<std::int64_t>(u);
}

// Sign-extend the mask-selected low bits of a shift register. The highest set
// bit of the mask marks the sign position.
inline std::int64_t sign_extend_by_mask(std::uint32_t reg, std::uint32_t mask) {
  if (mask == 0) return 0;
  const std::uint32_t v = reg & mask;
  const int w = std::popcount(mask);
  if ((v >> (w - 1)) & 1u)
    return static_cast<std::int64_t>(v) - (std::int64_t{1} << w);
  return static_cast<std::int64_t>(v);
}

struct BoothStepInfo {
  bool edge = false;     // toggle edge observed this cycle
  bool enabled = false;  // accumulation path active this cycle
  BoothAction action = BoothAction::NOP;
};

// Booth-based MAC. A single adder; the sign-extended masked multiplicand
// shifts left once per cycle while the recode of the two most recent
// multiplier bits selects add, subtract, or nothing.
struct BoothMacState {
  MacConfig cfg;

  std::int64_t acc = 0;       // dot-product accumulator, acc_width bits
  std::uint32_t mc_reg = 0;   // multiplicand shift register, b_max bits
  std::uint32_t mask_reg = 0; // growing mask, one leading one per cycle
  std::uint32_t s_m = 0;      // shift mask latched at each toggle edge
  std::int64_t m_mc = 0;      // masked, sign-extended, left-shifting operand
  int v_t_prev = 0;
  int ml_prev = 0;
  bool mult_en = false;       // latched at the first toggle edge

  // Test hook: downgrades the +M recode row to a no-op so the verification
  // protocol can prove it catches a wrong recode table.
  bool fault_flip_add_row = false;

  explicit BoothMacState(MacConfig c = {}) : cfg(c) { cfg.validate(); }

  std::int64_t committed_acc() const { return acc; }

  BoothStepInfo step(const MacCycleInput& in) {
    if (in.reset) {
      clear();
      return {};
    }
    const std::uint32_t bmask = SignedWord::width_mask(cfg.b_max);
    const bool edge = (in.v_t & 1) != v_t_prev;

    // Operand for this cycle: captured from the shift register at an edge
    // (the mask being latched into s_m selects the just-completed word),
    // shifted left otherwise.
    const std::int64_t m_mc_eff =
        edge ? sign_extend_by_mask(mc_reg, mask_reg)
             : wrap_signed(m_mc << 1, cfg.acc_width());
    const bool enabled = mult_en || edge;
    const int prev_bit = edge ? 0 : ml_prev;  // word boundary restarts pairs
    BoothAction action = booth_recode(in.ml_bit, prev_bit);
    if (fault_flip_add_row && action == BoothAction::ADD_M)
      action = BoothAction::NOP;

    std::int64_t acc_next = acc;
    if (enabled) {
      if (action == BoothAction::ADD_M)
        acc_next = wrap_signed(acc + m_mc_eff, cfg.acc_width());
      else if (action == BoothAction::SUB_M)
        acc_next = wrap_signed(acc - m_mc_eff, cfg.acc_width());
    }

    // synchronous commit
    acc = acc_next;
    m_mc = m_mc_eff;
    if (edge) s_m = mask_reg;
    mask_reg = edge ? 1u : (((mask_reg << 1) | 1u) & bmask);
    mc_reg = ((mc_reg << 1) | static_cast<std::uint32_t>(in.mc_bit & 1)) &
             bmask;
    ml_prev = in.ml_bit & 1;
    v_t_prev = in.v_t & 1;
    mult_en = enabled;
    return {edge, enabled, action};
  }

  void clear() {
    acc = 0;
    mc_reg = mask_reg = s_m = 0;
    m_mc = 0;
    v_t_prev = ml_prev = 0;
    mult_en = false;
  }

  friend bool operator==(const BoothMacState& a, const BoothMacState& b) {
    return a.acc == b.acc && a.mc_reg == b.mc_reg &&
           a.mask_reg == b.mask_reg && a.s_m == b.s_m && a.m_mc == b.m_mc &&
           a.v_t_prev == b.v_t_prev && a.ml_prev == b.ml_prev &&
           a.mult_en == b.mult_en;
  }
};

struct SbmwcStepInfo {
  bool edge = false;
  bool enabled = false;
  bool bit_taken = false;  // multiplier bit was 1, both accumulators updated
};

// SBMwC-based MAC. The unit cannot know whether the current multiplier bit is
// the final (sign) one, so it keeps two accumulators: the running value plus
// the shifted multiplicand and the running value minus it. The next toggle
// edge commits the difference path when the word ended in a 1.
struct SbmwcMacState {
  MacConfig cfg;

  std::int64_t acc_sum = 0;   // running value, current bit treated as add
  std::int64_t acc_diff = 0;  // running value, current bit treated as subtract
  std::uint32_t mc_reg = 0;
  std::uint32_t mask_reg = 0;
  std::uint32_t s_m = 0;
  std::int64_t m_mc = 0;
  int v_t_prev = 0;
  int ml_prev = 0;
  bool mult_en = false;

  explicit SbmwcMacState(MacConfig c = {}) : cfg(c) { cfg.validate(); }

  // The accumulator as the next toggle edge would commit it. Valid whenever a
  // word boundary has been reached (including end of stream).
  std::int64_t committed_acc() const { return ml_prev ? acc_diff : acc_sum; }

  SbmwcStepInfo step(const MacCycleInput& in) {
    if (in.reset) {
      clear();
      return {};
    }
    const std::uint32_t bmask = SignedWord::width_mask(cfg.b_max);
    const bool edge = (in.v_t & 1) != v_t_prev;

    const std::int64_t m_mc_eff =
        edge ? sign_extend_by_mask(mc_reg, mask_reg)
             : wrap_signed(m_mc << 1, cfg.acc_width());
    const bool enabled = mult_en || edge;

    // An edge resolves the previous word: its final bit picks the path.
    const std::int64_t base = edge ? committed_acc() : acc_sum;
    const bool take = enabled && (in.ml_bit & 1);
    const std::int64_t sum_next =
        take ? wrap_signed(base + m_mc_eff, cfg.acc_width()) : base;
    const std::int64_t diff_next =
        take ? wrap_signed(base - m_mc_eff, cfg.acc_width()) : base;

    acc_sum = sum_next;
    acc_diff = diff_next;
    m_mc = m_mc_eff;
    if (edge) s_m = mask_reg;
    mask_reg = edge ? 1u : (((mask_reg << 1) | 1u) & bmask);
    mc_reg = ((mc_reg << 1) | static_cast<std::uint32_t>(in.mc_bit & 1)) &
             bmask;
    ml_prev = in.ml_bit & 1;
    v_t_prev = in.v_t & 1;
    mult_en = enabled;
    return {edge, enabled, take};
  }

  void clear() {
    acc_sum = acc_diff = 0;
    mc_reg = mask_reg = s_m = 0;
    m_mc = 0;
    v_t_prev = ml_prev = 0;
    mult_en = false;
  }

  friend bool operator==(const SbmwcMacState& a, const SbmwcMacState& b) {
    return a.acc_sum == b.acc_sum && a.acc_diff == b.acc_diff &&
           a.mc_reg == b.mc_reg && a.mask_reg == b.mask_reg &&
           a.s_m == b.s_m && a.m_mc == b.m_mc && a.v_t_prev == b.v_t_prev &&
           a.ml_prev == b.ml_prev && a.mult_en == b.mult_en;
  }
};

// Switching activity of one state transition, split by signal class.
struct ToggleSample {
  std::uint64_t acc = 0;
  std::uint64_t datapath = 0;  // mc_reg, mask_reg, s_m, m_mc
  std::uint64_t control = 0;   // v_t_prev, ml_prev, mult_en

  std::uint64_t total() const { return acc + datapath + control; }
};

namespace detail {
inline std::uint64_t flips(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint64_t>(std::popcount(a ^ b));
}
}  // namespace detail

inline ToggleSample toggles_between(const BoothMacState& a,
                                    const BoothMacState& b) {
  ToggleSample t;
  t.acc = detail::flips(static_cast<std::uint64_t>(a.acc),
                        static_cast<std::uint64_t>(b.acc));
  t.datapath = detail::flips(a.mc_reg, b.mc_reg) +
               detail::flips(a.mask_reg, b.mask_reg) +
               detail::flips(a.s_m, b.s_m) +
               detail::flips(static_cast<std::uint64_t>(a.m_mc),
                             static_cast<std::uint64_t>(b.m_mc));
  t.control = detail::flips(static_cast<std::uint64_t>(a.v_t_prev),
                            static_cast<std::uint64_t>(b.v_t_prev)) +
              detail::flips(static_cast<std::uint64_t>(a.ml_prev),
                            static_cast<std::uint64_t>(b.ml_prev)) +
              (a.mult_en != b.mult_en ? 1u : 0u);
  return t;
}

inline ToggleSample toggles_between(const SbmwcMacState& a,
                                    const SbmwcMacState& b) {
  ToggleSample t;
  t.acc = detail::flips(static_cast<std::uint64_t>(a.acc_sum),
                        static_cast<std::uint64_t>(b.acc_sum)) +
          detail::flips(static_cast<std::uint64_t>(a.acc_diff),
                        static_cast<std::uint64_t>(b.acc_diff));
  t.datapath = detail::flips(a.mc_reg, b.mc_reg) +
               detail::flips(a.mask_reg, b.mask_reg) +
               detail::flips(a.s_m, b.s_m) +
               detail::flips(static_cast<std::uint64_t>(a.m_mc),
                             static_cast<std::uint64_t>(b.m_mc));
  t.control = detail::flips(static_cast<std::uint64_t>(a.v_t_prev),
                            static_cast<std::uint64_t>(b.v_t_prev)) +
              detail::flips(static_cast<std::uint64_t>(a.ml_prev),
                            static_cast<std::uint64_t>(b.ml_prev)) +
              (a.mult_en != b.mult_en ? 1u : 0u);
  return t;
}

}  // namespace bitsmm
