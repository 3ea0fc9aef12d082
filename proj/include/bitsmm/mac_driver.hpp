#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bitsmm/bitmath.hpp"
#include "bitsmm/errors.hpp"
#include "bitsmm/mac.hpp"
#include "bitsmm/p2s.hpp"
#include "bitsmm/signed_word.hpp"

// Single-MAC drivers: run the streaming protocol end to end, verify the
// cadence contracts along the way, and report exact cycle counts.

namespace bitsmm {

enum class MacVariant { booth, sbmwc };

inline const char* to_string(MacVariant v) {
  return v == MacVariant::booth ? "booth" : "sbmwc";
}

struct DriveResult {
  std::int64_t product = 0;
  std::uint64_t cycles = 0;
  std::uint64_t toggle_flips = 0;  // v_t edges observed (cadence counter)
};

// One trace row per cycle. Fields that do not apply to a variant stay at
// their defaults and are rendered empty by the CSV writer.
struct MacTraceRow {
  std::uint64_t cycle = 0;
  MacVariant variant = MacVariant::booth;
  int mc_bit = 0;
  int ml_bit = 0;
  int v_t = 0;
  bool edge = false;
  bool enabled = false;
  BoothAction action = BoothAction::NOP;  // booth only
  bool bit_taken = false;                 // sbmwc only
  std::uint32_t mc_reg = 0;
  std::uint32_t mask_reg = 0;
  std::uint32_t s_m = 0;
  std::int64_t m_mc = 0;
  std::int64_t acc = 0;  // committed accumulator view
  std::int64_t acc_sum = 0;
  std::int64_t acc_diff = 0;
};

using MacTraceSink = std::function<void(const MacTraceRow&)>;

struct DriveOptions {
  MacTraceSink trace;
  bool fault_flip_add_row = false;  // test hook, booth recode table
};

namespace detail {

template <class MacT>
MacT make_mac(MacConfig cfg, const DriveOptions& opts);

template <>
inline BoothMacState make_mac<BoothMacState>(MacConfig cfg,
                                             const DriveOptions& opts) {
  BoothMacState mac(cfg);
  mac.fault_flip_add_row = opts.fault_flip_add_row;
  return mac;
}

template <>
inline SbmwcMacState make_mac<SbmwcMacState>(MacConfig cfg,
                                             const DriveOptions&) {
  return SbmwcMacState(cfg);
}

inline void fill_trace_row(MacTraceRow& row, const BoothMacState& mac,
                           const BoothStepInfo& info) {
  row.variant = MacVariant::booth;
  row.edge = info.edge;
  row.enabled = info.enabled;
  row.action = info.action;
  row.mc_reg = mac.mc_reg;
  row.mask_reg = mac.mask_reg;
  row.s_m = mac.s_m;
  row.m_mc = mac.m_mc;
  row.acc = mac.acc;
}

inline void fill_trace_row(MacTraceRow& row, const SbmwcMacState& mac,
                           const SbmwcStepInfo& info) {
  row.variant = MacVariant::sbmwc;
  row.edge = info.edge;
  row.enabled = info.enabled;
  row.bit_taken = info.bit_taken;
  row.mc_reg = mac.mc_reg;
  row.mask_reg = mac.mask_reg;
  row.s_m = mac.s_m;
  row.m_mc = mac.m_mc;
  row.acc = mac.committed_acc();
  row.acc_sum = mac.acc_sum;
  row.acc_diff = mac.acc_diff;
}

template <class MacT>
DriveResult drive_dot_impl(const std::vector<SignedWord>& vec_a,
                           const std::vector<SignedWord>& vec_b, int width,
                           const DriveOptions& opts) {
  const std::uint64_t n = vec_a.size();
  MacConfig cfg;
  cfg.validate();
  if (width < 1 || width > cfg.b_max)
    throw ConfigError("operand width " + std::to_string(width) +
                      " outside [1, " + std::to_string(cfg.b_max) + "]");
  if (n == 0 || n != vec_b.size())
    throw ConfigError("dot product needs equal-length non-empty vectors");
  if (n > kMaxDotLength)
    throw ConfigError("dot product length " + std::to_string(n) +
                      " exceeds accumulator capacity " +
                      std::to_string(kMaxDotLength));
  for (const auto& w : vec_a)
    if (w.width() > width) throw ConfigError("vector element wider than the configured width");
  for (const auto& w : vec_b)
    if (w.width() > width) throw ConfigError("vector element wider than the configured width");

  MacT mac = make_mac<MacT>(cfg, opts);
  P2SState mc_p2s(BitOrder::msb_first);  // multiplicand, MSb first
  P2SState ml_p2s(BitOrder::lsb_first);  // multiplier, LSb first

  const std::uint64_t uw = static_cast<std::uint64_t>(width);
  const std::uint64_t total = (n + 1) * uw;
  std::uint64_t edges = 0;

  for (std::uint64_t t = 0; t < total; ++t) {
    const std::uint64_t word = t / uw;
    if (t % uw == 0) {
      if (word < n) mc_p2s.load(vec_a[word].extended(width));
      if (word >= 1) ml_p2s.load(vec_b[word - 1].extended(width));
    }
    MacCycleInput in;
    in.mc_bit = mc_p2s.empty() ? 0 : mc_p2s.step();
    in.ml_bit = ml_p2s.empty() ? 0 : ml_p2s.step();
    in.v_t = static_cast<int>(word & 1u);
    in.width = width;

    const auto info = mac.step(in);
    if (info.edge) {
      ++edges;
      // mask discipline: every latched shift mask spans exactly one word
      if (std::popcount(mac.s_m) != width)
        throw ProtocolError(t, "toggle edge with shift-mask popcount " +
                                   std::to_string(std::popcount(mac.s_m)) +
                                   ", expected " + std::to_string(width));
    }
    if (opts.trace) {
      MacTraceRow row;
      row.cycle = t;
      row.mc_bit = in.mc_bit;
      row.ml_bit = in.ml_bit;
      row.v_t = in.v_t;
      fill_trace_row(row, mac, info);
      opts.trace(row);
    }
  }

  if (edges != n)
    throw ProtocolError(total, "value toggle flipped " +
                                   std::to_string(edges) + " times, expected " +
                                   std::to_string(n));

  return {mac.committed_acc(), total, edges};
}

}  // namespace detail

// Stream one n-value dot product through a MAC. Returns the committed
// accumulator and the exact cycle count, (n + 1) * width.
inline DriveResult drive_dot_product(MacVariant variant,
                                     const std::vector<SignedWord>& vec_a,
                                     const std::vector<SignedWord>& vec_b,
                                     int width,
                                     const DriveOptions& opts = {}) {
  if (variant == MacVariant::booth)
    return detail::drive_dot_impl<BoothMacState>(vec_a, vec_b, width, opts);
  return detail::drive_dot_impl<SbmwcMacState>(vec_a, vec_b, width, opts);
}

// Single multiplication: operands sign-extended to b_max = max of the two
// widths, then streamed as a one-value dot product (2 * b_max cycles).
inline DriveResult drive_multiplication(MacVariant variant, SignedWord a,
                                        SignedWord b,
                                        const DriveOptions& opts = {}) {
  const int b_max = std::max(a.width(), b.width());
  return drive_dot_product(variant, {a.extended(b_max)}, {b.extended(b_max)},
                           b_max, opts);
}

// Latency of one serial dot product: one word of lead-in plus one word per
// value.
inline std::uint64_t serial_dot_cycle_count(std::uint64_t n_values,
                                            std::uint64_t b_max) {
  if (n_values < 1 || b_max < 1)
    throw ConfigError("cycle-count arguments must be >= 1");
  return (n_values + 1) * b_max;
}

}  // namespace bitsmm
