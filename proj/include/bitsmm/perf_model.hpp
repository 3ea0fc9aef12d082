#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "bitsmm/errors.hpp"
#include "bitsmm/signed_word.hpp"
#include "bitsmm/systolic_array.hpp"

// Analytic throughput and latency model. OP/cycle ratios are kept as exact
// rationals so every model invariant is tolerance-free; floating point
// appears only in the final GOPS conversion.

namespace bitsmm {

// Exact fraction over 64-bit terms with 128-bit intermediates. Always
// normalized: positive denominator, reduced by gcd.
struct Rational {
  long long num = 0;
  long long den = 1;

  static Rational of(long long n, long long d) {
    if (d == 0) throw ConfigError("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const long long g = std::gcd(n < 0 ? -n : n, d);
    return g ? Rational{n / g, d / g} : Rational{0, 1};
  }

  double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

  friend Rational operator+(Rational a, Rational b) {
    return reduce128(i128(a.num) * b.den + i128(b.num) * a.den,
                     i128(a.den) * b.den);
  }
  friend Rational operator-(Rational a, Rational b) {
    return reduce128(i128(a.num) * b.den - i128(b.num) * a.den,
                     i128(a.den) * b.den);
  }
  friend Rational operator*(Rational a, Rational b) {
    return reduce128(i128(a.num) * b.num, i128(a.den) * b.den);
  }
  friend Rational operator/(Rational a, Rational b) {
    if (b.num == 0) throw ConfigError("rational division by zero");
    return reduce128(i128(a.num) * b.den, i128(a.den) * b.num);
  }
  friend bool operator==(Rational a, Rational b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator<(Rational a, Rational b) {
    return i128(a.num) * b.den < i128(b.num) * a.den;
  }
  friend bool operator<=(Rational a, Rational b) { return a < b || a == b; }
  friend bool operator>(Rational a, Rational b) { return b < a; }
  friend bool operator>=(Rational a, Rational b) { return b <= a; }

 private:
  using i128 = __int128;

  static Rational reduce128(i128 n, i128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    i128 an = n < 0 ? -n : n;
    i128 g = gcd128(an, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    constexpr i128 lim = 0x7fffffffffffffffLL;
    if (n > lim || n < -lim || d > lim)
      throw ConfigError("rational overflow");
    return Rational{static_cast<long long>(n), static_cast<long long>(d)};
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b) {
      const i128 t = a % b;
      a = b;
      b = t;
    }
    return a ? a : 1;
  }
};

// Workload and array description for one throughput query. Matrix_A width
// and Matrix_B height are the output dimensions mapped onto the array;
// n is the shared dimension.
struct PerfQuery {
  long long n = 1;
  long long a_width_elems = 1;   // output columns, mapped onto SA width
  long long b_height_elems = 1;  // output rows, mapped onto SA height
  int bit_width = kMaxWordWidth;
  long long sa_width = 1;
  long long sa_height = 1;
  std::optional<double> freq_hz;

  void validate() const {
    if (n < 1 || a_width_elems < 1 || b_height_elems < 1 || sa_width < 1 ||
        sa_height < 1)
      throw ConfigError("performance query terms must be positive");
    if (bit_width < 1 || bit_width > kMaxWordWidth)
      throw ConfigError("bit width outside [1, " +
                        std::to_string(kMaxWordWidth) + "]");
    if (a_width_elems > sa_width || b_height_elems > sa_height)
      throw ConfigError("matrices larger than the array are not modeled");
    if (n > 1000000000LL || sa_width > 65536 || sa_height > 65536)
      throw ConfigError("query out of supported range");
    if (freq_hz && *freq_hz <= 0)
      throw ConfigError("frequency must be positive");
  }
};

struct PerfResult {
  Rational op_per_cycle;
  Rational peak_op_per_cycle;
  std::optional<double> gops;
  std::uint64_t model_cycles = 0;  // compute latency plus readout drain
};

// MAC operations per cycle for one matrix multiplication: total ops over
// serial compute latency plus the readout drain.
inline Rational op_per_cycle(const PerfQuery& q) {
  q.validate();
  const long long ops = q.n * q.a_width_elems * q.b_height_elems;
  const long long cycles =
      (1 + q.n) * q.bit_width + q.sa_width * q.sa_height;
  return Rational::of(ops, cycles);
}

// Limit throughput: matrices matching the array, n unbounded.
inline Rational peak_op_per_cycle(long long sa_width, long long sa_height,
                                  int bit_width) {
  if (sa_width < 1 || sa_height < 1 || bit_width < 1)
    throw ConfigError("peak throughput arguments must be positive");
  return Rational::of(sa_width * sa_height, bit_width);
}

inline double gops(Rational op_per_cycle, double freq_hz) {
  if (freq_hz <= 0) throw ConfigError("frequency must be positive");
  return op_per_cycle.to_double() * freq_hz / 1e9;
}

inline double gops(double op_per_cycle, double freq_hz) {
  if (freq_hz <= 0) throw ConfigError("frequency must be positive");
  return op_per_cycle * freq_hz / 1e9;
}

inline PerfResult evaluate(const PerfQuery& q) {
  PerfResult r;
  r.op_per_cycle = op_per_cycle(q);
  r.peak_op_per_cycle = peak_op_per_cycle(q.sa_width, q.sa_height,
                                          q.bit_width);
  r.model_cycles = static_cast<std::uint64_t>(
      (1 + q.n) * q.bit_width + q.sa_width * q.sa_height);
  if (q.freq_hz) r.gops = gops(r.op_per_cycle, *q.freq_hz);
  return r;
}

// Serial dot-product latency comparison: every-bit-pair method versus the
// word-aligned serial method. The second depends only on max(b_mc, b_ml).
struct CycleModelComparison {
  std::uint64_t bismo_cycles = 0;
  std::uint64_t bitsmm_cycles = 0;
  Rational ratio;  // bismo / bitsmm
};

inline CycleModelComparison compare_cycle_models(int b_mc, int b_ml,
                                                 long long n) {
  if (b_mc < 1 || b_ml < 1 || n < 1)
    throw ConfigError("cycle-model arguments must be positive");
  CycleModelComparison cmp;
  cmp.bismo_cycles = static_cast<std::uint64_t>(b_mc) *
                     static_cast<std::uint64_t>(b_ml) *
                     static_cast<std::uint64_t>(n);
  cmp.bitsmm_cycles = static_cast<std::uint64_t>(n + 1) *
                      static_cast<std::uint64_t>(std::max(b_mc, b_ml));
  cmp.ratio = Rational::of(static_cast<long long>(cmp.bismo_cycles),
                           static_cast<long long>(cmp.bitsmm_cycles));
  return cmp;
}

// Topology in the reference notation: label is "cols x rows".
struct Topology {
  int cols = 1;
  int rows = 1;

  long long mac_count() const {
    return static_cast<long long>(cols) * rows;
  }
  std::string label() const {
    return std::to_string(cols) + "x" + std::to_string(rows);
  }
};

inline Topology parse_topology(const std::string& text) {
  const auto pos = text.find('x');
  if (pos == std::string::npos || pos == 0 || pos + 1 >= text.size())
    throw ConfigError("topology must look like <cols>x<rows>: " + text);
  Topology t;
  t.cols = std::stoi(text.substr(0, pos));
  t.rows = std::stoi(text.substr(pos + 1));
  if (t.cols < 1 || t.rows < 1)
    throw ConfigError("topology dimensions must be >= 1");
  return t;
}

struct SweepPoint {
  Topology topo;
  int width = 1;
  std::optional<double> freq_hz;
  Rational peak_opc;
  std::optional<double> peak_gops;
};

// Cross product of topologies, widths and (optionally) frequencies, each
// point evaluated at peak throughput.
inline std::vector<SweepPoint> sweep(const std::vector<Topology>& topologies,
                                     const std::vector<int>& widths,
                                     const std::vector<double>& freqs_hz) {
  if (topologies.empty() || widths.empty())
    throw ConfigError("sweep axes must be non-empty");
  std::vector<SweepPoint> points;
  for (const auto& topo : topologies)
    for (int w : widths) {
      const Rational peak = peak_op_per_cycle(topo.cols, topo.rows, w);
      if (freqs_hz.empty()) {
        points.push_back({topo, w, std::nullopt, peak, std::nullopt});
      } else {
        for (double f : freqs_hz)
          points.push_back({topo, w, f, peak, gops(peak, f)});
      }
    }
  return points;
}

// Reference operating points used by the published evaluation grid.
struct ReferencePoint {
  Topology topo;
  bool sbmwc = false;       // MAC variant of the implementation
  const char* platform;     // "fpga", "asap7", "nangate45"
  double max_freq_mhz = 0;  // 0 when not applicable
  double target_freq_mhz = 0;
};

inline const std::vector<ReferencePoint>& reference_points() {
  static const std::vector<ReferencePoint> points = {
      {{16, 4}, false, "fpga", 0, 300},
      {{16, 4}, true, "fpga", 0, 300},
      {{32, 8}, false, "fpga", 0, 300},
      {{64, 16}, false, "fpga", 0, 300},
      {{16, 4}, false, "asap7", 1183, 1000},
      {{16, 4}, true, "asap7", 1311, 1000},
      {{32, 8}, false, "asap7", 1124, 1000},
      {{64, 16}, false, "asap7", 1144, 1000},
      {{16, 4}, false, "nangate45", 748, 500},
      {{16, 4}, true, "nangate45", 730, 500},
      {{32, 8}, false, "nangate45", 685, 500},
      {{64, 16}, false, "nangate45", 643, 500},
  };
  return points;
}

inline const std::vector<Topology>& reference_topologies() {
  static const std::vector<Topology> topos = {{16, 4}, {32, 8}, {64, 16}};
  return topos;
}

// Cross-check of a measured run against the analytic model. The model's
// denominator has no input-propagation skew, so the measured ratio matches
// it exactly once fill cycles are excluded.
struct ModelValidation {
  Rational measured_op_per_cycle;   // ops / measured total
  Rational measured_excl_fill;      // ops / (measured total - fill)
  Rational model_op_per_cycle;
  std::uint64_t fill_cycles = 0;
  double measured_over_model = 0;
};

inline ModelValidation validate_model(const CycleStats& stats,
                                      const PerfQuery& q) {
  q.validate();
  if (stats.total_cycles == 0 || stats.total_cycles <= stats.fill_cycles)
    throw ConfigError("cycle stats must describe a completed run");
  const long long ops = q.n * q.a_width_elems * q.b_height_elems;
  ModelValidation v;
  v.model_op_per_cycle = op_per_cycle(q);
  v.measured_op_per_cycle =
      Rational::of(ops, static_cast<long long>(stats.total_cycles));
  v.measured_excl_fill = Rational::of(
      ops, static_cast<long long>(stats.total_cycles - stats.fill_cycles));
  v.fill_cycles = stats.fill_cycles;
  v.measured_over_model = (v.measured_op_per_cycle /
                           v.model_op_per_cycle).to_double();
  return v;
}

}  // namespace bitsmm
