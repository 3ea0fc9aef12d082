#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bitsmm/errors.hpp"
#include "bitsmm/mac.hpp"
#include "bitsmm/matrix.hpp"
#include "bitsmm/p2s.hpp"
#include "bitsmm/signed_word.hpp"

// Bit-serial systolic array: a rows x cols grid of MACs, P2S converter banks
// on both edges, one-cycle pipeline registers between neighbours, and a
// snake-order readout chain that drains one accumulator per cycle.
//
// Multiplicands (columns of B) enter at the top and flow down; multipliers
// (rows of A) enter at the left and flow right. Row streams are injected
// `width + r` cycles after the run starts and column streams `c` cycles
// after, so every MAC locally observes the multiplicand leading its
// multiplier by exactly `width` cycles regardless of grid position.

namespace bitsmm {

struct SaConfig {
  int rows = 1;
  int cols = 1;
  int b_max = kDefaultBMax;

  void validate() const {
    if (rows < 1 || cols < 1)
      throw ConfigError("array dimensions must be >= 1");
    MacConfig{b_max}.validate();
  }

  // The reference notation lists topologies as cols x rows.
  std::string label() const {
    return std::to_string(cols) + "x" + std::to_string(rows);
  }
};

// Readout component accounting. `readout_chain_registers` evaluates the
// nominal (rows-1)(cols-1)+1 register formula; the functional model's own
// counts are reported separately and are not asserted to match it.
struct StructuralReport {
  std::uint64_t mac_count = 0;
  std::uint64_t readout_mux_count = 0;
  std::uint64_t readout_chain_registers = 0;
  std::uint64_t dataflow_h_registers = 0;  // model: per-hop multiplier pipes
  std::uint64_t dataflow_v_registers = 0;  // model: per-hop multiplicand pipes
  std::uint64_t readout_capture_registers = 0;  // model: parallel drain buffer
};

inline StructuralReport structural_report(const SaConfig& cfg) {
  cfg.validate();
  const std::uint64_t r = static_cast<std::uint64_t>(cfg.rows);
  const std::uint64_t c = static_cast<std::uint64_t>(cfg.cols);
  StructuralReport rep;
  rep.mac_count = r * c;
  rep.readout_mux_count = r * c - 1;
  rep.readout_chain_registers = (r - 1) * (c - 1) + 1;
  rep.dataflow_h_registers = r * (c - 1);
  rep.dataflow_v_registers = (r - 1) * c;
  rep.readout_capture_registers = r * c;
  return rep;
}

// Serpentine grid order starting at (0,0): even rows left to right, odd rows
// right to left. The readout enable walks this path; data arrives in the
// reverse order.
inline std::vector<std::pair<int, int>> snake_path(int rows, int cols) {
  std::vector<std::pair<int, int>> path;
  path.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    if (r % 2 == 0)
      for (int c = 0; c < cols; ++c) path.emplace_back(r, c);
    else
      for (int c = cols - 1; c >= 0; --c) path.emplace_back(r, c);
  }
  return path;
}

struct ToggleCounts {
  std::uint64_t mac_acc = 0;
  std::uint64_t mac_datapath = 0;
  std::uint64_t mac_control = 0;
  std::uint64_t h_pipe = 0;
  std::uint64_t v_pipe = 0;
  std::vector<std::uint64_t> per_mac;    // rows*cols, row-major
  std::vector<std::uint64_t> per_row_h;  // horizontal pipes per row
  std::vector<std::uint64_t> per_col_v;  // vertical pipes per column

  std::uint64_t total() const {
    return mac_acc + mac_datapath + mac_control + h_pipe + v_pipe;
  }
};

struct CycleStats {
  std::uint64_t fill_cycles = 0;
  std::uint64_t compute_cycles = 0;
  std::uint64_t readout_cycles = 0;
  std::uint64_t total_cycles = 0;
  ToggleCounts toggle_counts;
};

// Per-cycle edge-injection plan for one matrix multiplication. Row and
// column drives are derived on query; the plan owns copies of the operand
// matrices.
class InputSchedule {
 public:
  struct ColumnDrive {
    bool load = false;
    SignedWord value;
    int v_t = 0;
    bool en = false;
  };
  struct RowDrive {
    bool load = false;
    SignedWord value;
    bool en = false;
  };

  InputSchedule(const SaConfig& cfg, Matrix a, Matrix b, int width)
      : a_(std::move(a)), b_(std::move(b)), width_(width) {
    cfg.validate();
    m_ = a_.rows();
    n_ = a_.cols();
    p_ = b_.cols();
    if (b_.rows() != n_)
      throw ConfigError("inner dimensions do not match: " +
                        std::to_string(n_) + " vs " +
                        std::to_string(b_.rows()));
    if (m_ > cfg.rows || p_ > cfg.cols)
      throw ConfigError("matrix " + std::to_string(m_) + "x" +
                        std::to_string(n_) + " * " + std::to_string(n_) + "x" +
                        std::to_string(p_) + " does not fit a " +
                        std::to_string(cfg.rows) + "x" +
                        std::to_string(cfg.cols) + " (rows x cols) array");
    if (width < std::max(a_.width(), b_.width()) || width > cfg.b_max)
      throw ConfigError("stream width " + std::to_string(width) +
                        " must cover both operand widths and stay within "
                        "b_max " +
                        std::to_string(cfg.b_max));
    if (static_cast<std::uint64_t>(n_) > kMaxDotLength)
      throw ConfigError("shared dimension exceeds accumulator capacity");
  }

  int m() const { return m_; }
  int n() const { return n_; }
  int p() const { return p_; }
  int width() const { return width_; }

  std::uint64_t fill_cycles() const {
    return static_cast<std::uint64_t>(m_ - 1) +
           static_cast<std::uint64_t>(p_ - 1);
  }
  std::uint64_t compute_cycles() const {
    return (static_cast<std::uint64_t>(n_) + 1) *
           static_cast<std::uint64_t>(width_);
  }
  std::uint64_t total_input_cycles() const {
    return fill_cycles() + compute_cycles();
  }

  // Multiplicand port of column c at global cycle t.
  ColumnDrive column_drive(int c, std::uint64_t t) const {
    ColumnDrive d;
    if (c >= p_ || t < static_cast<std::uint64_t>(c)) return d;
    const std::uint64_t local = t - static_cast<std::uint64_t>(c);
    const std::uint64_t uw = static_cast<std::uint64_t>(width_);
    if (local >= compute_cycles()) return d;
    d.en = true;
    d.v_t = static_cast<int>((local / uw) & 1u);
    if (local % uw == 0 && local / uw < static_cast<std::uint64_t>(n_)) {
      d.load = true;
      d.value = b_.word(static_cast<int>(local / uw), c).extended(width_);
    }
    return d;
  }

  // Multiplier port of row r at global cycle t. The first word is injected
  // one full word after the matching column stream, giving the multiplicand
  // its `width`-cycle lead.
  RowDrive row_drive(int r, std::uint64_t t) const {
    RowDrive d;
    if (r >= m_ || t < static_cast<std::uint64_t>(r)) return d;
    const std::uint64_t local = t - static_cast<std::uint64_t>(r);
    const std::uint64_t uw = static_cast<std::uint64_t>(width_);
    if (local >= compute_cycles()) return d;
    d.en = true;
    if (local % uw == 0 && local >= uw) {
      const std::uint64_t word = local / uw - 1;
      if (word < static_cast<std::uint64_t>(n_)) {
        d.load = true;
        d.value = a_.word(r, static_cast<int>(word)).extended(width_);
      }
    }
    return d;
  }

 private:
  Matrix a_;
  Matrix b_;
  int width_;
  int m_ = 0, n_ = 0, p_ = 0;
};

inline InputSchedule schedule_matmul(const SaConfig& cfg, const Matrix& a,
                                     const Matrix& b, int width) {
  return InputSchedule(cfg, a, b, width);
}

struct ReadoutSample {
  int r = 0;
  int c = 0;
  std::int64_t value = 0;
};

struct SaTraceRow {
  std::uint64_t cycle = 0;
  bool draining = false;
  std::string h_bits, h_en;          // per-row port levels, row 0 first
  std::string v_bits, v_vt, v_en;    // per-column port levels, column 0 first
  std::int64_t mac00_acc = 0;
  std::uint32_t mac00_mc_reg = 0;
  std::uint32_t mac00_mask = 0;
  bool readout_valid = false;
  int readout_r = 0;
  int readout_c = 0;
  std::int64_t readout_value = 0;
};

using SaTraceSink = std::function<void(const SaTraceRow&)>;
using MacInputProbe =
    std::function<void(int r, int c, std::uint64_t cycle,
                       const MacCycleInput& in)>;

template <class MacT>
class SystolicArray {
 public:
  explicit SystolicArray(SaConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    macs_.assign(grid_size(), MacT(MacConfig{cfg_.b_max}));
    h_pipe_.assign(grid_size(), HBundle{});
    v_pipe_.assign(grid_size(), VBundle{});
    cur_h_.assign(grid_size(), HBundle{});
    cur_v_.assign(grid_size(), VBundle{});
    edge_h_.assign(static_cast<std::size_t>(cfg_.rows), HBundle{});
    edge_v_.assign(static_cast<std::size_t>(cfg_.cols), VBundle{});
    p2s_h_.assign(static_cast<std::size_t>(cfg_.rows),
                  P2SState(BitOrder::lsb_first));
    p2s_v_.assign(static_cast<std::size_t>(cfg_.cols),
                  P2SState(BitOrder::msb_first));
    reset_toggles();
  }

  const SaConfig& config() const { return cfg_; }
  std::uint64_t cycle() const { return cycle_; }
  bool draining() const { return draining_; }
  const ToggleCounts& toggles() const { return toggles_; }

  MacT& mac_at(int r, int c) { return macs_[index(r, c)]; }
  const MacT& mac_at(int r, int c) const { return macs_[index(r, c)]; }

  void set_trace_sink(SaTraceSink sink) { trace_ = std::move(sink); }
  void set_input_probe(MacInputProbe probe) { probe_ = std::move(probe); }

  void reset() {
    for (auto& m : macs_) m.clear();
    std::fill(h_pipe_.begin(), h_pipe_.end(), HBundle{});
    std::fill(v_pipe_.begin(), v_pipe_.end(), VBundle{});
    std::fill(edge_h_.begin(), edge_h_.end(), HBundle{});
    std::fill(edge_v_.begin(), edge_v_.end(), VBundle{});
    for (auto& p : p2s_h_) p = P2SState(BitOrder::lsb_first);
    for (auto& p : p2s_v_) p = P2SState(BitOrder::msb_first);
    cycle_ = 0;
    draining_ = false;
    drain_values_.clear();
    drain_pos_ = 0;
    reset_toggles();
  }

  // One global clock cycle. With a schedule, edge bits enter, pipeline
  // registers advance one hop and every enabled MAC steps; without one the
  // array idles. While draining, each step emits one accumulator value.
  std::optional<ReadoutSample> step(const InputSchedule* sched = nullptr) {
    if (sched && draining_)
      throw ProtocolError(cycle_, "edge input during readout drain");

    if (sched) {
      advance_dataflow(*sched);
    } else {
      advance_dataflow_idle();
    }

    std::optional<ReadoutSample> sample;
    if (draining_ && drain_pos_ > 0) {
      --drain_pos_;
      sample = drain_values_[drain_pos_];
      if (drain_pos_ == 0) draining_ = false;
    }

    if (trace_) emit_trace(sample);
    ++cycle_;
    return sample;
  }

  // True while some MAC can still step without new edge input: an in-flight
  // multiplier enable and an in-flight multiplicand enable would meet at one
  // grid position. Enables heading only into gated rows or columns do not
  // count; they decay harmlessly during the drain.
  bool computation_pending() const {
    for (int r = 1; r < cfg_.rows; ++r)
      for (int c = 1; c < cfg_.cols; ++c) {
        const int max_d = std::min(r - 1, c - 1);
        for (int d = 0; d <= max_d; ++d)
          if (h_pipe_[index(r, c - d)].en && v_pipe_[index(r - d, c)].en)
            return true;
      }
    return false;
  }

  // Capture every committed accumulator into the readout chain. Legal only
  // once no in-flight enables can reach an active MAC.
  void begin_readout() {
    if (draining_)
      throw ProtocolError(cycle_, "readout already in progress");
    if (computation_pending())
      throw ProtocolError(cycle_,
                          "readout asserted during active computation");
    const auto path = snake_path(cfg_.rows, cfg_.cols);
    drain_values_.clear();
    drain_values_.reserve(path.size());
    for (const auto& [r, c] : path)
      drain_values_.push_back({r, c, macs_[index(r, c)].committed_acc()});
    drain_pos_ = drain_values_.size();
    draining_ = true;
  }

 private:
  struct HBundle {
    std::uint8_t ml = 0;
    std::uint8_t en = 0;
  };
  struct VBundle {
    std::uint8_t mc = 0;
    std::uint8_t v_t = 0;
    std::uint8_t en = 0;
  };

  std::size_t grid_size() const {
    return static_cast<std::size_t>(cfg_.rows) * cfg_.cols;
  }
  std::size_t index(int r, int c) const {
    if (r < 0 || r >= cfg_.rows || c < 0 || c >= cfg_.cols)
      throw ConfigError("MAC index out of range");
    return static_cast<std::size_t>(r) * cfg_.cols + c;
  }

  void reset_toggles() {
    toggles_ = ToggleCounts{};
    toggles_.per_mac.assign(grid_size(), 0);
    toggles_.per_row_h.assign(static_cast<std::size_t>(cfg_.rows), 0);
    toggles_.per_col_v.assign(static_cast<std::size_t>(cfg_.cols), 0);
  }

  void advance_dataflow(const InputSchedule& sched) {
    // edge injection
    for (int c = 0; c < cfg_.cols; ++c) {
      const auto d = sched.column_drive(c, cycle_);
      auto& p2s = p2s_v_[static_cast<std::size_t>(c)];
      if (d.load) p2s.load(d.value);
      VBundle e;
      e.mc = static_cast<std::uint8_t>(p2s.empty() ? 0 : p2s.step());
      e.v_t = static_cast<std::uint8_t>(d.v_t);
      e.en = d.en ? 1 : 0;
      edge_v_[c] = e;
    }
    for (int r = 0; r < cfg_.rows; ++r) {
      const auto d = sched.row_drive(r, cycle_);
      auto& p2s = p2s_h_[static_cast<std::size_t>(r)];
      if (d.load) p2s.load(d.value);
      HBundle e;
      e.ml = static_cast<std::uint8_t>(p2s.empty() ? 0 : p2s.step());
      e.en = d.en ? 1 : 0;
      edge_h_[r] = e;
    }
    step_grid(sched.width());
  }

  void advance_dataflow_idle() {
    std::fill(edge_h_.begin(), edge_h_.end(), HBundle{});
    std::fill(edge_v_.begin(), edge_v_.end(), VBundle{});
    step_grid(1);
  }

  void step_grid(int width) {
    // what each MAC sees this cycle
    for (int r = 0; r < cfg_.rows; ++r)
      for (int c = 0; c < cfg_.cols; ++c) {
        cur_h_[index(r, c)] = (c == 0) ? edge_h_[r] : h_pipe_[index(r, c)];
        cur_v_[index(r, c)] = (r == 0) ? edge_v_[c] : v_pipe_[index(r, c)];
      }

    for (int r = 0; r < cfg_.rows; ++r)
      for (int c = 0; c < cfg_.cols; ++c) {
        const auto& hb = cur_h_[index(r, c)];
        const auto& vb = cur_v_[index(r, c)];
        if (!(hb.en && vb.en)) continue;  // enable gating holds the MAC
        MacCycleInput in;
        in.mc_bit = vb.mc;
        in.ml_bit = hb.ml;
        in.v_t = vb.v_t;
        in.width = width;
        if (probe_) probe_(r, c, cycle_, in);
        MacT& mac = macs_[index(r, c)];
        const MacT before = mac;
        mac.step(in);
        const ToggleSample t = toggles_between(before, mac);
        toggles_.mac_acc += t.acc;
        toggles_.mac_datapath += t.datapath;
        toggles_.mac_control += t.control;
        toggles_.per_mac[index(r, c)] += t.total();
      }

    // synchronous hop: every register takes what its upstream neighbour saw
    for (int r = 0; r < cfg_.rows; ++r)
      for (int c = cfg_.cols - 1; c >= 1; --c) {
        const HBundle next = cur_h_[index(r, c - 1)];
        HBundle& reg = h_pipe_[index(r, c)];
        const std::uint64_t flips =
            static_cast<std::uint64_t>(reg.ml != next.ml) +
            static_cast<std::uint64_t>(reg.en != next.en);
        toggles_.h_pipe += flips;
        toggles_.per_row_h[static_cast<std::size_t>(r)] += flips;
        reg = next;
      }
    for (int r = cfg_.rows - 1; r >= 1; --r)
      for (int c = 0; c < cfg_.cols; ++c) {
        const VBundle next = cur_v_[index(r - 1, c)];
        VBundle& reg = v_pipe_[index(r, c)];
        const std::uint64_t flips =
            static_cast<std::uint64_t>(reg.mc != next.mc) +
            static_cast<std::uint64_t>(reg.v_t != next.v_t) +
            static_cast<std::uint64_t>(reg.en != next.en);
        toggles_.v_pipe += flips;
        toggles_.per_col_v[static_cast<std::size_t>(c)] += flips;
        reg = next;
      }
  }

  void emit_trace(const std::optional<ReadoutSample>& sample) {
    SaTraceRow row;
    row.cycle = cycle_;
    row.draining = draining_ || sample.has_value();
    row.h_bits.reserve(static_cast<std::size_t>(cfg_.rows));
    for (int r = 0; r < cfg_.rows; ++r) {
      row.h_bits += static_cast<char>('0' + edge_h_[r].ml);
      row.h_en += static_cast<char>('0' + edge_h_[r].en);
    }
    for (int c = 0; c < cfg_.cols; ++c) {
      row.v_bits += static_cast<char>('0' + edge_v_[c].mc);
      row.v_vt += static_cast<char>('0' + edge_v_[c].v_t);
      row.v_en += static_cast<char>('0' + edge_v_[c].en);
    }
    const MacT& m00 = macs_[0];
    row.mac00_acc = m00.committed_acc();
    row.mac00_mc_reg = m00.mc_reg;
    row.mac00_mask = m00.mask_reg;
    if (sample) {
      row.readout_valid = true;
      row.readout_r = sample->r;
      row.readout_c = sample->c;
      row.readout_value = sample->value;
    }
    trace_(row);
  }

  SaConfig cfg_;
  std::uint64_t cycle_ = 0;
  std::vector<MacT> macs_;
  std::vector<HBundle> h_pipe_;  // register feeding MAC(r,c), c >= 1
  std::vector<VBundle> v_pipe_;  // register feeding MAC(r,c), r >= 1
  std::vector<HBundle> cur_h_;
  std::vector<VBundle> cur_v_;
  std::vector<HBundle> edge_h_;
  std::vector<VBundle> edge_v_;
  std::vector<P2SState> p2s_h_;
  std::vector<P2SState> p2s_v_;

  bool draining_ = false;
  std::vector<ReadoutSample> drain_values_;  // snake order; drains from the end
  std::size_t drain_pos_ = 0;

  ToggleCounts toggles_;
  SaTraceSink trace_;
  MacInputProbe probe_;
};

// Drain the whole grid: one accumulator per cycle, arrival order the reverse
// of the snake traversal, every MAC exactly once.
template <class MacT>
std::vector<ReadoutSample> read_outputs(SystolicArray<MacT>& array) {
  array.begin_readout();
  std::vector<ReadoutSample> out;
  const std::size_t total = static_cast<std::size_t>(array.config().rows) *
                            array.config().cols;
  out.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    auto sample = array.step();
    if (!sample)
      throw ProtocolError(array.cycle(), "readout drain produced no value");
    out.push_back(*sample);
  }
  return out;
}

template <class MacT>
struct MatmulRun {
  ResultMatrix c;
  CycleStats stats;
};

// Full matrix multiplication: reset, stream per the schedule, drain, and
// account cycles. C(r,c) is exact; compute is (n+1)*width cycles and the
// drain is rows*cols.
template <class MacT>
MatmulRun<MacT> run_matmul(SystolicArray<MacT>& array, const Matrix& a,
                           const Matrix& b, int width) {
  const InputSchedule sched = schedule_matmul(array.config(), a, b, width);
  array.reset();

  for (std::uint64_t t = 0; t < sched.total_input_cycles(); ++t)
    array.step(&sched);

  const auto samples = read_outputs(array);

  MatmulRun<MacT> run;
  run.c = ResultMatrix(sched.m(), sched.p());
  for (const auto& s : samples)
    if (s.r < sched.m() && s.c < sched.p()) run.c.set(s.r, s.c, s.value);

  run.stats.fill_cycles = sched.fill_cycles();
  run.stats.compute_cycles = sched.compute_cycles();
  run.stats.readout_cycles = static_cast<std::uint64_t>(array.config().rows) *
                             array.config().cols;
  run.stats.total_cycles = run.stats.fill_cycles + run.stats.compute_cycles +
                           run.stats.readout_cycles;
  run.stats.toggle_counts = array.toggles();
  return run;
}

}  // namespace bitsmm
