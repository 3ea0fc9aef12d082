#pragma once

#include <cstdint>
#include <fstream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "bitsmm/errors.hpp"
#include "bitsmm/mac_driver.hpp"
#include "bitsmm/systolic_array.hpp"

// Trace sinks: CSV as the primary format (script-friendly, diffable) and a
// value-change-dump writer for waveform viewers.

namespace bitsmm {

inline std::string binary_string(std::uint32_t value, int bits) {
  std::string s(static_cast<std::size_t>(bits), '0');
  for (int i = 0; i < bits; ++i)
    if ((value >> i) & 1u) s[static_cast<std::size_t>(bits - 1 - i)] = '1';
  return s;
}

// --- CSV ---

inline const char* mac_trace_csv_header() {
  return "cycle,variant,mc_i,ml_i,v_t_i,edge,en,action,mc_reg,mask_reg,s_m,"
         "m_mc,acc,acc_sum,acc_diff";
}

class MacTraceCsvWriter {
 public:
  explicit MacTraceCsvWriter(std::ostream& out, int reg_bits = kDefaultBMax)
      : out_(out), reg_bits_(reg_bits) {
    out_ << mac_trace_csv_header() << "\n";
  }

  void operator()(const MacTraceRow& row) {
    const bool booth = row.variant == MacVariant::booth;
    out_ << row.cycle << "," << to_string(row.variant) << "," << row.mc_bit
         << "," << row.ml_bit << "," << row.v_t << "," << (row.edge ? 1 : 0)
         << "," << (row.enabled ? 1 : 0) << ",";
    if (booth)
      out_ << (row.enabled ? to_string(row.action) : "-");
    else
      out_ << (row.enabled && row.bit_taken ? "TAKE" : "-");
    out_ << "," << binary_string(row.mc_reg, reg_bits_) << ","
         << binary_string(row.mask_reg, reg_bits_) << ","
         << binary_string(row.s_m, reg_bits_) << "," << row.m_mc << ","
         << row.acc << ",";
    if (booth)
      out_ << ",";
    else
      out_ << row.acc_sum << "," << row.acc_diff;
    out_ << "\n";
  }

 private:
  std::ostream& out_;
  int reg_bits_;
};

inline const char* sa_trace_csv_header() {
  return "cycle,phase,h_bits,h_en,v_bits,v_vt,v_en,mac00_acc,mac00_mc_reg,"
         "mac00_mask,readout_r,readout_c,readout_value";
}

class SaTraceCsvWriter {
 public:
  explicit SaTraceCsvWriter(std::ostream& out, int reg_bits = kDefaultBMax)
      : out_(out), reg_bits_(reg_bits) {
    out_ << sa_trace_csv_header() << "\n";
  }

  void operator()(const SaTraceRow& row) {
    out_ << row.cycle << "," << (row.draining ? "drain" : "compute") << ","
         << row.h_bits << "," << row.h_en << "," << row.v_bits << ","
         << row.v_vt << "," << row.v_en << "," << row.mac00_acc << ","
         << binary_string(row.mac00_mc_reg, reg_bits_) << ","
         << binary_string(row.mac00_mask, reg_bits_) << ",";
    if (row.readout_valid)
      out_ << row.readout_r << "," << row.readout_c << ","
           << row.readout_value;
    else
      out_ << ",,";
    out_ << "\n";
  }

 private:
  std::ostream& out_;
  int reg_bits_;
};

// --- VCD ---

class VcdWriter {
 public:
  explicit VcdWriter(std::ostream& out) : out_(out) {}

  void add_signal(const std::string& name, int width) {
    if (header_written_) throw ConfigError("vcd signals must precede data");
    signals_.push_back({name, make_id(signals_.size()), width});
    index_[name] = signals_.size() - 1;
  }

  void write_header(const std::string& module = "top") {
    out_ << "$timescale 1ns $end\n";
    out_ << "$scope module " << module << " $end\n";
    for (const auto& s : signals_)
      out_ << "$var wire " << s.width << " " << s.id << " " << s.name
           << " $end\n";
    out_ << "$upscope $end\n$enddefinitions $end\n";
    header_written_ = true;
  }

  void time(std::uint64_t t) { out_ << "#" << t << "\n"; }

  void value(const std::string& name, std::uint64_t v) {
    const auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown vcd signal: " + name);
    const auto& s = signals_[it->second];
    if (s.width == 1) {
      out_ << (v & 1u) << s.id << "\n";
      return;
    }
    out_ << "b";
    for (int i = s.width - 1; i >= 0; --i) out_ << ((v >> i) & 1u);
    out_ << " " << s.id << "\n";
  }

 private:
  struct Signal {
    std::string name;
    std::string id;
    int width;
  };

  static std::string make_id(std::size_t n) {
    std::string s;
    do {
      s.push_back(static_cast<char>('!' + (n % 94)));
      n /= 94;
    } while (n > 0);
    return s;
  }

  std::ostream& out_;
  std::vector<Signal> signals_;
  std::unordered_map<std::string, std::size_t> index_;
  bool header_written_ = false;
};

// MAC-level VCD sink covering both variants.
class MacTraceVcdWriter {
 public:
  MacTraceVcdWriter(std::ostream& out, int b_max, int acc_width)
      : vcd_(out) {
    vcd_.add_signal("mc_i", 1);
    vcd_.add_signal("ml_i", 1);
    vcd_.add_signal("v_t_i", 1);
    vcd_.add_signal("edge", 1);
    vcd_.add_signal("en", 1);
    vcd_.add_signal("mc_reg", b_max);
    vcd_.add_signal("mask_reg", b_max);
    vcd_.add_signal("s_m", b_max);
    vcd_.add_signal("m_mc", acc_width);
    vcd_.add_signal("acc", acc_width);
    vcd_.write_header("bit_serial_mac");
    acc_width_ = acc_width;
  }

  void operator()(const MacTraceRow& row) {
    vcd_.time(row.cycle);
    vcd_.value("mc_i", static_cast<std::uint64_t>(row.mc_bit));
    vcd_.value("ml_i", static_cast<std::uint64_t>(row.ml_bit));
    vcd_.value("v_t_i", static_cast<std::uint64_t>(row.v_t));
    vcd_.value("edge", row.edge ? 1 : 0);
    vcd_.value("en", row.enabled ? 1 : 0);
    vcd_.value("mc_reg", row.mc_reg);
    vcd_.value("mask_reg", row.mask_reg);
    vcd_.value("s_m", row.s_m);
    vcd_.value("m_mc", mask_acc(row.m_mc));
    vcd_.value("acc", mask_acc(row.acc));
  }

 private:
  std::uint64_t mask_acc(std::int64_t v) const {
    if (acc_width_ >= 64) return static_cast<std::uint64_t>(v);
    return static_cast<std::uint64_t>(v) &
           ((std::uint64_t{1} << acc_width_) - 1);
  }

  VcdWriter vcd_;
  int acc_width_ = 0;
};

}  // namespace bitsmm
