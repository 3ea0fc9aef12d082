#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bitsmm/bitmath.hpp"
#include "bitsmm/mac_driver.hpp"
#include "bitsmm/matrix.hpp"
#include "bitsmm/perf_model.hpp"
#include "bitsmm/random.hpp"
#include "bitsmm/systolic_array.hpp"
#include "bitsmm/trace.hpp"
#include "bitsmm/verify.hpp"

// Command implementations behind the CLI front end. Exit codes: 0 every
// verification passed, 1 a verification failed, 2 usage error (ConfigError).

namespace bitsmm::cli {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Relative output paths resolve against BITSMM_OUT_DIR when it is set.
inline std::string resolve_output_path(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  const char* dir = std::getenv("BITSMM_OUT_DIR");
  if (!dir || !*dir) return path;
  std::string d(dir);
  if (d.back() != '/') d += '/';
  return d + path;
}

inline std::ofstream open_output_file(const std::string& path) {
  const std::string resolved = resolve_output_path(path);
  std::ofstream out(resolved);
  if (!out) throw ConfigError("cannot open output file: " + resolved);
  return out;
}

inline MacVariant parse_variant(const std::string& name) {
  if (name == "booth") return MacVariant::booth;
  if (name == "sbmwc") return MacVariant::sbmwc;
  throw ConfigError("unknown variant: " + name + " (booth or sbmwc)");
}

// ---- mac ----

struct MacCmd {
  std::string variant = "booth";
  bool dot = false;
  std::int64_t a = 0;
  std::int64_t b = 0;
  int width = 4;
  int n = 1;  // dot-product length
  std::uint64_t seed = 1;
  bool json = false;
};

inline int cmd_mac(const MacCmd& cmd, std::ostream& out) {
  const MacVariant variant = parse_variant(cmd.variant);
  if (cmd.width < 1 || cmd.width > kMaxWordWidth)
    throw ConfigError("width outside [1, " + std::to_string(kMaxWordWidth) +
                      "]");

  std::vector<SignedWord> va, vb;
  if (cmd.dot) {
    if (cmd.n < 1) throw ConfigError("dot-product length must be >= 1");
    Rng rng(cmd.seed);
    for (int i = 0; i < cmd.n; ++i) {
      va.push_back(rng.word(cmd.width));
      vb.push_back(rng.word(cmd.width));
    }
  } else {
    va.push_back(SignedWord(static_cast<std::int32_t>(cmd.a), cmd.width));
    vb.push_back(SignedWord(static_cast<std::int32_t>(cmd.b), cmd.width));
  }

  std::int64_t expect = 0;
  for (std::size_t i = 0; i < va.size(); ++i)
    expect += oracle_product(va[i], vb[i]);

  const DriveResult got = drive_dot_product(variant, va, vb, cmd.width);
  const std::uint64_t predicted = serial_dot_cycle_count(
      va.size(), static_cast<std::uint64_t>(cmd.width));
  const auto cmp = compare_cycle_models(cmd.width, cmd.width,
                                        static_cast<long long>(va.size()));
  const bool pass = got.product == expect && got.cycles == predicted;

  if (cmd.json) {
    out << "{\"command\":\"mac\",\"variant\":\"" << cmd.variant
        << "\",\"n\":" << va.size() << ",\"width\":" << cmd.width
        << ",\"product\":" << got.product << ",\"oracle\":" << expect
        << ",\"cycles\":" << got.cycles << ",\"predicted_cycles\":"
        << predicted << ",\"bit_product_reference_cycles\":"
        << cmp.bismo_cycles << ",\"pass\":" << (pass ? "true" : "false")
        << "}\n";
  } else {
    out << "command: mac\n";
    out << "variant: " << cmd.variant << "\n";
    if (cmd.dot)
      out << "dot product: n=" << va.size() << " width=" << cmd.width
          << " seed=" << cmd.seed << "\n";
    else
      out << "operands: a=" << cmd.a << " b=" << cmd.b << " width="
          << cmd.width << "\n";
    out << "product: " << got.product << "\n";
    out << "oracle:  " << expect << "\n";
    out << "cycles: " << got.cycles << " (predicted (n+1)*width = "
        << predicted << ")\n";
    out << "bit-product reference method would need " << cmp.bismo_cycles
        << " cycles\n";
    out << "result: " << (pass ? "PASS" : "FAIL") << "\n";
  }
  return pass ? 0 : 1;
}

// ---- matmul ----

struct MatmulCmd {
  std::string variant = "booth";
  int rows = 4;
  int cols = 16;
  int width = 8;
  int n = 8;
  int m = 0;  // A rows; 0 = use array rows
  int p = 0;  // B cols; 0 = use array cols
  std::uint64_t seed = 1;
  std::string a_file;  // optional CSV matrix sources
  std::string b_file;
  bool json = false;
};

namespace detail {

template <class MacT>
int run_matmul_cmd(const MatmulCmd& cmd, const Matrix& a, const Matrix& b,
                   std::ostream& out) {
  SaConfig cfg;
  cfg.rows = cmd.rows;
  cfg.cols = cmd.cols;
  SystolicArray<MacT> array(cfg);
  const auto run = run_matmul(array, a, b, cmd.width);
  const ResultMatrix expect = matmul_oracle(a, b);
  const bool pass = run.c == expect;

  PerfQuery q;
  q.n = a.cols();
  q.a_width_elems = b.cols();
  q.b_height_elems = a.rows();
  q.bit_width = cmd.width;
  q.sa_width = cfg.cols;
  q.sa_height = cfg.rows;
  const auto v = validate_model(run.stats, q);
  const auto structure = structural_report(cfg);

  if (cmd.json) {
    out << "{\"command\":\"matmul\",\"variant\":\"" << cmd.variant
        << "\",\"array\":\"" << cfg.label() << "\",\"rows\":" << cfg.rows
        << ",\"cols\":" << cfg.cols << ",\"m\":" << a.rows() << ",\"n\":"
        << a.cols() << ",\"p\":" << b.cols() << ",\"width\":" << cmd.width
        << ",\"fill_cycles\":" << run.stats.fill_cycles
        << ",\"compute_cycles\":" << run.stats.compute_cycles
        << ",\"readout_cycles\":" << run.stats.readout_cycles
        << ",\"total_cycles\":" << run.stats.total_cycles
        << ",\"measured_op_per_cycle\":\"" << v.measured_op_per_cycle.str()
        << "\",\"model_op_per_cycle\":\"" << v.model_op_per_cycle.str()
        << "\",\"pass\":" << (pass ? "true" : "false") << "}\n";
  } else {
    out << "command: matmul\n";
    out << "array: " << cfg.label() << " (cols x rows) -> rows=" << cfg.rows
        << " cols=" << cfg.cols << ", variant " << cmd.variant << "\n";
    out << "workload: A " << a.rows() << "x" << a.cols() << " * B "
        << b.rows() << "x" << b.cols() << ", width " << cmd.width << "\n";
    out << "fill cycles: " << run.stats.fill_cycles << "\n";
    out << "compute cycles: " << run.stats.compute_cycles << "\n";
    out << "readout cycles: " << run.stats.readout_cycles << "\n";
    out << "total cycles: " << run.stats.total_cycles << "\n";
    out << "measured OP/cycle: " << v.measured_op_per_cycle.str() << " = "
        << format_double(v.measured_op_per_cycle.to_double()) << "\n";
    out << "measured OP/cycle excluding fill: " << v.measured_excl_fill.str()
        << "\n";
    out << "model OP/cycle: " << v.model_op_per_cycle.str() << " = "
        << format_double(v.model_op_per_cycle.to_double()) << "\n";
    out << "structure: macs " << structure.mac_count << ", readout muxes "
        << structure.readout_mux_count << ", readout chain registers "
        << structure.readout_chain_registers << "\n";
    out << "toggle flips: mac " << run.stats.toggle_counts.mac_acc +
                                      run.stats.toggle_counts.mac_datapath +
                                      run.stats.toggle_counts.mac_control
        << ", pipes " << run.stats.toggle_counts.h_pipe +
                             run.stats.toggle_counts.v_pipe
        << "\n";
    out << "result: " << (pass ? "PASS" : "FAIL") << "\n";
  }
  return pass ? 0 : 1;
}

}  // namespace detail

inline int cmd_matmul(const MatmulCmd& cmd, std::ostream& out) {
  const MacVariant variant = parse_variant(cmd.variant);
  if (!cmd.a_file.empty() != !cmd.b_file.empty())
    throw ConfigError("matrix files must be given for both operands");

  Matrix a(1, 1, 1), b(1, 1, 1);
  if (!cmd.a_file.empty()) {
    a = read_matrix_csv_file(cmd.a_file);
    b = read_matrix_csv_file(cmd.b_file);
  } else {
    if (cmd.n < 1) throw ConfigError("shared dimension n must be >= 1");
    const int m = cmd.m > 0 ? cmd.m : cmd.rows;
    const int p = cmd.p > 0 ? cmd.p : cmd.cols;
    Rng rng(cmd.seed);
    a = rng.matrix(m, cmd.n, cmd.width);
    b = rng.matrix(cmd.n, p, cmd.width);
  }

  if (variant == MacVariant::booth)
    return detail::run_matmul_cmd<BoothMacState>(cmd, a, b, out);
  return detail::run_matmul_cmd<SbmwcMacState>(cmd, a, b, out);
}

// ---- verify ----

struct VerifyCmd {
  std::uint64_t seed = 1;
  bool quick = false;
  bool inject_fault = false;
};

inline int cmd_verify(const VerifyCmd& cmd, std::ostream& out) {
  VerifyOptions opts;
  opts.seed = cmd.seed;
  opts.quick = cmd.quick;
  opts.fault_flip_add_row = cmd.inject_fault;
  const VerifyReport rep = run_verification(opts);
  rep.render(out);
  return rep.passed() ? 0 : 1;
}

// ---- sweep ----

struct SweepCmd {
  bool preset_paper = false;
  std::vector<std::string> topologies;  // "16x4", ...
  std::string widths;                   // "1..16" or "4,8,16"
  std::vector<double> freqs_mhz;
  std::string format = "csv";  // csv | json
  std::string out_file;        // empty = stream
};

inline std::vector<int> parse_width_axis(const std::string& text) {
  std::vector<int> widths;
  const auto range = text.find("..");
  if (range != std::string::npos) {
    const int lo = std::stoi(text.substr(0, range));
    const int hi = std::stoi(text.substr(range + 2));
    if (lo < 1 || hi < lo) throw ConfigError("bad width range: " + text);
    for (int w = lo; w <= hi; ++w) widths.push_back(w);
    return widths;
  }
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) widths.push_back(std::stoi(cell));
  if (widths.empty()) throw ConfigError("empty width axis");
  return widths;
}

inline const char* sweep_csv_header() {
  return "section,topology,variant,rows,cols,width,freq_mhz,op_per_cycle,"
         "gops";
}

namespace detail {

struct SweepRow {
  std::string section;
  Topology topo;
  std::string variant = "booth";
  int width = 0;
  std::optional<double> freq_mhz;
  Rational opc;
  std::optional<double> gops_val;
};

inline std::vector<SweepRow> paper_preset_rows() {
  std::vector<SweepRow> rows;
  // peak throughput curves across the width axis
  for (const auto& topo : reference_topologies())
    for (int w = 1; w <= kMaxWordWidth; ++w)
      rows.push_back({"curve", topo, "booth", w, std::nullopt,
                      peak_op_per_cycle(topo.cols, topo.rows, w),
                      std::nullopt});
  // reference operating points at full precision
  for (const auto& point : reference_points()) {
    const Rational peak =
        peak_op_per_cycle(point.topo.cols, point.topo.rows, kMaxWordWidth);
    const std::string variant = point.sbmwc ? "sbmwc" : "booth";
    if (point.max_freq_mhz > 0)
      rows.push_back({std::string(point.platform) + "_max", point.topo,
                      variant, kMaxWordWidth, point.max_freq_mhz, peak,
                      gops(peak, point.max_freq_mhz * 1e6)});
    rows.push_back({std::string(point.platform) + "_target", point.topo,
                    variant, kMaxWordWidth, point.target_freq_mhz, peak,
                    gops(peak, point.target_freq_mhz * 1e6)});
  }
  return rows;
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows,
                            std::ostream& out) {
  out << sweep_csv_header() << "\n";
  for (const auto& r : rows) {
    out << r.section << "," << r.topo.label() << "," << r.variant << ","
        << r.topo.rows << "," << r.topo.cols << "," << r.width << ",";
    if (r.freq_mhz) out << format_double(*r.freq_mhz);
    out << "," << r.opc.str() << ",";
    if (r.gops_val) out << format_double(*r.gops_val);
    out << "\n";
  }
}

inline void write_sweep_json(const std::vector<SweepRow>& rows,
                             std::ostream& out) {
  out << "[";
  bool first = true;
  for (const auto& r : rows) {
    if (!first) out << ",";
    first = false;
    out << "\n  {\"section\":\"" << r.section << "\",\"topology\":\""
        << r.topo.label() << "\",\"variant\":\"" << r.variant
        << "\",\"rows\":" << r.topo.rows << ",\"cols\":" << r.topo.cols
        << ",\"width\":" << r.width << ",\"freq_mhz\":"
        << (r.freq_mhz ? format_double(*r.freq_mhz) : "null")
        << ",\"op_per_cycle\":\"" << r.opc.str() << "\",\"gops\":"
        << (r.gops_val ? format_double(*r.gops_val) : "null") << "}";
  }
  out << "\n]\n";
}

}  // namespace detail

inline int cmd_sweep(const SweepCmd& cmd, std::ostream& out) {
  std::vector<detail::SweepRow> rows;
  if (cmd.preset_paper) {
    rows = detail::paper_preset_rows();
  } else {
    if (cmd.topologies.empty())
      throw ConfigError("sweep needs --topo axes or --preset paper");
    if (cmd.widths.empty()) throw ConfigError("sweep needs a --widths axis");
    const std::vector<int> widths = parse_width_axis(cmd.widths);
    for (const auto& label : cmd.topologies) {
      const Topology topo = parse_topology(label);
      for (int w : widths) {
        if (w < 1 || w > kMaxWordWidth)
          throw ConfigError("width " + std::to_string(w) + " outside [1, " +
                            std::to_string(kMaxWordWidth) + "]");
        const Rational peak = peak_op_per_cycle(topo.cols, topo.rows, w);
        if (cmd.freqs_mhz.empty()) {
          rows.push_back({"custom", topo, "booth", w, std::nullopt, peak,
                          std::nullopt});
        } else {
          for (double f : cmd.freqs_mhz) {
            if (f <= 0) throw ConfigError("frequency must be positive");
            rows.push_back({"custom", topo, "booth", w, f, peak,
                            gops(peak, f * 1e6)});
          }
        }
      }
    }
  }

  const auto write = [&](std::ostream& sink) {
    if (cmd.format == "csv")
      detail::write_sweep_csv(rows, sink);
    else if (cmd.format == "json")
      detail::write_sweep_json(rows, sink);
    else
      throw ConfigError("unknown format: " + cmd.format + " (csv or json)");
  };

  if (cmd.out_file.empty()) {
    write(out);
  } else {
    auto file = open_output_file(cmd.out_file);
    write(file);
    out << "sweep written: " << resolve_output_path(cmd.out_file) << " ("
        << rows.size() << " rows)\n";
  }
  return 0;
}

// ---- trace ----

struct TraceCmd {
  std::string variant = "booth";
  bool array = false;  // MAC trace by default
  std::int64_t a = 6;
  std::int64_t b = -2;
  int width = 4;
  bool dot = false;
  int n = 1;
  int rows = 1;
  int cols = 1;
  int m = 0;
  int p = 0;
  std::uint64_t seed = 1;
  std::string out_file;  // CSV, required
  std::string vcd_file;  // optional
};

namespace detail {

template <class MacT>
std::uint64_t run_array_trace(const TraceCmd& cmd, std::ostream& csv) {
  SaConfig cfg;
  cfg.rows = cmd.rows;
  cfg.cols = cmd.cols;
  SystolicArray<MacT> array(cfg);
  Rng rng(cmd.seed);
  const int m = cmd.m > 0 ? cmd.m : cmd.rows;
  const int p = cmd.p > 0 ? cmd.p : cmd.cols;
  const Matrix a = rng.matrix(m, cmd.n, cmd.width);
  const Matrix b = rng.matrix(cmd.n, p, cmd.width);

  SaTraceCsvWriter writer(csv, cfg.b_max);
  std::uint64_t traced = 0;
  array.set_trace_sink([&](const SaTraceRow& row) {
    writer(row);
    ++traced;
  });
  run_matmul(array, a, b, cmd.width);
  return traced;
}

}  // namespace detail

inline int cmd_trace(const TraceCmd& cmd, std::ostream& out) {
  if (cmd.out_file.empty()) throw ConfigError("trace needs --out <file.csv>");
  const MacVariant variant = parse_variant(cmd.variant);
  auto csv = open_output_file(cmd.out_file);
  std::uint64_t traced = 0;

  if (cmd.array) {
    if (!cmd.vcd_file.empty())
      throw ConfigError("vcd output is only available for MAC traces");
    if (variant == MacVariant::booth)
      traced = detail::run_array_trace<BoothMacState>(cmd, csv);
    else
      traced = detail::run_array_trace<SbmwcMacState>(cmd, csv);
  } else {
    std::vector<SignedWord> va, vb;
    if (cmd.dot) {
      Rng rng(cmd.seed);
      for (int i = 0; i < cmd.n; ++i) {
        va.push_back(rng.word(cmd.width));
        vb.push_back(rng.word(cmd.width));
      }
    } else {
      va.push_back(SignedWord(static_cast<std::int32_t>(cmd.a), cmd.width));
      vb.push_back(SignedWord(static_cast<std::int32_t>(cmd.b), cmd.width));
    }

    MacConfig mac_cfg;
    MacTraceCsvWriter csv_writer(csv, mac_cfg.b_max);
    std::optional<std::ofstream> vcd_stream;
    std::optional<MacTraceVcdWriter> vcd_writer;
    if (!cmd.vcd_file.empty()) {
      vcd_stream.emplace(open_output_file(cmd.vcd_file));
      if (!*vcd_stream)
        throw ConfigError("cannot open vcd file: " + cmd.vcd_file);
      vcd_writer.emplace(*vcd_stream, mac_cfg.b_max, mac_cfg.acc_width());
    }

    DriveOptions opts;
    opts.trace = [&](const MacTraceRow& row) {
      csv_writer(row);
      if (vcd_writer) (*vcd_writer)(row);
      ++traced;
    };
    drive_dot_product(variant, va, vb, cmd.width, opts);
  }

  out << "trace written: " << resolve_output_path(cmd.out_file) << " ("
      << traced << " rows)\n";
  if (!cmd.vcd_file.empty())
    out << "vcd written: " << resolve_output_path(cmd.vcd_file) << "\n";
  return 0;
}

}  // namespace bitsmm::cli
