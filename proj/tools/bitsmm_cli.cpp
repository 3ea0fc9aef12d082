#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bitsmm/bitsmm.hpp"

// bitsmm: cycle-accurate bit-serial systolic-array simulator.
//
// Exit codes: 0 all verifications passed, 1 a verification failed,
// 2 usage error.

namespace {

constexpr const char* kSeedHelp =
    "64-bit seed; test vectors expand deterministically through "
    "std::mt19937_64 with modulo-reduced draws";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "bitsmm - cycle-accurate simulator of a bit-serial matrix "
      "multiplication systolic array.\n"
      "Output paths resolve against $BITSMM_OUT_DIR when relative.\n"
      "Exit codes: 0 pass, 1 verification failure, 2 usage error."};
  app.require_subcommand(1);

  // mac
  bitsmm::cli::MacCmd mac_cmd;
  auto* mac = app.add_subcommand(
      "mac", "Run one bit-serial multiplication or dot product and check it "
             "against the integer oracle");
  mac->add_option("--variant", mac_cmd.variant, "MAC variant: booth | sbmwc")
      ->default_val("booth");
  mac->add_flag("--dot", mac_cmd.dot, "run a random dot product instead of "
                                      "one multiplication");
  mac->add_option("--a", mac_cmd.a, "multiplicand (single multiplication)");
  mac->add_option("--b", mac_cmd.b, "multiplier (single multiplication)");
  mac->add_option("--width", mac_cmd.width, "operand width in bits [1,16]")
      ->default_val(4);
  mac->add_option("--n", mac_cmd.n, "dot-product length (with --dot)")
      ->default_val(1);
  mac->add_option("--seed", mac_cmd.seed, kSeedHelp)->default_val(1);
  mac->add_flag("--json", mac_cmd.json, "emit a JSON report");

  // matmul
  bitsmm::cli::MatmulCmd mm_cmd;
  auto* mm = app.add_subcommand(
      "matmul", "Run a matrix multiplication on the systolic array and "
                "verify it against the integer matrix oracle");
  mm->add_option("--variant", mm_cmd.variant, "MAC variant: booth | sbmwc")
      ->default_val("booth");
  mm->add_option("--rows", mm_cmd.rows, "array rows")->default_val(4);
  mm->add_option("--cols", mm_cmd.cols, "array columns")->default_val(16);
  mm->add_option("--width", mm_cmd.width, "operand width in bits [1,16]")
      ->default_val(8);
  mm->add_option("--n", mm_cmd.n, "shared dimension of the product")
      ->default_val(8);
  mm->add_option("--m", mm_cmd.m, "A rows (default: array rows)");
  mm->add_option("--p", mm_cmd.p, "B columns (default: array columns)");
  mm->add_option("--seed", mm_cmd.seed, kSeedHelp)->default_val(1);
  mm->add_option("--a-file", mm_cmd.a_file,
                 "A operand as CSV (header 'width,<n>', one row per line)");
  mm->add_option("--b-file", mm_cmd.b_file, "B operand as CSV");
  mm->add_flag("--json", mm_cmd.json, "emit a JSON report");

  // verify
  bitsmm::cli::VerifyCmd verify_cmd;
  auto* verify = app.add_subcommand(
      "verify", "Run the full verification protocol: exhaustive pairs at "
                "widths 1-8, randomized pairs at widths 9-16, random dot "
                "products (lengths 1-1000), and array matmuls, all against "
                "integer oracles");
  verify->add_option("--seed", verify_cmd.seed, kSeedHelp)->default_val(1);
  verify->add_flag("--quick", verify_cmd.quick,
                   "deterministic reduced suite");
  verify
      ->add_flag("--inject-fault", verify_cmd.inject_fault,
                 "test hook: corrupt one recode-table row to prove the "
                 "protocol catches it")
      ->group("");  // hidden

  // sweep
  bitsmm::cli::SweepCmd sweep_cmd;
  std::string preset;
  auto* sweep = app.add_subcommand(
      "sweep", "Evaluate the analytic throughput model over topology, width "
               "and frequency axes. CSV schema: " +
                   std::string(bitsmm::cli::sweep_csv_header()));
  sweep->add_option("--preset", preset,
                    "named preset: 'paper' emits the reference evaluation "
                    "grid (peak curves for 16x4/32x8/64x16 across widths "
                    "1-16 plus the reference FPGA and ASIC operating "
                    "points)");
  sweep->add_option("--topo", sweep_cmd.topologies,
                    "topology axis, e.g. 16x4 (cols x rows); repeatable");
  sweep->add_option("--widths", sweep_cmd.widths,
                    "width axis: '1..16' or '4,8,16'");
  sweep->add_option("--freq", sweep_cmd.freqs_mhz,
                    "frequency axis in MHz; repeatable");
  sweep->add_option("--format", sweep_cmd.format, "csv | json")
      ->default_val("csv");
  sweep->add_option("--out", sweep_cmd.out_file,
                    "write to a file instead of stdout");

  // trace
  bitsmm::cli::TraceCmd trace_cmd;
  auto* trace = app.add_subcommand(
      "trace", "Record a per-cycle signal trace to CSV (and optionally VCD "
               "for MAC traces). MAC CSV schema: " +
                   std::string(bitsmm::mac_trace_csv_header()) +
                   "; array CSV schema: " +
                   std::string(bitsmm::sa_trace_csv_header()));
  trace->add_option("--variant", trace_cmd.variant, "booth | sbmwc")
      ->default_val("booth");
  trace->add_flag("--array", trace_cmd.array,
                  "trace a full-array matmul instead of one MAC");
  trace->add_option("--a", trace_cmd.a, "multiplicand (MAC trace)");
  trace->add_option("--b", trace_cmd.b, "multiplier (MAC trace)");
  trace->add_option("--width", trace_cmd.width, "operand width")
      ->default_val(4);
  trace->add_flag("--dot", trace_cmd.dot, "trace a random dot product");
  trace->add_option("--n", trace_cmd.n,
                    "dot length (MAC) or shared dimension (array)")
      ->default_val(1);
  trace->add_option("--rows", trace_cmd.rows, "array rows (with --array)")
      ->default_val(1);
  trace->add_option("--cols", trace_cmd.cols, "array columns (with --array)")
      ->default_val(1);
  trace->add_option("--m", trace_cmd.m, "A rows (with --array)");
  trace->add_option("--p", trace_cmd.p, "B columns (with --array)");
  trace->add_option("--seed", trace_cmd.seed, kSeedHelp)->default_val(1);
  trace->add_option("--out", trace_cmd.out_file, "trace CSV path")
      ->required();
  trace->add_option("--vcd", trace_cmd.vcd_file,
                    "also write a value-change dump (MAC traces)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (mac->parsed()) return bitsmm::cli::cmd_mac(mac_cmd, std::cout);
    if (mm->parsed()) return bitsmm::cli::cmd_matmul(mm_cmd, std::cout);
    if (verify->parsed())
      return bitsmm::cli::cmd_verify(verify_cmd, std::cout);
    if (sweep->parsed()) {
      if (!preset.empty()) {
        if (preset != "paper") {
          std::cerr << "error: unknown preset '" << preset << "'\n";
          return 2;
        }
        sweep_cmd.preset_paper = true;
      }
      return bitsmm::cli::cmd_sweep(sweep_cmd, std::cout);
    }
    if (trace->parsed()) return bitsmm::cli::cmd_trace(trace_cmd, std::cout);
  } catch (const bitsmm::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const bitsmm::SimError& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
