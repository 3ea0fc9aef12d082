#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "bitsmm/bitmath.hpp"
#include "bitsmm/mac_driver.hpp"
#include "bitsmm/matrix.hpp"
#include "bitsmm/random.hpp"
#include "bitsmm/systolic_array.hpp"

// Full functional verification protocol:
//   1. exhaustive multiplicand/multiplier pairs at widths 1..8, both variants;
//   2. randomized pairs per width at widths 9..16, both variants;
//   3. randomized vector dot products, widths 1..16, lengths 1..1000;
//   4. matrix multiplications on generated topologies, checked against the
//      integer matrix oracle, plus cross-variant equivalence.
// Every case is also checked for the exact cycle law (n + 1) * width.

namespace bitsmm {

struct VerifyOptions {
  std::uint64_t seed = 1;
  bool quick = false;
  bool fault_flip_add_row = false;  // negative control, see BoothMacState
};

struct VerifyReport {
  std::uint64_t cases_run = 0;
  std::uint64_t failures = 0;
  std::string first_failure;  // reproducer for the first failing case
  std::vector<std::string> section_lines;

  bool passed() const { return failures == 0; }

  void render(std::ostream& out) const {
    for (const auto& line : section_lines) out << line << "\n";
    out << "total cases: " << cases_run << "\n";
    if (passed()) {
      out << "verification PASSED\n";
    } else {
      out << "verification FAILED\n";
      out << "reproducer: " << first_failure << "\n";
    }
  }

  std::string str() const {
    std::ostringstream out;
    render(out);
    return out.str();
  }
};

namespace detail {

inline void record_failure(VerifyReport& rep, const std::string& reproducer) {
  ++rep.failures;
  if (rep.first_failure.empty()) rep.first_failure = reproducer;
}

inline bool check_pair(VerifyReport& rep, MacVariant variant,
                       const SignedWord& a, const SignedWord& b,
                       const DriveOptions& opts) {
  const std::int64_t expect = oracle_product(a, b);
  const std::uint64_t expect_cycles = serial_dot_cycle_count(
      1, static_cast<std::uint64_t>(std::max(a.width(), b.width())));
  const DriveResult got = drive_multiplication(variant, a, b, opts);
  ++rep.cases_run;
  if (got.product != expect || got.cycles != expect_cycles) {
    std::ostringstream r;
    r << "mac --variant " << to_string(variant) << " --a " << a.value()
      << " --b " << b.value() << " --width "
      << std::max(a.width(), b.width()) << "  (got " << got.product << " in "
      << got.cycles << " cycles, expected " << expect << " in "
      << expect_cycles << ")";
    record_failure(rep, r.str());
    return false;
  }
  return true;
}

}  // namespace detail

inline VerifyReport run_verification(const VerifyOptions& opts) {
  VerifyReport rep;
  DriveOptions drive_opts;
  drive_opts.fault_flip_add_row = opts.fault_flip_add_row;
  const MacVariant variants[] = {MacVariant::booth, MacVariant::sbmwc};

  // 1. exhaustive pairs
  const int exhaustive_max_width = opts.quick ? 4 : 8;
  for (int w = 1; w <= exhaustive_max_width; ++w) {
    const std::int32_t lo = SignedWord::min_value(w);
    const std::int32_t hi = SignedWord::max_value(w);
    std::uint64_t section_cases = 0;
    for (MacVariant variant : variants)
      for (std::int32_t a = lo; a <= hi; ++a)
        for (std::int32_t b = lo; b <= hi; ++b) {
          if (!detail::check_pair(rep, variant, SignedWord(a, w),
                                  SignedWord(b, w), drive_opts))
            goto exhaustive_done;
          ++section_cases;
        }
    rep.section_lines.push_back("exhaustive width " + std::to_string(w) +
                                ": " + std::to_string(section_cases) +
                                " cases ok");
  }
exhaustive_done:
  if (!rep.passed()) return rep;

  // 2. randomized pairs at the wide widths
  {
    Rng rng(opts.seed);
    const int pairs_per_width = opts.quick ? 10 : 100;
    const int first_width = opts.quick ? exhaustive_max_width + 1 : 9;
    std::uint64_t section_cases = 0;
    for (int w = first_width; w <= kMaxWordWidth; ++w)
      for (int i = 0; i < pairs_per_width; ++i) {
        const SignedWord a = rng.word(w);
        const SignedWord b = rng.word(w);
        for (MacVariant variant : variants) {
          if (!detail::check_pair(rep, variant, a, b, drive_opts)) {
            rep.first_failure += "  [seed " + std::to_string(opts.seed) + "]";
            return rep;
          }
          ++section_cases;
        }
      }
    rep.section_lines.push_back("randomized pairs: " +
                                std::to_string(section_cases) + " cases ok");
  }

  // 3. randomized dot products
  {
    Rng rng(opts.seed + 1);
    const std::vector<int> lengths =
        opts.quick ? std::vector<int>{1, 2, 10, 100}
                   : std::vector<int>{1, 2, 10, 100, 1000};
    const int extra_random_lengths = opts.quick ? 1 : 3;
    std::uint64_t section_cases = 0;
    for (int w = 1; w <= kMaxWordWidth; ++w) {
      std::vector<int> ns = lengths;
      for (int i = 0; i < extra_random_lengths; ++i)
        ns.push_back(static_cast<int>(rng.range(1, 1000)));
      for (int n : ns) {
        std::vector<SignedWord> va, vb;
        va.reserve(static_cast<std::size_t>(n));
        vb.reserve(static_cast<std::size_t>(n));
        std::int64_t expect = 0;
        for (int i = 0; i < n; ++i) {
          va.push_back(rng.word(w));
          vb.push_back(rng.word(w));
          expect += oracle_product(va.back(), vb.back());
        }
        const std::uint64_t expect_cycles = serial_dot_cycle_count(
            static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(w));
        for (MacVariant variant : variants) {
          const DriveResult got =
              drive_dot_product(variant, va, vb, w, drive_opts);
          ++rep.cases_run;
          ++section_cases;
          if (got.product != expect || got.cycles != expect_cycles) {
            std::ostringstream r;
            r << "mac --dot --variant " << to_string(variant) << " --width "
              << w << " --n " << n << " --seed " << opts.seed
              << "  (got " << got.product << " in " << got.cycles
              << " cycles, expected " << expect << " in " << expect_cycles
              << ")";
            detail::record_failure(rep, r.str());
            return rep;
          }
        }
      }
    }
    rep.section_lines.push_back("dot products: " +
                                std::to_string(section_cases) + " cases ok");
  }

  // 4. matrix multiplications on generated topologies
  {
    Rng rng(opts.seed + 2);
    struct TopoCase {
      int rows, cols, runs;
    };
    const std::vector<TopoCase> topos =
        opts.quick ? std::vector<TopoCase>{{1, 1, 2}, {2, 3, 2}, {4, 16, 1}}
                   : std::vector<TopoCase>{{1, 1, 3},
                                           {2, 2, 3},
                                           {3, 5, 3},
                                           {4, 16, 3},
                                           {8, 32, 2},
                                           {16, 64, 1}};
    std::uint64_t section_cases = 0;
    for (const auto& tc : topos) {
      SaConfig cfg;
      cfg.rows = tc.rows;
      cfg.cols = tc.cols;
      SystolicArray<BoothMacState> booth_array(cfg);
      SystolicArray<SbmwcMacState> sbmwc_array(cfg);
      for (int run = 0; run < tc.runs; ++run) {
        const int m = static_cast<int>(rng.range(1, tc.rows));
        const int p = static_cast<int>(rng.range(1, tc.cols));
        const int n = static_cast<int>(rng.range(1, opts.quick ? 6 : 12));
        const int w = static_cast<int>(rng.range(1, kMaxWordWidth));
        const Matrix a = rng.matrix(m, n, w);
        const Matrix b = rng.matrix(n, p, w);
        const ResultMatrix expect = matmul_oracle(a, b);
        const auto rb = run_matmul(booth_array, a, b, w);
        const auto rs = run_matmul(sbmwc_array, a, b, w);
        rep.cases_run += 2;
        section_cases += 2;
        if (!(rb.c == expect) || !(rs.c == expect) || !(rb.c == rs.c)) {
          std::ostringstream r;
          r << "matmul --rows " << tc.rows << " --cols " << tc.cols
            << " --m " << m << " --p " << p << " --n " << n << " --width "
            << w << " --seed " << opts.seed << "  (oracle mismatch"
            << (rb.c == rs.c ? "" : ", variants disagree") << ")";
          detail::record_failure(rep, r.str());
          return rep;
        }
        const std::uint64_t want_compute =
            serial_dot_cycle_count(static_cast<std::uint64_t>(n),
                                   static_cast<std::uint64_t>(w));
        if (rb.stats.compute_cycles != want_compute ||
            rb.stats.readout_cycles !=
                static_cast<std::uint64_t>(tc.rows) * tc.cols) {
          detail::record_failure(rep, "matmul cycle law violated on " +
                                          cfg.label());
          return rep;
        }
      }
    }
    rep.section_lines.push_back("matrix multiplications: " +
                                std::to_string(section_cases) + " cases ok");
  }

  return rep;
}

}  // namespace bitsmm
