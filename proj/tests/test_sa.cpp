#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "bitsmm/mac.hpp"
#include "bitsmm/matrix.hpp"
#include "bitsmm/random.hpp"
#include "bitsmm/systolic_array.hpp"

using namespace bitsmm;

TEST_CASE("config validation and structural report") {
  const SaConfig bad{0, 4};
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  SECTION("16x4 topology (cols x rows)") {
    const auto rep = structural_report(SaConfig{4, 16});
    CHECK(rep.mac_count == 64);
    CHECK(rep.readout_mux_count == 63);
    CHECK(rep.readout_chain_registers == (4 - 1) * (16 - 1) + 1);
  }
  SECTION("degenerate 1x1") {
    const auto rep = structural_report(SaConfig{1, 1});
    CHECK(rep.mac_count == 1);
    CHECK(rep.readout_mux_count == 0);
    CHECK(rep.readout_chain_registers == 1);
  }
  SECTION("64x16 topology") {
    const auto rep = structural_report(SaConfig{16, 64});
    CHECK(rep.mac_count == 1024);
    CHECK(rep.readout_mux_count == 1023);
  }
}

TEST_CASE("idle steps leave the array unchanged except the cycle counter") {
  SystolicArray<BoothMacState> array(SaConfig{2, 3});
  for (int i = 0; i < 10; ++i) {
    const auto sample = array.step();
    CHECK_FALSE(sample.has_value());
  }
  CHECK(array.cycle() == 10);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) CHECK(array.mac_at(r, c) == BoothMacState{});
  CHECK(array.toggles().total() == 0);
}

TEST_CASE("degenerate 1x1 array runs the single-MAC protocol") {
  SystolicArray<BoothMacState> array(SaConfig{1, 1});
  Matrix a(1, 1, 4), b(1, 1, 4);
  a.set(0, 0, 6);
  b.set(0, 0, -2);
  const auto run = run_matmul(array, a, b, 4);
  CHECK(run.c.at(0, 0) == -12);
  CHECK(run.stats.fill_cycles == 0);
  CHECK(run.stats.compute_cycles == 8);
  CHECK(run.stats.readout_cycles == 1);
  CHECK(run.stats.total_cycles == 9);
  CHECK(array.cycle() == 9);
}

TEST_CASE("schedule skew cancellation observed at every MAC") {
  const int width = 4, rows = 3, cols = 4;
  Rng rng(31);
  const Matrix a = rng.matrix(rows, 5, width);
  const Matrix b = rng.matrix(5, cols, width);
  const int n = 5;

  struct Seen {
    std::vector<int> mc, ml, vt;
    std::uint64_t first_cycle = ~std::uint64_t{0};
  };
  std::map<std::pair<int, int>, Seen> seen;

  SystolicArray<SbmwcMacState> array(SaConfig{rows, cols});
  array.set_input_probe([&](int r, int c, std::uint64_t cycle,
                            const MacCycleInput& in) {
    auto& s = seen[{r, c}];
    if (s.mc.empty()) s.first_cycle = cycle;
    s.mc.push_back(in.mc_bit);
    s.ml.push_back(in.ml_bit);
    s.vt.push_back(in.v_t);
  });
  const auto run = run_matmul(array, a, b, width);
  REQUIRE(run.c == matmul_oracle(a, b));

  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const Seen& s = seen.at({r, c});
      // each MAC's window opens exactly r + c cycles after MAC(0,0)'s
      REQUIRE(s.first_cycle == static_cast<std::uint64_t>(r + c));
      REQUIRE(s.mc.size() == static_cast<std::size_t>((n + 1) * width));

      // multiplicand word k spans local [k*w, (k+1)*w), MSb first
      for (int k = 0; k < n; ++k) {
        const SignedWord word = b.word(k, c);
        for (int i = 0; i < width; ++i)
          REQUIRE(s.mc[static_cast<std::size_t>(k * width + i)] ==
                  word.bit(width - 1 - i));
      }
      // multiplier word k spans local [(k+1)*w, (k+2)*w), LSb first: the
      // multiplicand leads by exactly `width` cycles
      for (int k = 0; k < n; ++k) {
        const SignedWord word = a.word(r, k);
        for (int i = 0; i < width; ++i)
          REQUIRE(s.ml[static_cast<std::size_t>((k + 1) * width + i)] ==
                  word.bit(i));
      }
      // toggle level holds for one word and flips at each boundary
      for (int t = 0; t < (n + 1) * width; ++t)
        REQUIRE(s.vt[static_cast<std::size_t>(t)] == (t / width) % 2);
    }
}

TEST_CASE("schedule arithmetic") {
  const SaConfig cfg{4, 16};
  Rng rng(32);
  SECTION("full-size matrices") {
    const Matrix a = rng.matrix(4, 3, 2);
    const Matrix b = rng.matrix(3, 16, 2);
    const auto sched = schedule_matmul(cfg, a, b, 2);
    CHECK(sched.fill_cycles() == (4 - 1) + (16 - 1));
    CHECK(sched.compute_cycles() == (3 + 1) * 2);
  }
  SECTION("1x1 on 1x1 array has no skew") {
    const Matrix a = rng.matrix(1, 1, 4);
    const Matrix b = rng.matrix(1, 1, 4);
    const auto sched = schedule_matmul(SaConfig{1, 1}, a, b, 4);
    CHECK(sched.fill_cycles() == 0);
    CHECK(sched.total_input_cycles() == 8);
  }
  SECTION("dimension and width violations") {
    CHECK_THROWS_AS(
        schedule_matmul(cfg, rng.matrix(5, 2, 2), rng.matrix(2, 3, 2), 2),
        ConfigError);
    CHECK_THROWS_AS(
        schedule_matmul(cfg, rng.matrix(2, 2, 2), rng.matrix(2, 17, 2), 2),
        ConfigError);
    CHECK_THROWS_AS(
        schedule_matmul(cfg, rng.matrix(2, 2, 2), rng.matrix(3, 3, 2), 2),
        ConfigError);  // inner mismatch
    CHECK_THROWS_AS(
        schedule_matmul(cfg, rng.matrix(2, 2, 8), rng.matrix(2, 3, 8), 4),
        ConfigError);  // stream narrower than the operands
  }
}

TEST_CASE("identity times B returns B") {
  Rng rng(33);
  const Matrix b = rng.matrix(4, 7, 8);
  const Matrix a = Matrix::identity(4, 2);
  SystolicArray<BoothMacState> array(SaConfig{4, 8});
  const auto run = run_matmul(array, a, b, 8);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 7; ++c) REQUIRE(run.c.at(r, c) == b.at(r, c));
}

TEST_CASE("random matmuls match the oracle and variants agree") {
  Rng rng(34);
  const std::vector<SaConfig> topologies = {
      {1, 1}, {2, 2}, {4, 16}, {8, 32}};
  for (const auto& cfg : topologies) {
    SystolicArray<BoothMacState> booth(cfg);
    SystolicArray<SbmwcMacState> sbmwc(cfg);
    for (int iter = 0; iter < 4; ++iter) {
      const int m = static_cast<int>(rng.range(1, cfg.rows));
      const int p = static_cast<int>(rng.range(1, cfg.cols));
      const int n = static_cast<int>(rng.range(1, 10));
      const int w = static_cast<int>(rng.range(1, 16));
      const Matrix a = rng.matrix(m, n, w);
      const Matrix b = rng.matrix(n, p, w);
      const auto expect = matmul_oracle(a, b);
      const auto rb = run_matmul(booth, a, b, w);
      const auto rs = run_matmul(sbmwc, a, b, w);
      REQUIRE(rb.c == expect);
      REQUIRE(rs.c == expect);
      REQUIRE(rb.stats.compute_cycles ==
              static_cast<std::uint64_t>(n + 1) * w);
      REQUIRE(rb.stats.fill_cycles ==
              static_cast<std::uint64_t>(m - 1 + p - 1));
      REQUIRE(rb.stats.readout_cycles ==
              static_cast<std::uint64_t>(cfg.rows) * cfg.cols);
      REQUIRE(rb.stats.total_cycles == booth.cycle());
    }
  }
}

TEST_CASE("snake readout order and bijection") {
  SECTION("2x2 sentinel values arrive in reverse snake order") {
    SystolicArray<BoothMacState> array(SaConfig{2, 2});
    array.mac_at(0, 0).acc = 10;
    array.mac_at(0, 1).acc = 20;
    array.mac_at(1, 1).acc = 30;
    array.mac_at(1, 0).acc = 40;
    const auto samples = read_outputs(array);
    REQUIRE(samples.size() == 4);
    // snake path (0,0) (0,1) (1,1) (1,0); arrivals reversed
    CHECK(samples[0].r == 1);
    CHECK(samples[0].c == 0);
    CHECK(samples[0].value == 40);
    CHECK(samples[1].r == 1);
    CHECK(samples[1].c == 1);
    CHECK(samples[1].value == 30);
    CHECK(samples[2].r == 0);
    CHECK(samples[2].c == 1);
    CHECK(samples[2].value == 20);
    CHECK(samples[3].r == 0);
    CHECK(samples[3].c == 0);
    CHECK(samples[3].value == 10);
  }

  SECTION("1x1 drain delivers the value one cycle after assertion") {
    SystolicArray<BoothMacState> array(SaConfig{1, 1});
    array.mac_at(0, 0).acc = 7;
    const std::uint64_t asserted_at = array.cycle();
    array.begin_readout();
    const auto s = array.step();
    REQUIRE(s.has_value());
    CHECK(s->value == 7);
    CHECK(array.cycle() == asserted_at + 1);
  }

  SECTION("drain is a bijection over the grid, one value per cycle") {
    const SaConfig cfg{4, 16};
    SystolicArray<BoothMacState> array(cfg);
    int sentinel = 1;
    for (int r = 0; r < cfg.rows; ++r)
      for (int c = 0; c < cfg.cols; ++c)
        array.mac_at(r, c).acc = sentinel++;
    const std::uint64_t start = array.cycle();
    const auto samples = read_outputs(array);
    CHECK(array.cycle() - start ==
          static_cast<std::uint64_t>(cfg.rows) * cfg.cols);
    std::set<std::pair<int, int>> seen;
    for (const auto& s : samples) {
      REQUIRE(seen.insert({s.r, s.c}).second);
      REQUIRE(s.value == s.r * cfg.cols + s.c + 1);
    }
    CHECK(seen.size() == static_cast<std::size_t>(cfg.rows) * cfg.cols);
    // drained array emits nothing further
    CHECK_FALSE(array.step().has_value());
  }

  SECTION("snake path endpoints") {
    const auto odd = snake_path(3, 4);
    CHECK(odd.front() == std::pair<int, int>{0, 0});
    CHECK(odd.back() == std::pair<int, int>{2, 3});
    const auto even = snake_path(4, 16);
    CHECK(even.front() == std::pair<int, int>{0, 0});
    CHECK(even.back() == std::pair<int, int>{3, 0});
  }
}

TEST_CASE("readout during active computation is rejected") {
  SystolicArray<BoothMacState> array(SaConfig{3, 3});
  Rng rng(35);
  const Matrix a = rng.matrix(3, 4, 4);
  const Matrix b = rng.matrix(4, 3, 4);
  const auto sched = schedule_matmul(array.config(), a, b, 4);
  array.reset();
  for (std::uint64_t t = 0; t < sched.total_input_cycles() / 2; ++t)
    array.step(&sched);
  CHECK_THROWS_AS(array.begin_readout(), ProtocolError);

  // finishing the run afterwards still works
  array.reset();
  const auto run = run_matmul(array, a, b, 4);
  CHECK(run.c == matmul_oracle(a, b));
}

TEST_CASE("edge input during drain is rejected") {
  SystolicArray<BoothMacState> array(SaConfig{2, 2});
  Rng rng(36);
  const Matrix a = rng.matrix(2, 2, 4);
  const Matrix b = rng.matrix(2, 2, 4);
  const auto sched = schedule_matmul(array.config(), a, b, 4);
  for (std::uint64_t t = 0; t < sched.total_input_cycles(); ++t)
    array.step(&sched);
  array.begin_readout();
  CHECK_THROWS_AS(array.step(&sched), ProtocolError);
}

TEST_CASE("disabled rows and columns contribute zero toggles") {
  const SaConfig cfg{4, 8};
  SystolicArray<BoothMacState> array(cfg);
  Rng rng(37);
  const int m = 2, p = 3, n = 6, w = 8;
  const Matrix a = rng.matrix(m, n, w);
  const Matrix b = rng.matrix(n, p, w);
  const auto run = run_matmul(array, a, b, w);
  REQUIRE(run.c == matmul_oracle(a, b));

  const ToggleCounts& t = run.stats.toggle_counts;
  for (int r = 0; r < cfg.rows; ++r)
    for (int c = 0; c < cfg.cols; ++c) {
      const std::uint64_t flips =
          t.per_mac[static_cast<std::size_t>(r) * cfg.cols + c];
      if (r >= m || c >= p)
        REQUIRE(flips == 0);
      else
        REQUIRE(flips > 0);
    }
  for (int r = m; r < cfg.rows; ++r)
    REQUIRE(t.per_row_h[static_cast<std::size_t>(r)] == 0);
  for (int c = p; c < cfg.cols; ++c)
    REQUIRE(t.per_col_v[static_cast<std::size_t>(c)] == 0);
  CHECK(t.total() > 0);
}

TEST_CASE("back-to-back runs on one array reset cleanly") {
  SystolicArray<SbmwcMacState> array(SaConfig{2, 4});
  Rng rng(38);
  for (int iter = 0; iter < 3; ++iter) {
    const Matrix a = rng.matrix(2, 3, 6);
    const Matrix b = rng.matrix(3, 4, 6);
    const auto run = run_matmul(array, a, b, 6);
    REQUIRE(run.c == matmul_oracle(a, b));
  }
}
