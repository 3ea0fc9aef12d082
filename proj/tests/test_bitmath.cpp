#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "bitsmm/bitmath.hpp"
#include "bitsmm/random.hpp"
#include "bitsmm/signed_word.hpp"

using namespace bitsmm;

namespace {

std::vector<std::uint8_t> bits(std::initializer_list<int> v) {
  std::vector<std::uint8_t> out;
  for (int b : v) out.push_back(static_cast<std::uint8_t>(b));
  return out;
}

// Weighted action sum of the recoded multiplier stream; the independent
// route for checking the recode table.
std::int64_t recoded_sum(const SignedWord& a, const SignedWord& b) {
  std::int64_t sum = 0;
  int prev = 0;
  for (int i = 0; i < b.width(); ++i) {
    const BoothAction action = booth_recode(b.bit(i), prev);
    if (action == BoothAction::ADD_M)
      sum += static_cast<std::int64_t>(a.value()) << i;
    if (action == BoothAction::SUB_M)
      sum -= static_cast<std::int64_t>(a.value()) << i;
    prev = b.bit(i);
  }
  return sum;
}

}  // namespace

TEST_CASE("signed word invariants") {
  CHECK(SignedWord(6, 4).pattern() == 0b0110u);
  CHECK(SignedWord(-2, 4).pattern() == 0b1110u);
  CHECK(SignedWord(-2, 4).bit(3) == 1);  // sign bit
  CHECK(SignedWord(-1, 1).pattern() == 0b1u);
  CHECK_THROWS_AS(SignedWord(8, 4), ConfigError);
  CHECK_THROWS_AS(SignedWord(-9, 4), ConfigError);
  CHECK_THROWS_AS(SignedWord(1, 1), ConfigError);  // width-1 range is [-1, 0]
  CHECK_THROWS_AS(SignedWord(0, 0), ConfigError);
  CHECK_THROWS_AS(SignedWord(0, 17), ConfigError);
  CHECK(SignedWord(-2, 4).extended(8).pattern() == 0b11111110u);
  CHECK(SignedWord::from_pattern(0b1110, 4).value() == -2);
}

TEST_CASE("to_bits fixed examples") {
  CHECK(to_bits(SignedWord(6, 4), BitOrder::lsb_first) == bits({0, 1, 1, 0}));
  CHECK(to_bits(SignedWord(-2, 4), BitOrder::msb_first) == bits({1, 1, 1, 0}));
  CHECK(to_bits(SignedWord(0, 1), BitOrder::lsb_first) == bits({0}));
}

TEST_CASE("to_bits round trip is the identity for every value, width, order") {
  for (int w = 1; w <= kMaxWordWidth; ++w)
    for (std::int32_t v = SignedWord::min_value(w);
         v <= SignedWord::max_value(w); ++v) {
      const SignedWord word(v, w);
      for (BitOrder order : {BitOrder::lsb_first, BitOrder::msb_first}) {
        const SignedWord back = word_from_bits(to_bits(word, order), order);
        REQUIRE(back == word);
      }
    }
}

TEST_CASE("oracle product fixed examples") {
  CHECK(oracle_product(SignedWord(6, 4), SignedWord(-2, 4)) == -12);
  CHECK(oracle_product(SignedWord(0, 8), SignedWord(127, 8)) == 0);
  CHECK(oracle_product(SignedWord(-128, 8), SignedWord(-128, 8)) == 16384);
}

TEST_CASE("unsigned shift-add multiplication") {
  // 0110 * 1110 as shifted partial products of the multiplicand
  CHECK(unsigned_shift_add_multiply(bits({0, 1, 1, 0}), bits({0, 1, 1, 1})) ==
        84);
  CHECK(unsigned_shift_add_multiply(bits({1, 1, 1, 1}), bits({1, 1, 1, 1})) ==
        225);  // 15 * 15

  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const int w = static_cast<int>(rng.range(1, kMaxWordWidth));
    const std::uint64_t a =
        static_cast<std::uint64_t>(rng.range(0, (1 << w) - 1));
    const std::uint64_t b =
        static_cast<std::uint64_t>(rng.range(0, (1 << w) - 1));
    std::vector<std::uint8_t> ab, bb, zb;
    for (int j = 0; j < w; ++j) {
      ab.push_back(static_cast<std::uint8_t>((a >> j) & 1));
      bb.push_back(static_cast<std::uint8_t>((b >> j) & 1));
      zb.push_back(0);
    }
    REQUIRE(unsigned_shift_add_multiply(ab, bb) == a * b);
    REQUIRE(unsigned_shift_add_multiply(ab, zb) == 0);
  }

  CHECK_THROWS_AS(unsigned_shift_add_multiply(bits({1}), bits({1, 0})),
                  ConfigError);
}

TEST_CASE("sbmwc reference multiplier") {
  CHECK(sbmwc_multiply_reference(SignedWord(6, 4), SignedWord(-2, 4)) == -12);

  SECTION("multiplicative identity at every width that can encode 1") {
    Rng rng(12);
    for (int w = 2; w <= kMaxWordWidth; ++w)
      for (int i = 0; i < 20; ++i) {
        const SignedWord a = rng.word(w);
        REQUIRE(sbmwc_multiply_reference(a, SignedWord(1, w)) == a.value());
      }
  }

  SECTION("exhaustive width 4: equals the oracle for all 256 pairs") {
    int cases = 0;
    for (std::int32_t a = -8; a <= 7; ++a)
      for (std::int32_t b = -8; b <= 7; ++b) {
        const SignedWord wa(a, 4), wb(b, 4);
        REQUIRE(sbmwc_multiply_reference(wa, wb) == oracle_product(wa, wb));
        ++cases;
      }
    CHECK(cases == 256);
  }
}

TEST_CASE("booth recode control table") {
  CHECK(booth_recode(0, 0) == BoothAction::NOP);
  CHECK(booth_recode(1, 1) == BoothAction::NOP);
  CHECK(booth_recode(0, 1) == BoothAction::ADD_M);
  CHECK(booth_recode(1, 0) == BoothAction::SUB_M);
}

TEST_CASE("recoded multiplier stream sums to the product") {
  SECTION("exhaustive widths 1..8") {
    for (int w = 1; w <= 8; ++w)
      for (std::int32_t a = SignedWord::min_value(w);
           a <= SignedWord::max_value(w); ++a)
        for (std::int32_t b = SignedWord::min_value(w);
             b <= SignedWord::max_value(w); ++b) {
          const SignedWord wa(a, w), wb(b, w);
          REQUIRE(recoded_sum(wa, wb) == oracle_product(wa, wb));
        }
  }
  SECTION("randomized widths 9..16") {
    Rng rng(13);
    for (int w = 9; w <= kMaxWordWidth; ++w)
      for (int i = 0; i < 100; ++i) {
        const SignedWord a = rng.word(w), b = rng.word(w);
        REQUIRE(recoded_sum(a, b) == oracle_product(a, b));
      }
  }
}

TEST_CASE("booth reference multiplier reproduces the worked 6 * -2 trace") {
  std::vector<BoothReferenceStep> trace;
  const std::int64_t product =
      booth_multiply_reference(SignedWord(6, 4), SignedWord(-2, 4), &trace);
  CHECK(product == -12);
  REQUIRE(trace.size() == 4);
  CHECK(trace[0].action == BoothAction::NOP);
  CHECK(trace[1].action == BoothAction::SUB_M);
  CHECK(trace[2].action == BoothAction::NOP);
  CHECK(trace[3].action == BoothAction::NOP);
  CHECK(trace[0].acc_after_add == 0b0000u);
  CHECK(trace[1].acc_after_add == 0b1010u);
  CHECK(trace[2].acc_after_add == 0b1101u);
  CHECK(trace[3].acc_after_add == 0b1110u);
  CHECK(trace[3].combined_after_shift == 0b11110100u);
}

TEST_CASE("booth reference multiplier properties") {
  Rng rng(14);
  SECTION("annihilator") {
    for (int i = 0; i < 50; ++i) {
      const int w = static_cast<int>(rng.range(1, kMaxWordWidth));
      REQUIRE(booth_multiply_reference(rng.word(w), SignedWord(0, w)) == 0);
    }
  }
  SECTION("100 random 16-bit pairs equal the oracle") {
    for (int i = 0; i < 100; ++i) {
      const SignedWord a = rng.word(16), b = rng.word(16);
      REQUIRE(booth_multiply_reference(a, b) == oracle_product(a, b));
    }
  }
  SECTION("unequal widths sign-extend to the wider operand") {
    for (int i = 0; i < 100; ++i) {
      const SignedWord a = rng.word(static_cast<int>(rng.range(1, 16)));
      const SignedWord b = rng.word(static_cast<int>(rng.range(1, 16)));
      REQUIRE(booth_multiply_reference(a, b) == oracle_product(a, b));
      REQUIRE(sbmwc_multiply_reference(a, b) == oracle_product(a, b));
    }
  }
}

TEST_CASE("reference multipliers agree exhaustively at widths 1..8") {
  for (int w = 1; w <= 8; ++w)
    for (std::int32_t a = SignedWord::min_value(w);
         a <= SignedWord::max_value(w); ++a)
      for (std::int32_t b = SignedWord::min_value(w);
           b <= SignedWord::max_value(w); ++b) {
        const SignedWord wa(a, w), wb(b, w);
        const std::int64_t expect = oracle_product(wa, wb);
        REQUIRE(sbmwc_multiply_reference(wa, wb) == expect);
        REQUIRE(booth_multiply_reference(wa, wb) == expect);
      }
}

TEST_CASE("bit-product cycle formula") {
  CHECK(bismo_cycle_count(2, 2, 1) == 4);
  CHECK(bismo_cycle_count(1, 1, 42) == 42);
  CHECK(bismo_cycle_count(16, 16, 1000) == 256000);
  CHECK_THROWS_AS(bismo_cycle_count(0, 1, 1), ConfigError);

  // square case against the serial word method at n = 1: slower for b > 2,
  // equal at b = 2
  for (std::uint64_t b = 1; b <= 16; ++b) {
    const std::uint64_t bitwise = bismo_cycle_count(b, b, 1);
    const std::uint64_t serial = 2 * b;
    if (b > 2) CHECK(bitwise > serial);
    if (b == 2) CHECK(bitwise == serial);
    if (b < 2) CHECK(bitwise < serial);
  }
}
