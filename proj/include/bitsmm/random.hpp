#pragma once

#include <cstdint>
#include <random>

#include "bitsmm/errors.hpp"
#include "bitsmm/matrix.hpp"
#include "bitsmm/signed_word.hpp"

namespace bitsmm {

// Deterministic test-vector source. A single 64-bit seed expands through
// std::mt19937_64; bounded draws use modulo reduction so a seed maps to the
// same vectors on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform-ish draw in [lo, hi], inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw ConfigError("empty random range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(gen_() % span);
  }

  SignedWord word(int width) {
    return SignedWord(
        static_cast<std::int32_t>(range(SignedWord::min_value(width),
                                        SignedWord::max_value(width))),
        width);
  }

  Matrix matrix(int rows, int cols, int width) {
    Matrix m(rows, cols, width);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        m.set(r, c, static_cast<std::int32_t>(
                        range(SignedWord::min_value(width),
                              SignedWord::max_value(width))));
    return m;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace bitsmm
