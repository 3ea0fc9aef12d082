#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bitsmm/errors.hpp"
#include "bitsmm/signed_word.hpp"

namespace bitsmm {

// Dense integer matrix whose entries all share one operand width.
class Matrix {
 public:
  Matrix(int rows, int cols, int width)
      : rows_(rows), cols_(cols), width_(width) {
    if (rows < 1 || cols < 1) throw ConfigError("matrix dimensions must be >= 1");
    if (width < 1 || width > kMaxWordWidth)
      throw ConfigError("matrix width outside [1, " +
                        std::to_string(kMaxWordWidth) + "]");
    elems_.assign(static_cast<std::size_t>(rows) * cols, 0);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int width() const { return width_; }

  std::int32_t at(int r, int c) const { return elems_[index(r, c)]; }

  void set(int r, int c, std::int32_t v) {
    if (v < SignedWord::min_value(width_) || v > SignedWord::max_value(width_))
      throw ConfigError("entry " + std::to_string(v) +
                        " not representable at width " +
                        std::to_string(width_));
    elems_[index(r, c)] = v;
  }

  SignedWord word(int r, int c) const { return SignedWord(at(r, c), width_); }

  static Matrix identity(int dim, int width) {
    Matrix m(dim, dim, width);
    for (int i = 0; i < dim; ++i) m.set(i, i, 1);
    return m;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.width_ == b.width_ &&
           a.elems_ == b.elems_;
  }

 private:
  std::size_t index(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
      throw ConfigError("matrix index out of range");
    return static_cast<std::size_t>(r) * cols_ + c;
  }

  int rows_, cols_, width_;
  std::vector<std::int32_t> elems_;
};

// Product matrix; entries are full accumulator values, not width-limited.
struct ResultMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::int64_t> elems;

  ResultMatrix() = default;
  ResultMatrix(int r, int c)
      : rows(r), cols(c), elems(static_cast<std::size_t>(r) * c, 0) {}

  std::int64_t at(int r, int c) const {
    return elems[static_cast<std::size_t>(r) * cols + c];
  }
  void set(int r, int c, std::int64_t v) {
    elems[static_cast<std::size_t>(r) * cols + c] = v;
  }

  friend bool operator==(const ResultMatrix& a, const ResultMatrix& b) {
    return a.rows == b.rows && a.cols == b.cols && a.elems == b.elems;
  }
};

// Plain integer matrix multiplication, the oracle for every array run.
inline ResultMatrix matmul_oracle(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw ConfigError("inner dimensions do not match: " +
                      std::to_string(a.cols()) + " vs " +
                      std::to_string(b.rows()));
  ResultMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      std::int64_t sum = 0;
      for (int k = 0; k < a.cols(); ++k)
        sum += static_cast<std::int64_t>(a.at(i, k)) * b.at(k, j);
      c.set(i, j, sum);
    }
  return c;
}

// CSV form: a one-line header carrying the width, then one row per line.
//
//   width,4
//   6,-2,3
//   1,0,-8
inline void write_matrix_csv(std::ostream& out, const Matrix& m) {
  out << "width," << m.width() << "\n";
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c) out << ",";
      out << m.at(r, c);
    }
    out << "\n";
  }
}

inline Matrix read_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("width,", 0) != 0)
    throw ConfigError("matrix csv must start with a 'width,<n>' header");
  const int width = std::stoi(line.substr(6));

  std::vector<std::vector<std::int32_t>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::int32_t> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stoi(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError("matrix csv rows have inconsistent lengths");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("matrix csv has no data rows");

  Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()),
           width);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m.set(static_cast<int>(r), static_cast<int>(c), rows[r][c]);
  return m;
}

inline Matrix read_matrix_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file: " + path);
  return read_matrix_csv(in);
}

}  // namespace bitsmm
