#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "invcorr/error.hpp"

namespace invcorr {

// Row-major sample block: rows = replicates, cols = coordinates.
struct SampleMatrix {
  std::int64_t rows = 0;
  int cols = 0;
  std::vector<double> data;

  double operator()(std::int64_t row, int col) const {
    return data[static_cast<std::size_t>(row) * static_cast<std::size_t>(cols) +
                static_cast<std::size_t>(col)];
  }
  double& operator()(std::int64_t row, int col) {
    return data[static_cast<std::size_t>(row) * static_cast<std::size_t>(cols) +
                static_cast<std::size_t>(col)];
  }
};

SampleMatrix make_sample_matrix(std::int64_t rows, int cols);

// Strided view of one column.
struct ColumnView {
  const double* ptr = nullptr;
  std::int64_t n = 0;
  std::int64_t stride = 1;

  double operator[](std::int64_t i) const { return ptr[i * stride]; }
};

inline ColumnView column(const SampleMatrix& samples, int col) {
  return ColumnView{samples.data.data() + col, samples.rows, samples.cols};
}

// CSV with header X1..Xd.
void write_csv(std::ostream& out, const SampleMatrix& samples);

}  // namespace invcorr
