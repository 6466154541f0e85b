#include "blockmax/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "blockmax/error.hpp"

namespace blockmax {

const char* to_string(BlockMode mode) { return mode == BlockMode::disjoint ? "disjoint" : "sliding"; }

std::vector<double> sliding_max(std::span<const double> column, std::size_t r, std::size_t* deque_ops) {
  const auto n = column.size();
  require(r >= 1, Errc::invalid_argument, "sliding_max: block size must be >= 1");
  require(r <= n, Errc::invalid_argument, "sliding_max: block size exceeds series length");

  std::vector<double> out;
  out.reserve(n - r + 1);
  // Indices whose values are strictly decreasing from front to back.
  std::deque<std::size_t> window;
  std::size_t ops = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (!window.empty() && column[window.back()] <= column[i]) {
      window.pop_back();
      ++ops;
    }
    window.push_back(i);
    ++ops;
    if (window.front() + r <= i) {
      window.pop_front();
      ++ops;
    }
    if (i + 1 >= r) out.push_back(column[window.front()]);
  }
  if (deque_ops != nullptr) *deque_ops = ops;
  return out;
}

BlockMaxSample block_maxima(const Matrix& series, std::size_t r, BlockMode mode) {
  const auto n = series.rows();
  const auto d = series.cols();
  require(n >= 1 && d >= 1, Errc::invalid_argument, "block_maxima: empty series");
  require(r >= 1 && r <= n, Errc::invalid_argument, "block_maxima: block size must satisfy 1 <= r <= n");
  for (double v : series.data()) require(std::isfinite(v), Errc::domain_error, "block_maxima: non-finite value");

  const std::size_t n_sliding = n - r + 1;
  const std::size_t count = mode == BlockMode::sliding ? n_sliding : n / r;
  const std::size_t stride = mode == BlockMode::sliding ? 1 : r;

  BlockMaxSample out{mode, r, Matrix(count, d), std::vector<std::size_t>(count)};
  for (std::size_t i = 0; i < count; ++i) out.start_indices[i] = i * stride + 1;

  if (mode == BlockMode::disjoint) {
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        double m = series(i * r, j);
        for (std::size_t t = i * r + 1; t < (i + 1) * r; ++t) m = std::max(m, series(t, j));
        out.maxima(i, j) = m;
      }
    }
    return out;
  }
  for (std::size_t j = 0; j < d; ++j) {
    const auto col = series.column_values(j);
    const auto mx = sliding_max(col, r);
    out.maxima.set_column(j, mx);
  }
  return out;
}

StandardizedSample standardize(const BlockMaxSample& sample, const NormingSequence& norming) {
  const auto d = sample.maxima.cols();
  require(norming.r == sample.r, Errc::invalid_argument, "standardize: norming block size differs from sample");
  require(norming.a.size() == d && norming.b.size() == d, Errc::dimension_mismatch,
          "standardize: norming dimension mismatch");
  for (double a : norming.a) require(a > 0.0, Errc::invalid_argument, "standardize: scale a must be positive");
  StandardizedSample out{sample.mode, sample.r, sample.maxima, sample.start_indices, norming};
  for (std::size_t i = 0; i < out.z.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) out.z(i, j) = (out.z(i, j) - norming.b[j]) / norming.a[j];
  }
  return out;
}

BlockMaxSample destandardize(const StandardizedSample& sample) {
  const auto d = sample.z.cols();
  BlockMaxSample out{sample.mode, sample.r, sample.z, sample.start_indices};
  for (std::size_t i = 0; i < out.maxima.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out.maxima(i, j) = sample.norming.a[j] * out.maxima(i, j) + sample.norming.b[j];
    }
  }
  return out;
}

}  // namespace blockmax
