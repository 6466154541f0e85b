#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "blockmax/evd.hpp"
#include "blockmax/matrix.hpp"

namespace blockmax {

enum class BlockMode { disjoint, sliding };

const char* to_string(BlockMode mode);

/// out[i] = max(column[i .. i + r - 1]) for i = 0 .. n - r, via a monotone
/// deque. When `deque_ops` is non-null it receives the number of push and pop
/// operations performed (at most 2n).
std::vector<double> sliding_max(std::span<const double> column, std::size_t r,
                                std::size_t* deque_ops = nullptr);

/// Componentwise block maxima. Disjoint mode keeps floor(n / r) blocks and
/// drops a trailing partial block; sliding mode keeps all n - r + 1 windows.
struct BlockMaxSample {
  BlockMode mode = BlockMode::disjoint;
  std::size_t r = 1;
  Matrix maxima;
  /// 1-based index of the first observation of each block.
  std::vector<std::size_t> start_indices;

  [[nodiscard]] std::size_t size() const noexcept { return maxima.rows(); }
};

BlockMaxSample block_maxima(const Matrix& series, std::size_t r, BlockMode mode);

/// Block maxima after (m - b) / a per dimension.
struct StandardizedSample {
  BlockMode mode = BlockMode::disjoint;
  std::size_t r = 1;
  Matrix z;
  std::vector<std::size_t> start_indices;
  NormingSequence norming;
};

StandardizedSample standardize(const BlockMaxSample& sample, const NormingSequence& norming);
/// Inverse of standardize: m = a z + b.
BlockMaxSample destandardize(const StandardizedSample& sample);

}  // namespace blockmax
