#pragma once

#include <cstdint>
#include <random>

namespace blockmax {

using Seed = std::uint64_t;

/// Deterministic seed derivation: distinct (replication, stream) pairs give
/// well-separated seeds. Pure integer arithmetic, so identical on every platform.
Seed derive_seed(Seed master, std::uint64_t replication, std::uint64_t stream);

/// A seeded random stream. The engine (mt19937_64) is fully specified by the
/// standard; variates are produced from raw 64-bit outputs by this class rather
/// than by <random> distributions, whose algorithms are implementation-defined.
class RngStream {
 public:
  explicit RngStream(Seed seed, std::uint64_t stream_id = 0);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on the open interval (0, 1).
  double uniform();
  double exponential();
  double normal();
  /// Unit Fréchet: P(W <= x) = exp(-1/x).
  double frechet();
  /// Standard Cauchy by inversion.
  double cauchy();

  [[nodiscard]] Seed seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

 private:
  std::mt19937_64 engine_;
  Seed seed_;
  std::uint64_t stream_id_;
};

}  // namespace blockmax
