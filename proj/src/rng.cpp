#include "blockmax/rng.hpp"

#include <cmath>
#include <numbers>

namespace blockmax {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Seed derive_seed(Seed master, std::uint64_t replication, std::uint64_t stream) {
  // Chained splitmix64 avalanche over (master, replication, stream).
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ splitmix64(replication + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ splitmix64(stream + 0x8cb92ba72f3d8dd7ULL));
  return h;
}

RngStream::RngStream(Seed seed, std::uint64_t stream_id)
    : engine_(derive_seed(seed, 0xb10c'0000ULL, stream_id)), seed_(seed), stream_id_(stream_id) {}

double RngStream::uniform() {
  // 53 random bits placed at the centre of their cell: never 0, never 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::exponential() { return -std::log(uniform()); }

double RngStream::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::frechet() { return 1.0 / exponential(); }

double RngStream::cauchy() { return std::tan(std::numbers::pi * (uniform() - 0.5)); }

}  // namespace blockmax
