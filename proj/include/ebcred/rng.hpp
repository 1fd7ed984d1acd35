#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace ebcred {

using Seed = std::uint64_t;

/// Purpose tags mixed into substream seeds so that the noise of a
/// replication and, say, its posterior draws never share a stream.
enum class StreamTag : std::uint64_t {
  noise = 0x6e6f697365ULL,
  posterior = 0x706f7374ULL,
  prior = 0x7072696f72ULL,
  oracle = 0x6f7261636c65ULL,
};

/// SplitMix64 output function.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the substream keyed by (master, index, tag). Substreams of distinct
/// keys are statistically independent for practical purposes, and the mapping
/// does not depend on the order in which substreams are requested.
constexpr Seed substream_seed(Seed master, std::uint64_t index,
                              StreamTag tag = StreamTag::noise) noexcept {
  return splitmix64(splitmix64(master ^ splitmix64(index)) ^
                    static_cast<std::uint64_t>(tag));
}

/// Index combining an outer experiment slot (e.g. the position in an n-list)
/// with a replication number.
constexpr std::uint64_t replication_index(std::uint64_t slot,
                                          std::uint64_t rep) noexcept {
  return (slot << 32) ^ rep;
}

/// Standard normal variates from a Mersenne Twister seeded with one value.
class NormalStream {
 public:
  explicit NormalStream(Seed seed) : engine_(seed) {}

  double operator()() { return dist_(engine_); }

  Eigen::VectorXd vector(Eigen::Index size) {
    Eigen::VectorXd out(size);
    for (Eigen::Index i = 0; i < size; ++i) out[i] = dist_(engine_);
    return out;
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace ebcred
