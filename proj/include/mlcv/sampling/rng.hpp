#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace mlcv {

enum class Purpose : std::uint32_t {
  sample = 0,
  pilot = 1,
  doe = 2,
  test = 3,
  anneal = 4,
  subset = 5,
  validation = 6,
};

struct StreamId {
  std::uint32_t level = 0;
  std::uint32_t replicate = 0;
  Purpose purpose = Purpose::sample;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Combines a seed with an extra key; used to derive cell/replicate seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) noexcept;

// FNV-1a, for turning method tags into seed material.
std::uint64_t hash_tag(std::string_view tag) noexcept;

/// Counter-based random stream keyed by (seed, level, replicate, purpose).
///
/// The i-th output is splitmix64(key + (i+1)·γ), so a stream is a pure function
/// of its key and position: identical ids give bit-identical sequences and
/// distinct ids give unrelated sequences. Satisfies UniformRandomBitGenerator.
class RngStream {
public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, StreamId id) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lower, double upper) noexcept;

  // Unbiased integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  const StreamId& id() const noexcept { return id_; }
  std::uint64_t position() const noexcept { return counter_; }

private:
  std::uint64_t seed_;
  StreamId id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace mlcv
