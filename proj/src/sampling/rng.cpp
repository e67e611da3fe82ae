#include "mlcv/sampling/rng.hpp"

namespace mlcv {

namespace {
constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) noexcept {
  return splitmix64(splitmix64(seed + golden_gamma) ^ (key * 0xd1b54a32d192ed03ULL + 1));
}

std::uint64_t hash_tag(std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RngStream::RngStream(std::uint64_t seed, StreamId id) noexcept : seed_(seed), id_(id) {
  std::uint64_t k = splitmix64(seed ^ 0x5851f42d4c957f2dULL);
  k = splitmix64(k ^ (std::uint64_t{id.level} << 1 | 1));
  k = splitmix64(k ^ (std::uint64_t{id.replicate} * 0xa0761d6478bd642fULL + 3));
  k = splitmix64(k ^ (static_cast<std::uint64_t>(id.purpose) * 0xe7037ed1a0b428dbULL + 7));
  key_ = k;
}

RngStream::result_type RngStream::operator()() noexcept {
  ++counter_;
  return splitmix64(key_ + counter_ * golden_gamma);
}

double RngStream::uniform() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lower, double upper) noexcept {
  return lower + (upper - lower) * uniform();
}

std::uint64_t RngStream::below(std::uint64_t n) noexcept {
  // Lemire-style rejection to remove modulo bias.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = (*this)();
    if (r >= threshold) return r % n;
  }
}

} // namespace mlcv
