#include "pacmc/rng.hpp"

#include <algorithm>

namespace pacmc {
namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

RandomStream::RandomStream(std::uint64_t seed, std::string_view name)
    : key_(mix64(mix64(seed + kGamma) ^ fnv1a64(name))) {}

RandomStream RandomStream::split(std::string_view name) const {
  return RandomStream(mix64(key_ ^ mix64(fnv1a64(name))));
}

std::uint64_t RandomStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double RandomStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) {
  const double u = uniform01();
  return std::clamp(lo + (hi - lo) * u, lo, hi);
}

}  // namespace pacmc
