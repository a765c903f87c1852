#pragma once

#include <cstdint>
#include <string_view>

namespace pacmc {

// Counter-based generator: draw i of a stream is a pure function of
// (key, i), where the key is derived from a master seed and a stream name.
// Distinct names give statistically independent streams, so changing how
// many times are drawn never perturbs the input draws and vice versa.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::string_view name);

  // Child stream keyed by this stream's key and `name`.
  RandomStream split(std::string_view name) const;

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  // Uniform on [lo, hi]; returns lo when lo == hi.
  double uniform(double lo, double hi);

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

 private:
  explicit RandomStream(std::uint64_t key) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace pacmc
