#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

namespace riskmono {

/// SplitMix64 finalizer; a bijective 64-bit avalanche mix.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Child seed for a named sub-computation. Composite procedures never share a
/// stream between purposes: every (master, tag, index) triple gets its own key.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::uint64_t index = 0) noexcept;

/// Counter-based 64-bit generator: output i is mix64(key + i * golden), so a
/// stream is fully determined by its key and can be split by deriving keys.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;
  /// Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// First k entries of a Fisher-Yates shuffle of {0, ..., n-1}. Drawing k1 and
/// later k1 + k2 rows with the same generator state yields nested prefixes.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    CounterRng& rng);

}  // namespace riskmono
