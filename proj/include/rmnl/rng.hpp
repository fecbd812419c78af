#pragma once

#include <cstdint>
#include <random>

namespace rmnl {

using Rng = std::mt19937_64;

// Independent named streams derived from one trial seed. Changing how many
// draws one stream consumes never shifts another stream.
enum class Stream : std::uint64_t {
  kInstance = 1,
  kAdversary = 2,
  kPolicy = 3,
  kCustomer = 4,
};

inline Rng make_stream(std::uint64_t root_seed, Stream stream) {
  const auto id = static_cast<std::uint64_t>(stream);
  std::seed_seq seq{static_cast<std::uint32_t>(root_seed),
                    static_cast<std::uint32_t>(root_seed >> 32),
                    static_cast<std::uint32_t>(id), 0x6d6e6cu};
  return Rng(seq);
}

// Uniform on [0, 1) with 53 random bits; avoids library-specific
// distribution implementations so traces are portable.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Uniform on {0, ..., n-1}, unbiased via rejection.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return static_cast<std::size_t>(x % bound);
}

// Beta(a, b) via two gamma draws.
inline double beta_sample(Rng& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

}  // namespace rmnl
