#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string_view>

#include "powerhp/core/vector.hpp"

namespace powerhp {

// Stateless 64-bit finalizer used to derive keys and stream ids.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// FNV-1a; used to map method names to noise sub-streams.
constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

namespace detail {

// Philox4x32-10 (Salmon et al., SC'11). Bijective in the counter for a fixed key,
// so distinct counters never collide.
inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kMulA = 0xD2511F53;
  constexpr std::uint32_t kMulB = 0xCD9E8D57;
  constexpr std::uint32_t kWeylA = 0x9E3779B9;
  constexpr std::uint32_t kWeylB = 0xBB67AE85;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t pa = static_cast<std::uint64_t>(kMulA) * ctr[0];
    const std::uint64_t pb = static_cast<std::uint64_t>(kMulB) * ctr[2];
    const auto hi_a = static_cast<std::uint32_t>(pa >> 32);
    const auto lo_a = static_cast<std::uint32_t>(pa);
    const auto hi_b = static_cast<std::uint32_t>(pb >> 32);
    const auto lo_b = static_cast<std::uint32_t>(pb);
    ctr = {hi_b ^ ctr[1] ^ key[0], lo_b, hi_a ^ ctr[3] ^ key[1], lo_a};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

}  // namespace detail

/// Counter-based random stream identified by (seed, stream_id).
///
/// The seed is the Philox key; the stream id occupies the high half of the
/// 128-bit counter and the block index the low half, so every (seed, stream_id)
/// pair addresses a disjoint 2^64-block sequence. Output depends only on integer
/// arithmetic, so sequences are identical across platforms; normal variates use
/// Box-Muller through libm and agree wherever log/cos/sin do.
///
/// Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  // Sub-stream roles within a trial.
  enum Role : std::uint64_t {
    kInstance = 1,
    kInit = 2,
    kData = 3,
    kNoise = 4,
    kValidation = 5,
  };

  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  // Number of 64-bit words consumed so far.
  std::uint64_t position() const { return 2 * block_ - (have_word_ ? 1 : 0); }

  // Independent child stream; a pure function of (seed, stream_id, role).
  RngStream substream(std::uint64_t role) const {
    return RngStream(seed_, splitmix64(stream_id_ ^ splitmix64(role + 0x5851F42D4C957F2DULL)));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64() {
    if (have_word_) {
      have_word_ = false;
      return spare_word_;
    }
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                              static_cast<std::uint32_t>(seed_ >> 32)};
    const auto out = detail::philox4x32_10(ctr, key);
    ++block_;
    spare_word_ = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    have_word_ = true;
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n) (Lemire's multiply-shift with rejection).
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw ConfigError("uniform_index: empty range");
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() {
    if (have_normal_) {
      have_normal_ = false;
      return spare_normal_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_normal_ = r * std::sin(theta);
    have_normal_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  Vector normal_vector(Eigen::Index dim, double stddev = 1.0) {
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = stddev * normal();
    return v;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::uint64_t spare_word_ = 0;
  bool have_word_ = false;
  double spare_normal_ = 0.0;
  bool have_normal_ = false;
};

}  // namespace powerhp
