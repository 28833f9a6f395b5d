#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

namespace freespec {

// Philox4x32-10 counter-based generator. Every random number is a pure
// function of (key, counter), so draws are identical no matter how work is
// distributed across threads.
struct Philox4x32 {
  static constexpr uint32_t M0 = 0xD2511F53u;
  static constexpr uint32_t M1 = 0xCD9E8D57u;
  static constexpr uint32_t W0 = 0x9E3779B9u;
  static constexpr uint32_t W1 = 0xBB67AE85u;

  static std::array<uint32_t, 4> block(std::array<uint32_t, 4> ctr,
                                       std::array<uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      uint64_t p0 = static_cast<uint64_t>(M0) * ctr[0];
      uint64_t p1 = static_cast<uint64_t>(M1) * ctr[2];
      uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
      uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += W0;
      key[1] += W1;
    }
    return ctr;
  }
};

// Stream of N(0,1) pairs addressed by (trial, slot, ordinal).
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  uint64_t seed() const { return seed_; }

  // Two uniform doubles in (0,1], one Philox block.
  std::pair<double, double> uniform_pair(uint32_t trial, uint32_t slot,
                                         uint32_t ordinal) const {
    auto out = Philox4x32::block(
        {trial, slot, ordinal, 0x5eedf00du},
        {static_cast<uint32_t>(seed_), static_cast<uint32_t>(seed_ >> 32)});
    auto to_unit = [](uint32_t hi, uint32_t lo) {
      uint64_t bits = (static_cast<uint64_t>(hi) << 32) | lo;
      return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
    };
    return {to_unit(out[0], out[1]), to_unit(out[2], out[3])};
  }

  // Box-Muller pair of independent standard normals.
  std::pair<double, double> gauss_pair(uint32_t trial, uint32_t slot,
                                       uint32_t ordinal) const {
    auto [u1, u2] = uniform_pair(trial, slot, ordinal);
    double rad = std::sqrt(-2.0 * std::log(u1));
    double ang = 2.0 * M_PI * u2;
    return {rad * std::cos(ang), rad * std::sin(ang)};
  }

  double gauss(uint32_t trial, uint32_t slot, uint32_t ordinal) const {
    return gauss_pair(trial, slot, ordinal).first;
  }

 private:
  uint64_t seed_;
};

}  // namespace freespec
