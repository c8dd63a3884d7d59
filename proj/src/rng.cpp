#include "codingtree/rng.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace codingtree {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

SampleRng::SampleRng(std::uint64_t seed, std::uint64_t run, std::uint64_t point, std::uint64_t sample)
    : counter_{0u, static_cast<std::uint32_t>(sample), static_cast<std::uint32_t>(sample >> 32),
               static_cast<std::uint32_t>(point)},
      key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32) ^ static_cast<std::uint32_t>(run * 0x9E3779B97F4A7C15ull >> 32)} {}

double SampleRng::uniform() {
  const unsigned slot = static_cast<unsigned>(draws_ & 1u);
  if (slot == 0) {
    const auto r = philox4x32(counter_, key_);
    ++counter_[0];
    buffer_[0] = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
    buffer_[1] = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
  }
  ++draws_;
  return (static_cast<double>(buffer_[slot] >> 11) + 0.5) * 0x1.0p-53;
}

double SampleRng::normal() {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * uniform());
}

double SampleRng::exponential(double rate) { return -std::log(uniform()) / rate; }

}  // namespace codingtree
