#pragma once

#include <array>
#include <cstdint>

namespace codingtree {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Random stream for one Monte Carlo sample. The stream is a pure function of
/// (seed, run, point, sample), so any sample can be regenerated on its own,
/// on any thread.
///
/// Each Philox block gives two 64-bit words; each word becomes one uniform
/// on the open interval (0, 1) with 53 random bits. Normals use the inverse
/// CDF, exponentials -log(U)/rate, so every variate costs exactly one
/// uniform.
class SampleRng {
 public:
  SampleRng(std::uint64_t seed, std::uint64_t run, std::uint64_t point, std::uint64_t sample);

  double uniform();
  double normal();
  double exponential(double rate);

  /// Number of uniforms consumed so far.
  std::uint64_t draws() const { return draws_; }

 private:
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint64_t, 2> buffer_{};
  std::uint64_t draws_ = 0;
};

}  // namespace codingtree
