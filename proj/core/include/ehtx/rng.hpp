#pragma once

#include <array>
#include <cstdint>

namespace ehtx {

/// Philox4x32-10 block function (Salmon et al., SC'11): a keyed bijection
/// on 128-bit counters, so any draw can be addressed directly.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Stream ids used by the experiment harness.
enum class StreamId : std::uint32_t { Harvest = 0, Gain = 1, Fitting = 2 };

/// Sequential draws from the stream addressed by (seed, trial, stream). The
/// seed is the key; the counter holds the trial, the stream id and a 32-bit
/// block index, so streams never overlap and realizations do not depend on
/// the order in which policies or trials are evaluated.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint32_t trial, StreamId stream);

  std::uint32_t next_u32();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Inverse-CDF exponential draw.
  double exponential(double mean);
  /// Uniform index in [0, n).
  std::uint32_t below(std::uint32_t n);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint32_t trial_;
  std::uint32_t stream_;
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int used_ = 4;
};

}  // namespace ehtx
