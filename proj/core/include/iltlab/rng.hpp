#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace iltlab {

// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

// Counter-based stream keyed by (seed, stream). Streams with different ids are
// independent and each one is fully determined by its key, so replica r of an
// ensemble draws the same numbers no matter which worker runs it.
class StreamRng {
 public:
  using result_type = std::uint32_t;

  StreamRng() : StreamRng(0, 0) {}
  StreamRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept { return next_u32(); }

  std::uint32_t next_u32() noexcept {
    if (lane_ == 4) refill();
    return buffer_[lane_++];
  }
  std::uint64_t next_u64() noexcept {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  // Uniform on {0, ..., n-1}, unbiased (Lemire's multiply-and-reject).
  std::uint32_t below(std::uint32_t n) noexcept;

  std::uint64_t blocks_used() const noexcept { return block_; }

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_{};
  std::uint64_t stream_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int lane_ = 4;
};

}  // namespace iltlab
