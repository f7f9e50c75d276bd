#pragma once

#include <array>
#include <cstdint>

namespace msearch {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  /// One application of the ten-round bijection.
  static Block apply(Block counter, Key key);

  /// Stream for replication `stream` under `seed`: the key is the seed, the
  /// upper counter words are the stream index, the lower words count blocks.
  Philox4x32(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform integer in [0, bound), bound > 0 (Lemire's method).
  std::uint64_t below(std::uint64_t bound);
  /// Uniform double in [0, 1) with 53 random bits.
  double next_double();

  // UniformRandomBitGenerator interface.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

 private:
  void refill();

  Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block out_{};
  int used_ = 4;
};

}  // namespace msearch
