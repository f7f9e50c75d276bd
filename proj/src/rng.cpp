#include "msearch/rng.hpp"

namespace msearch {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Block Philox4x32::apply(Block c, Key k) {
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

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream) {}

void Philox4x32::refill() {
  const Block counter{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  out_ = apply(counter, key_);
  ++block_;
  used_ = 0;
}

std::uint64_t Philox4x32::next_u64() {
  if (used_ >= 4) refill();
  const std::uint64_t v = static_cast<std::uint64_t>(out_[static_cast<std::size_t>(used_)]) |
                          static_cast<std::uint64_t>(out_[static_cast<std::size_t>(used_ + 1)]) << 32;
  used_ += 2;
  return v;
}

std::uint64_t Philox4x32::below(std::uint64_t bound) {
  unsigned __int128 p = static_cast<unsigned __int128>(next_u64()) * bound;
  auto low = static_cast<std::uint64_t>(p);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      p = static_cast<unsigned __int128>(next_u64()) * bound;
      low = static_cast<std::uint64_t>(p);
    }
  }
  return static_cast<std::uint64_t>(p >> 64);
}

double Philox4x32::next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

}  // namespace msearch
