#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace reinforce {

// 64-bit finalizer used for seed derivation (Vigna's splitmix64 step).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Philox 4x32 block cipher, 10 rounds (Salmon et al., SC'11).
// Pure integer arithmetic; identical output on every platform.
struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }
};

// Counter-based random stream with O(1) splitting.
//
// A stream is identified by a 64-bit key; the block counter provides 2^66
// uniform draws per stream. split(child) derives an independent stream
// whose key is a strong mix of the parent key and the child index, so a
// base seed fans out into per-replicate and per-purpose substreams without
// any shared state. The generator name/version below is recorded in every
// output header so results stay reproducible across machines.
class SplitStream {
 public:
  static constexpr std::string_view kGeneratorName = "philox4x32-10";
  static constexpr int kGeneratorVersion = 1;

  explicit SplitStream(std::uint64_t seed) : key_(splitmix64(seed)) {}

  // Restores a stream from a previously derived key (what results record).
  static SplitStream from_key(std::uint64_t key) {
    SplitStream s;
    s.key_ = key;
    return s;
  }

  std::uint64_t key() const { return key_; }

  SplitStream split(std::uint64_t child) const {
    return from_key(splitmix64(key_ ^ splitmix64(child ^ 0x632BE59BD9B4E019ULL)));
  }

  std::uint32_t next_u32() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  // Uniform double in [0, 1), 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  SplitStream() = default;

  void refill() {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(counter_),
        static_cast<std::uint32_t>(counter_ >> 32), 0u, 0u};
    const std::array<std::uint32_t, 2> key = {
        static_cast<std::uint32_t>(key_),
        static_cast<std::uint32_t>(key_ >> 32)};
    buf_ = Philox4x32::block(ctr, key);
    ++counter_;
    pos_ = 0;
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
};

// Seed for replicate `index` of an experiment with the given base seed.
inline std::uint64_t derive_replicate_seed(std::uint64_t base_seed,
                                           std::uint64_t index) {
  return SplitStream(base_seed).split(index).key();
}

}  // namespace reinforce
