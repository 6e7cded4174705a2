#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace rcsbench {

// Philox4x32-10 counter-based generator. The 64-bit seed is the key; the
// 128-bit counter is split into a stream id (high half) and a block index.
class Rng {
 public:
  using result_type = uint64_t;

  explicit Rng(uint64_t seed = 0, uint64_t stream = 0);

  // Independent stream for a (seed, i, j, ...) path, e.g. (master, depth, circuit).
  static Rng stream(uint64_t seed, std::initializer_list<uint64_t> path);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<uint64_t>::max(); }

  uint64_t operator()();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Uniform in (0, 1).
  double uniform_open();
  // Standard normal via Box-Muller.
  double normal();
  // Uniform integer in [0, n).
  uint64_t below(uint64_t n);

  uint64_t seed() const { return seed_; }

 private:
  void refill();

  uint64_t seed_;
  std::array<uint32_t, 2> key_;
  std::array<uint32_t, 4> ctr_;
  std::array<uint32_t, 4> buf_;
  int pos_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stateless 64-bit mixing of a path of integers; used to derive circuit seeds.
uint64_t derive_seed(uint64_t seed, std::initializer_list<uint64_t> path);

}  // namespace rcsbench
