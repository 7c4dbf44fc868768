#pragma once

#include <cstdint>
#include <random>

#include "capkm/rational.hpp"

namespace capkm {

// Deterministic RNG wrapper. mt19937_64 output is bit-stable across
// platforms by the standard; std::*_distribution is not, so the few
// derived draws we need are implemented here directly.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed), seed_(seed) {}

  uint64_t seed() const { return seed_; }

  uint64_t u64() { return eng_(); }

  // Uniform integer in [lo, hi], modulo-rejection to kill bias.
  long long uniform_int(long long lo, long long hi) {
    uint64_t range = static_cast<uint64_t>(hi - lo) + 1;
    if (range == 0) return static_cast<long long>(u64());  // full 64-bit span
    uint64_t reject_below = (-range) % range;
    uint64_t r;
    do {
      r = u64();
    } while (r < reject_below);
    return lo + static_cast<long long>(r % range);
  }

  // Bernoulli(p) for exact rational p, exact comparison r/2^64 < p.
  bool bernoulli(const Rat& p) {
    if (p <= 0) return false;
    if (p >= 1) return true;
    uint64_t r = u64();
    Int lhs(p.get_den());
    // lhs = r * den ; rhs = num * 2^64
    lhs *= Int(static_cast<unsigned long>(r >> 32));
    mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), 32);
    lhs += Int(p.get_den()) * Int(static_cast<unsigned long>(r & 0xffffffffull));
    Int rhs(p.get_num());
    mpz_mul_2exp(rhs.get_mpz_t(), rhs.get_mpz_t(), 64);
    return lhs < rhs;
  }

 private:
  std::mt19937_64 eng_;
  uint64_t seed_;
};

}  // namespace capkm
