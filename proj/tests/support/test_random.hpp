#pragma once

#include <qkg/numeric.hpp>

#include <cstdint>
#include <random>
#include <vector>

namespace qkg::fixtures {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  long long integer(long long lo, long long hi) { return std::uniform_int_distribution<long long>(lo, hi)(gen_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  // p/q with |p| <= num, 1 <= q <= den.
  Rational rational(long long num = 9, long long den = 7) { return Rational(integer(-num, num), integer(1, den)); }
  std::vector<Rational> rationals(std::size_t k, long long num = 9, long long den = 7) {
    std::vector<Rational> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(rational(num, den));
    return out;
  }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace qkg::fixtures
