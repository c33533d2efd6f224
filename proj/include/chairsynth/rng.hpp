#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace chairsynth {

// Source of random variates. The noise and placement routines take this
// interface so tests can substitute deterministic stubs.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  // Uniform on [lo, hi).
  virtual double uniform(double lo, double hi) = 0;
  virtual double normal(double mean, double stddev) = 0;
};

// Portable generator: mt19937_64 bits with hand-rolled variate transforms, so
// the same seed yields the same stream on every standard library.
class Rng final : public RandomSource {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform01();
  double uniform(double lo, double hi) override;
  double normal(double mean, double stddev) override;
  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  // Uniform integer in [lo, hi] inclusive.
  std::int64_t integer(std::int64_t lo, std::int64_t hi);
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t hash_string(std::string_view s);

// Independent stream seed for (seed, a, b, c). Used to give every
// (frame, randomizer) pair its own generator.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

inline Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                  std::uint64_t c = 0) {
  return Rng(derive_seed(seed, a, b, c));
}

}  // namespace chairsynth
