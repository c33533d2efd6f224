#pragma once

#include "chairsynth/common.hpp"
#include "chairsynth/rng.hpp"

#include <vector>

namespace chairsynth {

struct Box3 {
  Vec3 lo;
  Vec3 hi;
};

constexpr int kPoissonAttempts = 30;

// Bridson sampling: every point lies in `volume` and every pair is at least
// `separation` apart. Stops after `max_count` points or when no active point
// yields a new one within kPoissonAttempts tries.
std::vector<Vec3> poisson_disk_place(const Box3& volume, double separation, std::size_t max_count,
                                     Rng& rng);

}  // namespace chairsynth
