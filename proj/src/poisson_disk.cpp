#include "chairsynth/poisson_disk.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace chairsynth {

std::vector<Vec3> poisson_disk_place(const Box3& volume, double separation, std::size_t max_count,
                                     Rng& rng) {
  if (!(separation > 0.0)) {
    throw InvalidArgument("poisson disk separation must be positive");
  }
  const Vec3 extent = volume.hi - volume.lo;
  if (!(extent.minCoeff() > 0.0) || !extent.allFinite()) {
    throw InvalidArgument("poisson disk volume is degenerate");
  }
  std::vector<Vec3> points;
  if (max_count == 0) {
    return points;
  }
  const double cell = separation / std::sqrt(3.0);
  std::array<long, 3> dims{};
  double total = 1.0;
  for (int k = 0; k < 3; ++k) {
    dims[k] = std::max(1L, static_cast<long>(std::ceil(extent[k] / cell)));
    total *= static_cast<double>(dims[k]);
  }
  if (total > 5e7) {
    throw InvalidArgument("poisson disk grid too fine for the volume; raise the separation");
  }
  std::vector<int> grid(static_cast<std::size_t>(total), -1);
  auto cell_of = [&](const Vec3& p) {
    std::array<long, 3> c{};
    for (int k = 0; k < 3; ++k) {
      c[k] = std::clamp(static_cast<long>((p[k] - volume.lo[k]) / cell), 0L, dims[k] - 1);
    }
    return c;
  };
  auto flat = [&](const std::array<long, 3>& c) {
    return static_cast<std::size_t>((c[2] * dims[1] + c[1]) * dims[0] + c[0]);
  };
  auto inside = [&](const Vec3& p) {
    return (p.array() >= volume.lo.array()).all() && (p.array() <= volume.hi.array()).all();
  };
  auto far_enough = [&](const Vec3& p) {
    const auto c = cell_of(p);
    for (long dz = -2; dz <= 2; ++dz) {
      for (long dy = -2; dy <= 2; ++dy) {
        for (long dx = -2; dx <= 2; ++dx) {
          const std::array<long, 3> n{c[0] + dx, c[1] + dy, c[2] + dz};
          if (n[0] < 0 || n[1] < 0 || n[2] < 0 || n[0] >= dims[0] || n[1] >= dims[1] ||
              n[2] >= dims[2]) {
            continue;
          }
          const int idx = grid[flat(n)];
          if (idx >= 0 && !((points[idx] - p).norm() >= separation)) {
            return false;
          }
        }
      }
    }
    return true;
  };
  auto add = [&](const Vec3& p) {
    grid[flat(cell_of(p))] = static_cast<int>(points.size());
    points.push_back(p);
  };

  Vec3 first;
  for (int k = 0; k < 3; ++k) {
    first[k] = rng.uniform(volume.lo[k], volume.hi[k]);
  }
  add(first);
  std::vector<int> active{0};
  while (!active.empty() && points.size() < max_count) {
    const std::size_t slot = rng.below(active.size());
    const Vec3 base = points[active[slot]];
    bool placed = false;
    for (int attempt = 0; attempt < kPoissonAttempts; ++attempt) {
      // Uniform direction, radius uniform by volume in [r, 2r].
      const double z = rng.uniform(-1.0, 1.0);
      const double phi = rng.uniform(0.0, 2.0 * kPi);
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double u = rng.uniform01();
      const double radius = separation * std::cbrt(1.0 + 7.0 * u);
      const Vec3 cand = base + radius * Vec3(s * std::cos(phi), s * std::sin(phi), z);
      if (inside(cand) && far_enough(cand)) {
        active.push_back(static_cast<int>(points.size()));
        add(cand);
        placed = true;
        break;
      }
    }
    if (!placed) {
      active[slot] = active.back();
      active.pop_back();
    }
  }
  return points;
}

}  // namespace chairsynth
