#include "doctest.h"

#include "chairsynth/poisson_disk.hpp"

using namespace chairsynth;

namespace {

double min_pair_distance(const std::vector<Vec3>& p) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      d = std::min(d, (p[i] - p[j]).norm());
    }
  }
  return d;
}

const Box3 kUnit{Vec3::Zero(), Vec3::Ones()};

}  // namespace

TEST_CASE("separation beyond the diagonal leaves one point") {
  Rng rng(1);
  const auto p = poisson_disk_place(kUnit, 1.8, 100, rng);
  REQUIRE(p.size() == 1);
  CHECK((p[0].array() >= 0.0).all());
  CHECK((p[0].array() <= 1.0).all());
}

TEST_CASE("every pair keeps the separation") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const Box3 box{Vec3(-7.5, -7.5, -7.5), Vec3(7.5, 7.5, 7.5)};
    const auto p = poisson_disk_place(box, 2.5, 1000, rng);
    CHECK(p.size() > 10);
    CHECK(min_pair_distance(p) >= 2.5);
    for (const auto& x : p) {
      CHECK((x.array() >= box.lo.array()).all());
      CHECK((x.array() <= box.hi.array()).all());
    }
  }
}

TEST_CASE("unit cube at 0.2 fills to a plausible density") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const auto p = poisson_disk_place(kUnit, 0.2, 100000, rng);
    CHECK(p.size() >= 80);
    CHECK(p.size() <= 160);
    CHECK(min_pair_distance(p) >= 0.2);
  }
}

TEST_CASE("count cap and determinism") {
  Rng a(9);
  Rng b(9);
  const auto pa = poisson_disk_place(kUnit, 0.1, 7, a);
  const auto pb = poisson_disk_place(kUnit, 0.1, 7, b);
  CHECK(pa.size() == 7);
  CHECK(pa == pb);
  Rng c(9);
  CHECK(poisson_disk_place(kUnit, 0.1, 0, c).empty());
}

TEST_CASE("bad arguments") {
  Rng rng(1);
  CHECK_THROWS_AS(poisson_disk_place(kUnit, 0.0, 5, rng), InvalidArgument);
  CHECK_THROWS_AS(poisson_disk_place(kUnit, -1.0, 5, rng), InvalidArgument);
  CHECK_THROWS_AS(poisson_disk_place(Box3{Vec3::Zero(), Vec3(1, 0, 1)}, 0.1, 5, rng),
                  InvalidArgument);
}
