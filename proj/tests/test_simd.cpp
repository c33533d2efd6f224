#include "doctest.h"

#include "chairsynth/common.hpp"
#include "chairsynth/rng.hpp"
#include "chairsynth/simd/kernels.hpp"

#include <cstring>
#include <limits>

using namespace chairsynth;
using namespace chairsynth::simd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SolidBatch random_batch(Rng& rng, std::size_t n, bool capsules) {
  SolidBatch b;
  for (std::size_t i = 0; i < n; ++i) {
    Mat3 a;
    for (int k = 0; k < 9; ++k) {
      a(k / 3, k % 3) = rng.uniform(-1.5, 1.5);
    }
    a += Mat3::Identity() * 2.0;
    const Mat3 inv = a.inverse();
    double m[9];
    for (int k = 0; k < 9; ++k) {
      m[k] = inv(k / 3, k % 3);
    }
    const double c[3] = {rng.uniform(-6, 6), rng.uniform(-6, 6), rng.uniform(-6, 6)};
    b.push(m, c, capsules ? (rng.below(4) == 0 ? 0.0 : rng.uniform(0, 3)) : 0.0);
  }
  b.finalize();
  return b;
}

SolidBatch single(const Vec3& center, double half = 0.0) {
  SolidBatch b;
  const double m[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  const double c[3] = {center.x(), center.y(), center.z()};
  b.push(m, c, half);
  b.finalize();
  return b;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("isa names") {
  CHECK(parse_isa("scalar") == Isa::Scalar);
  CHECK(parse_isa("avx2") == Isa::Avx2);
  CHECK_FALSE(parse_isa("sse9").has_value());
  CHECK(isa_name(Isa::Avx2) == "avx2");
  set_isa(Isa::Scalar);
  CHECK(active_isa() == Isa::Scalar);
  CHECK(&kernels() == &kernels_for(Isa::Scalar));
  reset_isa();
}

TEST_CASE("padding keeps the real count") {
  const auto b = single(Vec3::Zero());
  CHECK(b.count == 1);
  CHECK(b.padded() == 4);
}

TEST_CASE("scalar kernels on hand cases") {
  const auto& k = kernels_for(Isa::Scalar);
  const std::uint8_t skip[4] = {0, 0, 0, 0};
  const std::uint8_t skipped[4] = {1, 0, 0, 0};
  RayQuery r{{-5, 0, 0}, {1, 0, 0}, 100.0, skip};
  const auto one = single(Vec3::Zero());
  CHECK(k.nearest_box(one, r) == doctest::Approx(4.0));
  CHECK(k.nearest_capsule(one, r) == doctest::Approx(4.0));
  CHECK(k.nearest_cylinder(one, r) == doctest::Approx(4.0));
  RayQuery down{{0, 5, 0}, {0, -1, 0}, 100.0, skip};
  CHECK(k.nearest_cylinder(one, down) == doctest::Approx(4.0));
  CHECK(k.nearest_capsule(single(Vec3::Zero(), 2.0), down) == doctest::Approx(2.0));
  // Segment ends before the solid.
  r.tmax = 3.9;
  CHECK(k.nearest_box(one, r) == kInf);
  // Origin inside clamps to zero.
  RayQuery in{{0.2, 0, 0}, {1, 0, 0}, 100.0, skip};
  CHECK(k.nearest_box(one, in) == 0.0);
  in.skip = skipped;
  CHECK(k.nearest_box(one, in) == kInf);
  // Solid behind the origin.
  RayQuery away{{5, 0, 0}, {1, 0, 0}, 100.0, skip};
  CHECK(k.nearest_capsule(one, away) == kInf);
  // Axis-parallel miss.
  RayQuery miss{{-5, 1.5, 0}, {1, 0, 0}, 100.0, skip};
  CHECK(k.nearest_box(one, miss) == kInf);
  CHECK(k.nearest_cylinder(one, miss) == kInf);
}

TEST_CASE("avx2 ray kernels match scalar bit for bit") {
  if (!isa_available(Isa::Avx2)) {
    MESSAGE("avx2 not available; skipping");
    return;
  }
  const auto& s = kernels_for(Isa::Scalar);
  const auto& v = kernels_for(Isa::Avx2);
  Rng rng(31);
  std::size_t hits = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t n = 1 + rng.below(13);
    const auto batch = random_batch(rng, n, true);
    std::vector<std::uint8_t> skip(batch.padded(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      skip[i] = rng.below(5) == 0 ? 1 : 0;
    }
    RayQuery r{};
    for (int k = 0; k < 3; ++k) {
      r.o[k] = rng.uniform(-10, 10);
    }
    Vec3 d(rng.normal(0, 1), rng.normal(0, 1), rng.normal(0, 1));
    // Exercise the axis-parallel branches.
    if (rng.below(4) == 0) {
      d[static_cast<Eigen::Index>(rng.below(3))] = 0.0;
    }
    d.normalize();
    for (int k = 0; k < 3; ++k) {
      r.d[k] = d[k];
    }
    r.tmax = rng.uniform(0, 30);
    r.skip = skip.data();
    for (auto fn : {&KernelTable::nearest_box, &KernelTable::nearest_capsule,
                    &KernelTable::nearest_cylinder}) {
      const double a = (s.*fn)(batch, r);
      const double b = (v.*fn)(batch, r);
      CHECK(same_bits(a, b));
      hits += a < kInf ? 1 : 0;
    }
  }
  CHECK(hits > 1000);
}

TEST_CASE("avx2 biquad cascade matches scalar bit for bit") {
  if (!isa_available(Isa::Avx2)) {
    MESSAGE("avx2 not available; skipping");
    return;
  }
  Rng rng(37);
  const Biquad sec[2] = {{0.02, 0.04, 0.02, -1.56, 0.64, 0.97, -0.61},
                         {1.0, 2.0, 1.0, -1.2, 0.37, 0.83, -0.2}};
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t nt = rng.below(60);
    const std::size_t nch = 1 + rng.below(70);
    std::vector<double> a(nt * nch);
    for (auto& x : a) {
      x = rng.normal(0, 1);
    }
    auto b = a;
    kernels_for(Isa::Scalar).biquad_cascade(sec, 2, a.data(), nt, nch);
    kernels_for(Isa::Avx2).biquad_cascade(sec, 2, b.data(), nt, nch);
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
  }
}
