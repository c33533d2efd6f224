#include "doctest.h"

#include "chairsynth/annotate.hpp"
#include "chairsynth/scene.hpp"
#include "oracles/visibility_oracle.hpp"
#include "support/fixtures.hpp"

using namespace chairsynth;

namespace {

CameraModel origin_camera() {
  CameraModel cam;
  cam.fov_deg = 60.0;
  return cam;
}

SceneGeometry one(const Solid& s) {
  SceneGeometry g;
  g.add(s);
  g.finalize();
  return g;
}

}  // namespace

TEST_CASE("empty scene") {
  SceneGeometry g;
  g.finalize();
  const auto cam = origin_camera();
  CHECK(classify_visibility(Vec3(0, 0, 5), g, cam) == Visibility::Visible);
  CHECK(classify_visibility(Vec3(0, 0, -5), g, cam) == Visibility::NotVisible);
  CHECK(classify_visibility(Vec3(50, 0, 5), g, cam) == Visibility::NotVisible);
}

TEST_CASE("sphere halfway blocks the point") {
  const auto cam = origin_camera();
  const auto g = one(make_solid(PrimitiveKind::Sphere, Mat3::Identity() * 0.5, Vec3(0, 0, 5)));
  CHECK(classify_visibility(Vec3(0, 0, 10), g, cam) == Visibility::Occluded);
  CHECK(classify_visibility(Vec3(0, 0, 3), g, cam) == Visibility::Visible);
  CHECK(classify_visibility(Vec3(0, 1.5, 10), g, cam) == Visibility::Visible);
}

TEST_CASE("surface within the threshold does not occlude") {
  const auto cam = origin_camera();
  // Front face at z = 4.99, one centimetre before the point.
  const auto g = one(make_solid(PrimitiveKind::Cube, Mat3::Identity(), Vec3(0, 0, 5.99)));
  CHECK(classify_visibility(Vec3(0, 0, 5.0), g, cam) == Visibility::Visible);
  CHECK(classify_visibility(Vec3(0, 0, 5.0), g, cam, {}, 0.0) == Visibility::Occluded);
  CHECK(classify_visibility(Vec3(0, 0, 5.05), g, cam) == Visibility::Occluded);
}

TEST_CASE("own bone capsules are exempt, others are not") {
  const auto cam = origin_camera();
  Solid s = make_solid(PrimitiveKind::Capsule, Mat3::Identity() * 0.1, Vec3(0, 0, 5), 2.0);
  s.role = Solid::Role::Body;
  s.owner = 0;
  s.joint_a = 3;
  s.joint_b = 4;
  const auto g = one(s);
  const Vec3 kp(0, 0, 5);
  CHECK(classify_visibility(kp - Vec3(0, 0, 0.0), g, cam, {0, 4}) == Visibility::Visible);
  CHECK(classify_visibility(kp, g, cam, {0, 3}) == Visibility::Visible);
  CHECK(classify_visibility(kp, g, cam, {0, 5}) == Visibility::Occluded);
  CHECK(classify_visibility(kp, g, cam, {1, 4}) == Visibility::Occluded);
  CHECK(classify_visibility(kp, g, cam) == Visibility::Occluded);
}

TEST_CASE("each primitive blocks through its centre") {
  const auto cam = origin_camera();
  for (const auto k : {PrimitiveKind::Cube, PrimitiveKind::Sphere, PrimitiveKind::Cylinder,
                       PrimitiveKind::Capsule}) {
    const Mat3 a = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix() *
                   Vec3(0.3, 0.5, 0.2).asDiagonal();
    const auto g = one(make_solid(k, a, Vec3(0.05, -0.02, 6), 1.0));
    CHECK(classify_visibility(Vec3(0, 0, 12), g, cam) == Visibility::Occluded);
    CHECK(classify_visibility(Vec3(0, 0, 4), g, cam) == Visibility::Visible);
  }
}

TEST_CASE("labels agree with the dense sampling oracle") {
  const auto config = default_generator_config();
  const auto lib = fixtures::demo_library(config, 4);
  const auto pool = lib.pool();
  const auto schema = resolve_schema(config.schema, config.skeleton);
  std::size_t checked = 0;
  std::size_t hidden = 0;
  for (std::uint64_t f = 0; f < 12; ++f) {
    const auto scene = sample_scene(config.randomizers, 77, f, pool, config.skeleton);
    const auto posed = pose_scene(scene, lib, config.skeleton, schema);
    const auto cam = CameraModel::from_sample(scene.camera);
    for (std::size_t h = 0; h < posed.keypoints.size(); ++h) {
      for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
        const Vec3& p = posed.keypoints[h][k];
        const KeypointOwner owner{static_cast<int>(h), posed.keypoint_joints[h][k]};
        const bool want = oracle::occluded(posed.geometry.solids(), cam.position, p, owner,
                                           kOcclusionThreshold);
        OcclusionTester t(posed.geometry);
        const bool got = t.occluded(cam.position, p, owner);
        CHECK(want == got);
        ++checked;
        hidden += got ? 1 : 0;
      }
    }
  }
  CHECK(checked > 500);
  CHECK(hidden > 0);
  CHECK(hidden < checked);
}

TEST_CASE("nearest hit matches the oracle entry point") {
  Rng rng(5);
  SceneGeometry g;
  for (int i = 0; i < 25; ++i) {
    const auto k = static_cast<PrimitiveKind>(rng.below(4));
    Mat3 a;
    for (int e = 0; e < 9; ++e) {
      a(e / 3, e % 3) = rng.uniform(-0.5, 0.5);
    }
    a += Mat3::Identity() * 0.8;
    g.add(make_solid(k, a, Vec3(rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(2, 12)),
                     rng.uniform(0, 1)));
  }
  g.finalize();
  OcclusionTester t(g);
  int hits = 0;
  for (int i = 0; i < 400; ++i) {
    const Vec3 to(rng.uniform(-4, 4), rng.uniform(-4, 4), 14.0);
    const double d = to.norm();
    const double got = t.nearest_hit(Vec3::Zero(), to, d, {});
    const double want = oracle::first_inside(g.solids(), Vec3::Zero(), to / d, d, {});
    if (std::isinf(want)) {
      CHECK(std::isinf(got));
    } else {
      CHECK(std::abs(got - want) < 1e-9);
      ++hits;
    }
  }
  CHECK(hits > 50);
}
