#include "doctest.h"

#include "chairsynth/config.hpp"
#include "chairsynth/scene.hpp"
#include "oracles/ks.hpp"

#include <algorithm>
#include <filesystem>

using namespace chairsynth;

namespace {

AnimationPool small_pool() {
  AnimationPool p;
  p.lengths = {40, 1, 73};
  p.ids = {"a", "b", "c"};
  return p;
}

}  // namespace

TEST_CASE("same seed and index give the same scene") {
  const auto cfg = default_randomizer_config();
  const auto sk = default_skeleton();
  for (std::uint64_t i : {0ULL, 1ULL, 399ULL, 400ULL, 123456ULL}) {
    const auto a = sample_scene(cfg, 7, i, small_pool(), sk);
    const auto b = sample_scene(cfg, 7, i, small_pool(), sk);
    CHECK(scene_to_json(a) == scene_to_json(b));
  }
  CHECK(scene_to_json(sample_scene(cfg, 7, 3, small_pool(), sk)) !=
        scene_to_json(sample_scene(cfg, 8, 3, small_pool(), sk)));
}

TEST_CASE("pool refresh follows the 400-frame interval") {
  const auto cfg = default_randomizer_config();
  const auto sk = default_skeleton();
  const auto p0 = refresh_human_pool(cfg, 3, 0, sk);
  const auto p399 = refresh_human_pool(cfg, 3, 399, sk);
  const auto p400 = refresh_human_pool(cfg, 3, 400, sk);
  CHECK(p0.bodies.size() == 50);
  CHECK(p400.bodies.size() == 50);
  CHECK(p0.epoch == p399.epoch);
  CHECK(p400.epoch == p0.epoch + 1);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(p0.bodies[i].age == p399.bodies[i].age);
    CHECK(p0.bodies[i].bone_scale == p399.bodies[i].bone_scale);
  }
  bool differs = false;
  for (std::size_t i = 0; i < 50; ++i) {
    differs = differs || p0.bodies[i].age != p400.bodies[i].age;
  }
  CHECK(differs);
}

TEST_CASE("pool bodies stay inside the configured supports") {
  const auto cfg = default_randomizer_config();
  const auto sk = default_skeleton();
  for (std::uint64_t it = 0; it < 4000; it += 400) {
    for (const auto& b : refresh_human_pool(cfg, 11, it, sk).bodies) {
      CHECK(b.age >= 10.0);
      CHECK(b.age < 100.0);
      CHECK(b.height >= 0.1);
      CHECK(b.height < 1.0);
      CHECK(b.weight >= 0.0);
      CHECK(b.weight < 1.0);
      CHECK((b.sex == "male" || b.sex == "female"));
      CHECK(b.bone_scale.size() == sk.size());
      CHECK(b.stature > 0.0);
      CHECK(b.girth > 0.0);
    }
  }
}

TEST_CASE("scene values respect the table over many frames") {
  const auto cfg = default_randomizer_config();
  const auto sk = default_skeleton();
  const auto anim = small_pool();
  HumanPool pool = refresh_human_pool(cfg, 5, 0, sk);
  std::size_t lights = 0;
  std::size_t enabled = 0;
  std::vector<double> fov, cam_x, human_z, human_yaw, occ_scale;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    if (i % 400 == 0) {
      pool = refresh_human_pool(cfg, 5, i, sk);
    }
    const auto s = sample_scene(cfg, 5, i, anim, pool);
    CHECK(s.humans.size() >= 5);
    CHECK(s.humans.size() <= 12);
    CHECK(s.camera.fov_deg >= 5.0);
    CHECK(s.camera.fov_deg < 50.0);
    CHECK(s.occluders.size() <= static_cast<std::size_t>(cfg.occluders.max_count));
    fov.push_back(s.camera.fov_deg);
    cam_x.push_back(s.camera.position.x());
    for (const auto& h : s.humans) {
      REQUIRE(h.motion < anim.lengths.size());
      CHECK(h.frame < anim.lengths[h.motion]);
      CHECK(h.pool_index < 50);
      human_z.push_back(h.position.z());
      human_yaw.push_back(h.rotation_deg.y());
      CHECK(h.rotation_deg.x() >= 0.0);
      CHECK(h.rotation_deg.x() < 20.0);
      CHECK(h.scale.minCoeff() >= 0.5);
      CHECK(h.scale.maxCoeff() < 3.0);
    }
    for (const auto& o : s.occluders) {
      CHECK(o.position.cwiseAbs().maxCoeff() <= 7.5);
      occ_scale.push_back(o.scale.x());
      CHECK(o.texture >= 0);
      CHECK(o.texture < cfg.occluders.texture_count);
    }
    for (const auto& l : s.lights) {
      ++lights;
      enabled += l.enabled ? 1 : 0;
      CHECK(l.intensity >= 5000.0);
      CHECK(l.intensity < 50000.0);
      CHECK(l.color[3] == 1.0);
    }
    CHECK(s.background >= 0);
    CHECK(s.background < cfg.background_count);
  }
  CHECK(std::abs(static_cast<double>(enabled) / lights - 0.8) <= 0.02);
  CHECK(oracle::ks_uniform(fov, 5, 50) < 0.02);
  CHECK(oracle::ks_uniform(cam_x, -5, 5) < 0.02);
  CHECK(oracle::ks_uniform(human_z, -4, 1) < 0.02);
  CHECK(oracle::ks_uniform(human_yaw, 0, 360) < 0.02);
  CHECK(oracle::ks_uniform(occ_scale, 1, 12) < 0.03);
}

TEST_CASE("camera is offset from the configured base") {
  auto cfg = default_randomizer_config();
  cfg.camera.position = Distribution::parse("Cartesian[Constant(0), Constant(0), Constant(0)]");
  cfg.camera.rotation = Distribution::parse("Euler[Constant(0), Constant(0), Constant(0)]");
  const auto s = sample_scene(cfg, 1, 0, small_pool(), default_skeleton());
  CHECK(s.camera.position == cfg.camera.base_position);
  CHECK(s.camera.rotation_deg == Vec3::Zero());
}

TEST_CASE("occluders keep their separation") {
  const auto cfg = default_randomizer_config();
  const auto sk = default_skeleton();
  const auto pool = refresh_human_pool(cfg, 2, 0, sk);
  for (std::uint64_t i = 0; i < 300; ++i) {
    const auto s = sample_scene(cfg, 2, i, small_pool(), pool);
    for (std::size_t a = 0; a < s.occluders.size(); ++a) {
      for (std::size_t b = a + 1; b < s.occluders.size(); ++b) {
        CHECK((s.occluders[a].position - s.occluders[b].position).norm() >= 2.5);
      }
    }
  }
}

TEST_CASE("empty animation pool is rejected") {
  CHECK_THROWS_AS(sample_scene(default_randomizer_config(), 1, 0, AnimationPool{}, default_skeleton()),
                  InvalidArgument);
  AnimationPool p;
  p.lengths = {0};
  CHECK_THROWS_AS(sample_scene(default_randomizer_config(), 1, 0, p, default_skeleton()),
                  InvalidArgument);
}

TEST_CASE("wheelchair scales with the body") {
  const WheelchairDims d;
  const auto s = d.scaled(1.5);
  CHECK(s.wheel_radius == doctest::Approx(1.5 * d.wheel_radius));
  CHECK(s.seat_half == 1.5 * d.seat_half);
  CHECK(s.footplate_center == 1.5 * d.footplate_center);
}

TEST_CASE("primitive names") {
  for (const auto k : {PrimitiveKind::Cube, PrimitiveKind::Sphere, PrimitiveKind::Cylinder,
                       PrimitiveKind::Capsule}) {
    CHECK(parse_primitive(primitive_name(k)) == k);
  }
  CHECK_THROWS_AS(parse_primitive("torus"), ParseError);
}

TEST_CASE("default config matches the randomizer table") {
  const auto c = default_randomizer_config();
  CHECK(c.humans.count.to_string() == "Uniform(5, 12)");
  CHECK(c.humans.pool_size == 50);
  CHECK(c.humans.pool_refresh == 400);
  CHECK(c.humans.placement == Distribution::parse(
                                  "Cartesian[Uniform(-7.5, 7.5), Uniform(-7.5, 7.5), Uniform(-4, 1)]"));
  CHECK(c.humans.rotation ==
        Distribution::parse("Euler[Uniform(0, 20), Uniform(0, 360), Uniform(0, 20)]"));
  CHECK(c.humans.scale == Distribution::parse("Cartesian[Uniform(0.5, 3), Uniform(0.5, 3), Uniform(0.5, 3)]"));
  CHECK(c.occluders.scale ==
        Distribution::parse("Cartesian[Uniform(1, 12), Uniform(1, 12), Uniform(1, 12)]"));
  CHECK(c.occluders.separation.lo(0) == 2.5);
  CHECK(c.lights.enabled.probability() == 0.8);
  CHECK(c.lights.intensity == Distribution::parse("Uniform(5000, 50000)"));
  CHECK(c.camera.fov == Distribution::parse("Uniform(5, 50)"));
  CHECK(c.sun.latitude == Distribution::parse("Uniform(-90, 90)"));
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config json round trip and partial files") {
  const auto def = default_generator_config();
  const auto j = generator_config_to_json(def);
  const auto back = parse_generator_config(j);
  CHECK(generator_config_to_json(back) == j);

  const auto partial = nlohmann::json::parse(
      R"j({"randomizers": {"humans": {"count": "Uniform(1, 2)"}, "occluders": {"max_count": 0}}})j");
  const auto p = parse_generator_config(partial);
  CHECK(p.randomizers.humans.count.hi() == 2.0);
  CHECK(p.randomizers.occluders.max_count == 0);
  CHECK(p.randomizers.camera.fov == def.randomizers.camera.fov);
}

TEST_CASE("invalid config values") {
  using nlohmann::json;
  for (const char* text :
       {R"j({"randomizers": {"camera": {"fov": "Uniform(5, 200)"}}})j",
        R"j({"randomizers": {"humans": {"placement": "Uniform(0, 1)"}}})j",
        R"j({"randomizers": {"humans": {"pool_size": 0}}})j",
        R"j({"randomizers": {"occluders": {"kind": "Categorical[torus: 1]"}}})j",
        R"j({"randomizers": {"lights": {"enabled": "Uniform(0, 1)"}}})j",
        R"j({"randomizers": {"humans": {"count": "Nope(1)"}}})j", R"j([1, 2])j"}) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_generator_config(json::parse(text)), ParseError);
  }
}

TEST_CASE("config file loading") {
  const auto dir = std::filesystem::temp_directory_path() / "chairsynth_test_config";
  std::filesystem::create_directories(dir);
  write_text_file(dir / "c.json", generator_config_to_json(default_generator_config()).dump(2));
  CHECK_NOTHROW(load_generator_config(dir / "c.json"));
  write_text_file(dir / "bad.json", "{");
  CHECK_THROWS_AS(load_generator_config(dir / "bad.json"), ParseError);
  CHECK_THROWS(load_generator_config(dir / "missing.json"));
}
