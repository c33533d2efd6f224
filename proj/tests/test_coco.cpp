#include "doctest.h"

#include "chairsynth/coco.hpp"
#include "chairsynth/pipeline.hpp"
#include "support/fixtures.hpp"

#include <filesystem>

using namespace chairsynth;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("chairsynth_test_coco_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

AnnotatedFrame frame_with(std::uint64_t id, int instances) {
  AnnotatedFrame f;
  f.frame_id = id;
  for (int i = 0; i < instances; ++i) {
    AnnotatedInstance inst;
    inst.human = i;
    inst.motion_id = "m" + std::to_string(i);
    inst.bbox = {10.0 * i, 20.0, 30.0, 40.0};
    inst.keypoints[0] = {15.0, 25.0, Visibility::Visible};
    inst.keypoints[5] = {16.0, 30.0, Visibility::Occluded};
    inst.num_keypoints = 2;
    inst.occluded_fraction = 0.5;
    inst.nose_world = Vec3(i, 1, 2);
    f.instances.push_back(inst);
  }
  return f;
}

}  // namespace

TEST_CASE("ids are dense in frame and instance order") {
  const std::vector<AnnotatedFrame> frames{frame_with(3, 2), frame_with(7, 0), frame_with(9, 3)};
  std::vector<SidecarRecord> side;
  const auto ds = build_coco_dataset(frames, &side);
  REQUIRE(ds.images.size() == 3);
  REQUIRE(ds.annotations.size() == 5);
  CHECK(ds.images[2].id == 3);
  CHECK(ds.images[2].file_name == "frame_00000009.ppm");
  CHECK(ds.annotations[4].id == 5);
  CHECK(ds.annotations[4].image_id == 3);
  CHECK(ds.annotations[0].keypoints.size() == 51);
  CHECK(ds.annotations[0].keypoints[2] == 2.0);
  CHECK(ds.annotations[0].keypoints[17] == 1.0);
  CHECK(ds.annotations[0].keypoints[5] == 0.0);
  CHECK(ds.annotations[1].area == 1200.0);
  CHECK(validate_coco_dataset(ds).empty());
  REQUIRE(side.size() == 3);
  CHECK(side[2].instances[2].annotation_id == 5);
  CHECK(side[2].instances[2].nose == Vec3(2, 1, 2));
  CHECK_THROWS_AS(build_coco_dataset({frame_with(3, 1), frame_with(3, 1)}), InvalidArgument);
}

TEST_CASE("json round trip") {
  const auto ds = build_coco_dataset({frame_with(0, 2), frame_with(1, 1)});
  const auto j = coco_to_json(ds);
  CHECK(j["categories"][0]["keypoints"].size() == 17);
  CHECK(j["categories"][0]["skeleton"].size() > 10);
  const auto back = coco_from_json(j);
  CHECK(coco_to_json(back) == j);
}

TEST_CASE("validation finds structural problems") {
  const auto good = build_coco_dataset({frame_with(0, 2), frame_with(1, 1)});
  auto bad = good;
  SUBCASE("duplicate annotation id") {
    bad.annotations[1].id = 1;
    CHECK(validate_coco_dataset(bad).find("duplicate") != std::string::npos);
  }
  SUBCASE("sparse image ids") {
    bad.images[1].id = 5;
    bad.annotations[2].image_id = 5;
    CHECK_FALSE(validate_coco_dataset(bad).empty());
    CHECK(validate_coco_dataset(bad, false).empty());
  }
  SUBCASE("short keypoint array") {
    bad.annotations[0].keypoints.pop_back();
    CHECK(validate_coco_dataset(bad).find("51") != std::string::npos);
  }
  SUBCASE("bad visibility") {
    bad.annotations[0].keypoints[2] = 3.0;
    CHECK(validate_coco_dataset(bad).find("visibility") != std::string::npos);
  }
  SUBCASE("count mismatch") {
    bad.annotations[0].num_keypoints = 3;
    CHECK(validate_coco_dataset(bad).find("num_keypoints") != std::string::npos);
  }
  SUBCASE("empty box") {
    bad.annotations[0].bbox[3] = 0.0;
    CHECK(validate_coco_dataset(bad).find("area") != std::string::npos);
  }
  SUBCASE("unknown image") {
    bad.annotations[0].image_id = 42;
    CHECK(validate_coco_dataset(bad).find("unknown image") != std::string::npos);
  }
}

TEST_CASE("malformed annotation files") {
  using nlohmann::json;
  CHECK_THROWS_AS(coco_from_json(json::array()), ParseError);
  CHECK_THROWS_AS(coco_from_json(json::parse(R"j({"images": [], "annotations": [{"id": 1}]})j")),
                  ParseError);
  CHECK_THROWS_AS(
      coco_from_json(json::parse(
          R"j({"images": [{"id": 1}], "annotations": [{"id": 1, "image_id": 1, "bbox": [1, 2]}]})j")),
      ParseError);
  const auto dir = temp_dir("malformed");
  std::filesystem::create_directories(dir);
  write_text_file(dir / "a.json", "{\"images\": ");
  CHECK_THROWS_AS(read_coco_dataset(dir / "a.json"), ParseError);
}

TEST_CASE("sidecar records round trip") {
  SidecarRecord r;
  r.image_id = 4;
  r.frame_index = 11;
  r.camera_position = Vec3(1, 2, -20);
  r.camera_rotation_deg = Vec3(1, -2, 3);
  r.fov_deg = 33.0;
  r.instances.push_back({7, Vec3(0.5, 1.1, 2.0), Vec3(0, 0, -1)});
  const auto back = sidecar_from_json(sidecar_to_json(r));
  CHECK(sidecar_to_json(back) == sidecar_to_json(r));
  auto j = sidecar_to_json(r);
  j["instances"][0].erase("nose");
  CHECK_THROWS_AS(sidecar_from_json(j), ParseError);
}

TEST_CASE("seeded generation writes byte-identical files") {
  const auto config = default_generator_config();
  const auto lib = fixtures::demo_library(config, 3);
  std::string first;
  std::string first_side;
  for (int run = 0; run < 2; ++run) {
    const auto batch = generate_frames(config, lib, 99, 0, 20, run + 1);
    const auto dir = temp_dir("golden_" + std::to_string(run));
    const auto ds = write_coco_dataset(batch.frames, dir, &batch.scenes);
    CHECK(validate_coco_dataset(ds).empty());
    const auto text = read_text_file(dir / kAnnotationFile);
    const auto side = read_text_file(dir / kSidecarFile);
    if (run == 0) {
      first = text;
      first_side = side;
      const auto records = read_sidecar(dir / kSidecarFile);
      CHECK(records.size() == 20);
      CHECK(records[3].camera_rotation_deg == batch.scenes[3].camera.rotation_deg);
      const auto back = read_coco_dataset(dir / kAnnotationFile);
      CHECK(back.annotations.size() == ds.annotations.size());
    } else {
      CHECK(text == first);
      CHECK(side == first_side);
    }
  }
  CHECK_THROWS_AS(write_coco_dataset({}, temp_dir("empty")), InvalidArgument);
}
