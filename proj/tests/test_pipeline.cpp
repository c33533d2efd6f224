#include "doctest.h"

#include "chairsynth/coco.hpp"
#include "chairsynth/demo_motions.hpp"
#include "chairsynth/pipeline.hpp"
#include "chairsynth/render.hpp"
#include "chairsynth/rng.hpp"
#include "support/fixtures.hpp"

#include <filesystem>

using namespace chairsynth;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("chairsynth_test_pipeline_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string batch_text(const FrameBatch& b) {
  std::string out = coco_to_json(build_coco_dataset(b.frames)).dump();
  for (const auto& s : b.scenes) {
    out += scene_to_json(s).dump();
  }
  return out;
}

}  // namespace

TEST_CASE("prepared clips are seated and deterministic") {
  const auto cfg = default_generator_config();
  auto m = demo_motion(cfg.skeleton, 4, 2);
  m.id = "clip";
  const auto a = prepare_clip(m, cfg, 9);
  const auto b = prepare_clip(m, cfg, 9);
  REQUIRE(a.size() == m.size());
  CHECK(a.id == "clip");
  for (std::size_t f = 0; f < a.size(); ++f) {
    CHECK(a.root_positions[f] == b.root_positions[f]);
    for (std::size_t j = 0; j < cfg.skeleton.size(); ++j) {
      CHECK(a.rotations[f][j].coeffs() == b.rotations[f][j].coeffs());
    }
  }
  // A different seed changes only the noise.
  const auto c = prepare_clip(m, cfg, 10);
  bool differs = false;
  for (std::size_t f = 0; f < a.size() && !differs; ++f) {
    for (std::size_t j = 0; j < cfg.skeleton.size(); ++j) {
      differs = differs || a.rotations[f][j].coeffs() != c.rotations[f][j].coeffs();
    }
  }
  CHECK(differs);
}

TEST_CASE("library honours the manifest") {
  const auto cfg = default_generator_config();
  const auto dir = temp_dir("library");
  write_demo_motions(dir / "motions", 5, 2, cfg.skeleton);
  const auto all = load_library(dir / "motions", cfg, 1);
  CHECK(all.clips.size() == 5);
  CHECK(all.clips[0].id == "motion_000");
  FilterManifest man;
  man.removed = {"motion_001", "motion_004"};
  const auto some = load_library(dir / "motions", cfg, 1, &man, 2);
  REQUIRE(some.clips.size() == 3);
  CHECK(some.clips[1].id == "motion_002");
  for (std::size_t f = 0; f < some.clips[1].size(); ++f) {
    CHECK(some.clips[1].root_positions[f] == all.clips[2].root_positions[f]);
  }
  man.removed = {"motion_000", "motion_001", "motion_002", "motion_003", "motion_004"};
  CHECK_THROWS_AS(load_library(dir / "motions", cfg, 1, &man), InvalidArgument);
  CHECK_THROWS_AS(load_library(dir / "nothing", cfg, 1), NotFound);
  std::filesystem::create_directories(dir / "empty");
  CHECK_THROWS_AS(load_library(dir / "empty", cfg, 1), InvalidArgument);
  write_text_file(dir / "motions" / "zz_broken.json", "{");
  CHECK_THROWS_AS(load_library(dir / "motions", cfg, 1), ParseError);
}

TEST_CASE("frames do not depend on worker count or schedule") {
  const auto cfg = default_generator_config();
  const auto lib = fixtures::demo_library(cfg, 4);
  const std::size_t n = 24;
  const auto base = batch_text(generate_frames(cfg, lib, 5, 390, n));
  CHECK(batch_text(generate_frames(cfg, lib, 5, 390, n, 3)) == base);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    order[i] = i;
  }
  Rng rng(12);
  for (std::size_t k = n; k > 1; --k) {
    std::swap(order[k - 1], order[rng.below(k)]);
  }
  CHECK(batch_text(generate_frames(cfg, lib, 5, 390, n, 2, &order)) == base);
  // A sub-range reproduces the same frames.
  const auto tail = generate_frames(cfg, lib, 5, 400, 4);
  const auto full = generate_frames(cfg, lib, 5, 390, n);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(scene_to_json(tail.scenes[i]) == scene_to_json(full.scenes[10 + i]));
  }
  order.pop_back();
  CHECK_THROWS_AS(generate_frames(cfg, lib, 5, 0, n, 1, &order), InvalidArgument);
  CHECK_THROWS_AS(generate_frames(cfg, MotionLibrary{}, 5, 0, n), InvalidArgument);
}

TEST_CASE("generate_dataset writes a valid dataset") {
  auto cfg = default_generator_config();
  cfg.annotation.render_debug = true;
  const auto dir = temp_dir("dataset");
  write_demo_motions(dir / "motions", 3, 1, cfg.skeleton);
  FilterManifest man;
  man.removed = {"motion_002"};
  save_manifest(man, dir / "filter.json");
  GenerateOptions o;
  o.seed = 3;
  o.count = 6;
  o.motions = dir / "motions";
  o.filter = dir / "filter.json";
  o.out = dir / "out";
  o.workers = 2;
  const auto s = generate_dataset(cfg, o);
  CHECK(s.frames == 6);
  CHECK(s.motions == 2);
  CHECK(s.motions_removed == 1);
  const auto ds = read_coco_dataset(dir / "out" / "annotations.json");
  CHECK(validate_coco_dataset(ds).empty());
  CHECK(ds.images.size() == 6);
  CHECK(ds.annotations.size() == s.annotations);
  for (const auto& a : ds.annotations) {
    CHECK(a.motion_id != "motion_002");
  }
  CHECK(read_sidecar(dir / "out" / "scenes.jsonl").size() == 6);
  for (const auto& img : ds.images) {
    const auto ppm = read_text_file(dir / "out" / "images" / img.file_name);
    CHECK(ppm.rfind("P6\n1280 720\n255\n", 0) == 0);
    CHECK(ppm.size() == 16 + 1280 * 720 * 3);
  }
  o.count = 0;
  CHECK_THROWS_AS(generate_dataset(cfg, o), InvalidArgument);
}

TEST_CASE("debug render shades geometry and draws keypoints") {
  const auto cfg = default_generator_config();
  const auto lib = fixtures::demo_library(cfg, 2);
  const auto batch = generate_frames(cfg, lib, 8, 0, 1);
  const auto schema = resolve_schema(cfg.schema, cfg.skeleton);
  const auto posed = pose_scene(batch.scenes[0], lib, cfg.skeleton, schema);
  const auto plain = render_debug_frame(posed, batch.frames[0].camera);
  CHECK(plain.width == 1280);
  CHECK(plain.height == 720);
  CHECK(plain.rgb.size() == 1280u * 720u * 3u);
  CHECK(plain.foreground_pixels() > 0);
  CHECK(plain.foreground_pixels() < 1280u * 720u);
  const auto marked = render_debug_frame(posed, batch.frames[0].camera, &batch.frames[0]);
  if (!batch.frames[0].instances.empty()) {
    CHECK(marked.rgb != plain.rgb);
  }
  PosedScene empty;
  const auto blank = render_debug_frame(empty, batch.frames[0].camera);
  CHECK(blank.foreground_pixels() == 0);
  CHECK(blank.rgb[0] == kBackgroundLevel);
  const auto dir = temp_dir("ppm");
  write_ppm(blank, dir / "b.ppm");
  CHECK(std::filesystem::file_size(dir / "b.ppm") == 16 + blank.rgb.size());
}
