#include "chairsynth/pipeline.hpp"

#include "chairsynth/lower_body.hpp"
#include "chairsynth/lowpass.hpp"
#include "chairsynth/render.hpp"
#include "chairsynth/retarget.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace chairsynth {

namespace {

// Runs job(i) for every i in `order` on `workers` threads; rethrows the
// first failure.
template <typename F>
void parallel_for(const std::vector<std::size_t>& order, int workers, F job) {
  const int n = std::max(1, workers);
  if (n == 1 || order.size() < 2) {
    for (std::size_t i : order) {
      job(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < n; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= order.size()) {
          return;
        }
        try {
          job(order[k]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) {
            error = std::current_exception();
          }
          next.store(order.size());
        }
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

std::vector<std::size_t> iota_order(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = i;
  }
  return v;
}

}  // namespace

RotationSequence prepare_clip(const MotionSequence& motion, const GeneratorConfig& config,
                              std::uint64_t seed) {
  const MotionSequence smooth = lowpass_filter(motion, config.motion.cutoff_hz);
  RotationSequence rots = positions_to_rotations(smooth, config.skeleton);
  rots = fix_lower_body(rots, seated_template(), config.motion.hip_fix_deg);
  Rng rng(derive_seed(seed, hash_string("clip:" + motion.id)));
  rots = apply_lower_body_noise(rots, rng, config.motion.noise_amplitude_deg);
  RotationSequence out = seat_pose(rots);
  out.id = motion.id;
  out.source = motion.source;
  return out;
}

MotionLibrary load_library(const std::filesystem::path& dir, const GeneratorConfig& config,
                           std::uint64_t seed, const FilterManifest* manifest, int workers) {
  if (!std::filesystem::is_directory(dir)) {
    throw NotFound("motion directory " + dir.string() + " does not exist");
  }
  std::set<std::string> removed;
  if (manifest != nullptr) {
    removed.insert(manifest->removed.begin(), manifest->removed.end());
  }
  std::vector<std::filesystem::path> files;
  std::size_t total = 0;
  for (const auto& f : list_motion_files(dir)) {
    ++total;
    if (removed.count(f.stem().string()) == 0) {
      files.push_back(f);
    }
  }
  if (total == 0) {
    throw InvalidArgument("motion directory " + dir.string() + " holds no motion files");
  }
  if (files.empty()) {
    throw InvalidArgument("the filter manifest removes every motion");
  }
  MotionLibrary lib;
  lib.clips.resize(files.size());
  parallel_for(iota_order(files.size()), workers, [&](std::size_t i) {
    try {
      lib.clips[i] = prepare_clip(load_motion(files[i], config.skeleton), config, seed);
    } catch (const Error& e) {
      throw ParseError(files[i].string() + ": " + e.what());
    }
  });
  return lib;
}

FrameBatch generate_frames(const GeneratorConfig& config, const MotionLibrary& library,
                           std::uint64_t seed, std::uint64_t first, std::size_t count,
                           int workers, const std::vector<std::size_t>* schedule) {
  if (library.clips.empty()) {
    throw InvalidArgument("motion library is empty");
  }
  const auto refresh = static_cast<std::uint64_t>(std::max(1, config.randomizers.humans.pool_refresh));
  std::map<std::uint64_t, HumanPool> pools;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t epoch = (first + i) / refresh;
    if (pools.count(epoch) == 0) {
      pools.emplace(epoch, refresh_human_pool(config.randomizers, seed, first + i, config.skeleton));
    }
  }
  const AnimationPool anim = library.pool();
  const ResolvedSchema schema = resolve_schema(config.schema, config.skeleton);
  AnnotateOptions opts;
  opts.occlusion_threshold = config.annotation.occlusion_threshold;
  FrameBatch out;
  out.scenes.resize(count);
  out.frames.resize(count);
  std::vector<std::size_t> order = schedule != nullptr ? *schedule : iota_order(count);
  if (order.size() != count) {
    throw InvalidArgument("schedule length does not match the frame count");
  }
  parallel_for(order, workers, [&](std::size_t i) {
    const std::uint64_t frame = first + i;
    const HumanPool& pool = pools.at(frame / refresh);
    out.scenes[i] = sample_scene(config.randomizers, seed, frame, anim, pool);
    out.frames[i] = annotate_scene(out.scenes[i], library, config.skeleton, schema, opts);
  });
  return out;
}

GenerateSummary generate_dataset(const GeneratorConfig& config, const GenerateOptions& options) {
  if (options.count == 0) {
    throw InvalidArgument("frame count must be positive");
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<FilterManifest> manifest;
  if (options.filter) {
    manifest = load_manifest(*options.filter);
  }
  const MotionLibrary lib = load_library(options.motions, config, options.seed,
                                         manifest ? &*manifest : nullptr, options.workers);
  const FrameBatch batch =
      generate_frames(config, lib, options.seed, 0, options.count, options.workers);
  const CocoDataset ds = write_coco_dataset(batch.frames, options.out, &batch.scenes);
  if (config.annotation.render_debug) {
    const ResolvedSchema schema = resolve_schema(config.schema, config.skeleton);
    parallel_for(iota_order(batch.frames.size()), options.workers, [&](std::size_t i) {
      const PosedScene posed = pose_scene(batch.scenes[i], lib, config.skeleton, schema);
      const Image img = render_debug_frame(posed, batch.frames[i].camera, &batch.frames[i]);
      write_ppm(img, options.out / "images" / ds.images[i].file_name);
    });
  }
  GenerateSummary s;
  s.frames = batch.frames.size();
  s.annotations = ds.annotations.size();
  s.motions = lib.clips.size();
  if (manifest) {
    std::size_t n = 0;
    for (const auto& f : list_motion_files(options.motions)) {
      n += std::count(manifest->removed.begin(), manifest->removed.end(), f.stem().string()) > 0;
    }
    s.motions_removed = n;
  }
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

}  // namespace chairsynth
