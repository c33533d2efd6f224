#include "chairsynth/scene.hpp"

#include "chairsynth/poisson_disk.hpp"

#include <algorithm>

namespace chairsynth {

namespace {

using nlohmann::json;

// Stream ids, one per randomizer.
enum Stream : std::uint64_t {
  kPoolStream = 1,
  kHumanCountStream,
  kAnimationStream,
  kTransformStream,
  kOccluderPlacementStream,
  kOccluderKindStream,
  kOccluderScaleStream,
  kOccluderRotationStream,
  kTextureStream,
  kHueStream,
  kBackgroundStream,
  kSunStream,
  kLightStream,
  kLightPoseStream,
  kCameraStream,
  kPostStream,
};

Vec3 to_vec3(const std::vector<double>& v) { return {v.at(0), v.at(1), v.at(2)}; }

json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

// Joint index of the branch each joint hangs from: the nearest ancestor (or
// the joint itself) whose parent has more than one child.
std::vector<int> limb_groups(const SkeletonDefinition& skeleton) {
  const auto kids = skeleton.children();
  std::vector<int> group(skeleton.size(), -1);
  for (std::size_t j = 0; j < skeleton.size(); ++j) {
    int cur = static_cast<int>(j);
    while (skeleton.parent[cur] >= 0 && kids[skeleton.parent[cur]].size() == 1) {
      cur = skeleton.parent[cur];
    }
    group[j] = cur;
  }
  return group;
}

}  // namespace

std::string_view primitive_name(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::Cube:
      return "cube";
    case PrimitiveKind::Sphere:
      return "sphere";
    case PrimitiveKind::Cylinder:
      return "cylinder";
    case PrimitiveKind::Capsule:
      return "capsule";
  }
  return "cube";
}

PrimitiveKind parse_primitive(std::string_view name) {
  for (const auto k : {PrimitiveKind::Cube, PrimitiveKind::Sphere, PrimitiveKind::Cylinder,
                       PrimitiveKind::Capsule}) {
    if (primitive_name(k) == name) {
      return k;
    }
  }
  throw ParseError("unknown primitive kind '" + std::string(name) + "'");
}

WheelchairDims WheelchairDims::scaled(double s) const {
  WheelchairDims d = *this;
  d.wheel_radius *= s;
  d.wheel_half_width *= s;
  d.wheel_center *= s;
  d.seat_center *= s;
  d.seat_half *= s;
  d.footplate_center *= s;
  d.footplate_half *= s;
  return d;
}

HumanPool refresh_human_pool(const RandomizerConfig& config, std::uint64_t seed,
                             std::uint64_t iteration, const SkeletonDefinition& skeleton) {
  const auto& h = config.humans;
  HumanPool pool;
  pool.epoch = iteration / static_cast<std::uint64_t>(h.pool_refresh);
  const auto groups = limb_groups(skeleton);
  std::vector<int> branch_roots(groups);
  std::sort(branch_roots.begin(), branch_roots.end());
  branch_roots.erase(std::unique(branch_roots.begin(), branch_roots.end()), branch_roots.end());
  pool.bodies.reserve(h.pool_size);
  for (int i = 0; i < h.pool_size; ++i) {
    Rng rng = stream(seed, kPoolStream, pool.epoch, static_cast<std::uint64_t>(i));
    BodyParams b;
    b.age = h.age.sample(rng);
    b.height = h.height.sample(rng);
    b.weight = h.weight.sample(rng);
    b.sex = h.sex.category(h.sex.sample_index(rng));
    b.ethnicity = h.ethnicity.category(h.ethnicity.sample_index(rng));
    const double adult = 0.88 + 0.27 * b.height;
    const double growth = b.age < 18.0 ? 0.65 + 0.35 * std::clamp((b.age - 10.0) / 8.0, 0.0, 1.0)
                                       : 1.0;
    b.stature = adult * growth;
    b.girth = 0.8 + 0.5 * b.weight;
    std::vector<double> limb(skeleton.size(), 1.0);
    for (const int root : branch_roots) {
      limb[root] = 1.0 + rng.uniform(-h.limb_jitter, h.limb_jitter);
    }
    b.bone_scale.resize(skeleton.size());
    for (std::size_t j = 0; j < skeleton.size(); ++j) {
      b.bone_scale[j] = b.stature * limb[groups[j]];
    }
    pool.bodies.push_back(std::move(b));
  }
  return pool;
}

SceneSample sample_scene(const RandomizerConfig& config, std::uint64_t seed,
                         std::uint64_t frame_index, const AnimationPool& animations,
                         const SkeletonDefinition& skeleton) {
  const HumanPool pool = refresh_human_pool(config, seed, frame_index, skeleton);
  return sample_scene(config, seed, frame_index, animations, pool);
}

SceneSample sample_scene(const RandomizerConfig& config, std::uint64_t seed,
                         std::uint64_t frame_index, const AnimationPool& animations,
                         const HumanPool& pool) {
  if (animations.lengths.empty()) {
    throw InvalidArgument("animation pool is empty");
  }
  for (const auto n : animations.lengths) {
    if (n == 0) {
      throw InvalidArgument("animation pool contains a clip with no frames");
    }
  }
  if (pool.bodies.empty()) {
    throw InvalidArgument("human pool is empty");
  }
  auto rng_for = [&](Stream s) { return stream(seed, frame_index, s); };
  SceneSample scene;
  scene.seed = seed;
  scene.frame_index = frame_index;

  const auto& hc = config.humans;
  Rng count_rng = rng_for(kHumanCountStream);
  Rng anim_rng = rng_for(kAnimationStream);
  Rng xform_rng = rng_for(kTransformStream);
  const auto count = hc.count.sample_int(count_rng);
  for (std::int64_t i = 0; i < count; ++i) {
    HumanInstance h;
    h.pool_index = count_rng.below(pool.bodies.size());
    h.body = pool.bodies[h.pool_index];
    h.motion = anim_rng.below(animations.lengths.size());
    h.frame = anim_rng.below(animations.lengths[h.motion]);
    h.position = to_vec3(hc.placement.sample_vector(xform_rng));
    h.rotation_deg = to_vec3(hc.rotation.sample_vector(xform_rng));
    h.scale = to_vec3(hc.scale.sample_vector(xform_rng));
    h.chair = WheelchairDims{}.scaled(h.body.stature);
    scene.humans.push_back(std::move(h));
  }

  const auto& oc = config.occluders;
  {
    Rng place_rng = rng_for(kOccluderPlacementStream);
    Rng kind_rng = rng_for(kOccluderKindStream);
    Rng scale_rng = rng_for(kOccluderScaleStream);
    Rng rot_rng = rng_for(kOccluderRotationStream);
    Rng tex_rng = rng_for(kTextureStream);
    Rng hue_rng = rng_for(kHueStream);
    const Box3 volume{{oc.placement.lo(0), oc.placement.lo(1), oc.placement.lo(2)},
                      {oc.placement.hi(0), oc.placement.hi(1), oc.placement.hi(2)}};
    const auto sep = oc.separation.sample_vector(place_rng);
    const double separation = *std::max_element(sep.begin(), sep.end());
    const auto points = oc.max_count > 0
                            ? poisson_disk_place(volume, separation,
                                                 static_cast<std::size_t>(oc.max_count), place_rng)
                            : std::vector<Vec3>{};
    for (const auto& p : points) {
      OccluderInstance o;
      o.kind = parse_primitive(oc.kind.category(oc.kind.sample_index(kind_rng)));
      o.position = p;
      o.scale = to_vec3(oc.scale.sample_vector(scale_rng));
      o.rotation_deg = to_vec3(oc.rotation.sample_vector(rot_rng));
      o.texture = static_cast<int>(tex_rng.below(static_cast<std::uint64_t>(oc.texture_count)));
      o.hue_offset = oc.hue_offset.sample(hue_rng);
      scene.occluders.push_back(o);
    }
  }

  {
    Rng bg = rng_for(kBackgroundStream);
    scene.background = static_cast<int>(bg.below(static_cast<std::uint64_t>(config.background_count)));
  }
  {
    Rng sun = rng_for(kSunStream);
    scene.sun.hour = config.sun.hour.sample(sun);
    scene.sun.day = config.sun.day.sample(sun);
    scene.sun.latitude = config.sun.latitude.sample(sun);
  }
  {
    const auto& lc = config.lights;
    Rng light = rng_for(kLightStream);
    Rng pose = rng_for(kLightPoseStream);
    for (int i = 0; i < lc.count; ++i) {
      LightSample l;
      l.intensity = lc.intensity.sample(light);
      const auto c = lc.color.sample_vector(light);
      std::copy(c.begin(), c.end(), l.color.begin());
      l.enabled = lc.enabled.sample_bool(light);
      l.position = to_vec3(lc.position.sample_vector(pose));
      l.rotation_deg = to_vec3(lc.rotation.sample_vector(pose));
      scene.lights.push_back(l);
    }
  }
  {
    const auto& cc = config.camera;
    Rng cam = rng_for(kCameraStream);
    scene.camera.fov_deg = cc.fov.sample(cam);
    scene.camera.focal_length_mm = cc.focal_length.sample(cam);
    scene.camera.position = cc.base_position + to_vec3(cc.position.sample_vector(cam));
    scene.camera.rotation_deg = cc.base_rotation_deg + to_vec3(cc.rotation.sample_vector(cam));
  }
  {
    const auto& pc = config.post;
    Rng post = rng_for(kPostStream);
    scene.post.vignette = pc.vignette.sample(post);
    scene.post.exposure = pc.exposure.sample(post);
    scene.post.white_balance = pc.white_balance.sample(post);
    scene.post.focus_distance = pc.focus_distance.sample(post);
    scene.post.contrast = pc.contrast.sample(post);
    scene.post.saturation = pc.saturation.sample(post);
  }
  return scene;
}

json scene_to_json(const SceneSample& scene) {
  json humans = json::array();
  for (const auto& h : scene.humans) {
    humans.push_back({{"pool_index", h.pool_index},
                      {"motion", h.motion},
                      {"frame", h.frame},
                      {"position", vec_json(h.position)},
                      {"rotation", vec_json(h.rotation_deg)},
                      {"scale", vec_json(h.scale)},
                      {"body",
                       {{"age", h.body.age},
                        {"height", h.body.height},
                        {"weight", h.body.weight},
                        {"sex", h.body.sex},
                        {"ethnicity", h.body.ethnicity},
                        {"stature", h.body.stature},
                        {"girth", h.body.girth}}},
                      {"wheelchair",
                       {{"wheel_radius", h.chair.wheel_radius},
                        {"wheel_half_width", h.chair.wheel_half_width},
                        {"wheel_center", vec_json(h.chair.wheel_center)},
                        {"seat_center", vec_json(h.chair.seat_center)},
                        {"seat_half", vec_json(h.chair.seat_half)},
                        {"footplate_center", vec_json(h.chair.footplate_center)},
                        {"footplate_half", vec_json(h.chair.footplate_half)}}}});
  }
  json occluders = json::array();
  for (const auto& o : scene.occluders) {
    occluders.push_back({{"kind", primitive_name(o.kind)},
                         {"position", vec_json(o.position)},
                         {"rotation", vec_json(o.rotation_deg)},
                         {"scale", vec_json(o.scale)},
                         {"texture", o.texture},
                         {"hue_offset", o.hue_offset}});
  }
  json lights = json::array();
  for (const auto& l : scene.lights) {
    lights.push_back({{"position", vec_json(l.position)},
                      {"rotation", vec_json(l.rotation_deg)},
                      {"intensity", l.intensity},
                      {"color", l.color},
                      {"enabled", l.enabled}});
  }
  return {{"seed", scene.seed},
          {"frame", scene.frame_index},
          {"humans", humans},
          {"occluders", occluders},
          {"background", scene.background},
          {"camera",
           {{"position", vec_json(scene.camera.position)},
            {"rotation", vec_json(scene.camera.rotation_deg)},
            {"fov", scene.camera.fov_deg},
            {"focal_length", scene.camera.focal_length_mm}}},
          {"sun", {{"hour", scene.sun.hour}, {"day", scene.sun.day}, {"latitude", scene.sun.latitude}}},
          {"lights", lights},
          {"post",
           {{"vignette", scene.post.vignette},
            {"exposure", scene.post.exposure},
            {"white_balance", scene.post.white_balance},
            {"focus_distance", scene.post.focus_distance},
            {"contrast", scene.post.contrast},
            {"saturation", scene.post.saturation}}}};
}

}  // namespace chairsynth
