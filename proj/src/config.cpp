#include "chairsynth/config.hpp"

#include <functional>

namespace chairsynth {

namespace {

using nlohmann::json;

Distribution D(std::string_view s) { return Distribution::parse(s); }

struct DistField {
  const char* key;
  Distribution* value;
};

struct IntField {
  const char* key;
  int* value;
};

struct DoubleField {
  const char* key;
  double* value;
};

// Field tables shared by the reader and the writer.
struct Sections {
  std::vector<std::pair<const char*, std::vector<DistField>>> dists;
  std::vector<std::pair<const char*, std::vector<IntField>>> ints;
  std::vector<std::pair<const char*, std::vector<DoubleField>>> doubles;
};

Sections sections(RandomizerConfig& r) {
  Sections s;
  auto& o = r.occluders;
  auto& h = r.humans;
  auto& l = r.lights;
  auto& c = r.camera;
  auto& p = r.post;
  s.dists = {
      {"occluders",
       {{"placement", &o.placement},
        {"separation", &o.separation},
        {"scale", &o.scale},
        {"rotation", &o.rotation},
        {"hue_offset", &o.hue_offset},
        {"kind", &o.kind}}},
      {"humans",
       {{"count", &h.count},
        {"age", &h.age},
        {"height", &h.height},
        {"weight", &h.weight},
        {"sex", &h.sex},
        {"ethnicity", &h.ethnicity},
        {"placement", &h.placement},
        {"rotation", &h.rotation},
        {"scale", &h.scale}}},
      {"sun", {{"hour", &r.sun.hour}, {"day", &r.sun.day}, {"latitude", &r.sun.latitude}}},
      {"lights",
       {{"intensity", &l.intensity},
        {"color", &l.color},
        {"enabled", &l.enabled},
        {"position", &l.position},
        {"rotation", &l.rotation}}},
      {"camera",
       {{"fov", &c.fov},
        {"focal_length", &c.focal_length},
        {"position", &c.position},
        {"rotation", &c.rotation}}},
      {"post",
       {{"vignette", &p.vignette},
        {"exposure", &p.exposure},
        {"white_balance", &p.white_balance},
        {"focus_distance", &p.focus_distance},
        {"contrast", &p.contrast},
        {"saturation", &p.saturation}}},
  };
  s.ints = {
      {"occluders", {{"max_count", &o.max_count}, {"texture_count", &o.texture_count}}},
      {"humans", {{"pool_size", &h.pool_size}, {"pool_refresh", &h.pool_refresh}}},
      {"lights", {{"count", &l.count}}},
      {"backgrounds", {{"count", &r.background_count}}},
  };
  s.doubles = {{"humans", {{"limb_jitter", &h.limb_jitter}}}};
  return s;
}

Vec3 vec3(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

json vec3_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

void require(bool ok, const std::string& what) {
  if (!ok) {
    throw ParseError("config: " + what);
  }
}

void check_vector(const Distribution& d, Distribution::Kind kind, const char* name) {
  require(d.kind() == kind, std::string(name) + " has the wrong distribution type");
}

void check_scalar(const Distribution& d, const char* name) {
  require(d.is_scalar(), std::string(name) + " must be Constant or Uniform");
}

}  // namespace

RandomizerConfig default_randomizer_config() {
  RandomizerConfig r;
  auto& o = r.occluders;
  o.placement = D("Cartesian[Uniform(-7.5, 7.5), Uniform(-7.5, 7.5), Uniform(-7.5, 7.5)]");
  o.separation = D("Cartesian[Constant(2.5), Constant(2.5), Constant(2.5)]");
  o.scale = D("Cartesian[Uniform(1, 12), Uniform(1, 12), Uniform(1, 12)]");
  o.rotation = D("Euler[Uniform(0, 360), Uniform(0, 360), Uniform(0, 360)]");
  o.hue_offset = D("Uniform(-180, 180)");
  o.kind = D("Categorical[cube: 0.25, sphere: 0.25, cylinder: 0.25, capsule: 0.25]");
  auto& h = r.humans;
  h.count = D("Uniform(5, 12)");
  h.age = D("Uniform(10, 100)");
  h.height = D("Uniform(0.1, 1)");
  h.weight = D("Uniform(0, 1)");
  h.sex = D("Categorical[male: 0.5, female: 0.5]");
  h.ethnicity = D(
      "Categorical[caucasian: 0.2, asian: 0.2, latin_american: 0.2, african: 0.2, "
      "middle_eastern: 0.2]");
  h.placement = D("Cartesian[Uniform(-7.5, 7.5), Uniform(-7.5, 7.5), Uniform(-4, 1)]");
  h.rotation = D("Euler[Uniform(0, 20), Uniform(0, 360), Uniform(0, 20)]");
  h.scale = D("Cartesian[Uniform(0.5, 3), Uniform(0.5, 3), Uniform(0.5, 3)]");
  r.sun.hour = D("Uniform(0, 24)");
  r.sun.day = D("Uniform(0, 365)");
  r.sun.latitude = D("Uniform(-90, 90)");
  auto& l = r.lights;
  l.intensity = D("Uniform(5000, 50000)");
  l.color = D("RGBA[Uniform(0, 1), Uniform(0, 1), Uniform(0, 1), Constant(1)]");
  l.enabled = D("Bernoulli(0.8)");
  l.position = D("Cartesian[Uniform(-3.65, 3.65), Uniform(-3.65, 3.65), Uniform(-3.65, 3.65)]");
  l.rotation = D("Euler[Uniform(-50, 50), Uniform(-50, 50), Uniform(-50, 50)]");
  auto& c = r.camera;
  c.fov = D("Uniform(5, 50)");
  c.focal_length = D("Uniform(1, 23)");
  c.position = D("Cartesian[Uniform(-5, 5), Uniform(-5, 5), Uniform(-5, 5)]");
  c.rotation = D("Euler[Uniform(-5, 5), Uniform(-5, 5), Uniform(-5, 5)]");
  auto& p = r.post;
  p.vignette = D("Uniform(5, 50)");
  p.exposure = D("Uniform(5, 10)");
  p.white_balance = D("Uniform(-20, 20)");
  p.focus_distance = D("Uniform(0.1, 4)");
  p.contrast = D("Uniform(-30, 30)");
  p.saturation = D("Uniform(-30, 30)");
  return r;
}

void RandomizerConfig::validate() const {
  using K = Distribution::Kind;
  check_vector(occluders.placement, K::Cartesian, "occluders.placement");
  check_vector(occluders.separation, K::Cartesian, "occluders.separation");
  check_vector(occluders.scale, K::Cartesian, "occluders.scale");
  check_vector(occluders.rotation, K::Euler, "occluders.rotation");
  check_scalar(occluders.hue_offset, "occluders.hue_offset");
  check_vector(occluders.kind, K::Categorical, "occluders.kind");
  for (const auto& [name, w] : occluders.kind.categories()) {
    require(name == "cube" || name == "sphere" || name == "cylinder" || name == "capsule",
            "unknown occluder kind '" + name + "'");
  }
  require(occluders.max_count >= 0, "occluders.max_count must be >= 0");
  require(occluders.texture_count >= 1, "occluders.texture_count must be >= 1");
  for (std::size_t i = 0; i < 3; ++i) {
    require(occluders.separation.lo(i) > 0.0, "occluders.separation must be positive");
    require(occluders.scale.lo(i) > 0.0, "occluders.scale must be positive");
    require(humans.scale.lo(i) > 0.0, "humans.scale must be positive");
  }
  check_scalar(humans.count, "humans.count");
  require(humans.count.lo() >= 0.0, "humans.count must be non-negative");
  require(humans.pool_size >= 1, "humans.pool_size must be >= 1");
  require(humans.pool_refresh >= 1, "humans.pool_refresh must be >= 1");
  check_scalar(humans.age, "humans.age");
  check_scalar(humans.height, "humans.height");
  check_scalar(humans.weight, "humans.weight");
  check_vector(humans.sex, K::Categorical, "humans.sex");
  check_vector(humans.ethnicity, K::Categorical, "humans.ethnicity");
  require(humans.limb_jitter >= 0.0 && humans.limb_jitter < 1.0, "humans.limb_jitter out of range");
  check_vector(humans.placement, K::Cartesian, "humans.placement");
  check_vector(humans.rotation, K::Euler, "humans.rotation");
  check_vector(humans.scale, K::Cartesian, "humans.scale");
  check_scalar(sun.hour, "sun.hour");
  check_scalar(sun.day, "sun.day");
  check_scalar(sun.latitude, "sun.latitude");
  require(lights.count >= 0, "lights.count must be >= 0");
  check_scalar(lights.intensity, "lights.intensity");
  check_vector(lights.color, K::Rgba, "lights.color");
  require(lights.enabled.kind() == K::Bernoulli || lights.enabled.kind() == K::Constant,
          "lights.enabled must be Bernoulli or Constant");
  check_vector(lights.position, K::Cartesian, "lights.position");
  check_vector(lights.rotation, K::Euler, "lights.rotation");
  check_scalar(camera.fov, "camera.fov");
  require(camera.fov.lo() > 0.0 && camera.fov.hi() < 180.0, "camera.fov must lie in (0, 180)");
  check_scalar(camera.focal_length, "camera.focal_length");
  check_vector(camera.position, K::Cartesian, "camera.position");
  check_vector(camera.rotation, K::Euler, "camera.rotation");
  for (const auto* d : {&post.vignette, &post.exposure, &post.white_balance, &post.focus_distance,
                        &post.contrast, &post.saturation}) {
    check_scalar(*d, "post");
  }
  require(background_count >= 1, "backgrounds.count must be >= 1");
}

GeneratorConfig default_generator_config() {
  GeneratorConfig g;
  g.randomizers = default_randomizer_config();
  g.skeleton = default_skeleton();
  g.schema = default_schema();
  return g;
}

GeneratorConfig parse_generator_config(const json& j) {
  GeneratorConfig g = default_generator_config();
  try {
    require(j.is_object(), "top level must be an object");
    const json& r = j.value("randomizers", json::object());
    Sections s = sections(g.randomizers);
    for (auto& [section, fields] : s.dists) {
      if (!r.contains(section)) {
        continue;
      }
      for (auto& f : fields) {
        if (r.at(section).contains(f.key)) {
          *f.value = Distribution::parse(r.at(section).at(f.key).get<std::string>());
        }
      }
    }
    for (auto& [section, fields] : s.ints) {
      if (!r.contains(section)) {
        continue;
      }
      for (auto& f : fields) {
        if (r.at(section).contains(f.key)) {
          *f.value = r.at(section).at(f.key).get<int>();
        }
      }
    }
    for (auto& [section, fields] : s.doubles) {
      if (!r.contains(section)) {
        continue;
      }
      for (auto& f : fields) {
        if (r.at(section).contains(f.key)) {
          *f.value = r.at(section).at(f.key).get<double>();
        }
      }
    }
    if (r.contains("camera")) {
      const json& c = r.at("camera");
      if (c.contains("base_position")) {
        g.randomizers.camera.base_position = vec3(c.at("base_position"));
      }
      if (c.contains("base_rotation")) {
        g.randomizers.camera.base_rotation_deg = vec3(c.at("base_rotation"));
      }
    }
    if (j.contains("motion")) {
      const json& m = j.at("motion");
      g.motion.cutoff_hz = m.value("cutoff_hz", g.motion.cutoff_hz);
      g.motion.hip_fix_deg = m.value("hip_fix_deg", g.motion.hip_fix_deg);
      g.motion.noise_amplitude_deg = m.value("noise_amplitude_deg", g.motion.noise_amplitude_deg);
    }
    if (j.contains("annotation")) {
      const json& a = j.at("annotation");
      g.annotation.occlusion_threshold =
          a.value("occlusion_threshold", g.annotation.occlusion_threshold);
      g.annotation.render_debug = a.value("render_debug", g.annotation.render_debug);
    }
    if (j.contains("skeleton")) {
      g.skeleton = skeleton_from_json(j.at("skeleton"));
      const auto v = validate_skeleton(g.skeleton, g.skeleton.size());
      require(v.ok(), "skeleton: " + v.message);
    }
    if (j.contains("keypoint_schema")) {
      const json& ks = j.at("keypoint_schema");
      if (ks.is_string()) {
        const auto name = ks.get<std::string>();
        require(name == "default" || name == "raised_hip", "unknown keypoint schema '" + name + "'");
        g.schema = name == "default" ? default_schema() : raised_hip_schema();
      } else {
        g.schema = schema_from_json(ks);
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  require(g.motion.cutoff_hz > 0.0, "motion.cutoff_hz must be positive");
  require(g.annotation.occlusion_threshold >= 0.0, "annotation.occlusion_threshold must be >= 0");
  g.randomizers.validate();
  resolve_schema(g.schema, g.skeleton);
  return g;
}

GeneratorConfig load_generator_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_generator_config(j);
}

json generator_config_to_json(const GeneratorConfig& config) {
  GeneratorConfig copy = config;
  json r = json::object();
  Sections s = sections(copy.randomizers);
  for (auto& [section, fields] : s.dists) {
    for (auto& f : fields) {
      r[section][f.key] = f.value->to_string();
    }
  }
  for (auto& [section, fields] : s.ints) {
    for (auto& f : fields) {
      r[section][f.key] = *f.value;
    }
  }
  for (auto& [section, fields] : s.doubles) {
    for (auto& f : fields) {
      r[section][f.key] = *f.value;
    }
  }
  r["camera"]["base_position"] = vec3_json(config.randomizers.camera.base_position);
  r["camera"]["base_rotation"] = vec3_json(config.randomizers.camera.base_rotation_deg);
  return {{"randomizers", r},
          {"motion",
           {{"cutoff_hz", config.motion.cutoff_hz},
            {"hip_fix_deg", config.motion.hip_fix_deg},
            {"noise_amplitude_deg", config.motion.noise_amplitude_deg}}},
          {"annotation",
           {{"occlusion_threshold", config.annotation.occlusion_threshold},
            {"render_debug", config.annotation.render_debug}}},
          {"skeleton", skeleton_to_json(config.skeleton)},
          {"keypoint_schema", schema_to_json(config.schema)}};
}

}  // namespace chairsynth
