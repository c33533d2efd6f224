#include "chairsynth/coco.hpp"

#include <cstdio>
#include <set>
#include <sstream>

namespace chairsynth {

using nlohmann::json;

namespace {

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 json_vec(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError("expected a 3-element array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::string frame_file_name(std::uint64_t frame) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%08llu.ppm", static_cast<unsigned long long>(frame));
  return buf;
}

json categories_json() {
  json names = json::array();
  for (auto n : coco_keypoint_names()) {
    names.push_back(std::string(n));
  }
  json links = json::array();
  for (const auto& l : coco_skeleton_links()) {
    links.push_back({l[0], l[1]});
  }
  return json::array({{{"id", kPersonCategory},
                       {"name", "person"},
                       {"supercategory", "person"},
                       {"keypoints", names},
                       {"skeleton", links}}});
}

}  // namespace

CocoDataset build_coco_dataset(const std::vector<AnnotatedFrame>& frames,
                               std::vector<SidecarRecord>* sidecar) {
  CocoDataset ds;
  std::uint64_t ann_id = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const AnnotatedFrame& f = frames[i];
    if (i > 0 && !(frames[i - 1].frame_id < f.frame_id)) {
      throw InvalidArgument("frames must be sorted by strictly increasing frame id");
    }
    CocoImage img;
    img.id = i + 1;
    img.file_name = frame_file_name(f.frame_id);
    img.width = f.camera.width;
    img.height = f.camera.height;
    ds.images.push_back(img);
    SidecarRecord rec;
    rec.image_id = img.id;
    rec.frame_index = f.frame_id;
    rec.camera_position = f.camera.position;
    rec.fov_deg = f.camera.fov_deg;
    for (const auto& inst : f.instances) {
      CocoAnnotation a;
      a.id = ++ann_id;
      a.image_id = img.id;
      a.keypoints.reserve(3 * kCocoKeypointCount);
      for (const auto& kp : inst.keypoints) {
        a.keypoints.push_back(kp.x);
        a.keypoints.push_back(kp.y);
        a.keypoints.push_back(static_cast<double>(static_cast<int>(kp.v)));
      }
      a.num_keypoints = inst.num_keypoints;
      a.bbox = inst.bbox;
      a.area = inst.bbox[2] * inst.bbox[3];
      a.occluded_fraction = inst.occluded_fraction;
      a.motion_id = inst.motion_id;
      ds.annotations.push_back(std::move(a));
      rec.instances.push_back({ann_id, inst.nose_world, inst.heading});
    }
    if (sidecar != nullptr) {
      sidecar->push_back(std::move(rec));
    }
  }
  return ds;
}

json coco_to_json(const CocoDataset& ds) {
  json images = json::array();
  for (const auto& im : ds.images) {
    images.push_back({{"id", im.id},
                      {"file_name", im.file_name},
                      {"width", im.width},
                      {"height", im.height}});
  }
  json anns = json::array();
  for (const auto& a : ds.annotations) {
    json j = {{"id", a.id},
              {"image_id", a.image_id},
              {"category_id", a.category_id},
              {"bbox", a.bbox},
              {"area", a.area},
              {"iscrowd", a.iscrowd}};
    if (!a.keypoints.empty()) {
      j["keypoints"] = a.keypoints;
      j["num_keypoints"] = a.num_keypoints;
    }
    if (a.occluded_fraction) {
      j["occluded_fraction"] = *a.occluded_fraction;
    }
    if (!a.motion_id.empty()) {
      j["motion_id"] = a.motion_id;
    }
    anns.push_back(std::move(j));
  }
  return {{"info", {{"description", "chairsynth synthetic wheelchair-user keypoints"}}},
          {"images", images},
          {"annotations", anns},
          {"categories", categories_json()}};
}

CocoDataset coco_from_json(const json& j) {
  if (!j.is_object() || !j.contains("images") || !j.contains("annotations")) {
    throw ParseError("annotation file needs 'images' and 'annotations' arrays");
  }
  CocoDataset ds;
  try {
    for (const auto& im : j.at("images")) {
      CocoImage img;
      img.id = im.at("id").get<std::uint64_t>();
      img.file_name = im.value("file_name", std::string());
      img.width = im.value("width", kImageWidth);
      img.height = im.value("height", kImageHeight);
      ds.images.push_back(img);
    }
    for (const auto& aj : j.at("annotations")) {
      CocoAnnotation a;
      a.id = aj.at("id").get<std::uint64_t>();
      a.image_id = aj.at("image_id").get<std::uint64_t>();
      a.category_id = aj.value("category_id", kPersonCategory);
      if (!aj.contains("bbox")) {
        throw ParseError("annotation " + std::to_string(a.id) + " has no bbox");
      }
      const auto& b = aj.at("bbox");
      if (!b.is_array() || b.size() != 4) {
        throw ParseError("annotation " + std::to_string(a.id) + " bbox must have 4 values");
      }
      for (int k = 0; k < 4; ++k) {
        a.bbox[k] = b[k].get<double>();
      }
      a.area = aj.value("area", a.bbox[2] * a.bbox[3]);
      a.iscrowd = aj.value("iscrowd", 0);
      if (aj.contains("keypoints")) {
        a.keypoints = aj.at("keypoints").get<std::vector<double>>();
        int n = 0;
        for (std::size_t k = 2; k < a.keypoints.size(); k += 3) {
          n += a.keypoints[k] > 0 ? 1 : 0;
        }
        a.num_keypoints = aj.value("num_keypoints", n);
      }
      if (aj.contains("occluded_fraction")) {
        a.occluded_fraction = aj.at("occluded_fraction").get<double>();
      }
      a.motion_id = aj.value("motion_id", std::string());
      ds.annotations.push_back(std::move(a));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed annotation file: ") + e.what());
  }
  return ds;
}

CocoDataset read_coco_dataset(const std::filesystem::path& file) {
  json j;
  try {
    j = json::parse(read_text_file(file));
  } catch (const json::parse_error& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
  try {
    return coco_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
}

std::string validate_coco_dataset(const CocoDataset& ds, bool require_dense) {
  std::set<std::uint64_t> image_ids;
  for (std::size_t i = 0; i < ds.images.size(); ++i) {
    const auto id = ds.images[i].id;
    if (!image_ids.insert(id).second) {
      return "duplicate image id " + std::to_string(id);
    }
    if (require_dense && id != i + 1) {
      return "image ids are not dense: position " + std::to_string(i) + " has id " +
             std::to_string(id);
    }
  }
  std::set<std::uint64_t> ann_ids;
  for (std::size_t i = 0; i < ds.annotations.size(); ++i) {
    const auto& a = ds.annotations[i];
    const std::string tag = "annotation " + std::to_string(a.id);
    if (!ann_ids.insert(a.id).second) {
      return "duplicate annotation id " + std::to_string(a.id);
    }
    if (require_dense && a.id != i + 1) {
      return "annotation ids are not dense: position " + std::to_string(i) + " has id " +
             std::to_string(a.id);
    }
    if (image_ids.count(a.image_id) == 0) {
      return tag + " references unknown image " + std::to_string(a.image_id);
    }
    if (a.keypoints.size() != 3 * kCocoKeypointCount) {
      return tag + " has " + std::to_string(a.keypoints.size()) + " keypoint values, expected 51";
    }
    int n = 0;
    for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
      const double v = a.keypoints[3 * k + 2];
      if (v != 0.0 && v != 1.0 && v != 2.0) {
        return tag + " keypoint " + std::to_string(k) + " has visibility " + std::to_string(v);
      }
      n += v > 0 ? 1 : 0;
    }
    if (n != a.num_keypoints) {
      return tag + " num_keypoints " + std::to_string(a.num_keypoints) + " but " +
             std::to_string(n) + " labeled";
    }
    if (!(a.bbox[2] > 0.0 && a.bbox[3] > 0.0)) {
      return tag + " bbox has no area";
    }
  }
  return {};
}

json sidecar_to_json(const SidecarRecord& r) {
  json inst = json::array();
  for (const auto& i : r.instances) {
    inst.push_back({{"annotation_id", i.annotation_id},
                    {"nose", vec_json(i.nose)},
                    {"heading", vec_json(i.heading)}});
  }
  return {{"image_id", r.image_id},
          {"frame_index", r.frame_index},
          {"camera",
           {{"position", vec_json(r.camera_position)},
            {"rotation_deg", vec_json(r.camera_rotation_deg)},
            {"fov_deg", r.fov_deg}}},
          {"instances", inst}};
}

SidecarRecord sidecar_from_json(const json& j) {
  SidecarRecord r;
  try {
    r.image_id = j.at("image_id").get<std::uint64_t>();
    r.frame_index = j.value("frame_index", std::uint64_t{0});
    const auto& cam = j.at("camera");
    r.camera_position = json_vec(cam.at("position"));
    if (cam.contains("rotation_deg")) {
      r.camera_rotation_deg = json_vec(cam.at("rotation_deg"));
    }
    r.fov_deg = cam.value("fov_deg", 0.0);
    for (const auto& ij : j.at("instances")) {
      SidecarInstance s;
      s.annotation_id = ij.at("annotation_id").get<std::uint64_t>();
      if (!ij.contains("nose")) {
        throw ParseError("sidecar instance " + std::to_string(s.annotation_id) +
                         " has no nose record");
      }
      s.nose = json_vec(ij.at("nose"));
      if (ij.contains("heading")) {
        s.heading = json_vec(ij.at("heading"));
      }
      r.instances.push_back(s);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed sidecar record: ") + e.what());
  }
  return r;
}

CocoDataset write_coco_dataset(const std::vector<AnnotatedFrame>& frames,
                               const std::filesystem::path& out_dir,
                               const std::vector<SceneSample>* scenes) {
  if (frames.empty()) {
    throw InvalidArgument("cannot write a dataset with no frames");
  }
  if (scenes != nullptr && scenes->size() != frames.size()) {
    throw InvalidArgument("scene list does not match the frame list");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());
  }
  std::vector<SidecarRecord> side;
  CocoDataset ds = build_coco_dataset(frames, &side);
  for (std::size_t i = 0; i < side.size(); ++i) {
    if (scenes != nullptr) {
      side[i].camera_rotation_deg = (*scenes)[i].camera.rotation_deg;
    }
  }
  write_text_file(out_dir / kAnnotationFile, coco_to_json(ds).dump() + "\n");
  if (scenes != nullptr) {
    std::string text;
    for (std::size_t i = 0; i < side.size(); ++i) {
      json line = sidecar_to_json(side[i]);
      line["scene"] = scene_to_json((*scenes)[i]);
      text += line.dump();
      text += '\n';
    }
    write_text_file(out_dir / kSidecarFile, text);
  }
  return ds;
}

std::vector<SidecarRecord> read_sidecar(const std::filesystem::path& file) {
  std::istringstream in(read_text_file(file));
  std::vector<SidecarRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    try {
      out.push_back(sidecar_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw ParseError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace chairsynth
