#include "chairsynth/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

namespace chairsynth {

using nlohmann::json;

Histogram::Histogram(double lo_, double hi_, std::size_t bins) : lo(lo_), hi(hi_), counts(bins, 0.0) {}

void Histogram::add(double v) {
  const auto n = static_cast<double>(counts.size());
  double b = std::floor((v - lo) / (hi - lo) * n);
  b = std::clamp(b, 0.0, n - 1.0);
  counts[static_cast<std::size_t>(b)] += 1.0;
  ++samples;
}

std::vector<double> Histogram::normalized() const {
  std::vector<double> out(counts.size(), 0.0);
  if (samples == 0) {
    return out;
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out[i] = counts[i] / static_cast<double>(samples);
  }
  return out;
}

double Histogram::bin_center(std::size_t i) const {
  return lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(counts.size());
}

std::size_t Histogram::mode_bin() const {
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

namespace {

// Share of [a, b] falling in each of `n` unit-square cells along one axis.
void axis_weights(double a, double b, int n, int& first, std::vector<double>& w) {
  a = std::clamp(a, 0.0, 1.0);
  b = std::clamp(b, 0.0, 1.0);
  w.clear();
  if (!(b > a)) {
    first = std::min(n - 1, static_cast<int>(std::floor(a * n)));
    w.push_back(1.0);
    return;
  }
  first = std::min(n - 1, static_cast<int>(std::floor(a * n)));
  const int last = std::min(n - 1, static_cast<int>(std::ceil(b * n)) - 1);
  const double len = b - a;
  for (int c = first; c <= std::max(first, last); ++c) {
    const double c0 = static_cast<double>(c) / n;
    const double c1 = static_cast<double>(c + 1) / n;
    w.push_back(std::max(0.0, std::min(b, c1) - std::max(a, c0)) / len);
  }
}

}  // namespace

void Heatmap::add_rect(double u0, double v0, double u1, double v1) {
  int c0 = 0;
  int r0 = 0;
  std::vector<double> wx;
  std::vector<double> wy;
  axis_weights(u0, u1, size, c0, wx);
  axis_weights(v0, v1, size, r0, wy);
  for (std::size_t r = 0; r < wy.size(); ++r) {
    for (std::size_t c = 0; c < wx.size(); ++c) {
      at(r0 + static_cast<int>(r), c0 + static_cast<int>(c)) += wy[r] * wx[c];
    }
  }
  ++contributions;
}

void Heatmap::add_point(double u, double v) {
  const int c = std::clamp(static_cast<int>(std::floor(u * size)), 0, size - 1);
  const int r = std::clamp(static_cast<int>(std::floor(v * size)), 0, size - 1);
  at(r, c) += 1.0;
  ++contributions;
}

double Heatmap::total() const { return std::accumulate(mass.begin(), mass.end(), 0.0); }

std::pair<int, int> Heatmap::peak() const {
  const auto i = static_cast<int>(std::max_element(mass.begin(), mass.end()) - mass.begin());
  return {i / size, i % size};
}

std::vector<double> Heatmap::scaled(double divisor) const {
  std::vector<double> out(mass);
  if (divisor > 0.0) {
    for (auto& m : out) {
      m /= divisor;
    }
  }
  return out;
}

double relative_size(const std::array<double, 4>& bbox, int image_width, int image_height) {
  return std::sqrt(bbox[2] * bbox[3] / (static_cast<double>(image_width) * image_height));
}

namespace {

std::map<std::uint64_t, const CocoImage*> image_index(const CocoDataset& ds) {
  std::map<std::uint64_t, const CocoImage*> idx;
  for (const auto& im : ds.images) {
    idx[im.id] = &im;
  }
  return idx;
}

}  // namespace

BBoxStats bbox_stats(const CocoDataset& ds) {
  if (ds.annotations.empty()) {
    throw InvalidArgument("dataset has no annotations");
  }
  const auto images = image_index(ds);
  std::map<std::uint64_t, std::size_t> per_image;
  BBoxStats s;
  for (const auto& a : ds.annotations) {
    const auto it = images.find(a.image_id);
    if (it == images.end()) {
      throw InvalidArgument("annotation " + std::to_string(a.id) + " references unknown image " +
                            std::to_string(a.image_id));
    }
    const double w = it->second->width;
    const double h = it->second->height;
    ++per_image[a.image_id];
    const double rel = relative_size(a.bbox, it->second->width, it->second->height);
    s.relative_sizes.push_back(rel);
    s.size_histogram.add(rel);
    s.heatmap.add_rect(a.bbox[0] / w, a.bbox[1] / h, (a.bbox[0] + a.bbox[2]) / w,
                       (a.bbox[1] + a.bbox[3]) / h);
    ++s.boxes;
  }
  std::size_t max_count = 0;
  for (const auto& [id, n] : per_image) {
    max_count = std::max(max_count, n);
  }
  s.count_histogram.assign(max_count + 1, 0.0);
  for (const auto& [id, n] : per_image) {
    s.count_histogram[n] += 1.0;
  }
  s.images_with_people = per_image.size();
  for (auto& c : s.count_histogram) {
    c /= static_cast<double>(s.images_with_people);
  }
  return s;
}

KeypointStats keypoint_stats(const CocoDataset& ds) {
  KeypointStats s;
  std::array<std::array<double, 3>, kCocoKeypointCount> counts{};
  for (const auto& a : ds.annotations) {
    if (a.keypoints.size() != 3 * kCocoKeypointCount) {
      continue;
    }
    ++s.instances;
    for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
      const double x = a.keypoints[3 * k];
      const double y = a.keypoints[3 * k + 1];
      const int v = std::clamp(static_cast<int>(a.keypoints[3 * k + 2]), 0, 2);
      counts[k][v] += 1.0;
      if (v > 0) {
        s.heatmaps[k].add_point((x - a.bbox[0]) / a.bbox[2], (y - a.bbox[1]) / a.bbox[3]);
      }
    }
  }
  if (s.instances == 0) {
    throw InvalidArgument("dataset has no keypoint annotations");
  }
  for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
    for (int v = 0; v < 3; ++v) {
      s.visibility[k][v] = counts[k][v] / static_cast<double>(s.instances);
    }
  }
  return s;
}

CameraPairSample camera_pair(const Vec3& camera, const Vec3& nose, const Vec3& heading) {
  const Vec3 off = camera - nose;
  CameraPairSample p;
  p.distance = off.norm();
  p.elevation = p.distance > 0.0 ? std::asin(std::clamp(off.y() / p.distance, -1.0, 1.0)) : 0.0;
  const Vec3 h(heading.x(), 0.0, heading.z());
  const Vec3 o(off.x(), 0.0, off.z());
  p.azimuth = std::atan2(h.cross(o).y(), h.dot(o));
  return p;
}

CameraStats camera_stats(const std::vector<SidecarRecord>& records) {
  CameraStats s;
  s.available = true;
  std::size_t index = 0;
  for (const auto& r : records) {
    for (const auto& inst : r.instances) {
      const CameraPairSample p = camera_pair(r.camera_position, inst.nose, inst.heading);
      s.elevation.add(p.elevation);
      s.azimuth.add(p.azimuth);
      s.distance.add(p.distance);
      if (index % kCoverageStride == 0) {
        s.coverage.push_back(p);
      }
      ++index;
    }
  }
  s.pairs = index;
  return s;
}

DatasetStats analyze_dataset(const std::filesystem::path& path) {
  std::filesystem::path ann = path;
  std::filesystem::path side;
  if (std::filesystem::is_directory(path)) {
    ann = path / kAnnotationFile;
    side = path / kSidecarFile;
  } else {
    side = path.parent_path() / kSidecarFile;
  }
  if (!std::filesystem::exists(ann)) {
    throw NotFound("no annotation file at " + ann.string());
  }
  const CocoDataset ds = read_coco_dataset(ann);
  DatasetStats s;
  s.name = path.filename().string();
  s.images = ds.images.size();
  s.annotations = ds.annotations.size();
  s.bbox = bbox_stats(ds);
  const bool has_kp = std::any_of(ds.annotations.begin(), ds.annotations.end(),
                                  [](const CocoAnnotation& a) { return !a.keypoints.empty(); });
  if (has_kp) {
    s.keypoints = keypoint_stats(ds);
  }
  if (std::filesystem::exists(side)) {
    s.camera = camera_stats(read_sidecar(side));
  }
  return s;
}

namespace {

json heatmap_summary(const Heatmap& h) {
  const auto [r, c] = h.peak();
  return {{"contributions", h.contributions},
          {"total_mass", h.total()},
          {"peak_row", r},
          {"peak_col", c},
          {"peak_u", (c + 0.5) / h.size},
          {"peak_v", (r + 0.5) / h.size}};
}

json histogram_json(const Histogram& h) {
  return {{"lo", h.lo}, {"hi", h.hi}, {"samples", h.samples}, {"fractions", h.normalized()}};
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string csv_grid(const std::vector<double>& m, int size) {
  std::string out;
  char buf[32];
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      std::snprintf(buf, sizeof buf, "%.9g", m[static_cast<std::size_t>(r) * size + c]);
      out += buf;
      out += c + 1 < size ? ',' : '\n';
    }
  }
  return out;
}

}  // namespace

json stats_to_json(const DatasetStats& s) {
  json j;
  j["name"] = s.name;
  j["images"] = s.images;
  j["annotations"] = s.annotations;
  j["bbox"] = {{"images_with_people", s.bbox.images_with_people},
               {"count_histogram", s.bbox.count_histogram},
               {"mean_relative_size", mean(s.bbox.relative_sizes)},
               {"relative_size_histogram", histogram_json(s.bbox.size_histogram)},
               {"heatmap", heatmap_summary(s.bbox.heatmap)}};
  if (s.keypoints) {
    json kp = json::object();
    const auto& names = coco_keypoint_names();
    for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
      const auto& v = s.keypoints->visibility[k];
      kp[std::string(names[k])] = {{"not_visible", v[0]},
                                   {"occluded", v[1]},
                                   {"visible", v[2]},
                                   {"heatmap", heatmap_summary(s.keypoints->heatmaps[k])}};
    }
    j["keypoints"] = {{"instances", s.keypoints->instances}, {"per_keypoint", kp}};
  } else {
    j["keypoints"] = nullptr;
  }
  if (s.camera.available) {
    json cov = json::array();
    for (const auto& p : s.camera.coverage) {
      cov.push_back({p.elevation, p.azimuth, p.distance});
    }
    j["camera"] = {{"available", true},
                   {"pairs", s.camera.pairs},
                   {"elevation", histogram_json(s.camera.elevation)},
                   {"azimuth", histogram_json(s.camera.azimuth)},
                   {"distance", histogram_json(s.camera.distance)},
                   {"distance_mode_m", s.camera.distance.bin_center(s.camera.distance.mode_bin())},
                   {"coverage", cov}};
  } else {
    j["camera"] = {{"available", false}};
  }
  return j;
}

namespace {

struct Row {
  std::string label;
  std::string value;
};

std::vector<Row> table_rows(const DatasetStats& s) {
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };
  std::vector<Row> rows;
  rows.push_back({"images", std::to_string(s.images)});
  rows.push_back({"annotations", std::to_string(s.annotations)});
  rows.push_back({"images with people", std::to_string(s.bbox.images_with_people)});
  for (std::size_t k = 1; k < s.bbox.count_histogram.size(); ++k) {
    rows.push_back({"P(" + std::to_string(k) + " boxes)", fmt(s.bbox.count_histogram[k])});
  }
  rows.push_back({"mean relative size", fmt(mean(s.bbox.relative_sizes))});
  const auto [pr, pc] = s.bbox.heatmap.peak();
  rows.push_back({"bbox heatmap peak (u,v)",
                  fmt((pc + 0.5) / kHeatmapSize) + "," + fmt((pr + 0.5) / kHeatmapSize)});
  const auto& names = coco_keypoint_names();
  for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
    const std::string n(names[k]);
    if (s.keypoints) {
      const auto& v = s.keypoints->visibility[k];
      rows.push_back({n + " not/occ/vis", fmt(v[0]) + "/" + fmt(v[1]) + "/" + fmt(v[2])});
    } else {
      rows.push_back({n + " not/occ/vis", "n/a"});
    }
  }
  if (s.camera.available) {
    rows.push_back({"camera pairs", std::to_string(s.camera.pairs)});
    rows.push_back(
        {"distance mode (m)", fmt(s.camera.distance.bin_center(s.camera.distance.mode_bin()))});
    rows.push_back({"elevation mode (deg)",
                    fmt(rad2deg(s.camera.elevation.bin_center(s.camera.elevation.mode_bin())))});
  } else {
    rows.push_back({"camera", "unavailable"});
  }
  return rows;
}

}  // namespace

std::string stats_table(const DatasetStats& s, const DatasetStats* other) {
  const auto a = table_rows(s);
  std::vector<Row> b;
  if (other != nullptr) {
    b = table_rows(*other);
  }
  std::size_t w0 = 6;
  std::size_t w1 = s.name.size();
  for (const auto& r : a) {
    w0 = std::max(w0, r.label.size());
    w1 = std::max(w1, r.value.size());
  }
  for (const auto& r : b) {
    w0 = std::max(w0, r.label.size());
  }
  std::map<std::string, std::string> bmap;
  for (const auto& r : b) {
    bmap[r.label] = r.value;
  }
  std::vector<std::string> labels;
  for (const auto& r : a) {
    labels.push_back(r.label);
  }
  for (const auto& r : b) {
    if (std::none_of(a.begin(), a.end(), [&](const Row& x) { return x.label == r.label; })) {
      labels.push_back(r.label);
    }
  }
  std::map<std::string, std::string> amap;
  for (const auto& r : a) {
    amap[r.label] = r.value;
  }
  std::ostringstream out;
  auto pad = [](const std::string& t, std::size_t w) { return t + std::string(w - std::min(w, t.size()), ' '); };
  out << pad("metric", w0) << "  " << pad(s.name, w1);
  if (other != nullptr) {
    out << "  " << other->name;
  }
  out << '\n';
  for (const auto& l : labels) {
    out << pad(l, w0) << "  " << pad(amap.count(l) ? amap[l] : "-", w1);
    if (other != nullptr) {
      out << "  " << (bmap.count(l) ? bmap[l] : "-");
    }
    out << '\n';
  }
  return out.str();
}

void write_stats_report(const DatasetStats& s, const std::filesystem::path& out_dir) {
  write_text_file(out_dir / "stats.json", stats_to_json(s).dump(2) + "\n");
  write_text_file(out_dir / "heatmap_bbox.csv",
                  csv_grid(s.bbox.heatmap.scaled(static_cast<double>(s.bbox.heatmap.contributions)),
                           kHeatmapSize));
  if (s.keypoints) {
    const auto& names = coco_keypoint_names();
    for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
      write_text_file(out_dir / ("heatmap_" + std::string(names[k]) + ".csv"),
                      csv_grid(s.keypoints->heatmaps[k].scaled(
                                   static_cast<double>(s.keypoints->instances)),
                               kHeatmapSize));
    }
  }
}

}  // namespace chairsynth
