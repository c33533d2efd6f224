#pragma once

#include "chairsynth/metrics.hpp"
#include "chairsynth/rng.hpp"

namespace fixtures {

struct MicroCase {
  chairsynth::CocoDataset gts;
  std::vector<chairsynth::Detection> preds;
};

// Up to 3 ground truths and 3 detections on one or two images. Boxes snap
// to a coarse grid so IoU ties and exact threshold hits occur; scores repeat.
inline MicroCase micro_case(chairsynth::Rng& rng) {
  using namespace chairsynth;
  MicroCase c;
  const std::size_t images = 1 + rng.below(2);
  for (std::size_t i = 0; i < images; ++i) {
    c.gts.images.push_back({i + 1, "f", 1280, 720});
  }
  auto box = [&] {
    const double s = rng.below(3) == 0 ? 4.0 : 20.0;
    return Box{s * rng.below(8), s * rng.below(8), s * (1 + rng.below(6)), s * (1 + rng.below(6))};
  };
  auto keypoints = [&](const Box& b, bool labels) {
    std::vector<double> kp(3 * kCocoKeypointCount, 0.0);
    for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
      kp[3 * k] = b[0] + rng.uniform(0, b[2]);
      kp[3 * k + 1] = b[1] + rng.uniform(0, b[3]);
      kp[3 * k + 2] = labels ? static_cast<double>(rng.below(3)) : 1.0;
    }
    return kp;
  };
  const std::size_t ng = rng.below(4);
  for (std::size_t i = 0; i < ng; ++i) {
    CocoAnnotation a;
    a.id = i + 1;
    a.image_id = 1 + rng.below(images);
    a.bbox = box();
    a.area = a.bbox[2] * a.bbox[3];
    a.keypoints = keypoints(a.bbox, true);
    a.num_keypoints = 0;
    for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
      a.num_keypoints += a.keypoints[3 * k + 2] > 0 ? 1 : 0;
    }
    c.gts.annotations.push_back(a);
  }
  const std::size_t nd = rng.below(4);
  for (std::size_t i = 0; i < nd; ++i) {
    Detection d;
    d.id = i + 1;
    d.image_id = 1 + rng.below(images);
    d.score = 0.25 * (1 + rng.below(4));
    if (!c.gts.annotations.empty() && rng.below(2) == 0) {
      // Perturbed copy of a ground truth so matches happen.
      const auto& g = c.gts.annotations[rng.below(c.gts.annotations.size())];
      d.image_id = g.image_id;
      Box b = g.bbox;
      b[0] += 4.0 * (static_cast<double>(rng.below(5)) - 2.0);
      b[2] = std::max(4.0, b[2] + 4.0 * (static_cast<double>(rng.below(5)) - 2.0));
      d.bbox = b;
      d.keypoints = g.keypoints;
      for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
        d.keypoints[3 * k] += rng.normal(0, 0.05 * b[2]);
        d.keypoints[3 * k + 1] += rng.normal(0, 0.05 * b[3]);
        d.keypoints[3 * k + 2] = 1.0;
      }
    } else {
      d.bbox = box();
      d.keypoints = keypoints(*d.bbox, false);
    }
    c.preds.push_back(d);
  }
  return c;
}

// Exact comparison of coco_ap against the oracle for every threshold and
// area range of one type. Returns the number of mismatching values.
template <typename Oracle>
int compare_ap(const MicroCase& c, chairsynth::IouType type, Oracle oracle_ap) {
  using namespace chairsynth;
  const auto got = coco_ap(c.preds, c.gts, type);
  const std::size_t max_dets = type == IouType::BBox ? 100 : 20;
  int bad = 0;
  for (const auto& range : area_ranges(type)) {
    for (int t = 0; t < kThresholdCount; ++t) {
      const auto want = oracle_ap(c.preds, c.gts, type, iou_threshold(t), range.lo, range.hi, max_dets);
      const auto have = got.ap(t, range.name);
      if (want.has_value() != have.has_value() || (want && *want != *have)) {
        ++bad;
      }
    }
  }
  return bad;
}

}  // namespace fixtures
