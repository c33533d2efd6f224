#include "chairsynth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace chairsynth {

using nlohmann::json;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool finite_all(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

std::vector<Detection> parse_detections(const json& j) {
  if (!j.is_array()) {
    throw ParseError("detection file must hold a JSON array");
  }
  std::vector<Detection> out;
  std::set<std::uint64_t> ids;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    const std::string tag = "detection " + std::to_string(i);
    Detection d;
    try {
      d.id = e.contains("id") ? e.at("id").get<std::uint64_t>() : i + 1;
      d.image_id = e.at("image_id").get<std::uint64_t>();
      d.category_id = e.value("category_id", kPersonCategory);
      d.score = e.at("score").get<double>();
      if (e.contains("bbox")) {
        const auto b = e.at("bbox").get<std::vector<double>>();
        if (b.size() != 4) {
          throw ParseError(tag + ": bbox must have 4 values");
        }
        d.bbox = Box{b[0], b[1], b[2], b[3]};
      }
      if (e.contains("keypoints")) {
        d.keypoints = e.at("keypoints").get<std::vector<double>>();
      }
    } catch (const json::exception& ex) {
      throw ParseError(tag + ": " + ex.what());
    }
    if (!ids.insert(d.id).second) {
      throw ParseError("duplicate detection id " + std::to_string(d.id));
    }
    if (!std::isfinite(d.score) || d.score < 0.0 || d.score > 1.0) {
      throw ParseError(tag + ": score must lie in [0, 1]");
    }
    if (!d.bbox && d.keypoints.empty()) {
      throw ParseError(tag + ": needs a bbox or keypoints");
    }
    if (d.bbox) {
      const std::vector<double> b(d.bbox->begin(), d.bbox->end());
      if (!finite_all(b) || !((*d.bbox)[2] > 0.0 && (*d.bbox)[3] > 0.0)) {
        throw ParseError(tag + ": bbox must be finite with positive area");
      }
    }
    if (!d.keypoints.empty() &&
        (d.keypoints.size() != 3 * kCocoKeypointCount || !finite_all(d.keypoints))) {
      throw ParseError(tag + ": keypoints must be 51 finite values");
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<Detection> read_detections(const std::filesystem::path& file) {
  json j;
  try {
    j = json::parse(read_text_file(file));
  } catch (const json::parse_error& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
  try {
    return parse_detections(j);
  } catch (const ParseError& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
}

namespace {

double box_iou(const Box& d, const Box& g, bool crowd) {
  const double w = std::min(d[0] + d[2], g[0] + g[2]) - std::max(d[0], g[0]);
  const double h = std::min(d[1] + d[3], g[1] + g[3]) - std::max(d[1], g[1]);
  if (w <= 0.0 || h <= 0.0) {
    return 0.0;
  }
  const double inter = w * h;
  const double uni = crowd ? d[2] * d[3] : d[2] * d[3] + g[2] * g[3] - inter;
  return inter / uni;
}

}  // namespace

double iou(const Box& a, const Box& b) { return box_iou(a, b, false); }

const std::array<double, kCocoKeypointCount>& coco_keypoint_sigmas() {
  static const std::array<double, kCocoKeypointCount> s = {
      .026, .025, .025, .035, .035, .079, .079, .072, .072,
      .062, .062, .107, .107, .087, .087, .089, .089};
  return s;
}

double keypoint_kappa(std::size_t k) { return 2.0 * coco_keypoint_sigmas().at(k); }

double oks_term(double dx, double dy, double area, double kappa) {
  const double e = (dx * dx + dy * dy) / (kappa * kappa) / (area + kEps) / 2.0;
  return std::exp(-e);
}

namespace {

// Full similarity including the fallback for instances with no labeled
// keypoint (distance to a box three times the gt size).
double oks_full(const std::vector<double>& g, const Box& gbox, double area,
                const std::vector<double>& d) {
  int labeled = 0;
  for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
    labeled += g[3 * k + 2] > 0 ? 1 : 0;
  }
  const double x0 = gbox[0] - gbox[2];
  const double x1 = gbox[0] + 2 * gbox[2];
  const double y0 = gbox[1] - gbox[3];
  const double y1 = gbox[1] + 2 * gbox[3];
  double sum = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
    double dx;
    double dy;
    if (labeled > 0) {
      if (!(g[3 * k + 2] > 0)) {
        continue;
      }
      dx = d[3 * k] - g[3 * k];
      dy = d[3 * k + 1] - g[3 * k + 1];
    } else {
      const double xd = d[3 * k];
      const double yd = d[3 * k + 1];
      dx = std::max(0.0, x0 - xd) + std::max(0.0, xd - x1);
      dy = std::max(0.0, y0 - yd) + std::max(0.0, yd - y1);
    }
    sum += oks_term(dx, dy, area, keypoint_kappa(k));
    ++n;
  }
  return sum / n;
}

}  // namespace

std::optional<double> oks(const std::vector<double>& gt_keypoints, double gt_area,
                          const std::vector<double>& pred_keypoints) {
  if (gt_keypoints.size() != 3 * kCocoKeypointCount ||
      pred_keypoints.size() != 3 * kCocoKeypointCount) {
    throw InvalidArgument("keypoint arrays must hold 51 values");
  }
  bool any = false;
  for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
    any = any || gt_keypoints[3 * k + 2] > 0;
  }
  if (!any) {
    return std::nullopt;
  }
  return oks_full(gt_keypoints, Box{}, gt_area, pred_keypoints);
}

double iou_threshold(int t) { return (50.0 + 5.0 * t) / 100.0; }
double recall_threshold(int r) { return r / 100.0; }

const std::vector<AreaRange>& area_ranges(IouType type) {
  static const std::vector<AreaRange> bb = {{"all", 0.0, 1e10},
                                            {"small", 0.0, 32.0 * 32.0},
                                            {"medium", 32.0 * 32.0, 96.0 * 96.0},
                                            {"large", 96.0 * 96.0, 1e10}};
  static const std::vector<AreaRange> kp = {
      {"all", 0.0, 1e10}, {"medium", 32.0 * 32.0, 96.0 * 96.0}, {"large", 96.0 * 96.0, 1e10}};
  return type == IouType::BBox ? bb : kp;
}

std::optional<double> ApResult::ap(int threshold, const std::string& area) const {
  for (const auto& a : areas) {
    if (a.name == area) {
      if (!a.defined) {
        return std::nullopt;
      }
      double s = 0.0;
      for (double p : a.precision[threshold]) {
        s += p;
      }
      return s / kRecallPoints;
    }
  }
  throw InvalidArgument("unknown area range '" + area + "'");
}

std::optional<double> ApResult::map(const std::string& area) const {
  for (const auto& a : areas) {
    if (a.name == area) {
      if (!a.defined) {
        return std::nullopt;
      }
      double s = 0.0;
      for (const auto& row : a.precision) {
        for (double p : row) {
          s += p;
        }
      }
      return s / (kThresholdCount * kRecallPoints);
    }
  }
  throw InvalidArgument("unknown area range '" + area + "'");
}

namespace {

std::optional<Box> detection_box(const Detection& d) {
  if (d.bbox) {
    return d.bbox;
  }
  return std::nullopt;
}

double keypoint_extent_area(const std::vector<double>& kp) {
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = x0;
  double x1 = -x0;
  double y1 = -x0;
  for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
    x0 = std::min(x0, kp[3 * k]);
    x1 = std::max(x1, kp[3 * k]);
    y0 = std::min(y0, kp[3 * k + 1]);
    y1 = std::max(y1, kp[3 * k + 1]);
  }
  return (x1 - x0) * (y1 - y0);
}

int labeled_count(const std::vector<double>& kp) {
  int n = 0;
  for (std::size_t k = 2; k < kp.size(); k += 3) {
    n += kp[k] > 0 ? 1 : 0;
  }
  return n;
}

struct DetRecord {
  double score;
  std::size_t index;  // into preds
  std::array<bool, kThresholdCount> matched{};
  std::array<bool, kThresholdCount> ignored{};
};

}  // namespace

ApResult coco_ap(const std::vector<Detection>& preds, const CocoDataset& gts, IouType type,
                 const ApOptions& options) {
  const int max_dets =
      options.max_detections > 0 ? options.max_detections : (type == IouType::BBox ? 100 : 20);
  std::set<std::uint64_t> seen;
  for (const auto& d : preds) {
    if (!seen.insert(d.id).second) {
      throw InvalidArgument("duplicate detection id " + std::to_string(d.id));
    }
  }
  std::map<std::uint64_t, std::vector<std::size_t>> gt_by_image;
  std::map<std::uint64_t, std::vector<std::size_t>> dt_by_image;
  for (const auto& im : gts.images) {
    gt_by_image[im.id];
  }
  for (std::size_t i = 0; i < gts.annotations.size(); ++i) {
    const auto& a = gts.annotations[i];
    if (a.category_id == kPersonCategory) {
      gt_by_image[a.image_id].push_back(i);
    }
  }
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& d = preds[i];
    if (d.category_id != kPersonCategory) {
      continue;
    }
    if (type == IouType::BBox ? !detection_box(d).has_value() : d.keypoints.empty()) {
      continue;
    }
    dt_by_image[d.image_id].push_back(i);
    gt_by_image[d.image_id];
  }

  ApResult result;
  const auto& ranges = area_ranges(type);
  std::vector<std::vector<DetRecord>> records(ranges.size());
  std::vector<std::size_t> positives(ranges.size(), 0);

  for (const auto& [image, gidx] : gt_by_image) {
    std::vector<std::size_t> didx = dt_by_image[image];
    std::stable_sort(didx.begin(), didx.end(),
                     [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; });
    if (static_cast<int>(didx.size()) > max_dets) {
      didx.resize(max_dets);
    }
    // Similarity of every (detection, gt) pair in this image.
    std::vector<std::vector<double>> sim(didx.size(), std::vector<double>(gidx.size(), 0.0));
    std::vector<double> dt_area(didx.size(), 0.0);
    for (std::size_t di = 0; di < didx.size(); ++di) {
      const Detection& d = preds[didx[di]];
      dt_area[di] = type == IouType::BBox ? (*d.bbox)[2] * (*d.bbox)[3]
                                          : keypoint_extent_area(d.keypoints);
      for (std::size_t gi = 0; gi < gidx.size(); ++gi) {
        const CocoAnnotation& g = gts.annotations[gidx[gi]];
        if (type == IouType::BBox) {
          sim[di][gi] = box_iou(*d.bbox, g.bbox, g.iscrowd != 0);
        } else if (g.keypoints.size() == 3 * kCocoKeypointCount) {
          sim[di][gi] = oks_full(g.keypoints, g.bbox, g.area, d.keypoints);
        }
      }
    }
    for (std::size_t ri = 0; ri < ranges.size(); ++ri) {
      const AreaRange& range = ranges[ri];
      // Non-ignored gts first, stable.
      std::vector<std::size_t> order(gidx.size());
      std::vector<bool> ig(gidx.size());
      for (std::size_t gi = 0; gi < gidx.size(); ++gi) {
        const CocoAnnotation& g = gts.annotations[gidx[gi]];
        bool ignore = g.iscrowd != 0 || g.area < range.lo || g.area > range.hi;
        if (type == IouType::Keypoints) {
          ignore = ignore || g.keypoints.size() != 3 * kCocoKeypointCount ||
                   labeled_count(g.keypoints) == 0;
        }
        ig[gi] = ignore;
        order[gi] = gi;
      }
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return !ig[a] && ig[b]; });
      for (std::size_t gi = 0; gi < gidx.size(); ++gi) {
        positives[ri] += ig[gi] ? 0 : 1;
      }
      std::vector<DetRecord> recs(didx.size());
      for (std::size_t di = 0; di < didx.size(); ++di) {
        recs[di].score = preds[didx[di]].score;
        recs[di].index = didx[di];
      }
      for (int t = 0; t < kThresholdCount; ++t) {
        std::vector<bool> taken(gidx.size(), false);
        for (std::size_t di = 0; di < didx.size(); ++di) {
          double best = std::min(iou_threshold(t), 1.0 - 1e-10);
          long m = -1;
          for (std::size_t oi = 0; oi < order.size(); ++oi) {
            const std::size_t gi = order[oi];
            const bool crowd = gts.annotations[gidx[gi]].iscrowd != 0;
            if (taken[gi] && !crowd) {
              continue;
            }
            if (m > -1 && !ig[m] && ig[gi]) {
              break;
            }
            if (sim[di][gi] < best) {
              continue;
            }
            best = sim[di][gi];
            m = static_cast<long>(gi);
          }
          if (m == -1) {
            recs[di].ignored[t] = dt_area[di] < range.lo || dt_area[di] > range.hi;
            continue;
          }
          taken[m] = true;
          recs[di].matched[t] = true;
          recs[di].ignored[t] = ig[m];
          if (t == 0 && ri == 0 && !ig[m]) {
            result.matches_at_50.push_back({didx[di], gidx[m]});
          }
        }
      }
      records[ri].insert(records[ri].end(), recs.begin(), recs.end());
    }
  }

  for (std::size_t ri = 0; ri < ranges.size(); ++ri) {
    AreaResult ar;
    ar.name = ranges[ri].name;
    ar.precision.assign(kThresholdCount, {});
    for (auto& row : ar.precision) {
      row.fill(-1.0);
    }
    if (positives[ri] == 0) {
      result.areas.push_back(std::move(ar));
      continue;
    }
    ar.defined = true;
    auto& recs = records[ri];
    std::stable_sort(recs.begin(), recs.end(), [](const DetRecord& a, const DetRecord& b) {
      if (a.score != b.score) {
        return a.score > b.score;
      }
      return a.index < b.index;
    });
    const double npos = static_cast<double>(positives[ri]);
    for (int t = 0; t < kThresholdCount; ++t) {
      std::vector<double> rc;
      std::vector<double> pr;
      double tp = 0.0;
      double fp = 0.0;
      for (const auto& r : recs) {
        if (r.ignored[t]) {
          continue;
        }
        if (r.matched[t]) {
          tp += 1.0;
        } else {
          fp += 1.0;
        }
        rc.push_back(tp / npos);
        pr.push_back(tp / (tp + fp));
      }
      ar.recall[t] = rc.empty() ? 0.0 : rc.back();
      for (std::size_t i = pr.size(); i-- > 1;) {
        pr[i - 1] = std::max(pr[i - 1], pr[i]);
      }
      auto& row = ar.precision[t];
      for (int r = 0; r < kRecallPoints; ++r) {
        const auto it = std::lower_bound(rc.begin(), rc.end(), recall_threshold(r));
        row[r] = it == rc.end() ? 0.0 : pr[static_cast<std::size_t>(it - rc.begin())];
      }
    }
    result.areas.push_back(std::move(ar));
  }
  return result;
}

namespace {

void require_pairs(const std::vector<Detection>& preds, const CocoDataset& gts,
                   const std::vector<MatchedPair>& pairs) {
  if (pairs.empty()) {
    throw InvalidArgument("no matched prediction/ground-truth pairs");
  }
  for (const auto& p : pairs) {
    if (p.det >= preds.size() || p.gt >= gts.annotations.size()) {
      throw InvalidArgument("matched pair index out of range");
    }
    if (preds[p.det].keypoints.size() != 3 * kCocoKeypointCount ||
        gts.annotations[p.gt].keypoints.size() != 3 * kCocoKeypointCount) {
      throw InvalidArgument("matched pair lacks keypoints");
    }
  }
}

}  // namespace

PerKeypoint per_keypoint_metrics(const std::vector<Detection>& preds, const CocoDataset& gts,
                                 const std::vector<MatchedPair>& pairs) {
  require_pairs(preds, gts, pairs);
  PerKeypoint out;
  out.pairs = pairs.size();
  std::array<double, kCocoKeypointCount> dsum{};
  std::array<std::size_t, kCocoKeypointCount> hit{};
  std::array<std::size_t, kCocoKeypointCount> above50{};
  std::array<std::size_t, kCocoKeypointCount> above75{};
  for (const auto& p : pairs) {
    const auto& g = gts.annotations[p.gt];
    const auto& d = preds[p.det].keypoints;
    const double diag = std::hypot(g.bbox[2], g.bbox[3]);
    for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
      if (!(g.keypoints[3 * k + 2] > 0)) {
        continue;
      }
      const double dx = d[3 * k] - g.keypoints[3 * k];
      const double dy = d[3 * k + 1] - g.keypoints[3 * k + 1];
      const double dist = std::sqrt(dx * dx + dy * dy);
      ++out.labeled[k];
      dsum[k] += dist;
      hit[k] += dist <= 0.05 * diag ? 1 : 0;
      const double term = oks_term(dx, dy, g.area, keypoint_kappa(k));
      above50[k] += term > 0.5 ? 1 : 0;
      above75[k] += term > 0.75 ? 1 : 0;
    }
  }
  for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
    const double n = static_cast<double>(out.labeled[k]);
    if (n > 0) {
      out.pdj[k] = hit[k] / n;
      out.pjpe[k] = dsum[k] / n;
      out.oks50[k] = above50[k] / n;
      out.oks75[k] = above75[k] / n;
    }
  }
  return out;
}

std::array<double, kCocoKeypointCount> pdj(const std::vector<Detection>& preds,
                                           const CocoDataset& gts,
                                           const std::vector<MatchedPair>& pairs,
                                           double fraction) {
  require_pairs(preds, gts, pairs);
  std::array<double, kCocoKeypointCount> hit{};
  std::array<double, kCocoKeypointCount> n{};
  for (const auto& p : pairs) {
    const auto& g = gts.annotations[p.gt];
    const auto& d = preds[p.det].keypoints;
    const double radius = fraction * std::hypot(g.bbox[2], g.bbox[3]);
    for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
      if (g.keypoints[3 * k + 2] > 0) {
        n[k] += 1.0;
        hit[k] += std::hypot(d[3 * k] - g.keypoints[3 * k], d[3 * k + 1] - g.keypoints[3 * k + 1]) <=
                          radius
                      ? 1.0
                      : 0.0;
      }
    }
  }
  for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
    hit[k] = n[k] > 0 ? hit[k] / n[k] : 0.0;
  }
  return hit;
}

std::array<double, kCocoKeypointCount> pjpe(const std::vector<Detection>& preds,
                                            const CocoDataset& gts,
                                            const std::vector<MatchedPair>& pairs) {
  const PerKeypoint m = per_keypoint_metrics(preds, gts, pairs);
  return m.pjpe;
}

std::array<double, kCocoKeypointCount> per_keypoint_oks_precision(
    const std::vector<Detection>& preds, const CocoDataset& gts,
    const std::vector<MatchedPair>& pairs, double threshold) {
  require_pairs(preds, gts, pairs);
  std::array<double, kCocoKeypointCount> above{};
  std::array<double, kCocoKeypointCount> n{};
  for (const auto& p : pairs) {
    const auto& g = gts.annotations[p.gt];
    const auto& d = preds[p.det].keypoints;
    for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
      if (g.keypoints[3 * k + 2] > 0) {
        n[k] += 1.0;
        const double term = oks_term(d[3 * k] - g.keypoints[3 * k],
                                     d[3 * k + 1] - g.keypoints[3 * k + 1], g.area,
                                     keypoint_kappa(k));
        above[k] += term > threshold ? 1.0 : 0.0;
      }
    }
  }
  for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
    above[k] = n[k] > 0 ? above[k] / n[k] : 0.0;
  }
  return above;
}

std::vector<std::uint64_t> unknown_image_ids(const std::vector<Detection>& preds,
                                             const CocoDataset& gts) {
  std::set<std::uint64_t> known;
  for (const auto& im : gts.images) {
    known.insert(im.id);
  }
  std::set<std::uint64_t> bad;
  for (const auto& d : preds) {
    if (known.count(d.image_id) == 0) {
      bad.insert(d.image_id);
    }
  }
  return {bad.begin(), bad.end()};
}

MetricReport evaluate(const std::vector<Detection>& preds, const CocoDataset& gts) {
  MetricReport r;
  const ApResult bb = coco_ap(preds, gts, IouType::BBox);
  r.bb = {bb.map(), bb.ap(0), bb.ap(5), bb.map("small"), bb.map("medium"), bb.map("large")};
  const bool gt_kp = std::any_of(gts.annotations.begin(), gts.annotations.end(),
                                 [](const CocoAnnotation& a) { return !a.keypoints.empty(); });
  if (gt_kp) {
    const ApResult kp = coco_ap(preds, gts, IouType::Keypoints);
    r.kp = MetricReport::Kp{kp.map(), kp.ap(0), kp.ap(5), kp.map("medium"), kp.map("large")};
    if (!kp.matches_at_50.empty()) {
      r.per_keypoint = per_keypoint_metrics(preds, gts, kp.matches_at_50);
    }
  }
  return r;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string fmt(const std::optional<double>& v) {
  if (!v) {
    return "   n/a";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%6.3f", *v);
  return buf;
}

}  // namespace

json report_to_json(const MetricReport& r) {
  json j;
  j["bbox"] = {{"mAP", opt(r.bb.map)},       {"AP50", opt(r.bb.ap50)},
               {"AP75", opt(r.bb.ap75)},     {"AP_small", opt(r.bb.small)},
               {"AP_medium", opt(r.bb.medium)}, {"AP_large", opt(r.bb.large)}};
  if (r.kp) {
    j["keypoints"] = {{"mAP", opt(r.kp->map)},
                      {"AP_OKS50", opt(r.kp->ap50)},
                      {"AP_OKS75", opt(r.kp->ap75)},
                      {"AP_medium", opt(r.kp->medium)},
                      {"AP_large", opt(r.kp->large)}};
  } else {
    j["keypoints"] = nullptr;
  }
  if (r.per_keypoint) {
    json pk = json::object();
    const auto& names = coco_keypoint_names();
    for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
      const auto& m = *r.per_keypoint;
      if (m.labeled[k] == 0) {
        pk[std::string(names[k])] = {{"labeled", 0}};
        continue;
      }
      pk[std::string(names[k])] = {{"PDJ5", m.pdj[k]},
                                   {"PJPE", m.pjpe[k]},
                                   {"OKS50", m.oks50[k]},
                                   {"OKS75", m.oks75[k]},
                                   {"labeled", m.labeled[k]}};
    }
    j["per_keypoint"] = {{"pairs", r.per_keypoint->pairs}, {"keypoints", pk}};
  } else {
    j["per_keypoint"] = nullptr;
  }
  return j;
}

std::string report_table(const MetricReport& r) {
  std::ostringstream out;
  out << "BB    mAP " << fmt(r.bb.map) << "  AP50 " << fmt(r.bb.ap50) << "  AP75 "
      << fmt(r.bb.ap75) << "  APs " << fmt(r.bb.small) << "  APm " << fmt(r.bb.medium)
      << "  APl " << fmt(r.bb.large) << '\n';
  if (r.kp) {
    out << "KP    mAP " << fmt(r.kp->map) << "  AP50 " << fmt(r.kp->ap50) << "  AP75 "
        << fmt(r.kp->ap75) << "  APm " << fmt(r.kp->medium) << "  APl " << fmt(r.kp->large)
        << '\n';
  }
  if (r.per_keypoint) {
    const auto& m = *r.per_keypoint;
    char buf[160];
    std::snprintf(buf, sizeof buf, "\n%-16s %8s %10s %8s %8s %8s\n", "keypoint", "PDJ@5", "PJPE",
                  "OKS50", "OKS75", "labeled");
    out << buf;
    const auto& names = coco_keypoint_names();
    for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
      std::snprintf(buf, sizeof buf, "%-16s %8.3f %10.2f %8.3f %8.3f %8zu\n",
                    std::string(names[k]).c_str(), m.pdj[k], m.pjpe[k], m.oks50[k], m.oks75[k],
                    m.labeled[k]);
      out << buf;
    }
  }
  return out.str();
}

namespace {

json aggregate_node(const std::vector<const json*>& nodes) {
  const json& first = *nodes.front();
  if (first.is_object()) {
    json out = json::object();
    for (const auto& [key, value] : first.items()) {
      std::vector<const json*> sub;
      for (const json* n : nodes) {
        if (!n->is_object() || !n->contains(key)) {
          sub.clear();
          break;
        }
        sub.push_back(&n->at(key));
      }
      out[key] = sub.empty() ? json(nullptr) : aggregate_node(sub);
    }
    return out;
  }
  if (first.is_array()) {
    json out = json::array();
    for (std::size_t i = 0; i < first.size(); ++i) {
      std::vector<const json*> sub;
      for (const json* n : nodes) {
        if (!n->is_array() || n->size() <= i) {
          sub.clear();
          break;
        }
        sub.push_back(&(*n)[i]);
      }
      out.push_back(sub.empty() ? json(nullptr) : aggregate_node(sub));
    }
    return out;
  }
  if (first.is_number()) {
    std::vector<double> v;
    for (const json* n : nodes) {
      if (!n->is_number()) {
        return nullptr;
      }
      v.push_back(n->get<double>());
    }
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double dev = 0.0;
    for (double x : v) {
      dev = std::max(dev, std::abs(x - mean));
    }
    return {{"mean", mean}, {"max_abs_dev", dev}};
  }
  return first;
}

}  // namespace

json aggregate_reports(const std::vector<json>& runs) {
  if (runs.empty()) {
    throw InvalidArgument("no runs to aggregate");
  }
  std::vector<const json*> nodes;
  for (const auto& r : runs) {
    nodes.push_back(&r);
  }
  return aggregate_node(nodes);
}

}  // namespace chairsynth
