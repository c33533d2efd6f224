#include "chairsynth/evalsvc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace chairsynth {

using nlohmann::json;

json response_to_json(const EvalResponse& r) {
  return {{"participant", r.participant},
          {"motion", r.motion},
          {"ease", r.ease},
          {"frequency", r.frequency},
          {"seen_before", r.seen_before},
          {"timestamp", r.timestamp}};
}

EvalResponse response_from_json(const json& j) {
  EvalResponse r;
  try {
    r.participant = j.at("participant").get<std::string>();
    r.motion = j.at("motion").get<std::string>();
    r.ease = j.at("ease").get<int>();
    r.frequency = j.at("frequency").get<int>();
    const auto& seen = j.at("seen_before");
    if (seen.is_boolean()) {
      r.seen_before = seen.get<bool>();
    } else {
      const auto s = seen.get<std::string>();
      if (s != "yes" && s != "no") {
        throw ParseError("seen_before must be yes/no or a boolean");
      }
      r.seen_before = s == "yes";
    }
    r.timestamp = j.value("timestamp", std::string());
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed response: ") + e.what());
  }
  return r;
}

void validate_response(const EvalResponse& r) {
  if (r.participant.empty()) {
    throw InvalidArgument("response has no participant id");
  }
  if (r.motion.empty()) {
    throw InvalidArgument("response has no motion id");
  }
  auto check = [](int v, const char* what) {
    if (v < kLikertMin || v > kLikertMax) {
      throw InvalidArgument(std::string(what) + " score " + std::to_string(v) +
                            " is outside 1..7");
    }
  };
  check(r.ease, "ease");
  check(r.frequency, "frequency");
}

std::vector<EvalResponse> compact_responses(const std::vector<EvalResponse>& log) {
  std::map<std::pair<std::string, std::string>, EvalResponse> last;
  for (const auto& r : log) {
    last[{r.participant, r.motion}] = r;
  }
  std::vector<EvalResponse> out;
  out.reserve(last.size());
  for (auto& [key, r] : last) {
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

std::vector<EvalResponse> read_log(const std::filesystem::path& file) {
  std::vector<EvalResponse> log;
  if (!std::filesystem::exists(file)) {
    return log;
  }
  std::istringstream in(read_text_file(file));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      EvalResponse r = response_from_json(json::parse(line));
      validate_response(r);
      log.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw ParseError(file.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return log;
}

}  // namespace

std::vector<EvalResponse> load_responses(const std::filesystem::path& file) {
  if (!std::filesystem::exists(file)) {
    throw NotFound("no response log at " + file.string());
  }
  return compact_responses(read_log(file));
}

ResponseStore::ResponseStore(std::filesystem::path file, std::set<std::string> motions)
    : file_(std::move(file)), motions_(std::move(motions)), log_(read_log(file_)) {}

void ResponseStore::record(const EvalResponse& r) {
  validate_response(r);
  if (!motions_.empty() && motions_.count(r.motion) == 0) {
    throw NotFound("unknown motion '" + r.motion + "'");
  }
  std::lock_guard<std::mutex> lock(mu_);
  if (file_.has_parent_path()) {
    std::filesystem::create_directories(file_.parent_path());
  }
  std::ofstream out(file_, std::ios::app | std::ios::binary);
  out << response_to_json(r).dump() << '\n';
  out.flush();
  if (!out) {
    throw IoError("cannot append to " + file_.string());
  }
  log_.push_back(r);
}

std::vector<EvalResponse> ResponseStore::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return compact_responses(log_);
}

void ResponseStore::compact() {
  std::lock_guard<std::mutex> lock(mu_);
  log_ = compact_responses(log_);
  std::string text;
  for (const auto& r : log_) {
    text += response_to_json(r).dump();
    text += '\n';
  }
  const auto tmp = std::filesystem::path(file_.string() + ".tmp");
  write_text_file(tmp, text);
  std::filesystem::rename(tmp, file_);
}

std::string_view score_mode_name(ScoreMode m) { return m == ScoreMode::Mean ? "mean" : "sum"; }

ScoreMode parse_score_mode(std::string_view s) {
  if (s == "mean") {
    return ScoreMode::Mean;
  }
  if (s == "sum") {
    return ScoreMode::Sum;
  }
  throw InvalidArgument("score mode must be 'mean' or 'sum'");
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw InvalidArgument("pearson: series differ in length");
  }
  const std::size_t n = x.size();
  if (n < 2) {
    return std::nullopt;
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    return std::nullopt;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

std::optional<double> sample_sd(const std::vector<double>& v, double mean) {
  if (v.size() < 2) {
    return std::nullopt;
  }
  double s = 0.0;
  for (double x : v) {
    s += (x - mean) * (x - mean);
  }
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

GroupSummary summarize(const std::string& name, const std::vector<const MotionScore*>& ms) {
  GroupSummary g;
  g.name = name;
  g.motions = ms.size();
  std::vector<double> e;
  std::vector<double> f;
  for (const auto* m : ms) {
    e.push_back(m->mean_ease);
    f.push_back(m->mean_frequency);
  }
  if (!ms.empty()) {
    g.mean_ease = std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size());
    g.mean_frequency = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
  }
  g.sd_ease = sample_sd(e, g.mean_ease);
  g.sd_frequency = sample_sd(f, g.mean_frequency);
  g.pearson_r = pearson(e, f);
  return g;
}

}  // namespace

EvalAnalysis analyze_responses(const std::vector<EvalResponse>& responses,
                               const std::map<std::string, std::string>& groups,
                               const ScoreOptions& options) {
  // Sorting first makes every sum independent of log order.
  const std::vector<EvalResponse> rs = compact_responses(responses);
  EvalAnalysis a;
  a.mode = options.mode;
  a.responses = rs.size();
  std::set<std::string> people;
  std::map<std::string, std::vector<const EvalResponse*>> by_motion;
  for (const auto& r : rs) {
    validate_response(r);
    people.insert(r.participant);
    by_motion[r.motion].push_back(&r);
  }
  a.participants = people.size();
  for (const auto& [id, list] : by_motion) {
    MotionScore m;
    m.motion = id;
    m.responses = list.size();
    double se = 0.0;
    double sf = 0.0;
    double seen = 0.0;
    for (const auto* r : list) {
      se += r->ease;
      sf += r->frequency;
      seen += r->seen_before ? 1.0 : 0.0;
    }
    const auto n = static_cast<double>(list.size());
    m.mean_ease = se / n;
    m.mean_frequency = sf / n;
    m.seen_fraction = seen / n;
    m.total = options.mode == ScoreMode::Mean
                  ? options.ease_weight * m.mean_ease + options.frequency_weight * m.mean_frequency
                  : options.ease_weight * se + options.frequency_weight * sf;
    a.motions.push_back(m);
  }
  std::vector<std::size_t> order(a.motions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a.motions[i].total > a.motions[j].total;
  });
  for (std::size_t r = 0; r < order.size(); ++r) {
    a.motions[order[r]].rank = static_cast<int>(r + 1);
  }
  std::vector<const MotionScore*> all;
  std::map<std::string, std::vector<const MotionScore*>> named;
  for (const auto& m : a.motions) {
    all.push_back(&m);
    const auto it = groups.find(m.motion);
    if (it != groups.end()) {
      named[it->second].push_back(&m);
    }
  }
  a.groups.push_back(summarize("all", all));
  for (const auto& [name, list] : named) {
    a.groups.push_back(summarize(name, list));
  }
  return a;
}

std::size_t removal_count(double fraction, std::size_t motions) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw InvalidArgument("filter fraction must lie in [0, 1]");
  }
  // The small slack absorbs products like 0.07 * 100 = 7.000000000000001.
  const double k = std::ceil(fraction * static_cast<double>(motions) - 1e-9);
  return std::min(motions, static_cast<std::size_t>(std::max(0.0, k)));
}

FilterManifest filter_bottom_fraction(const EvalAnalysis& analysis, double fraction,
                                      const std::vector<std::string>* catalogue) {
  if (catalogue != nullptr) {
    std::set<std::string> rated;
    for (const auto& m : analysis.motions) {
      rated.insert(m.motion);
    }
    for (const auto& id : *catalogue) {
      if (rated.count(id) == 0) {
        throw InvalidArgument("motion '" + id + "' has no response");
      }
    }
  }
  FilterManifest out;
  out.fraction = fraction;
  out.score = std::string(score_mode_name(analysis.mode));
  std::vector<const MotionScore*> order;
  for (const auto& m : analysis.motions) {
    order.push_back(&m);
  }
  std::sort(order.begin(), order.end(), [](const MotionScore* a, const MotionScore* b) {
    if (a->total != b->total) {
      return a->total < b->total;
    }
    return a->motion < b->motion;
  });
  const std::size_t k = removal_count(fraction, order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < k ? out.removed : out.kept).push_back(order[i]->motion);
  }
  std::sort(out.kept.begin(), out.kept.end());
  return out;
}

json manifest_to_json(const FilterManifest& m) {
  return {{"fraction", m.fraction}, {"score", m.score}, {"removed", m.removed}, {"kept", m.kept}};
}

FilterManifest manifest_from_json(const json& j) {
  FilterManifest m;
  try {
    m.removed = j.at("removed").get<std::vector<std::string>>();
    m.kept = j.value("kept", std::vector<std::string>{});
    m.fraction = j.value("fraction", 0.0);
    m.score = j.value("score", std::string("mean"));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed filter manifest: ") + e.what());
  }
  return m;
}

FilterManifest load_manifest(const std::filesystem::path& file) {
  try {
    return manifest_from_json(json::parse(read_text_file(file)));
  } catch (const json::parse_error& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
}

void save_manifest(const FilterManifest& m, const std::filesystem::path& file) {
  write_text_file(file, manifest_to_json(m).dump(2) + "\n");
}

json analysis_to_json(const EvalAnalysis& a) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json motions = json::array();
  for (const auto& m : a.motions) {
    motions.push_back({{"motion", m.motion},
                       {"responses", m.responses},
                       {"mean_ease", m.mean_ease},
                       {"mean_frequency", m.mean_frequency},
                       {"seen_fraction", m.seen_fraction},
                       {"total", m.total},
                       {"rank", m.rank}});
  }
  json groups = json::array();
  for (const auto& g : a.groups) {
    groups.push_back({{"name", g.name},
                      {"motions", g.motions},
                      {"mean_ease", g.mean_ease},
                      {"sd_ease", opt(g.sd_ease)},
                      {"mean_frequency", g.mean_frequency},
                      {"sd_frequency", opt(g.sd_frequency)},
                      {"pearson_r", opt(g.pearson_r)}});
  }
  return {{"responses", a.responses},
          {"participants", a.participants},
          {"score", std::string(score_mode_name(a.mode))},
          {"motions", motions},
          {"groups", groups}};
}

std::vector<ViewDefinition> canonical_views(const Vec3& center, double distance) {
  const double s = distance * std::sqrt(0.5);
  return {
      {"oblique_top_45", center + Vec3(0.0, s, s), center, Vec3::UnitY()},
      {"top", center + Vec3(0.0, distance, 0.0), center, Vec3::UnitZ()},
      {"side", center + Vec3(distance, 0.0, 0.0), center, Vec3::UnitY()},
      {"front", center + Vec3(0.0, 0.0, distance), center, Vec3::UnitY()},
  };
}

json view_to_json(const ViewDefinition& v) {
  auto vj = [](const Vec3& p) { return json::array({p.x(), p.y(), p.z()}); };
  return {{"name", v.name},
          {"position", vj(v.position)},
          {"target", vj(v.target)},
          {"up", vj(v.up)},
          {"fov_deg", v.fov_deg}};
}

namespace {

std::map<std::string, MotionSequence> load_catalogue(const std::filesystem::path& dir,
                                                     const SkeletonDefinition& skeleton) {
  std::map<std::string, MotionSequence> out;
  for (const auto& f : list_motion_files(dir)) {
    MotionSequence m = load_motion(f, skeleton);
    out.emplace(m.id, std::move(m));
  }
  if (out.empty()) {
    throw InvalidArgument("motion directory " + dir.string() + " holds no motion files");
  }
  return out;
}

std::set<std::string> keys(const std::map<std::string, MotionSequence>& m) {
  std::set<std::string> k;
  for (const auto& [id, seq] : m) {
    k.insert(id);
  }
  return k;
}

}  // namespace

EvalService::EvalService(const std::filesystem::path& motion_dir,
                         const std::filesystem::path& store, SkeletonDefinition skeleton)
    : skeleton_(std::move(skeleton)),
      motions_(load_catalogue(motion_dir, skeleton_)),
      store_(store, keys(motions_)) {}

std::vector<std::string> EvalService::motion_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, m] : motions_) {
    ids.push_back(id);
  }
  return ids;
}

json EvalService::list_motions() const {
  json out = json::array();
  for (const auto& [id, m] : motions_) {
    out.push_back(
        {{"id", id}, {"frames", m.size()}, {"frame_rate", m.frame_rate}, {"source", m.source}});
  }
  return out;
}

json EvalService::motion_views(const std::string& id) const {
  const auto it = motions_.find(id);
  if (it == motions_.end()) {
    throw NotFound("unknown motion '" + id + "'");
  }
  const MotionSequence& m = it->second;
  Vec3 center = Vec3::Zero();
  std::size_t n = 0;
  json frames = json::array();
  for (const auto& pose : m.frames) {
    json f = json::array();
    for (const auto& p : pose) {
      f.push_back({p.x(), p.y(), p.z()});
      center += p;
      ++n;
    }
    frames.push_back(std::move(f));
  }
  if (n > 0) {
    center /= static_cast<double>(n);
  }
  json views = json::array();
  for (const auto& v : canonical_views(center)) {
    views.push_back(view_to_json(v));
  }
  json joints = skeleton_.joints;
  return {{"id", id},
          {"frame_rate", m.frame_rate},
          {"source", m.source},
          {"joint_names", joints},
          {"parents", skeleton_.parent},
          {"frames", frames},
          {"views", views}};
}

std::vector<EvalResponse> EvalService::responses(const std::string& participant) const {
  std::vector<EvalResponse> all = store_.snapshot();
  if (participant.empty()) {
    return all;
  }
  std::vector<EvalResponse> out;
  for (auto& r : all) {
    if (r.participant == participant) {
      out.push_back(std::move(r));
    }
  }
  return out;
}

EvalAnalysis EvalService::analysis() const { return analyze_responses(store_.snapshot()); }

FilterManifest EvalService::manifest(double fraction) const {
  const auto ids = motion_ids();
  return filter_bottom_fraction(analysis(), fraction, &ids);
}

}  // namespace chairsynth
