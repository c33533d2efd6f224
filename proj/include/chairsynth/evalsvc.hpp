#pragma once

#include "chairsynth/motion.hpp"

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace chairsynth {

constexpr int kLikertMin = 1;
constexpr int kLikertMax = 7;

struct EvalResponse {
  std::string participant;
  std::string motion;
  int ease = 0;
  int frequency = 0;
  bool seen_before = false;
  std::string timestamp;  // free-form, as sent by the client
};

nlohmann::json response_to_json(const EvalResponse& r);
EvalResponse response_from_json(const nlohmann::json& j);
// Throws InvalidArgument on empty ids or scores outside 1..7.
void validate_response(const EvalResponse& r);

// Last record per (participant, motion) in log order, sorted by that key.
std::vector<EvalResponse> compact_responses(const std::vector<EvalResponse>& log);
// Reads a newline-delimited response log and compacts it.
std::vector<EvalResponse> load_responses(const std::filesystem::path& file);

// Append-only response log. Writes are serialized; readers get a compacted
// snapshot.
class ResponseStore {
 public:
  explicit ResponseStore(std::filesystem::path file, std::set<std::string> motions = {});

  // Throws NotFound for a motion outside the catalogue (when one was given)
  // and InvalidArgument for bad scores.
  void record(const EvalResponse& r);
  std::vector<EvalResponse> snapshot() const;
  // Rewrites the log with one line per (participant, motion).
  void compact();
  const std::filesystem::path& path() const { return file_; }

 private:
  std::filesystem::path file_;
  std::set<std::string> motions_;
  mutable std::mutex mu_;
  std::vector<EvalResponse> log_;
};

enum class ScoreMode { Mean, Sum };
std::string_view score_mode_name(ScoreMode m);
ScoreMode parse_score_mode(std::string_view s);

struct ScoreOptions {
  ScoreMode mode = ScoreMode::Mean;
  double ease_weight = 1.0;
  double frequency_weight = 1.0;
};

struct MotionScore {
  std::string motion;
  std::size_t responses = 0;
  double mean_ease = 0.0;
  double mean_frequency = 0.0;
  double seen_fraction = 0.0;
  double total = 0.0;
  int rank = 0;  // 1 = highest total
};

struct GroupSummary {
  std::string name;
  std::size_t motions = 0;
  double mean_ease = 0.0;
  double mean_frequency = 0.0;
  std::optional<double> sd_ease;  // sample SD, needs two motions
  std::optional<double> sd_frequency;
  std::optional<double> pearson_r;  // ease vs frequency over motion means
};

struct EvalAnalysis {
  std::vector<MotionScore> motions;  // sorted by motion id
  std::vector<GroupSummary> groups;  // "all" first, then named groups
  std::size_t responses = 0;
  std::size_t participants = 0;
  ScoreMode mode = ScoreMode::Mean;
};

// Empty when fewer than two points or either variance is zero.
std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y);

// `groups` optionally maps motion id to a group name.
EvalAnalysis analyze_responses(const std::vector<EvalResponse>& responses,
                               const std::map<std::string, std::string>& groups = {},
                               const ScoreOptions& options = {});

struct FilterManifest {
  double fraction = 0.0;
  std::string score = "mean";
  std::vector<std::string> removed;  // lowest total first
  std::vector<std::string> kept;     // sorted by id
};

std::size_t removal_count(double fraction, std::size_t motions);

// Removes the ceil(fraction * M) lowest totals, ties by id ascending. When
// `catalogue` is given, every listed motion must have a response.
FilterManifest filter_bottom_fraction(const EvalAnalysis& analysis, double fraction,
                                      const std::vector<std::string>* catalogue = nullptr);

nlohmann::json manifest_to_json(const FilterManifest& m);
FilterManifest manifest_from_json(const nlohmann::json& j);
FilterManifest load_manifest(const std::filesystem::path& file);
void save_manifest(const FilterManifest& m, const std::filesystem::path& file);

nlohmann::json analysis_to_json(const EvalAnalysis& a);

struct ViewDefinition {
  std::string name;
  Vec3 position;
  Vec3 target;
  Vec3 up;
  double fov_deg = 45.0;
};

// Oblique 45-degree top, top, side and front cameras framing `center`.
std::vector<ViewDefinition> canonical_views(const Vec3& center, double distance = 4.0);
nlohmann::json view_to_json(const ViewDefinition& v);

// Motion catalogue plus response store behind the HTTP endpoints.
class EvalService {
 public:
  EvalService(const std::filesystem::path& motion_dir, const std::filesystem::path& store,
              SkeletonDefinition skeleton = default_skeleton());

  std::vector<std::string> motion_ids() const;
  nlohmann::json list_motions() const;
  // Frames plus view definitions; throws NotFound for unknown ids.
  nlohmann::json motion_views(const std::string& id) const;
  void submit(const EvalResponse& r) { store_.record(r); }
  std::vector<EvalResponse> responses(const std::string& participant = {}) const;
  EvalAnalysis analysis() const;
  FilterManifest manifest(double fraction) const;
  const SkeletonDefinition& skeleton() const { return skeleton_; }

 private:
  SkeletonDefinition skeleton_;
  std::map<std::string, MotionSequence> motions_;
  ResponseStore store_;
};

}  // namespace chairsynth
