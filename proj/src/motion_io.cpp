#include "chairsynth/motion.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace chairsynth {

namespace {

using nlohmann::json;

Vec3 parse_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError(where + ": expected [x, y, z]");
  }
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    if (!j[k].is_number()) {
      throw ParseError(where + ": coordinate is not a number");
    }
    v[k] = j[k].get<double>();
  }
  if (!v.allFinite()) {
    throw ParseError(where + ": non-finite coordinate");
  }
  return v;
}

double parse_frame_rate(const json& j) {
  if (!j.contains("frame_rate")) {
    return kDefaultFrameRate;
  }
  const double fr = j.at("frame_rate").get<double>();
  if (!(fr > 0.0) || !std::isfinite(fr)) {
    throw ParseError("frame_rate must be positive");
  }
  return fr;
}

std::vector<std::string> parse_names(const json& j) {
  const auto names = j.at("joint_names").get<std::vector<std::string>>();
  std::set<std::string> unique(names.begin(), names.end());
  if (unique.size() != names.size()) {
    throw ParseError("duplicate entries in joint_names");
  }
  return names;
}

// For every skeleton joint, the file columns whose mean gives its position.
std::vector<std::vector<int>> column_map(const json& j, const std::vector<std::string>& names,
                                         const SkeletonDefinition& skeleton) {
  auto column = [&names](const std::string& n) -> int {
    const auto it = std::find(names.begin(), names.end(), n);
    if (it == names.end()) {
      throw ParseError("joint_sources refers to unknown joint '" + n + "'");
    }
    return static_cast<int>(it - names.begin());
  };
  const json sources = j.value("joint_sources", json::object());
  std::vector<bool> used(names.size(), false);
  std::vector<std::vector<int>> map(skeleton.size());
  for (std::size_t s = 0; s < skeleton.size(); ++s) {
    const std::string& joint = skeleton.joints[s];
    if (sources.contains(joint)) {
      const json& src = sources.at(joint);
      if (src.is_string()) {
        map[s].push_back(column(src.get<std::string>()));
      } else {
        for (const auto& n : src) {
          map[s].push_back(column(n.get<std::string>()));
        }
      }
      if (map[s].empty()) {
        throw ParseError("joint_sources entry for '" + joint + "' is empty");
      }
    } else {
      const auto it = std::find(names.begin(), names.end(), joint);
      if (it == names.end()) {
        throw ParseError("motion file has no joint '" + joint + "'");
      }
      map[s].push_back(static_cast<int>(it - names.begin()));
    }
    for (const int c : map[s]) {
      used[c] = true;
    }
  }
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (!used[c]) {
      throw ParseError("unknown joint name '" + names[c] + "'");
    }
  }
  return map;
}

}  // namespace

MotionSequence parse_motion(const json& j, const SkeletonDefinition& skeleton) {
  MotionSequence seq;
  try {
    seq.frame_rate = parse_frame_rate(j);
    seq.source = j.value("source", std::string());
    const auto names = parse_names(j);
    const auto map = column_map(j, names, skeleton);
    const json& frames = j.at("frames");
    if (!frames.is_array() || frames.empty()) {
      throw ParseError("motion has no frames");
    }
    seq.frames.reserve(frames.size());
    for (std::size_t f = 0; f < frames.size(); ++f) {
      const json& fr = frames[f];
      if (!fr.is_array() || fr.size() != names.size()) {
        throw ParseError("frame " + std::to_string(f) + " has " +
                         std::to_string(fr.is_array() ? fr.size() : 0) + " joints, expected " +
                         std::to_string(names.size()));
      }
      std::vector<Vec3> cols(names.size());
      for (std::size_t c = 0; c < names.size(); ++c) {
        cols[c] = parse_point(fr[c], "frame " + std::to_string(f) + " joint '" + names[c] + "'");
      }
      Pose3D pose(skeleton.size());
      for (std::size_t s = 0; s < skeleton.size(); ++s) {
        Vec3 sum = Vec3::Zero();
        for (const int c : map[s]) {
          sum += cols[c];
        }
        pose[s] = map[s].size() == 1 ? sum : Vec3(sum / static_cast<double>(map[s].size()));
      }
      seq.frames.push_back(std::move(pose));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("motion file: ") + e.what());
  }
  return seq;
}

MotionSequence load_motion(const std::filesystem::path& path, const SkeletonDefinition& skeleton) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  try {
    MotionSequence seq = parse_motion(j, skeleton);
    seq.id = path.stem().string();
    return seq;
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

json motion_to_json(const MotionSequence& seq, const SkeletonDefinition& skeleton) {
  json frames = json::array();
  for (const auto& pose : seq.frames) {
    json fr = json::array();
    for (const auto& p : pose) {
      fr.push_back({p.x(), p.y(), p.z()});
    }
    frames.push_back(std::move(fr));
  }
  return {{"frame_rate", seq.frame_rate},
          {"source", seq.source},
          {"joint_names", skeleton.joints},
          {"frames", std::move(frames)}};
}

void save_motion(const MotionSequence& seq, const SkeletonDefinition& skeleton,
                 const std::filesystem::path& path) {
  write_text_file(path, motion_to_json(seq, skeleton).dump() + "\n");
}

json rotations_to_json(const RotationSequence& seq) {
  json roots = json::array();
  for (const auto& p : seq.root_positions) {
    roots.push_back({p.x(), p.y(), p.z()});
  }
  json rots = json::array();
  for (const auto& frame : seq.rotations) {
    json fr = json::array();
    for (const auto& q : frame) {
      fr.push_back({q.w(), q.x(), q.y(), q.z()});
    }
    rots.push_back(std::move(fr));
  }
  return {{"frame_rate", seq.frame_rate},
          {"source", seq.source},
          {"joint_names", seq.skeleton.joints},
          {"root_positions", std::move(roots)},
          {"rotations", std::move(rots)}};
}

RotationSequence parse_rotations(const json& j, const SkeletonDefinition& skeleton) {
  RotationSequence seq;
  seq.skeleton = skeleton;
  try {
    seq.frame_rate = parse_frame_rate(j);
    seq.source = j.value("source", std::string());
    const auto names = parse_names(j);
    std::vector<int> col(skeleton.size(), -1);
    for (std::size_t c = 0; c < names.size(); ++c) {
      const int s = skeleton.index_of(names[c]);
      if (s < 0) {
        throw ParseError("unknown joint name '" + names[c] + "'");
      }
      col[s] = static_cast<int>(c);
    }
    for (std::size_t s = 0; s < skeleton.size(); ++s) {
      if (col[s] < 0) {
        throw ParseError("rotation file has no joint '" + skeleton.joints[s] + "'");
      }
    }
    const json& roots = j.at("root_positions");
    const json& rots = j.at("rotations");
    if (roots.size() != rots.size() || rots.empty()) {
      throw ParseError("root_positions and rotations must have the same nonzero length");
    }
    for (std::size_t f = 0; f < rots.size(); ++f) {
      seq.root_positions.push_back(parse_point(roots[f], "root position " + std::to_string(f)));
      const json& fr = rots[f];
      if (fr.size() != names.size()) {
        throw ParseError("frame " + std::to_string(f) + " has " + std::to_string(fr.size()) +
                         " rotations, expected " + std::to_string(names.size()));
      }
      std::vector<Quat> frame(skeleton.size());
      for (std::size_t s = 0; s < skeleton.size(); ++s) {
        const json& q = fr[col[s]];
        if (!q.is_array() || q.size() != 4) {
          throw ParseError("frame " + std::to_string(f) + ": rotation must be [w, x, y, z]");
        }
        Quat r(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
        if (!(std::abs(r.norm() - 1.0) < 1e-6)) {
          throw ParseError("frame " + std::to_string(f) + ": rotation is not unit length");
        }
        frame[s] = r;
      }
      seq.rotations.push_back(std::move(frame));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("rotation file: ") + e.what());
  }
  return seq;
}

void save_rotations(const RotationSequence& seq, const std::filesystem::path& path) {
  write_text_file(path, rotations_to_json(seq).dump() + "\n");
}

RotationSequence load_rotations(const std::filesystem::path& path,
                                const SkeletonDefinition& skeleton) {
  try {
    RotationSequence seq = parse_rotations(json::parse(read_text_file(path)), skeleton);
    seq.id = path.stem().string();
    return seq;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::vector<std::filesystem::path> list_motion_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
  return out;
}

}  // namespace chairsynth
