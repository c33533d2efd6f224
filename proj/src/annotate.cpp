#include "chairsynth/annotate.hpp"

#include "chairsynth/retarget.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chairsynth {

AnimationPool MotionLibrary::pool() const {
  AnimationPool p;
  for (const auto& c : clips) {
    p.lengths.push_back(c.size());
    p.ids.push_back(c.id);
  }
  return p;
}

PosedScene pose_scene(const SceneSample& scene, const MotionLibrary& library,
                      const SkeletonDefinition& skeleton, const ResolvedSchema& schema) {
  PosedScene out;
  for (std::size_t i = 0; i < scene.humans.size(); ++i) {
    const HumanInstance& h = scene.humans[i];
    if (h.motion >= library.clips.size()) {
      throw InvalidArgument("scene references motion " + std::to_string(h.motion) +
                            " outside the library");
    }
    const RotationSequence& clip = library.clips[h.motion];
    if (h.frame >= clip.size()) {
      throw InvalidArgument("scene references frame " + std::to_string(h.frame) + " of motion '" +
                            clip.id + "' which has " + std::to_string(clip.size()) + " frames");
    }
    const SkeletonDefinition body_skel = scaled_skeleton(skeleton, h.body);
    std::vector<Quat> world;
    const Pose3D pose =
        forward_kinematics(body_skel, Vec3::Zero(), clip.rotations[h.frame], &world);
    const std::vector<double>* scale =
        h.body.bone_scale.size() == skeleton.size() ? &h.body.bone_scale : nullptr;
    Coco17 kps = map_pose_to_coco17(pose, world, body_skel, schema, scale);
    const Placement placement = Placement::from_instance(h);
    for (auto& p : kps) {
      p = placement.apply(p);
    }
    out.keypoints.push_back(kps);
    std::array<int, kCocoKeypointCount> src{};
    for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
      src[k] = schema.rules[k].a;
    }
    out.keypoint_joints.push_back(src);
    add_human_solids(out.geometry, static_cast<int>(i), body_skel, pose, world, h.body, h.chair,
                     placement);
  }
  for (const auto& o : scene.occluders) {
    add_occluder_solid(out.geometry, o);
  }
  out.geometry.finalize();
  return out;
}

namespace {

void circle(const Vec3& center, const Vec3& normal, double radius, int n, std::vector<Vec3>& out) {
  const Vec3 u = normal.unitOrthogonal();
  const Vec3 v = normal.normalized().cross(u);
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * i / n;
    out.push_back(center + radius * (std::cos(t) * u + std::sin(t) * v));
  }
}

// Points where sight lines from `eye` graze the unit sphere at `c`.
void sphere_outline(const Vec3& eye, const Vec3& c, int n, std::vector<Vec3>& out) {
  const Vec3 v = eye - c;
  const double d2 = v.squaredNorm();
  if (d2 <= 1.0 + 1e-12) {
    for (int k = 0; k < 3; ++k) {
      out.push_back(c + Vec3::Unit(k));
      out.push_back(c - Vec3::Unit(k));
    }
    return;
  }
  circle(c + v / d2, v, std::sqrt(1.0 - 1.0 / d2), n, out);
}

}  // namespace

std::optional<std::array<double, 4>> silhouette_bbox(const std::vector<const Solid*>& solids,
                                                     const CameraModel& cam, int circle_samples) {
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = x0;
  double x1 = -x0;
  double y1 = -x0;
  std::vector<Vec3> pts;
  for (const Solid* s : solids) {
    pts.clear();
    const Vec3 eye = s->inv * (cam.position - s->center);
    switch (s->kind) {
      case PrimitiveKind::Cube:
        for (int i = 0; i < 8; ++i) {
          pts.emplace_back(i & 1 ? 1.0 : -1.0, i & 2 ? 1.0 : -1.0, i & 4 ? 1.0 : -1.0);
        }
        break;
      case PrimitiveKind::Sphere:
        sphere_outline(eye, Vec3::Zero(), 2 * circle_samples, pts);
        break;
      case PrimitiveKind::Capsule:
        sphere_outline(eye, Vec3(0, s->h, 0), circle_samples, pts);
        sphere_outline(eye, Vec3(0, -s->h, 0), circle_samples, pts);
        break;
      case PrimitiveKind::Cylinder:
        circle(Vec3(0, 1, 0), Vec3::UnitY(), 1.0, circle_samples, pts);
        circle(Vec3(0, -1, 0), Vec3::UnitY(), 1.0, circle_samples, pts);
        break;
    }
    for (const auto& q : pts) {
      double depth = 0.0;
      const Pixel px = cam.project_unchecked(s->center + s->A * q, &depth);
      if (!(depth > 1e-6)) {
        continue;
      }
      x0 = std::min(x0, px.x);
      y0 = std::min(y0, px.y);
      x1 = std::max(x1, px.x);
      y1 = std::max(y1, px.y);
    }
  }
  if (!(x1 >= x0)) {
    return std::nullopt;
  }
  return std::array<double, 4>{x0, y0, x1 - x0, y1 - y0};
}

AnnotatedFrame annotate_scene(const SceneSample& scene, const MotionLibrary& library,
                              const SkeletonDefinition& skeleton, const ResolvedSchema& schema,
                              const AnnotateOptions& options) {
  AnnotatedFrame frame;
  frame.frame_id = scene.frame_index;
  frame.camera = CameraModel::from_sample(scene.camera);
  const CameraModel& cam = frame.camera;
  const PosedScene posed = pose_scene(scene, library, skeleton, schema);
  OcclusionTester tester(posed.geometry);
  for (std::size_t i = 0; i < scene.humans.size(); ++i) {
    AnnotatedInstance inst;
    inst.human = static_cast<int>(i);
    inst.motion_id = library.clips[scene.humans[i].motion].id;
    inst.pose_frame = scene.humans[i].frame;
    int in_view = 0;
    int occluded = 0;
    double kx0 = std::numeric_limits<double>::infinity();
    double ky0 = kx0;
    double kx1 = -kx0;
    double ky1 = -kx0;
    for (std::size_t k = 0; k < kCocoKeypointCount; ++k) {
      const Vec3& p = posed.keypoints[i][k];
      const auto px = cam.project(p);
      AnnotatedKeypoint& kp = inst.keypoints[k];
      if (!px) {
        continue;
      }
      const KeypointOwner owner{static_cast<int>(i), posed.keypoint_joints[i][k]};
      const bool hidden = tester.occluded(cam.position, p, owner, options.occlusion_threshold);
      kp = {px->x, px->y, hidden ? Visibility::Occluded : Visibility::Visible};
      ++in_view;
      occluded += hidden ? 1 : 0;
      kx0 = std::min(kx0, px->x);
      ky0 = std::min(ky0, px->y);
      kx1 = std::max(kx1, px->x);
      ky1 = std::max(ky1, px->y);
    }
    if (in_view == 0) {
      continue;
    }
    std::vector<const Solid*> body;
    for (const auto& s : posed.geometry.solids()) {
      if (s.owner == static_cast<int>(i) && s.role == Solid::Role::Body) {
        body.push_back(&s);
      }
    }
    const auto sil = silhouette_bbox(body, cam, options.circle_samples);
    double x0 = kx0, y0 = ky0, x1 = kx1, y1 = ky1;
    if (sil) {
      x0 = std::min(x0, (*sil)[0]);
      y0 = std::min(y0, (*sil)[1]);
      x1 = std::max(x1, (*sil)[0] + (*sil)[2]);
      y1 = std::max(y1, (*sil)[1] + (*sil)[3]);
    }
    x0 = std::clamp(x0, 0.0, static_cast<double>(cam.width));
    x1 = std::clamp(x1, 0.0, static_cast<double>(cam.width));
    y0 = std::clamp(y0, 0.0, static_cast<double>(cam.height));
    y1 = std::clamp(y1, 0.0, static_cast<double>(cam.height));
    if (!(x1 > x0) || !(y1 > y0)) {
      continue;
    }
    inst.bbox = {x0, y0, x1 - x0, y1 - y0};
    inst.num_keypoints = in_view;
    inst.occluded_fraction = static_cast<double>(occluded) / in_view;
    inst.nose_world = posed.keypoints[i][0];
    const Vec3 fwd = euler_zxy_deg(scene.humans[i].rotation_deg) * Vec3::UnitZ();
    const Vec3 flat(fwd.x(), 0.0, fwd.z());
    inst.heading = flat.norm() > 1e-9 ? Vec3(flat.normalized()) : Vec3::UnitZ();
    frame.instances.push_back(std::move(inst));
  }
  return frame;
}

}  // namespace chairsynth
