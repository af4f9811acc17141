// SPDX-License-Identifier: Apache-2.0
#include "failgen/perturb.hpp"

#include <algorithm>
#include <cmath>

#include "failgen/error.hpp"

namespace failgen {

namespace {

constexpr std::array<std::string_view, 7> kModeNames = {
    "no_grasp", "slip", "translation", "rotation", "no_rotation", "wrong_action", "wrong_object"};
constexpr std::array<std::string_view, 3> kAxisNames = {"x", "y", "z"};
constexpr std::array<std::string_view, 3> kRotationAxisNames = {"roll", "pitch", "yaw"};

void check_keyframe(const Trajectory& demo, int keyframe) {
  if (keyframe < 0 || keyframe >= static_cast<int>(demo.keyframes.size())) {
    throw Error(ErrorCode::InvalidArgument, "keyframe " + std::to_string(keyframe) + " out of range [0, " +
                                                std::to_string(demo.keyframes.size()) + ")");
  }
}

void require_grasp_keyframe(const Trajectory& demo, int keyframe) {
  check_keyframe(demo, keyframe);
  if (demo.keyframes[keyframe].gripper_command != GripperCommand::Close) {
    throw Error(ErrorCode::NotAGraspKeyframe,
                "keyframe " + std::to_string(keyframe) + " does not command the gripper to close");
  }
}

void renumber(Trajectory& t) {
  for (std::size_t i = 0; i < t.keyframes.size(); ++i) t.keyframes[i].index = static_cast<int>(i);
}

}  // namespace

std::string_view to_string(FailureMode mode) { return kModeNames[static_cast<std::size_t>(mode)]; }

std::optional<FailureMode> parse_failure_mode(std::string_view text) {
  for (std::size_t i = 0; i < kModeNames.size(); ++i) {
    if (kModeNames[i] == text) return static_cast<FailureMode>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Axis axis) { return kAxisNames[static_cast<std::size_t>(axis)]; }

std::optional<Axis> parse_axis(std::string_view text) {
  for (std::size_t i = 0; i < kAxisNames.size(); ++i) {
    if (kAxisNames[i] == text) return static_cast<Axis>(i);
  }
  return std::nullopt;
}

std::string_view to_string(RotationAxis axis) { return kRotationAxisNames[static_cast<std::size_t>(axis)]; }

std::optional<RotationAxis> parse_rotation_axis(std::string_view text) {
  for (std::size_t i = 0; i < kRotationAxisNames.size(); ++i) {
    if (kRotationAxisNames[i] == text) return static_cast<RotationAxis>(i);
  }
  return std::nullopt;
}

PerturbedDemo perturb_no_grasp(const Trajectory& demo, int keyframe) {
  require_grasp_keyframe(demo, keyframe);
  PerturbedDemo out{demo, {}};
  out.events.suppressed_gripper_keyframes.insert(demo.keyframes[keyframe].index);
  return out;
}

PerturbedDemo perturb_slip(const Trajectory& demo, int keyframe, double release_fraction) {
  require_grasp_keyframe(demo, keyframe);
  if (keyframe + 1 >= static_cast<int>(demo.keyframes.size())) {
    throw Error(ErrorCode::NoFollowingSegment,
                "keyframe " + std::to_string(keyframe) + " is the last keyframe; nothing to slip during");
  }
  PerturbedDemo out{demo, {}};
  out.events.add_timed_release(keyframe, release_fraction);
  return out;
}

Trajectory perturb_translation(const Trajectory& demo, int keyframe, Axis axis, double offset_m) {
  check_keyframe(demo, keyframe);
  if (offset_m == 0.0) throw Error(ErrorCode::ZeroOffset, "translation offset must be non-zero");
  if (!std::isfinite(offset_m)) throw Error(ErrorCode::InvalidArgument, "translation offset must be finite");
  Trajectory out = demo;
  Keyframe& kf = out.keyframes[keyframe];
  kf.pose.position += axis_vector(axis) * offset_m;
  kf.anchor.reset();
  return out;
}

Trajectory perturb_rotation(const Trajectory& demo, int keyframe, RotationAxis axis, double angle_rad) {
  check_keyframe(demo, keyframe);
  if (angle_rad == 0.0) throw Error(ErrorCode::ZeroAngle, "rotation angle must be non-zero");
  if (!std::isfinite(angle_rad)) throw Error(ErrorCode::InvalidArgument, "rotation angle must be finite");
  Trajectory out = demo;
  Keyframe& kf = out.keyframes[keyframe];
  kf.pose.orientation = kf.pose.orientation * Quat::from_axis_angle(axis_vector(axis), angle_rad);
  kf.anchor.reset();
  return out;
}

Trajectory perturb_no_rotation(const Trajectory& demo, int keyframe, RotationAxis axis) {
  check_keyframe(demo, keyframe);
  if (keyframe == 0) throw Error(ErrorCode::FirstKeyframe, "no_rotation needs a preceding keyframe");
  const Vec3 a = axis_vector(axis);
  const Quat previous_twist = swing_twist(demo.keyframes[keyframe - 1].pose.orientation, a).twist;
  Trajectory out = demo;
  Keyframe& kf = out.keyframes[keyframe];
  kf.pose.orientation = swing_twist(kf.pose.orientation, a).swing * previous_twist;
  kf.anchor.reset();
  return out;
}

Trajectory perturb_wrong_action(const Trajectory& demo, int group_i, int group_j, const TaskSpec& task) {
  const auto& groups = task.ordered_groups;
  if (groups.size() < 2) {
    throw Error(ErrorCode::UnorderedTask, "task '" + task.name + "' has fewer than two ordered groups");
  }
  if (group_i < 0 || group_j < 0 || group_i >= static_cast<int>(groups.size()) ||
      group_j >= static_cast<int>(groups.size()) || group_i >= group_j) {
    throw Error(ErrorCode::InvalidArgument, "wrong_action needs group indices i < j within the task's groups");
  }
  const SubtaskRange gi = groups[group_i];
  const SubtaskRange gj = groups[group_j];
  if (gi.last >= gj.first) {
    throw Error(ErrorCode::GroupsOverlap, "ordered groups " + std::to_string(group_i) + " and " +
                                              std::to_string(group_j) + " overlap");
  }
  if (gj.last + 1 >= static_cast<int>(demo.keyframes.size())) {
    throw Error(ErrorCode::InvalidArgument, "ordered group exceeds the trajectory");
  }
  // Sub-task s ends at keyframe s + 1, so a sub-task range [a, b] owns
  // keyframes [a + 1, b + 1] and texts [a, b].
  std::vector<int> order;
  auto append = [&](int lo, int hi) {
    for (int k = lo; k <= hi; ++k) order.push_back(k);
  };
  const int last = static_cast<int>(demo.keyframes.size()) - 1;
  append(0, gi.first);
  append(gj.first + 1, gj.last + 1);
  append(gi.last + 2, gj.first);
  append(gi.first + 1, gi.last + 1);
  append(gj.last + 2, last);

  Trajectory out;
  for (std::size_t n = 0; n < order.size(); ++n) {
    out.keyframes.push_back(demo.keyframes[order[n]]);
    if (n > 0) out.subtask_texts.push_back(demo.subtask_texts[order[n] - 1]);
  }
  renumber(out);
  return out;
}

Trajectory perturb_wrong_object(const Trajectory& demo, const World& world, const std::string& target_id,
                                const std::string& distractor_id, const TaskSpec& task) {
  auto it = task.distractor_map.find(target_id);
  if (it == task.distractor_map.end() ||
      std::find(it->second.begin(), it->second.end(), distractor_id) == it->second.end()) {
    throw Error(ErrorCode::InvalidDistractor,
                "'" + distractor_id + "' is not a distractor for '" + target_id + "' in " + task.name);
  }
  const Pose& distractor = world.at(distractor_id).pose;
  Trajectory out = demo;
  bool any = false;
  for (auto& kf : out.keyframes) {
    if (!kf.anchor || kf.anchor->object_id != target_id) continue;
    kf.pose = compose_pose(distractor, kf.anchor->relative);
    kf.anchor->object_id = distractor_id;
    any = true;
  }
  if (!any) {
    throw Error(ErrorCode::NoAnchoredKeyframes, "no keyframe is anchored to '" + target_id + "'");
  }
  return out;
}

PerturbedDemo apply_perturbation(const Demo& demo, const TaskSpec& task, const PerturbationConfig& config) {
  const Trajectory& t = demo.trajectory;
  return std::visit(
      [&](const auto& p) -> PerturbedDemo {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, NoGraspParams>) {
          return perturb_no_grasp(t, p.keyframe);
        } else if constexpr (std::is_same_v<P, SlipParams>) {
          return perturb_slip(t, p.keyframe, p.release_fraction);
        } else if constexpr (std::is_same_v<P, TranslationParams>) {
          return {perturb_translation(t, p.keyframe, p.axis, p.offset_m), {}};
        } else if constexpr (std::is_same_v<P, RotationParams>) {
          return {perturb_rotation(t, p.keyframe, p.axis, p.angle_rad), {}};
        } else if constexpr (std::is_same_v<P, NoRotationParams>) {
          return {perturb_no_rotation(t, p.keyframe, p.axis), {}};
        } else if constexpr (std::is_same_v<P, WrongActionParams>) {
          return {perturb_wrong_action(t, p.group_i, p.group_j, task), {}};
        } else {
          return {perturb_wrong_object(t, demo.world, p.target_id, p.distractor_id, task), {}};
        }
      },
      config.params);
}

int perturbed_subtask(const Trajectory& demo, const TaskSpec& task, const PerturbationConfig& config) {
  return std::visit(
      [&](const auto& p) -> int {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, SlipParams>) {
          return p.keyframe;
        } else if constexpr (std::is_same_v<P, WrongActionParams>) {
          if (p.group_i < 0 || p.group_i >= static_cast<int>(task.ordered_groups.size())) {
            throw Error(ErrorCode::InvalidArgument, "wrong_action group index out of range");
          }
          return task.ordered_groups[p.group_i].first;
        } else if constexpr (std::is_same_v<P, WrongObjectParams>) {
          for (const auto& kf : demo.keyframes) {
            if (kf.anchor && kf.anchor->object_id == p.target_id) return std::max(0, kf.index - 1);
          }
          throw Error(ErrorCode::NoAnchoredKeyframes, "no keyframe is anchored to '" + p.target_id + "'");
        } else {
          return std::max(0, p.keyframe - 1);
        }
      },
      config.params);
}

}  // namespace failgen
