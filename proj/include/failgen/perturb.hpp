// SPDX-License-Identifier: Apache-2.0
//
// The seven failure-mode perturbation operators.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "failgen/executor.hpp"
#include "failgen/scene.hpp"
#include "failgen/tasks.hpp"

namespace failgen {

enum class FailureMode { NoGrasp, Slip, Translation, Rotation, NoRotation, WrongAction, WrongObject };

inline constexpr std::array<FailureMode, 7> kAllFailureModes = {
    FailureMode::NoGrasp,    FailureMode::Slip,        FailureMode::Translation, FailureMode::Rotation,
    FailureMode::NoRotation, FailureMode::WrongAction, FailureMode::WrongObject};

std::string_view to_string(FailureMode mode);
std::optional<FailureMode> parse_failure_mode(std::string_view text);
std::string_view to_string(Axis axis);
std::optional<Axis> parse_axis(std::string_view text);
std::string_view to_string(RotationAxis axis);
std::optional<RotationAxis> parse_rotation_axis(std::string_view text);

struct NoGraspParams {
  int keyframe = 0;
  bool operator==(const NoGraspParams&) const = default;
};
struct SlipParams {
  int keyframe = 0;
  double release_fraction = 0.5;
  bool operator==(const SlipParams&) const = default;
};
struct TranslationParams {
  int keyframe = 0;
  Axis axis = Axis::X;
  double offset_m = 0.0;
  bool operator==(const TranslationParams&) const = default;
};
struct RotationParams {
  int keyframe = 0;
  RotationAxis axis = RotationAxis::Roll;
  double angle_rad = 0.0;
  bool operator==(const RotationParams&) const = default;
};
struct NoRotationParams {
  int keyframe = 0;
  RotationAxis axis = RotationAxis::Roll;
  bool operator==(const NoRotationParams&) const = default;
};
// Indices into TaskSpec::ordered_groups, group_i < group_j.
struct WrongActionParams {
  int group_i = 0;
  int group_j = 1;
  bool operator==(const WrongActionParams&) const = default;
};
struct WrongObjectParams {
  std::string target_id;
  std::string distractor_id;
  bool operator==(const WrongObjectParams&) const = default;
};

// Variant order matches FailureMode.
using PerturbationParams = std::variant<NoGraspParams, SlipParams, TranslationParams, RotationParams,
                                        NoRotationParams, WrongActionParams, WrongObjectParams>;

struct PerturbationConfig {
  PerturbationParams params;

  FailureMode mode() const { return static_cast<FailureMode>(params.index()); }
  bool operator==(const PerturbationConfig&) const = default;
};

struct PerturbedDemo {
  Trajectory trajectory;
  PerturbationEvents events;
};

PerturbedDemo perturb_no_grasp(const Trajectory& demo, int keyframe);
PerturbedDemo perturb_slip(const Trajectory& demo, int keyframe, double release_fraction);
Trajectory perturb_translation(const Trajectory& demo, int keyframe, Axis axis, double offset_m);
Trajectory perturb_rotation(const Trajectory& demo, int keyframe, RotationAxis axis, double angle_rad);
Trajectory perturb_no_rotation(const Trajectory& demo, int keyframe, RotationAxis axis);
Trajectory perturb_wrong_action(const Trajectory& demo, int group_i, int group_j, const TaskSpec& task);
// `world` is the scene the demo was authored against; it supplies the
// distractor pose.
Trajectory perturb_wrong_object(const Trajectory& demo, const World& world, const std::string& target_id,
                                const std::string& distractor_id, const TaskSpec& task);

PerturbedDemo apply_perturbation(const Demo& demo, const TaskSpec& task, const PerturbationConfig& config);

// Sub-task the perturbation is meant to break, computed on the nominal demo.
int perturbed_subtask(const Trajectory& demo, const TaskSpec& task, const PerturbationConfig& config);

}  // namespace failgen
