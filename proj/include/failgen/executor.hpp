// SPDX-License-Identifier: Apache-2.0
//
// Deterministic kinematic execution of keyframe trajectories.
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "failgen/scene.hpp"

namespace failgen {

inline constexpr double kAttachPositionTolerance = 0.02;  // m
inline constexpr double kAttachAngleTolerance = 0.35;     // rad
inline constexpr int kDefaultStepsPerSegment = 20;

struct TimedRelease {
  int segment = 0;
  double release_fraction = 0.5;  // strictly inside (0, 1)
  bool operator==(const TimedRelease&) const = default;
};

struct PerturbationEvents {
  std::set<int> suppressed_gripper_keyframes;
  std::vector<TimedRelease> timed_releases;

  // Throws Error(InvalidArgument) for a fraction outside (0, 1).
  void add_timed_release(int segment, double release_fraction);
  void validate() const;
  bool empty() const { return suppressed_gripper_keyframes.empty() && timed_releases.empty(); }
  bool operator==(const PerturbationEvents&) const = default;
};

struct StepSnapshot {
  int step = 0;      // global step counter, 0 is the first keyframe arrival
  int segment = -1;  // -1 for the initial keyframe
  double fraction = 0.0;
  World world;
  bool operator==(const StepSnapshot&) const = default;
};

struct ExecutionTrace {
  std::vector<StepSnapshot> steps;
  std::vector<World> keyframe_snapshots;  // one per keyframe arrival
  World terminal;
  bool operator==(const ExecutionTrace&) const = default;
};

struct ExecuteOptions {
  int steps_per_segment = kDefaultStepsPerSegment;
  // Per-step snapshots dominate trace memory; sweeps turn them off.
  bool record_steps = true;
};

ExecutionTrace execute(World world, const Trajectory& trajectory, const PerturbationEvents& events,
                       const ExecuteOptions& options = {});

struct AttachResult {
  std::optional<std::string> object_id;  // nullopt: NoTarget
  bool attached() const { return object_id.has_value(); }
};

// Attaches the graspable object whose world grasp pose lies within the attach
// tolerances of `tcp`; nearest by position wins. Sets world.attachment.
AttachResult try_attach(World& world, const Pose& tcp);

// Drops the object vertically onto the highest support surface strictly below
// it and returns the new pose.
Pose settle(World& world, const std::string& object_id);

}  // namespace failgen
