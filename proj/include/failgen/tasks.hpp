// SPDX-License-Identifier: Apache-2.0
//
// Built-in desk-scale manipulation tasks: scene builders, nominal keyframe
// demonstrations, success predicates and checkpoint plans.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "failgen/checkers.hpp"
#include "failgen/scene.hpp"

namespace failgen {

// Inclusive range of sub-task indices.
struct SubtaskRange {
  int first = 0;
  int last = 0;
  bool operator==(const SubtaskRange&) const = default;
};

struct TaskSpec {
  std::string name;
  std::string language_goal;
  std::function<World(std::uint64_t seed)> build_scene;
  std::function<Trajectory(const World&)> nominal_demo;
  Predicate success;  // evaluated on the terminal world
  CheckpointPlan checkpoints;
  std::map<std::string, std::vector<std::string>> distractor_map;
  std::vector<SubtaskRange> ordered_groups;
};

// Sorted registry names.
const std::vector<std::string>& task_names();

// Throws Error(UnknownTask).
const TaskSpec& build_task(std::string_view name);

struct Demo {
  World world;
  Trajectory trajectory;
};

Demo nominal_demo(const TaskSpec& task, std::uint64_t seed);

// Runs the nominal demo for `seed` and checks the success predicate and every
// checkpoint. Throws Error(Internal) describing the first failure.
void self_check(const TaskSpec& task, std::uint64_t seed);

// Gripper orientations used by the demos: approach along -Z (top-down) and
// along +X (front-on).
Quat gripper_down();
Quat gripper_front();

}  // namespace failgen
