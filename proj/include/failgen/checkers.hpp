// SPDX-License-Identifier: Apache-2.0
//
// Declarative success predicates over world snapshots and per-sub-task
// checkpoint plans used to attribute a failure to its first failing sub-task.
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "failgen/executor.hpp"
#include "failgen/scene.hpp"

namespace failgen {

inline constexpr double kDefaultOnZTolerance = 0.01;
inline constexpr double kDefaultOnXyMargin = 0.0;

struct Predicate;

struct ObjectInRegion {
  std::string object_id;
  Aabb region;
};
struct ObjectGrasped {
  std::string object_id;
};
// Top's xy center inside base's footprint (grown by xy_margin) and top's
// bottom within z_tol of the base's support surface.
struct ObjectOn {
  std::string top_id;
  std::string base_id;
  double xy_margin = kDefaultOnXyMargin;
  double z_tol = kDefaultOnZTolerance;
};
struct JointAtLeast {
  std::string object_id;
  double threshold = 0.0;
};
struct JointAtMost {
  std::string object_id;
  double threshold = 0.0;
};
struct OrientationWithin {
  std::string object_id;
  Quat target;
  double tolerance = 0.0;
};
struct All {
  std::vector<Predicate> terms;  // empty conjunction is true
};

struct Predicate {
  std::variant<ObjectInRegion, ObjectGrasped, ObjectOn, JointAtLeast, JointAtMost,
               OrientationWithin, All>
      node;

  // Throws Error(InvalidArgument) for inverted regions or negative tolerances.
  void validate() const;
};

// Checkpoint for sub-task i is evaluated on the keyframe snapshot at the end
// of that sub-task (keyframe i + 1).
struct CheckpointPlan {
  std::vector<Predicate> checkpoints;
  std::size_t size() const { return checkpoints.size(); }
};

// Throws Error(UnknownObjectId).
bool eval_predicate(const World& snapshot, const Predicate& predicate);

// Smallest sub-task whose checkpoint is false, or nullopt if all pass.
// Throws Error(PlanMismatch) when the plan and trace lengths disagree.
std::optional<int> first_failing_subtask(const ExecutionTrace& trace, const CheckpointPlan& plan);

// Convenience builders.
Predicate in_region(std::string id, Aabb region);
Predicate grasped(std::string id);
Predicate on_top(std::string top, std::string base, double xy_margin = kDefaultOnXyMargin,
                 double z_tol = kDefaultOnZTolerance);
Predicate joint_at_least(std::string id, double threshold);
Predicate joint_at_most(std::string id, double threshold);
Predicate orientation_within(std::string id, Quat target, double tolerance);
Predicate all_of(std::vector<Predicate> terms);
Predicate always();

}  // namespace failgen
