// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "failgen/checkers.hpp"
#include "failgen/error.hpp"
#include "failgen/executor.hpp"
#include "failgen/tasks.hpp"

using namespace failgen;

TEST(Registry, ListsSixTasksSorted) {
  const auto& names = task_names();
  const std::vector<std::string> expected = {"open_drawer", "pick_red_cup", "pick_up_cube",
                                             "press_button", "put_cube_in_drawer", "stack_cubes"};
  EXPECT_EQ(names, expected);
  EXPECT_TRUE(std::is_sorted(names.begin(), names.end()));
}

TEST(Registry, UnknownTask) {
  try {
    build_task("juggle");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownTask);
  }
}

TEST(Tasks, NominalDemosSucceedForTwentySeeds) {
  for (const auto& name : task_names()) {
    const TaskSpec& task = build_task(name);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Demo demo = nominal_demo(task, seed);
      demo.world.validate();
      demo.trajectory.validate();
      const auto trace = execute(demo.world, demo.trajectory, {}, {.record_steps = false});
      EXPECT_TRUE(eval_predicate(trace.terminal, task.success)) << name << " seed " << seed;
      EXPECT_EQ(first_failing_subtask(trace, task.checkpoints), std::nullopt) << name << " seed " << seed;
    }
  }
}

TEST(Tasks, SceneBuildIsDeterministicPerSeed) {
  for (const auto& name : task_names()) {
    const TaskSpec& task = build_task(name);
    EXPECT_EQ(task.build_scene(3), task.build_scene(3));
    EXPECT_EQ(nominal_demo(task, 5).trajectory, nominal_demo(task, 5).trajectory);
  }
  const TaskSpec& pick = build_task("pick_up_cube");
  EXPECT_NE(pick.build_scene(0), pick.build_scene(1));
}

TEST(Tasks, StructuralInvariants) {
  for (const auto& name : task_names()) {
    const TaskSpec& task = build_task(name);
    const Demo demo = nominal_demo(task, 0);
    const auto n = demo.trajectory.subtask_count();
    EXPECT_EQ(task.checkpoints.size(), n) << name;
    EXPECT_EQ(demo.trajectory.subtask_texts.size(), n) << name;
    for (const auto& text : demo.trajectory.subtask_texts) EXPECT_FALSE(text.empty());
    for (const auto& [target, distractors] : task.distractor_map) {
      EXPECT_TRUE(demo.world.at(target).graspable || demo.world.find(target));
      for (const auto& d : distractors) {
        EXPECT_NE(d, target);
        EXPECT_NE(demo.world.find(d), nullptr) << name << ": " << d;
      }
    }
    int prev_last = -1;
    for (const auto& g : task.ordered_groups) {
      EXPECT_LE(g.first, g.last);
      EXPECT_GT(g.first, prev_last) << name << ": groups must be disjoint and ordered";
      EXPECT_LT(g.last, static_cast<int>(n));
      prev_last = g.last;
    }
  }
}

TEST(Tasks, DistractorsAndGroupsForKnownTasks) {
  EXPECT_EQ(build_task("pick_red_cup").distractor_map.at("cup_red"),
            (std::vector<std::string>{"cup_green", "cup_blue"}));
  EXPECT_EQ(build_task("press_button").ordered_groups.size(), 1U);
  EXPECT_EQ(build_task("put_cube_in_drawer").ordered_groups.size(), 2U);
  EXPECT_EQ(build_task("stack_cubes").ordered_groups.size(), 2U);
}

TEST(Tasks, PickUpCubeHasOneCloseKeyframe) {
  const Demo demo = nominal_demo(build_task("pick_up_cube"), 0);
  const auto closes = std::count_if(demo.trajectory.keyframes.begin(), demo.trajectory.keyframes.end(),
                                    [](const Keyframe& k) { return k.gripper_command == GripperCommand::Close; });
  EXPECT_EQ(closes, 1);
}

TEST(Tasks, AnchorsPointAtSceneObjects) {
  for (const auto& name : task_names()) {
    const Demo demo = nominal_demo(build_task(name), 2);
    for (const auto& kf : demo.trajectory.keyframes) {
      if (!kf.anchor) continue;
      const SceneObject& o = demo.world.at(kf.anchor->object_id);
      const Pose rebuilt = compose_pose(o.pose, kf.anchor->relative);
      EXPECT_NEAR((rebuilt.position - kf.pose.position).norm(), 0.0, 1e-9) << name << " kf " << kf.index;
      EXPECT_LE(geodesic_angle(rebuilt.orientation, kf.pose.orientation), 1e-9);
    }
  }
}

TEST(Tasks, StackDemoEndsWithRedOnGreen) {
  const TaskSpec& task = build_task("stack_cubes");
  const Demo demo = nominal_demo(task, 4);
  const auto trace = execute(demo.world, demo.trajectory, {});
  EXPECT_TRUE(eval_predicate(trace.terminal, on_top("cube_red", "cube_green")));
}

TEST(Tasks, PickUpCubeShape) {
  const TaskSpec& task = build_task("pick_up_cube");
  const Demo demo = nominal_demo(task, 7);
  ASSERT_EQ(demo.trajectory.keyframes.size(), 4U);
  EXPECT_EQ(demo.trajectory.keyframes[2].gripper_command, GripperCommand::Close);
  EXPECT_EQ(nominal_demo(task, 7).trajectory, demo.trajectory);
  const auto trace = execute(demo.world, demo.trajectory, {});
  ASSERT_TRUE(trace.terminal.attachment.has_value());
  EXPECT_GE(trace.terminal.at("cube_red").pose.position.z, 0.15);
}

TEST(Tasks, GripperFrames) {
  EXPECT_NEAR((gripper_down().rotate({0, 0, -1}) - Vec3{0, 0, -1}).norm(), 0.0, 1e-12);
  EXPECT_NEAR((gripper_front().rotate({0, 0, -1}) - Vec3{1, 0, 0}).norm(), 0.0, 1e-12);
}

TEST(Tasks, SelfCheckPassesForAllTasks) {
  for (const auto& name : task_names()) EXPECT_NO_THROW(self_check(build_task(name), 11));
}
