// SPDX-License-Identifier: Apache-2.0
#include "failgen/tasks.hpp"

#include <algorithm>
#include <random>

#include "failgen/error.hpp"
#include "failgen/executor.hpp"

namespace failgen {

namespace {

// Placement sampler. std::mt19937_64 output is fixed by the standard; the
// distribution is done by hand so scenes are identical across toolchains.
class PlacementRng {
 public:
  PlacementRng(std::string_view task, std::uint64_t seed) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : task) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    engine_.seed(h ^ (seed * 0x9e3779b97f4a7c15ULL));
  }

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

 private:
  std::mt19937_64 engine_;
};

const Vec3 kHome{0.30, 0.0, 0.45};
constexpr double kCubeHalf = 0.025;
constexpr double kPlaceClearance = 0.005;

Aabb above_height(double z) { return {{-10.0, -10.0, z}, {10.0, 10.0, 10.0}}; }

Pose at(const Vec3& p, const Quat& q = Quat{}) { return {p, q}; }

SceneObject cube(std::string id, std::string name, Vec3 position, Rgb color, Quat orientation = {}) {
  SceneObject o;
  o.id = std::move(id);
  o.name = std::move(name);
  o.shape = Box{{kCubeHalf, kCubeHalf, kCubeHalf}};
  o.pose = {position, orientation};
  o.color = color;
  o.graspable = true;
  o.grasp_pose = Pose::identity();
  return o;
}

class DemoBuilder {
 public:
  explicit DemoBuilder(const World& world) : world_(world) {}

  DemoBuilder& add(const Pose& pose, GripperCommand cmd, const std::string& anchor = {}) {
    Keyframe kf;
    kf.index = static_cast<int>(traj_.keyframes.size());
    kf.pose = pose;
    kf.gripper_command = cmd;
    if (!anchor.empty()) {
      kf.anchor = Anchor{anchor, compose_pose(inverse_pose(world_.at(anchor).pose), pose)};
    }
    traj_.keyframes.push_back(std::move(kf));
    return *this;
  }

  Trajectory build(std::vector<std::string> texts) {
    traj_.subtask_texts = std::move(texts);
    traj_.validate();
    return std::move(traj_);
  }

 private:
  const World& world_;
  Trajectory traj_;
};

World base_world() {
  World w;
  w.gripper.pose = at(kHome);
  w.gripper.aperture = Aperture::Open;
  return w;
}

// ---------------------------------------------------------------- pick_up_cube

TaskSpec make_pick_up_cube() {
  TaskSpec t;
  t.name = "pick_up_cube";
  t.language_goal = "pick up the red cube";
  t.build_scene = [](std::uint64_t seed) {
    PlacementRng rng("pick_up_cube", seed);
    World w = base_world();
    w.add_object(cube("cube_red", "red cube", {rng.uniform(0.40, 0.60), rng.uniform(-0.15, 0.15), kCubeHalf},
                      {220, 40, 40}));
    return w;
  };
  t.nominal_demo = [](const World& w) {
    const Vec3 c = w.at("cube_red").pose.position;
    return DemoBuilder(w)
        .add(at(kHome), GripperCommand::Open)
        .add(at(c + Vec3{0, 0, 0.10}), GripperCommand::Open)
        .add(at(c), GripperCommand::Close, "cube_red")
        .add(at(c + Vec3{0, 0, 0.20}), GripperCommand::Hold, "cube_red")
        .build({"moving the gripper above the red cube", "closing the gripper to grasp the red cube",
                "lifting the red cube"});
  };
  t.success = all_of({grasped("cube_red"), in_region("cube_red", above_height(0.15))});
  t.checkpoints = {{always(), grasped("cube_red"), t.success}};
  return t;
}

// ---------------------------------------------------------------- stack_cubes

const Quat kStackYaw = Quat::from_axis_angle(kUnitZ, kPi / 4.0);

TaskSpec make_stack_cubes() {
  TaskSpec t;
  t.name = "stack_cubes";
  t.language_goal = "stack the red cube on top of the green cube";
  t.build_scene = [](std::uint64_t seed) {
    PlacementRng rng("stack_cubes", seed);
    World w = base_world();
    w.add_object(cube("cube_red", "red cube", {rng.uniform(0.40, 0.50), rng.uniform(0.10, 0.20), kCubeHalf},
                      {220, 40, 40}));
    w.add_object(cube("cube_green", "green cube",
                      {rng.uniform(0.50, 0.60), rng.uniform(-0.10, 0.00), kCubeHalf}, {40, 180, 60},
                      kStackYaw));
    w.add_object(cube("cube_blue", "blue cube",
                      {rng.uniform(0.35, 0.45), rng.uniform(-0.25, -0.15), kCubeHalf}, {50, 80, 220}));
    return w;
  };
  t.nominal_demo = [](const World& w) {
    const Vec3 a = w.at("cube_red").pose.position;
    const Pose& base = w.at("cube_green").pose;
    const Vec3 b = base.position;
    const Vec3 place = b + Vec3{0, 0, 2 * kCubeHalf + kPlaceClearance};
    return DemoBuilder(w)
        .add(at(kHome), GripperCommand::Open)
        .add(at(a + Vec3{0, 0, 0.10}), GripperCommand::Open)
        .add(at(a), GripperCommand::Close, "cube_red")
        .add(at(a + Vec3{0, 0, 0.15}), GripperCommand::Hold, "cube_red")
        .add(at(b + Vec3{0, 0, 0.15}), GripperCommand::Hold)
        .add(at(place, base.orientation), GripperCommand::Open, "cube_green")
        .add(at(b + Vec3{0, 0, 0.20}, base.orientation), GripperCommand::Hold)
        .build({"moving the gripper above the red cube", "closing the gripper to grasp the red cube",
                "lifting the red cube", "moving the red cube above the green cube",
                "placing the red cube on the green cube and opening the gripper",
                "retracting the gripper"});
  };
  t.success = all_of({on_top("cube_red", "cube_green"), orientation_within("cube_red", kStackYaw, 0.26)});
  t.checkpoints = {{always(), grasped("cube_red"),
                    all_of({grasped("cube_red"), in_region("cube_red", above_height(0.10))}),
                    grasped("cube_red"), t.success, t.success}};
  t.distractor_map = {{"cube_red", {"cube_blue"}}, {"cube_green", {"cube_blue"}}};
  t.ordered_groups = {{1, 2}, {3, 4}};
  return t;
}

// ---------------------------------------------------------------- drawers

constexpr double kDrawerTravel = 0.20;
constexpr double kDrawerOpenThreshold = 0.12;
constexpr double kHandleStandoff = 0.16;  // TCP distance from drawer center

void add_cabinet(World& w, double x, double y) {
  SceneObject cabinet;
  cabinet.id = "cabinet";
  cabinet.name = "cabinet";
  cabinet.shape = Box{{0.15, 0.15, 0.10}};
  cabinet.pose = at({x, y, 0.10});
  cabinet.color = {140, 100, 60};
  w.add_object(std::move(cabinet));

  SceneObject drawer;
  drawer.id = "drawer";
  drawer.name = "drawer";
  drawer.shape = Box{{0.13, 0.13, 0.04}};
  drawer.pose = at({x, y, 0.10});
  drawer.color = {190, 150, 100};
  drawer.graspable = true;
  drawer.grasp_pose = Pose{{-kHandleStandoff, 0.0, 0.0}, gripper_front()};
  drawer.joint = PrismaticJoint{-kUnitX, 0.0, 0.22, 0.0};
  drawer.cavity_floor = -0.03;
  w.add_object(std::move(drawer));
}

DemoBuilder& open_drawer_keyframes(DemoBuilder& b, const World& w) {
  const Pose handle = *world_grasp_pose(w.at("drawer"));
  return b.add(at(kHome), GripperCommand::Open)
      .add(at(handle.position + Vec3{-0.10, 0, 0}), GripperCommand::Open)
      .add(handle, GripperCommand::Close, "drawer")
      .add(at(handle.position + Vec3{-kDrawerTravel, 0, 0}, handle.orientation), GripperCommand::Open, "drawer");
}

TaskSpec make_open_drawer() {
  TaskSpec t;
  t.name = "open_drawer";
  t.language_goal = "open the drawer";
  t.build_scene = [](std::uint64_t seed) {
    PlacementRng rng("open_drawer", seed);
    World w = base_world();
    const double x = rng.uniform(0.60, 0.66);
    const double y = rng.uniform(-0.05, 0.05);
    add_cabinet(w, x, y);
    return w;
  };
  t.nominal_demo = [](const World& w) {
    const Pose handle = *world_grasp_pose(w.at("drawer"));
    DemoBuilder b(w);
    open_drawer_keyframes(b, w).add(at(handle.position + Vec3{-0.30, 0, 0.10}, handle.orientation),
                                    GripperCommand::Hold);
    return b.build({"moving the gripper in front of the drawer handle",
                    "closing the gripper to grasp the drawer handle",
                    "pulling the drawer open and releasing the handle", "retracting the gripper"});
  };
  t.success = joint_at_least("drawer", kDrawerOpenThreshold);
  t.checkpoints = {{always(), grasped("drawer"), t.success, t.success}};
  return t;
}

TaskSpec make_put_cube_in_drawer() {
  TaskSpec t;
  t.name = "put_cube_in_drawer";
  t.language_goal = "open the drawer and put the yellow cube inside it";
  t.build_scene = [](std::uint64_t seed) {
    PlacementRng rng("put_cube_in_drawer", seed);
    World w = base_world();
    const double x = rng.uniform(0.60, 0.66);
    const double y = rng.uniform(-0.14, -0.10);
    add_cabinet(w, x, y);
    w.add_object(cube("cube_yellow", "yellow cube",
                      {rng.uniform(0.38, 0.46), rng.uniform(0.18, 0.26), kCubeHalf}, {230, 200, 40}));
    return w;
  };
  t.nominal_demo = [](const World& w) {
    const SceneObject& drawer = w.at("drawer");
    const Vec3 c = w.at("cube_yellow").pose.position;
    const Vec3 opened = drawer.pose.position + drawer.joint->axis * kDrawerTravel;
    const double floor_z = support_height(drawer);
    DemoBuilder b(w);
    open_drawer_keyframes(b, w)
        .add(at(c + Vec3{0, 0, 0.10}), GripperCommand::Open)
        .add(at(c), GripperCommand::Close, "cube_yellow")
        .add(at({opened.x, opened.y, 0.30}), GripperCommand::Hold)
        .add(at({opened.x, opened.y, floor_z + kCubeHalf + kPlaceClearance}), GripperCommand::Open, "drawer");
    return b.build({"moving the gripper in front of the drawer handle",
                    "closing the gripper to grasp the drawer handle",
                    "pulling the drawer open and releasing the handle",
                    "moving the gripper above the yellow cube", "closing the gripper to grasp the yellow cube",
                    "carrying the yellow cube over the open drawer",
                    "placing the yellow cube in the drawer and opening the gripper"});
  };
  const Predicate opened = joint_at_least("drawer", kDrawerOpenThreshold);
  t.success = all_of({on_top("cube_yellow", "drawer"), opened});
  t.checkpoints = {{always(), grasped("drawer"), opened, opened, grasped("cube_yellow"),
                    all_of({grasped("cube_yellow"), in_region("cube_yellow", above_height(0.20))}),
                    t.success}};
  t.ordered_groups = {{1, 2}, {3, 6}};
  return t;
}

// ---------------------------------------------------------------- press_button

constexpr double kButtonPush = 0.012;
constexpr double kButtonPressedThreshold = 0.01;

TaskSpec make_press_button() {
  TaskSpec t;
  t.name = "press_button";
  t.language_goal = "press the red button";
  t.build_scene = [](std::uint64_t seed) {
    PlacementRng rng("press_button", seed);
    World w = base_world();
    const double x = rng.uniform(0.62, 0.70);
    const double y = rng.uniform(-0.10, 0.10);

    SceneObject panel;
    panel.id = "panel";
    panel.name = "panel";
    panel.shape = Box{{0.02, 0.10, 0.15}};
    panel.pose = at({x, y, 0.15});
    panel.color = {120, 120, 130};
    w.add_object(std::move(panel));

    SceneObject button;
    button.id = "button";
    button.name = "red button";
    button.shape = Cylinder{0.02, 0.02};
    button.pose = at({x - 0.03, y, 0.20}, Quat::from_axis_angle(kUnitY, kPi / 2.0));
    button.color = {200, 30, 30};
    button.graspable = true;
    const Pose contact{{x - 0.04, y, 0.20}, gripper_front()};
    button.grasp_pose = compose_pose(inverse_pose(button.pose), contact);
    button.joint = PrismaticJoint{kUnitX, 0.0, 0.015, 0.0};
    w.add_object(std::move(button));
    return w;
  };
  t.nominal_demo = [](const World& w) {
    const Pose contact = *world_grasp_pose(w.at("button"));
    return DemoBuilder(w)
        .add(at(kHome), GripperCommand::Open)
        .add(at(contact.position + Vec3{-0.10, 0, 0}), GripperCommand::Open)
        .add(contact, GripperCommand::Close, "button")
        .add(at(contact.position + Vec3{kButtonPush, 0, 0}, contact.orientation), GripperCommand::Open, "button")
        .add(at(contact.position + Vec3{-0.15, 0, 0.05}, contact.orientation), GripperCommand::Hold)
        .build({"moving the gripper in front of the red button",
                "closing the gripper and touching the red button", "pushing the red button and releasing it",
                "retracting the gripper"});
  };
  t.success = joint_at_least("button", kButtonPressedThreshold);
  t.checkpoints = {{always(), grasped("button"), t.success, t.success}};
  t.ordered_groups = {{1, 2}};
  return t;
}

// ---------------------------------------------------------------- pick_red_cup

TaskSpec make_pick_red_cup() {
  TaskSpec t;
  t.name = "pick_red_cup";
  t.language_goal = "pick up the red cup";
  t.build_scene = [](std::uint64_t seed) {
    PlacementRng rng("pick_red_cup", seed);
    World w = base_world();
    auto cup = [&](std::string id, std::string name, double ylo, double yhi, Rgb color) {
      SceneObject o;
      o.id = std::move(id);
      o.name = std::move(name);
      o.shape = Cylinder{0.03, 0.10};
      o.pose = at({rng.uniform(0.45, 0.55), rng.uniform(ylo, yhi), 0.05});
      o.color = color;
      o.graspable = true;
      o.grasp_pose = at({0.0, 0.0, 0.02});
      w.add_object(std::move(o));
    };
    cup("cup_red", "red cup", -0.22, -0.12, {210, 30, 40});
    cup("cup_green", "green cup", -0.05, 0.05, {40, 170, 70});
    cup("cup_blue", "blue cup", 0.12, 0.22, {40, 70, 210});
    return w;
  };
  t.nominal_demo = [](const World& w) {
    const Pose grasp = *world_grasp_pose(w.at("cup_red"));
    return DemoBuilder(w)
        .add(at(kHome), GripperCommand::Open)
        .add(at(grasp.position + Vec3{0, 0, 0.10}), GripperCommand::Open)
        .add(grasp, GripperCommand::Close, "cup_red")
        .add(at(grasp.position + Vec3{0, 0, 0.20}), GripperCommand::Hold, "cup_red")
        .build({"moving the gripper above the red cup", "closing the gripper to grasp the red cup",
                "lifting the red cup"});
  };
  t.success = all_of({grasped("cup_red"), in_region("cup_red", above_height(0.15))});
  t.checkpoints = {{always(), grasped("cup_red"), t.success}};
  t.distractor_map = {{"cup_red", {"cup_green", "cup_blue"}}};
  return t;
}

struct Registry {
  std::vector<TaskSpec> tasks;
  std::vector<std::string> names;

  Registry() {
    tasks.push_back(make_open_drawer());
    tasks.push_back(make_pick_red_cup());
    tasks.push_back(make_pick_up_cube());
    tasks.push_back(make_press_button());
    tasks.push_back(make_put_cube_in_drawer());
    tasks.push_back(make_stack_cubes());
    std::sort(tasks.begin(), tasks.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    for (const auto& t : tasks) {
      self_check(t, 0);
      names.push_back(t.name);
    }
  }
};

const Registry& registry() {
  static const Registry r;
  return r;
}

}  // namespace

Quat gripper_down() { return Quat{}; }
Quat gripper_front() { return Quat::from_axis_angle(kUnitY, -kPi / 2.0); }

const std::vector<std::string>& task_names() { return registry().names; }

const TaskSpec& build_task(std::string_view name) {
  for (const auto& t : registry().tasks) {
    if (t.name == name) return t;
  }
  throw Error(ErrorCode::UnknownTask, "unknown task '" + std::string(name) + "'");
}

Demo nominal_demo(const TaskSpec& task, std::uint64_t seed) {
  Demo d{task.build_scene(seed), {}};
  d.trajectory = task.nominal_demo(d.world);
  return d;
}

void self_check(const TaskSpec& task, std::uint64_t seed) {
  const Demo demo = nominal_demo(task, seed);
  demo.world.validate();
  task.success.validate();
  if (task.checkpoints.size() != demo.trajectory.subtask_count()) {
    throw Error(ErrorCode::Internal, task.name + ": checkpoint plan does not cover every sub-task");
  }
  const ExecutionTrace trace = execute(demo.world, demo.trajectory, {}, {.record_steps = false});
  if (!eval_predicate(trace.terminal, task.success)) {
    throw Error(ErrorCode::Internal, task.name + ": nominal demo fails for seed " + std::to_string(seed));
  }
  if (auto failing = first_failing_subtask(trace, task.checkpoints)) {
    throw Error(ErrorCode::Internal, task.name + ": nominal demo fails checkpoint " + std::to_string(*failing));
  }
  for (const auto& [target, distractors] : task.distractor_map) {
    if (!demo.world.at(target).graspable) {
      throw Error(ErrorCode::Internal, task.name + ": distractor key '" + target + "' is not graspable");
    }
    for (const auto& d : distractors) demo.world.at(d);
  }
}

}  // namespace failgen
