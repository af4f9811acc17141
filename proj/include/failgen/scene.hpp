// SPDX-License-Identifier: Apache-2.0
//
// Scene and trajectory data model shared by the executor, the checkers, the
// task library and the renderer.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "failgen/geometry.hpp"

namespace failgen {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

struct Box {
  Vec3 half_extents;
  bool operator==(const Box&) const = default;
};
// Axis along the object's local Z.
struct Cylinder {
  double radius = 0.0;
  double height = 0.0;
  bool operator==(const Cylinder&) const = default;
};
struct Sphere {
  double radius = 0.0;
  bool operator==(const Sphere&) const = default;
};
using Shape = std::variant<Box, Cylinder, Sphere>;

// Joint axis is expressed in the world frame. Moving the joint translates the
// object along the axis; `value` is the current displacement from the closed
// configuration.
struct PrismaticJoint {
  Vec3 axis;
  double lower = 0.0;
  double upper = 0.0;
  double value = 0.0;
  bool operator==(const PrismaticJoint&) const = default;
};

struct SceneObject {
  std::string id;
  std::string name;
  Shape shape;
  Pose pose;
  Rgb color;
  bool graspable = false;
  std::optional<Pose> grasp_pose;  // object frame; present iff graspable
  std::optional<PrismaticJoint> joint;
  // Open-top container: local z of the cavity floor. Things dropped inside the
  // footprint rest on the floor rather than the top face.
  std::optional<double> cavity_floor;

  bool operator==(const SceneObject&) const = default;
};

enum class Aperture { Open, Closed };

struct Gripper {
  Pose pose;
  Aperture aperture = Aperture::Open;
  bool operator==(const Gripper&) const = default;
};

struct Attachment {
  std::string object_id;
  Pose offset;  // object pose expressed in the gripper frame at grasp time
  bool operator==(const Attachment&) const = default;
};

class World {
 public:
  World() = default;

  // Objects are kept sorted by id; inserting a duplicate id throws.
  void add_object(SceneObject object);
  const std::vector<SceneObject>& objects() const { return objects_; }

  const SceneObject* find(const std::string& id) const;
  SceneObject* find(const std::string& id);
  // Throws Error(UnknownObjectId).
  const SceneObject& at(const std::string& id) const;
  SceneObject& at(const std::string& id);

  Gripper gripper;
  std::optional<Attachment> attachment;
  double table_height = 0.0;

  // Checks the documented invariants (joint ranges, grasp poses, attachment
  // target). Throws Error(InvalidArgument) describing the first violation.
  void validate() const;

  bool operator==(const World&) const = default;

 private:
  std::vector<SceneObject> objects_;
};

// World-frame axis-aligned bounds of an object's primitive.
Aabb world_aabb(const SceneObject& object);

// Height of the surface an object offers to things resting on it: the cavity
// floor for containers, else the top of the bounding box.
double support_height(const SceneObject& object);

// Whether the vertical line through (x, y) passes through the object's top
// footprint, grown by `margin`.
bool footprint_contains(const SceneObject& object, double x, double y, double margin);

// World pose at which the gripper TCP grasps the object.
std::optional<Pose> world_grasp_pose(const SceneObject& object);

enum class GripperCommand { Open, Close, Hold };

struct Anchor {
  std::string object_id;
  Pose relative;  // keyframe pose in the anchor object's frame
  bool operator==(const Anchor&) const = default;
};

struct Keyframe {
  int index = 0;
  Pose pose;  // gripper TCP in the world frame
  GripperCommand gripper_command = GripperCommand::Hold;
  std::optional<Anchor> anchor;
  bool operator==(const Keyframe&) const = default;
};

struct Trajectory {
  std::vector<Keyframe> keyframes;
  // One description per consecutive keyframe pair.
  std::vector<std::string> subtask_texts;

  std::size_t subtask_count() const {
    return keyframes.empty() ? 0 : keyframes.size() - 1;
  }
  // Throws Error(InvalidArgument) when an invariant does not hold.
  void validate() const;

  bool operator==(const Trajectory&) const = default;
};

const char* to_string(GripperCommand command);
const char* to_string(Aperture aperture);

}  // namespace failgen
