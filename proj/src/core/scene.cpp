// SPDX-License-Identifier: Apache-2.0
#include "failgen/scene.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "failgen/error.hpp"

namespace failgen {

void World::add_object(SceneObject object) {
  auto it = std::lower_bound(objects_.begin(), objects_.end(), object.id,
                             [](const SceneObject& o, const std::string& id) { return o.id < id; });
  if (it != objects_.end() && it->id == object.id) {
    throw Error(ErrorCode::InvalidArgument, "duplicate object id '" + object.id + "'");
  }
  objects_.insert(it, std::move(object));
}

const SceneObject* World::find(const std::string& id) const {
  auto it = std::lower_bound(objects_.begin(), objects_.end(), id,
                             [](const SceneObject& o, const std::string& key) { return o.id < key; });
  return (it != objects_.end() && it->id == id) ? &*it : nullptr;
}

SceneObject* World::find(const std::string& id) {
  return const_cast<SceneObject*>(std::as_const(*this).find(id));
}

const SceneObject& World::at(const std::string& id) const {
  if (const SceneObject* o = find(id)) return *o;
  throw Error(ErrorCode::UnknownObjectId, "unknown object id '" + id + "'");
}

SceneObject& World::at(const std::string& id) {
  return const_cast<SceneObject&>(std::as_const(*this).at(id));
}

void World::validate() const {
  for (const auto& o : objects_) {
    if (o.graspable != o.grasp_pose.has_value()) {
      throw Error(ErrorCode::InvalidArgument, "object '" + o.id + "': grasp_pose present iff graspable");
    }
    if (o.joint) {
      const auto& j = *o.joint;
      if (j.lower > j.upper || j.value < j.lower || j.value > j.upper) {
        throw Error(ErrorCode::InvalidArgument, "object '" + o.id + "': joint value outside range");
      }
      if (std::abs(j.axis.norm() - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidArgument, "object '" + o.id + "': joint axis not unit length");
      }
    }
  }
  if (attachment) {
    const SceneObject* o = find(attachment->object_id);
    if (o == nullptr || !o->graspable) {
      throw Error(ErrorCode::InvalidArgument,
                  "attachment refers to missing or non-graspable object '" + attachment->object_id + "'");
    }
  }
}

Aabb world_aabb(const SceneObject& object) {
  const Mat3 r = object.pose.orientation.matrix();
  Vec3 ext;
  if (const auto* box = std::get_if<Box>(&object.shape)) {
    const Vec3& h = box->half_extents;
    ext = {std::abs(r[0][0]) * h.x + std::abs(r[0][1]) * h.y + std::abs(r[0][2]) * h.z,
           std::abs(r[1][0]) * h.x + std::abs(r[1][1]) * h.y + std::abs(r[1][2]) * h.z,
           std::abs(r[2][0]) * h.x + std::abs(r[2][1]) * h.y + std::abs(r[2][2]) * h.z};
  } else if (const auto* cyl = std::get_if<Cylinder>(&object.shape)) {
    const Vec3 a{r[0][2], r[1][2], r[2][2]};
    auto radial = [&](double ai) { return cyl->radius * std::sqrt(std::max(0.0, 1.0 - ai * ai)); };
    ext = {std::abs(a.x) * cyl->height / 2 + radial(a.x), std::abs(a.y) * cyl->height / 2 + radial(a.y),
           std::abs(a.z) * cyl->height / 2 + radial(a.z)};
  } else {
    const double rad = std::get<Sphere>(object.shape).radius;
    ext = {rad, rad, rad};
  }
  return {object.pose.position - ext, object.pose.position + ext};
}

double support_height(const SceneObject& object) {
  if (object.cavity_floor) return object.pose.transform_point({0.0, 0.0, *object.cavity_floor}).z;
  return world_aabb(object).max.z;
}

bool footprint_contains(const SceneObject& object, double x, double y, double margin) {
  const Vec3 up = object.pose.orientation.rotate(kUnitZ);
  if (std::abs(up.z) < 1.0 - 1e-9) {
    // Tilted primitive: fall back to its bounding box.
    const Aabb box = world_aabb(object);
    return x >= box.min.x - margin && x <= box.max.x + margin && y >= box.min.y - margin &&
           y <= box.max.y + margin;
  }
  const Vec3 local =
      inverse_pose(object.pose).transform_point({x, y, object.pose.position.z});
  if (const auto* box = std::get_if<Box>(&object.shape)) {
    return std::abs(local.x) <= box->half_extents.x + margin &&
           std::abs(local.y) <= box->half_extents.y + margin;
  }
  const double radius = std::holds_alternative<Cylinder>(object.shape)
                            ? std::get<Cylinder>(object.shape).radius
                            : std::get<Sphere>(object.shape).radius;
  return std::hypot(local.x, local.y) <= radius + margin;
}

std::optional<Pose> world_grasp_pose(const SceneObject& object) {
  if (!object.graspable || !object.grasp_pose) return std::nullopt;
  return compose_pose(object.pose, *object.grasp_pose);
}

void Trajectory::validate() const {
  if (keyframes.size() < 2) {
    throw Error(ErrorCode::TrajectoryTooShort, "trajectory needs at least 2 keyframes");
  }
  if (subtask_texts.size() != keyframes.size() - 1) {
    throw Error(ErrorCode::InvalidArgument, "expected one sub-task text per keyframe pair");
  }
  if (keyframes.front().gripper_command == GripperCommand::Close) {
    throw Error(ErrorCode::InvalidArgument, "first keyframe must command Open or Hold");
  }
  for (std::size_t i = 1; i < keyframes.size(); ++i) {
    if (keyframes[i].index <= keyframes[i - 1].index) {
      throw Error(ErrorCode::InvalidArgument, "keyframe indices must be strictly increasing");
    }
  }
}

const char* to_string(GripperCommand command) {
  switch (command) {
    case GripperCommand::Open: return "open";
    case GripperCommand::Close: return "close";
    case GripperCommand::Hold: return "hold";
  }
  return "hold";
}

const char* to_string(Aperture aperture) {
  return aperture == Aperture::Open ? "open" : "closed";
}

}  // namespace failgen
