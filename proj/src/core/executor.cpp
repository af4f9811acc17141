// SPDX-License-Identifier: Apache-2.0
#include "failgen/executor.hpp"

#include <algorithm>
#include <limits>

#include "failgen/error.hpp"

namespace failgen {

void PerturbationEvents::add_timed_release(int segment, double release_fraction) {
  if (!(release_fraction > 0.0 && release_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "release_fraction must lie strictly inside (0, 1)");
  }
  timed_releases.push_back({segment, release_fraction});
}

void PerturbationEvents::validate() const {
  for (const auto& r : timed_releases) {
    if (!(r.release_fraction > 0.0 && r.release_fraction < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "release_fraction must lie strictly inside (0, 1)");
    }
  }
}

AttachResult try_attach(World& world, const Pose& tcp) {
  const SceneObject* best = nullptr;
  double best_distance = std::numeric_limits<double>::infinity();
  for (const auto& object : world.objects()) {
    const auto grasp = world_grasp_pose(object);
    if (!grasp) continue;
    const double distance = (grasp->position - tcp.position).norm();
    if (distance > kAttachPositionTolerance) continue;
    if (geodesic_angle(grasp->orientation, tcp.orientation) > kAttachAngleTolerance) continue;
    if (distance < best_distance) {
      best = &object;
      best_distance = distance;
    }
  }
  if (best == nullptr) return {};
  world.attachment = Attachment{best->id, compose_pose(inverse_pose(tcp), best->pose)};
  return {best->id};
}

Pose settle(World& world, const std::string& object_id) {
  SceneObject& object = world.at(object_id);
  const double bottom = world_aabb(object).min.z;
  const double x = object.pose.position.x;
  const double y = object.pose.position.y;
  double support = world.table_height;
  for (const auto& other : world.objects()) {
    if (other.id == object_id) continue;
    if (!footprint_contains(other, x, y, 0.0)) continue;
    const double h = support_height(other);
    if (h <= bottom + 1e-9) support = std::max(support, h);
  }
  object.pose.position.z += support - bottom;
  return object.pose;
}

namespace {

void track_attachment(World& world) {
  if (!world.attachment) return;
  SceneObject& object = world.at(world.attachment->object_id);
  const Pose desired = compose_pose(world.gripper.pose, world.attachment->offset);
  if (object.joint) {
    PrismaticJoint& joint = *object.joint;
    const double delta = (desired.position - object.pose.position).dot(joint.axis);
    const double next = std::clamp(joint.value + delta, joint.lower, joint.upper);
    object.pose.position += joint.axis * (next - joint.value);
    joint.value = next;
  } else {
    object.pose = desired;
  }
}

void release(World& world) {
  if (!world.attachment) return;
  const std::string id = world.attachment->object_id;
  world.attachment.reset();
  if (!world.at(id).joint) settle(world, id);
}

void apply_command(World& world, GripperCommand command) {
  switch (command) {
    case GripperCommand::Open:
      world.gripper.aperture = Aperture::Open;
      release(world);
      break;
    case GripperCommand::Close:
      if (world.gripper.aperture == Aperture::Open) {
        world.gripper.aperture = Aperture::Closed;
        try_attach(world, world.gripper.pose);
      }
      break;
    case GripperCommand::Hold:
      break;
  }
}

}  // namespace

ExecutionTrace execute(World world, const Trajectory& trajectory, const PerturbationEvents& events,
                       const ExecuteOptions& options) {
  if (trajectory.keyframes.size() < 2) {
    throw Error(ErrorCode::TrajectoryTooShort, "trajectory needs at least 2 keyframes");
  }
  if (options.steps_per_segment < 1) {
    throw Error(ErrorCode::InvalidArgument, "steps_per_segment must be positive");
  }
  events.validate();
  const int segments = static_cast<int>(trajectory.keyframes.size()) - 1;
  for (const auto& r : events.timed_releases) {
    if (r.segment < 0 || r.segment >= segments) {
      throw Error(ErrorCode::InvalidSegmentIndex,
                  "timed release references segment " + std::to_string(r.segment) + " of " +
                      std::to_string(segments));
    }
  }

  ExecutionTrace trace;
  trace.keyframe_snapshots.reserve(trajectory.keyframes.size());
  if (options.record_steps) trace.steps.reserve(segments * options.steps_per_segment + 1);

  auto arrive = [&](const Keyframe& kf) {
    if (!events.suppressed_gripper_keyframes.contains(kf.index)) {
      apply_command(world, kf.gripper_command);
    }
    trace.keyframe_snapshots.push_back(world);
  };

  int step = 0;
  const Keyframe& first = trajectory.keyframes.front();
  world.gripper.pose = first.pose;
  track_attachment(world);
  arrive(first);
  if (options.record_steps) trace.steps.push_back({step, -1, 0.0, world});

  std::vector<bool> fired(events.timed_releases.size(), false);
  for (int s = 0; s < segments; ++s) {
    const Keyframe& from = trajectory.keyframes[s];
    const Keyframe& to = trajectory.keyframes[s + 1];
    for (int i = 1; i <= options.steps_per_segment; ++i) {
      ++step;
      const double fraction = static_cast<double>(i) / options.steps_per_segment;
      world.gripper.pose = slerp_pose(from.pose, to.pose, fraction);
      track_attachment(world);
      for (std::size_t r = 0; r < events.timed_releases.size(); ++r) {
        const auto& tr = events.timed_releases[r];
        if (!fired[r] && tr.segment == s && fraction >= tr.release_fraction) {
          fired[r] = true;
          world.gripper.aperture = Aperture::Open;
          release(world);
        }
      }
      if (i == options.steps_per_segment) arrive(to);
      if (options.record_steps) trace.steps.push_back({step, s, fraction, world});
    }
  }
  trace.terminal = std::move(world);
  return trace;
}

}  // namespace failgen
