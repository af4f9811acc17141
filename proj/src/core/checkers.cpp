// SPDX-License-Identifier: Apache-2.0
#include "failgen/checkers.hpp"

#include <cmath>

#include "failgen/error.hpp"

namespace failgen {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

}  // namespace

void Predicate::validate() const {
  std::visit(Overloaded{
                 [](const ObjectInRegion& p) { require(p.region.valid(), "region min must not exceed max"); },
                 [](const ObjectGrasped&) {},
                 [](const ObjectOn& p) {
                   require(p.xy_margin >= 0.0 && p.z_tol >= 0.0, "ObjectOn tolerances must be >= 0");
                 },
                 [](const JointAtLeast&) {},
                 [](const JointAtMost&) {},
                 [](const OrientationWithin& p) {
                   require(p.tolerance >= 0.0, "orientation tolerance must be >= 0");
                 },
                 [](const All& p) {
                   for (const auto& t : p.terms) t.validate();
                 },
             },
             node);
}

bool eval_predicate(const World& w, const Predicate& predicate) {
  return std::visit(
      Overloaded{
          [&](const ObjectInRegion& p) { return p.region.contains(w.at(p.object_id).pose.position); },
          [&](const ObjectGrasped& p) {
            w.at(p.object_id);
            return w.attachment.has_value() && w.attachment->object_id == p.object_id;
          },
          [&](const ObjectOn& p) {
            const SceneObject& top = w.at(p.top_id);
            const SceneObject& base = w.at(p.base_id);
            const Vec3& c = top.pose.position;
            if (!footprint_contains(base, c.x, c.y, p.xy_margin)) return false;
            return std::abs(world_aabb(top).min.z - support_height(base)) <= p.z_tol;
          },
          [&](const JointAtLeast& p) {
            const SceneObject& o = w.at(p.object_id);
            return o.joint.has_value() && o.joint->value >= p.threshold;
          },
          [&](const JointAtMost& p) {
            const SceneObject& o = w.at(p.object_id);
            return o.joint.has_value() && o.joint->value <= p.threshold;
          },
          [&](const OrientationWithin& p) {
            return geodesic_angle(w.at(p.object_id).pose.orientation, p.target) <= p.tolerance;
          },
          [&](const All& p) {
            bool ok = true;
            // Evaluate every term so unknown ids surface regardless of order.
            for (const auto& t : p.terms) ok = eval_predicate(w, t) && ok;
            return ok;
          },
      },
      predicate.node);
}

std::optional<int> first_failing_subtask(const ExecutionTrace& trace, const CheckpointPlan& plan) {
  if (trace.keyframe_snapshots.empty() || plan.size() != trace.keyframe_snapshots.size() - 1) {
    throw Error(ErrorCode::PlanMismatch,
                "checkpoint plan covers " + std::to_string(plan.size()) + " sub-tasks but trace has " +
                    std::to_string(trace.keyframe_snapshots.empty() ? 0
                                                                    : trace.keyframe_snapshots.size() - 1));
  }
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (!eval_predicate(trace.keyframe_snapshots[i + 1], plan.checkpoints[i])) {
      return static_cast<int>(i);
    }
  }
  return std::nullopt;
}

Predicate in_region(std::string id, Aabb region) { return {ObjectInRegion{std::move(id), region}}; }
Predicate grasped(std::string id) { return {ObjectGrasped{std::move(id)}}; }
Predicate on_top(std::string top, std::string base, double xy_margin, double z_tol) {
  return {ObjectOn{std::move(top), std::move(base), xy_margin, z_tol}};
}
Predicate joint_at_least(std::string id, double threshold) {
  return {JointAtLeast{std::move(id), threshold}};
}
Predicate joint_at_most(std::string id, double threshold) {
  return {JointAtMost{std::move(id), threshold}};
}
Predicate orientation_within(std::string id, Quat target, double tolerance) {
  return {OrientationWithin{std::move(id), target, tolerance}};
}
Predicate all_of(std::vector<Predicate> terms) { return {All{std::move(terms)}}; }
Predicate always() { return {All{}}; }

}  // namespace failgen
