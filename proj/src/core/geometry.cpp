// SPDX-License-Identifier: Apache-2.0
#include "failgen/geometry.hpp"

#include <algorithm>

#include "failgen/error.hpp"

namespace failgen {

Vec3 Vec3::normalized() const {
  const double n = norm();
  if (n == 0.0) return *this;
  return *this * (1.0 / n);
}

Quat::Quat(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::InvalidArgument, "quaternion has zero or non-finite norm");
  }
  w /= n;
  x /= n;
  y /= n;
  z /= n;
  // Canonical hemisphere: first non-zero component positive.
  const double lead = w != 0.0 ? w : (x != 0.0 ? x : (y != 0.0 ? y : z));
  if (lead < 0.0) {
    w = -w;
    x = -x;
    y = -y;
    z = -z;
  }
  w_ = w;
  x_ = x;
  y_ = y;
  z_ = z;
}

Quat Quat::from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (n == 0.0) return Quat{};
  const double s = std::sin(angle / 2.0) / n;
  return Quat(std::cos(angle / 2.0), axis.x * s, axis.y * s, axis.z * s);
}

Quat Quat::operator*(const Quat& o) const {
  return Quat(w_ * o.w_ - x_ * o.x_ - y_ * o.y_ - z_ * o.z_,
              w_ * o.x_ + x_ * o.w_ + y_ * o.z_ - z_ * o.y_,
              w_ * o.y_ - x_ * o.z_ + y_ * o.w_ + z_ * o.x_,
              w_ * o.z_ + x_ * o.y_ - y_ * o.x_ + z_ * o.w_);
}

Quat Quat::conjugate() const { return Quat(w_, -x_, -y_, -z_); }

Vec3 Quat::rotate(const Vec3& v) const {
  // v' = v + 2w(u x v) + 2u x (u x v)
  const Vec3 u{x_, y_, z_};
  const Vec3 t = u.cross(v) * 2.0;
  return v + t * w_ + u.cross(t);
}

Mat3 Quat::matrix() const {
  const double ww = w_ * w_, xx = x_ * x_, yy = y_ * y_, zz = z_ * z_;
  const double xy = x_ * y_, xz = x_ * z_, yz = y_ * z_;
  const double wx = w_ * x_, wy = w_ * y_, wz = w_ * z_;
  return {{{ww + xx - yy - zz, 2 * (xy - wz), 2 * (xz + wy)},
           {2 * (xy + wz), ww - xx + yy - zz, 2 * (yz - wx)},
           {2 * (xz - wy), 2 * (yz + wx), ww - xx - yy + zz}}};
}

Pose compose_pose(const Pose& a, const Pose& b) {
  return {a.position + a.orientation.rotate(b.position), a.orientation * b.orientation};
}

Pose inverse_pose(const Pose& p) {
  const Quat inv = p.orientation.conjugate();
  return {-inv.rotate(p.position), inv};
}

Quat slerp(const Quat& a, const Quat& b, double t) {
  if (t <= 0.0) return a;
  if (t >= 1.0) return b;
  double cos_theta = a.dot(b);
  double sign = 1.0;
  if (cos_theta < 0.0) {
    cos_theta = -cos_theta;
    sign = -1.0;
  }
  double wa = 1.0 - t;
  double wb = t;
  if (cos_theta < 0.9995) {
    const double theta = std::acos(std::min(1.0, cos_theta));
    const double s = std::sin(theta);
    wa = std::sin((1.0 - t) * theta) / s;
    wb = std::sin(t * theta) / s;
  }
  wb *= sign;
  return Quat(wa * a.w() + wb * b.w(), wa * a.x() + wb * b.x(), wa * a.y() + wb * b.y(),
              wa * a.z() + wb * b.z());
}

Pose slerp_pose(const Pose& a, const Pose& b, double t) {
  if (t <= 0.0) return a;
  if (t >= 1.0) return b;
  return {a.position + (b.position - a.position) * t, slerp(a.orientation, b.orientation, t)};
}

double geodesic_angle(const Quat& q1, const Quat& q2) {
  const Quat d = q1.conjugate() * q2;
  return 2.0 * std::atan2(d.vec().norm(), std::abs(d.w()));
}

SwingTwist swing_twist(const Quat& q, const Vec3& axis) {
  const Vec3 a = axis.normalized();
  const Vec3 proj = a * q.vec().dot(a);
  const double n = std::sqrt(q.w() * q.w() + proj.dot(proj));
  Quat twist;
  if (n > 1e-12) twist = Quat(q.w(), proj.x, proj.y, proj.z);
  return {q * twist.conjugate(), twist};
}

Vec3 axis_vector(Axis axis) {
  switch (axis) {
    case Axis::X: return kUnitX;
    case Axis::Y: return kUnitY;
    case Axis::Z: return kUnitZ;
  }
  return kUnitX;
}

Vec3 axis_vector(RotationAxis axis) {
  switch (axis) {
    case RotationAxis::Roll: return kUnitX;
    case RotationAxis::Pitch: return kUnitY;
    case RotationAxis::Yaw: return kUnitZ;
  }
  return kUnitX;
}

}  // namespace failgen
