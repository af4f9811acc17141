// SPDX-License-Identifier: Apache-2.0
//
// Pose algebra for the kinematic world. Conventions: right-handed, Z up,
// meters and radians. Quaternions are stored (w, x, y, z), normalized on
// construction and kept in a canonical hemisphere so q and -q compare equal.
#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace failgen {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline constexpr Vec3 kUnitX{1.0, 0.0, 0.0};
inline constexpr Vec3 kUnitY{0.0, 1.0, 0.0};
inline constexpr Vec3 kUnitZ{0.0, 0.0, 1.0};

using Mat3 = std::array<std::array<double, 3>, 3>;

class Quat {
 public:
  // Identity rotation.
  constexpr Quat() = default;
  // Normalizes and canonicalizes. Throws Error(InvalidArgument) on a zero or
  // non-finite input.
  Quat(double w, double x, double y, double z);

  static Quat identity() { return Quat{}; }
  // `axis` need not be unit length; a zero axis yields identity.
  static Quat from_axis_angle(const Vec3& axis, double angle);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }
  Vec3 vec() const { return {x_, y_, z_}; }

  Quat operator*(const Quat& o) const;
  Quat conjugate() const;
  Vec3 rotate(const Vec3& v) const;
  Mat3 matrix() const;
  double dot(const Quat& o) const { return w_ * o.w_ + x_ * o.x_ + y_ * o.y_ + z_ * o.z_; }

  bool operator==(const Quat&) const = default;

 private:
  double w_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

struct Pose {
  Vec3 position;
  Quat orientation;

  static Pose identity() { return {}; }
  Vec3 transform_point(const Vec3& p) const { return position + orientation.rotate(p); }
  bool operator==(const Pose&) const = default;
};

// a∘b: express frame b (given relative to a) in a's parent frame.
Pose compose_pose(const Pose& a, const Pose& b);
Pose inverse_pose(const Pose& p);

// Linear position, shortest-arc spherical orientation. t is clamped to [0,1];
// t == 0 returns `a` and t == 1 returns `b` exactly.
Pose slerp_pose(const Pose& a, const Pose& b, double t);
Quat slerp(const Quat& a, const Quat& b, double t);

// Rotation angle of q1^-1 q2, in [0, pi].
double geodesic_angle(const Quat& q1, const Quat& q2);

struct SwingTwist {
  Quat swing;
  Quat twist;
};

// q == swing * twist with twist a rotation about `axis` (in q's local frame).
// When q has no component about the axis (180 degree swing), twist is identity.
SwingTwist swing_twist(const Quat& q, const Vec3& axis);

enum class Axis { X, Y, Z };
enum class RotationAxis { Roll, Pitch, Yaw };

Vec3 axis_vector(Axis axis);
Vec3 axis_vector(RotationAxis axis);

struct Aabb {
  Vec3 min;
  Vec3 max;

  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
           p.z <= max.z;
  }
  bool valid() const { return min.x <= max.x && min.y <= max.y && min.z <= max.z; }
  bool operator==(const Aabb&) const = default;
};

inline constexpr double kPi = std::numbers::pi;

}  // namespace failgen
