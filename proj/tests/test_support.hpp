// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <random>

#include "failgen/scene.hpp"

namespace failgen::testing {

inline SceneObject make_cube(const std::string& id, Vec3 center, double half, Rgb color = {200, 40, 40},
                             Quat q = {}) {
  SceneObject o;
  o.id = id;
  o.name = id;
  o.shape = Box{{half, half, half}};
  o.pose = {center, q};
  o.color = color;
  o.graspable = true;
  o.grasp_pose = Pose{};
  return o;
}

inline Quat random_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    const double w = n(rng), x = n(rng), y = n(rng), z = n(rng);
    if (w * w + x * x + y * y + z * z > 1e-6) return Quat(w, x, y, z);
  }
}

inline Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

}  // namespace failgen::testing
