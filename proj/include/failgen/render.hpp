// SPDX-License-Identifier: Apache-2.0
//
// Orthographic software rasterizer and the viewpoint x sub-task image grid.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "failgen/scene.hpp"

namespace failgen {

inline constexpr int kTileSize = 128;
inline constexpr Rgb kBackground{230, 230, 230};
inline constexpr Rgb kWhite{255, 255, 255};

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // RGB, rows top to bottom

  Image() = default;
  Image(int w, int h, Rgb fill);

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);
  // Copies `src` with its top-left corner at (x0, y0).
  void blit(const Image& src, int x0, int y0);
  bool operator==(const Image&) const = default;
};

struct Camera {
  std::string name;
  Vec3 view;  // viewing direction
  Vec3 up;
  double scale = 200.0;  // pixels per meter
  Vec3 center;           // world point at the tile center

  Vec3 right() const { return view.cross(up); }
  // Throws Error(InvalidArgument) unless view and up are unit and orthogonal.
  void validate() const;
};

// front, overhead, left (row order of the grid).
const std::vector<Camera>& default_cameras();
std::vector<std::string> camera_names(const std::vector<Camera>& cameras);

// Continuous pixel coordinates of a world point.
struct PixelPoint {
  double u = 0.0;
  double v = 0.0;
};
PixelPoint project(const Camera& cam, const Vec3& p, int width, int height);

Image render_view(const World& world, const Camera& cam, int width = kTileSize, int height = kTileSize);

// Row r is camera r; column c <= t shows keyframe_snapshots[c + 1] (the
// world at the end of sub-task c); columns c > t are white. Throws
// Error(SubtaskOutOfRange) unless 0 <= t < total_subtasks, and
// Error(InvalidArgument) for missing snapshots or cameras.
Image compose_grid(const std::vector<World>& keyframe_snapshots, int t, const std::vector<Camera>& cameras,
                   int total_subtasks, int tile_w = kTileSize, int tile_h = kTileSize);

bool tile_is_uniform(const Image& image, int x0, int y0, int w, int h, Rgb color);

std::string encode_ppm(const Image& image);
// Throws Error(IoError) on a malformed stream.
Image decode_ppm(std::string_view bytes);

bool png_supported();
// Throws Error(IoError) when PNG support is not compiled in.
std::string encode_png(const Image& image);

// Format picked from the extension (.ppm or .png). Throws Error(IoError).
void write_image(const std::filesystem::path& path, const Image& image);
Image read_ppm(const std::filesystem::path& path);

}  // namespace failgen
