// SPDX-License-Identifier: Apache-2.0
#include "failgen/render.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <numeric>

#include "failgen/digest.hpp"
#include "failgen/error.hpp"

#ifdef FAILGEN_HAVE_PNG
#include <png.h>
#endif

namespace failgen {

namespace {

constexpr int kRimSegments = 24;
constexpr double kFingerHalfWidth = 0.006;
constexpr double kFingerLength = 0.05;
constexpr double kOpenGap = 0.08;
constexpr double kClosedGap = 0.03;
constexpr Rgb kGripperColor{60, 60, 72};

struct Part {
  Shape shape;
  Pose pose;
  Rgb color;
};

Rgb darker(Rgb c) {
  auto d = [](std::uint8_t v) { return static_cast<std::uint8_t>(v * 3 / 5); };
  return {d(c.r), d(c.g), d(c.b)};
}

std::vector<Vec3> silhouette_points(const Part& part, const Camera& cam) {
  std::vector<Vec3> pts;
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Box>) {
          for (int i = 0; i < 8; ++i) {
            const Vec3 local{(i & 1 ? 1 : -1) * s.half_extents.x, (i & 2 ? 1 : -1) * s.half_extents.y,
                             (i & 4 ? 1 : -1) * s.half_extents.z};
            pts.push_back(part.pose.transform_point(local));
          }
        } else if constexpr (std::is_same_v<S, Cylinder>) {
          for (int i = 0; i < kRimSegments; ++i) {
            const double a = 2.0 * kPi * i / kRimSegments;
            for (double z : {-0.5 * s.height, 0.5 * s.height}) {
              pts.push_back(part.pose.transform_point({s.radius * std::cos(a), s.radius * std::sin(a), z}));
            }
          }
        } else {
          const Vec3 r = cam.right();
          for (int i = 0; i < 2 * kRimSegments; ++i) {
            const double a = kPi * i / kRimSegments;
            pts.push_back(part.pose.position + (r * std::cos(a) + cam.up * std::sin(a)) * s.radius);
          }
        }
      },
      part.shape);
  return pts;
}

double cross2(const PixelPoint& o, const PixelPoint& a, const PixelPoint& b) {
  return (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u);
}

// Andrew's monotone chain; counter-clockwise in (u, v).
std::vector<PixelPoint> convex_hull(std::vector<PixelPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const PixelPoint& a, const PixelPoint& b) {
    return a.u < b.u || (a.u == b.u && a.v < b.v);
  });
  if (pts.size() < 3) return pts;
  std::vector<PixelPoint> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

bool inside(const std::vector<PixelPoint>& hull, const PixelPoint& p) {
  if (hull.size() < 3) return false;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    if (cross2(hull[i], hull[(i + 1) % hull.size()], p) < 0) return false;
  }
  return true;
}

void draw_part(Image& img, const Part& part, const Camera& cam) {
  std::vector<PixelPoint> projected;
  for (const Vec3& p : silhouette_points(part, cam)) projected.push_back(project(cam, p, img.width, img.height));
  const auto hull = convex_hull(std::move(projected));
  if (hull.size() < 3) return;
  double umin = hull[0].u, umax = hull[0].u, vmin = hull[0].v, vmax = hull[0].v;
  for (const auto& p : hull) {
    umin = std::min(umin, p.u);
    umax = std::max(umax, p.u);
    vmin = std::min(vmin, p.v);
    vmax = std::max(vmax, p.v);
  }
  const int x0 = std::max(0, static_cast<int>(std::floor(umin)) - 1);
  const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(umax)) + 1);
  const int y0 = std::max(0, static_cast<int>(std::floor(vmin)) - 1);
  const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(vmax)) + 1);
  if (x0 > x1 || y0 > y1) return;

  const int w = x1 - x0 + 1;
  const int h = y1 - y0 + 1;
  // Mask with a one-pixel border so edge tests need no bounds checks.
  std::vector<std::uint8_t> mask(static_cast<std::size_t>((w + 2) * (h + 2)), 0);
  auto m = [&](int x, int y) -> std::uint8_t& { return mask[static_cast<std::size_t>((y + 1) * (w + 2) + x + 1)]; };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      m(x, y) = inside(hull, {x0 + x + 0.5, y0 + y + 0.5}) ? 1 : 0;
    }
  }
  const Rgb edge = darker(part.color);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!m(x, y)) continue;
      const bool border = !m(x - 1, y) || !m(x + 1, y) || !m(x, y - 1) || !m(x, y + 1);
      img.set(x0 + x, y0 + y, border ? edge : part.color);
    }
  }
}

std::vector<Part> gripper_parts(const Gripper& g) {
  const double gap = g.aperture == Aperture::Open ? kOpenGap : kClosedGap;
  const double hw = kFingerHalfWidth;
  std::vector<Part> parts;
  for (double side : {-1.0, 1.0}) {
    parts.push_back({Box{{hw, hw, 0.5 * kFingerLength}},
                     compose_pose(g.pose, Pose{{0, side * (0.5 * gap + hw), 0.5 * kFingerLength}, Quat{}}),
                     kGripperColor});
  }
  parts.push_back({Box{{hw, 0.5 * gap + 2 * hw, hw}}, compose_pose(g.pose, Pose{{0, 0, kFingerLength + hw}, Quat{}}),
                   kGripperColor});
  return parts;
}

}  // namespace

Image::Image(int w, int h, Rgb fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw Error(ErrorCode::InvalidArgument, "negative image size");
  pixels.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3);
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill.r;
    pixels[i + 1] = fill.g;
    pixels[i + 2] = fill.b;
  }
}

Rgb Image::at(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
  return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

void Image::set(int x, int y, Rgb c) {
  const std::size_t i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
  pixels[i] = c.r;
  pixels[i + 1] = c.g;
  pixels[i + 2] = c.b;
}

void Image::blit(const Image& src, int x0, int y0) {
  if (x0 < 0 || y0 < 0 || x0 + src.width > width || y0 + src.height > height) {
    throw Error(ErrorCode::InvalidArgument, "blit outside the destination image");
  }
  const std::size_t row = static_cast<std::size_t>(src.width) * 3;
  for (int y = 0; y < src.height; ++y) {
    std::memcpy(&pixels[(static_cast<std::size_t>(y0 + y) * width + x0) * 3], &src.pixels[y * row], row);
  }
}

void Camera::validate() const {
  constexpr double kTol = 1e-9;
  if (std::abs(view.norm() - 1.0) > kTol || std::abs(up.norm() - 1.0) > kTol) {
    throw Error(ErrorCode::InvalidArgument, "camera '" + name + "' axes must be unit vectors");
  }
  if (std::abs(view.dot(up)) > kTol) {
    throw Error(ErrorCode::InvalidArgument, "camera '" + name + "' view and up are not orthogonal");
  }
  if (!(scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "camera '" + name + "' scale must be positive");
}

const std::vector<Camera>& default_cameras() {
  static const std::vector<Camera> cams = {
      {"front", {-1, 0, 0}, {0, 0, 1}, 200.0, {0.5, 0.0, 0.2}},
      {"overhead", {0, 0, -1}, {1, 0, 0}, 200.0, {0.5, 0.0, 0.1}},
      {"left", {0, 1, 0}, {0, 0, 1}, 200.0, {0.5, 0.0, 0.2}},
  };
  return cams;
}

std::vector<std::string> camera_names(const std::vector<Camera>& cameras) {
  std::vector<std::string> out;
  for (const auto& c : cameras) out.push_back(c.name);
  return out;
}

PixelPoint project(const Camera& cam, const Vec3& p, int width, int height) {
  const Vec3 d = p - cam.center;
  return {0.5 * width + d.dot(cam.right()) * cam.scale, 0.5 * height - d.dot(cam.up) * cam.scale};
}

Image render_view(const World& world, const Camera& cam, int width, int height) {
  cam.validate();
  Image img(width, height, kBackground);
  std::vector<Part> parts;
  for (const auto& o : world.objects()) parts.push_back({o.shape, o.pose, o.color});
  for (auto& p : gripper_parts(world.gripper)) parts.push_back(std::move(p));

  std::vector<std::size_t> order(parts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return (parts[a].pose.position - cam.center).dot(cam.view) > (parts[b].pose.position - cam.center).dot(cam.view);
  });
  for (std::size_t i : order) draw_part(img, parts[i], cam);
  return img;
}

Image compose_grid(const std::vector<World>& keyframe_snapshots, int t, const std::vector<Camera>& cameras,
                   int total_subtasks, int tile_w, int tile_h) {
  if (t < 0 || t >= total_subtasks) {
    throw Error(ErrorCode::SubtaskOutOfRange,
                "sub-task " + std::to_string(t) + " outside [0, " + std::to_string(total_subtasks) + ")");
  }
  if (cameras.empty()) throw Error(ErrorCode::InvalidArgument, "at least one camera is required");
  if (static_cast<int>(keyframe_snapshots.size()) < t + 2) {
    throw Error(ErrorCode::InvalidArgument, "not enough keyframe snapshots for sub-task " + std::to_string(t));
  }
  Image grid(total_subtasks * tile_w, static_cast<int>(cameras.size()) * tile_h, kWhite);
  for (std::size_t r = 0; r < cameras.size(); ++r) {
    for (int c = 0; c <= t; ++c) {
      grid.blit(render_view(keyframe_snapshots[c + 1], cameras[r], tile_w, tile_h), c * tile_w,
                static_cast<int>(r) * tile_h);
    }
  }
  return grid;
}

bool tile_is_uniform(const Image& image, int x0, int y0, int w, int h, Rgb color) {
  for (int y = y0; y < y0 + h; ++y) {
    for (int x = x0; x < x0 + w; ++x) {
      if (image.at(x, y) != color) return false;
    }
  }
  return true;
}

std::string encode_ppm(const Image& image) {
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
  return out;
}

Image decode_ppm(std::string_view bytes) {
  std::size_t pos = 0;
  auto fail = [](const std::string& why) -> Error { return Error(ErrorCode::IoError, "malformed PPM: " + why); };
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&]() -> long {
    skip_space();
    long v = 0;
    std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > (1L << 20)) throw fail("dimension too large");
    }
    if (pos == start) throw fail("expected a number");
    return v;
  };
  if (bytes.substr(0, 2) != "P6") throw fail("missing P6 magic");
  pos = 2;
  const long w = number();
  const long h = number();
  const long maxval = number();
  if (maxval != 255) throw fail("maxval must be 255");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) throw fail("bad header end");
  ++pos;
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
  if (bytes.size() - pos != need) throw fail("pixel data size mismatch");
  Image img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.pixels.assign(reinterpret_cast<const std::uint8_t*>(bytes.data() + pos),
                    reinterpret_cast<const std::uint8_t*>(bytes.data() + pos + need));
  return img;
}

#ifdef FAILGEN_HAVE_PNG
bool png_supported() { return true; }

std::string encode_png(const Image& image) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorCode::IoError, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::IoError, "png_create_info_struct failed");
  }
  std::string out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::IoError, "PNG encoding failed");
  }
  png_set_write_fn(
      png, &out,
      [](png_structp p, png_bytep data, png_size_t len) {
        static_cast<std::string*>(png_get_io_ptr(p))->append(reinterpret_cast<const char*>(data), len);
      },
      nullptr);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(&image.pixels[static_cast<std::size_t>(y) * image.width * 3]));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}
#else
bool png_supported() { return false; }

std::string encode_png(const Image&) { throw Error(ErrorCode::IoError, "PNG support not compiled in"); }
#endif

void write_image(const std::filesystem::path& path, const Image& image) {
  const auto ext = path.extension().string();
  if (ext == ".ppm") {
    write_file_atomic(path, encode_ppm(image));
  } else if (ext == ".png") {
    write_file_atomic(path, encode_png(image));
  } else {
    throw Error(ErrorCode::IoError, "unsupported image extension '" + ext + "'");
  }
}

Image read_ppm(const std::filesystem::path& path) { return decode_ppm(read_file(path)); }

}  // namespace failgen
