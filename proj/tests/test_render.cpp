// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>

#include <unistd.h>

#include "failgen/digest.hpp"
#include "failgen/error.hpp"
#include "failgen/executor.hpp"
#include "failgen/render.hpp"
#include "failgen/tasks.hpp"
#include "test_support.hpp"

using namespace failgen;
using failgen::testing::make_cube;

namespace {

World empty_world() {
  World w;
  w.gripper.pose.position = {10.0, 10.0, 10.0};
  return w;
}

std::vector<World> pick_snapshots() {
  const TaskSpec& task = build_task("pick_up_cube");
  const Demo demo = nominal_demo(task, 0);
  return execute(demo.world, demo.trajectory, {}, {.record_steps = false}).keyframe_snapshots;
}

}  // namespace

TEST(Render, EmptyWorldIsUniformBackground) {
  for (const auto& cam : default_cameras()) {
    const Image img = render_view(empty_world(), cam);
    EXPECT_TRUE(tile_is_uniform(img, 0, 0, kTileSize, kTileSize, kBackground)) << cam.name;
  }
}

TEST(Render, CamerasAreOrthonormalAndOrdered) {
  EXPECT_EQ(camera_names(default_cameras()), (std::vector<std::string>{"front", "overhead", "left"}));
  for (const auto& cam : default_cameras()) EXPECT_NO_THROW(cam.validate());
  Camera bad = default_cameras()[0];
  bad.up = bad.view;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Render, ProjectionMatchesAnalyticFormula) {
  Camera cam = default_cameras()[1];
  cam.scale = 256.0;
  const Vec3 p{0.53, -0.02, 0.04};
  const PixelPoint px = project(cam, p, 128, 128);
  // Overhead: screen right is world -Y, screen up is world +X.
  EXPECT_NEAR(px.u, 64.0 + 0.02 * 256.0, 1e-9);
  EXPECT_NEAR(px.v, 64.0 - 0.03 * 256.0, 1e-9);
}

TEST(Render, OverheadCubeBoundingBoxWithinOnePixel) {
  Camera cam = default_cameras()[1];
  cam.scale = 256.0;
  World w = empty_world();
  const double half = 0.04;
  w.add_object(make_cube("c", {0.52, 0.03, half}, half));
  const Image img = render_view(w, cam);
  int min_x = 1 << 30, min_y = 1 << 30, max_x = -1, max_y = -1;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (img.at(x, y) == kBackground) continue;
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    }
  }
  const double u_lo = 64.0 - (0.03 + half) * 256.0;
  const double u_hi = 64.0 - (0.03 - half) * 256.0;
  const double v_lo = 64.0 - (0.52 + half - 0.5) * 256.0;
  const double v_hi = 64.0 - (0.52 - half - 0.5) * 256.0;
  EXPECT_NEAR(min_x, u_lo, 1.0);
  EXPECT_NEAR(max_x + 1, u_hi, 1.0);
  EXPECT_NEAR(min_y, v_lo, 1.0);
  EXPECT_NEAR(max_y + 1, v_hi, 1.0);
}

TEST(Render, Deterministic) {
  const auto snaps = pick_snapshots();
  EXPECT_EQ(compose_grid(snaps, 1, default_cameras(), 3), compose_grid(snaps, 1, default_cameras(), 3));
}

TEST(Grid, DimensionsAndWhiteColumns) {
  const auto snaps = pick_snapshots();
  const int total = 3;
  for (int t = 0; t < total; ++t) {
    const Image g = compose_grid(snaps, t, default_cameras(), total);
    EXPECT_EQ(g.width, total * kTileSize);
    EXPECT_EQ(g.height, 3 * kTileSize);
    for (int c = 0; c < total; ++c) {
      for (int r = 0; r < 3; ++r) {
        const bool white = tile_is_uniform(g, c * kTileSize, r * kTileSize, kTileSize, kTileSize, kWhite);
        EXPECT_EQ(white, c > t) << "t=" << t << " c=" << c << " r=" << r;
      }
    }
  }
}

TEST(Grid, ColumnShowsEndOfSubtask) {
  const auto snaps = pick_snapshots();
  const Image g = compose_grid(snaps, 2, default_cameras(), 3);
  for (int c = 0; c < 3; ++c) {
    for (int r = 0; r < 3; ++r) {
      Image tile(kTileSize, kTileSize, kWhite);
      for (int y = 0; y < kTileSize; ++y) {
        for (int x = 0; x < kTileSize; ++x) tile.set(x, y, g.at(c * kTileSize + x, r * kTileSize + y));
      }
      EXPECT_EQ(tile, render_view(snaps[c + 1], default_cameras()[r]));
    }
  }
}

TEST(Grid, FourColumnsAtTZeroHaveThreeWhite) {
  std::vector<World> snaps(5, empty_world());
  World w = empty_world();
  w.add_object(make_cube("c", {0.5, 0.0, 0.02}, 0.02));
  snaps[1] = w;
  const Image g = compose_grid(snaps, 0, default_cameras(), 4);
  int white_cols = 0;
  for (int c = 0; c < 4; ++c) {
    white_cols += tile_is_uniform(g, c * kTileSize, 0, kTileSize, 3 * kTileSize, kWhite);
  }
  EXPECT_EQ(white_cols, 3);
  EXPECT_FALSE(tile_is_uniform(g, 0, 0, kTileSize, kTileSize, kBackground));
}

TEST(Grid, Errors) {
  const auto snaps = pick_snapshots();
  for (int t : {-1, 3}) {
    try {
      compose_grid(snaps, t, default_cameras(), 3);
      FAIL() << t;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::SubtaskOutOfRange);
    }
  }
  try {
    compose_grid(snaps, 0, {}, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
  try {
    compose_grid({snaps[0]}, 0, default_cameras(), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(Ppm, HeaderAndRoundTrip) {
  const Image g(4 * kTileSize, 3 * kTileSize, kBackground);
  const std::string bytes = encode_ppm(g);
  EXPECT_EQ(bytes.rfind("P6\n512 384\n255\n", 0), 0U);
  EXPECT_EQ(bytes.size(), 15U + 512U * 384U * 3U);
  EXPECT_EQ(decode_ppm(bytes), g);
  const Image grid = compose_grid(pick_snapshots(), 1, default_cameras(), 3);
  EXPECT_EQ(decode_ppm(encode_ppm(grid)), grid);
}

TEST(Ppm, DecodeErrors) {
  for (const std::string bad : {std::string("P3\n1 1\n255\n\0\0\0", 14), std::string("P6\n2 2\n255\nabc"),
                                std::string("P6\n1 1\n65535\n\0\0\0", 16), std::string("")}) {
    try {
      decode_ppm(bad);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::IoError);
    }
  }
}

TEST(Ppm, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / ("failgen_render_" + std::to_string(::getpid()) + ".ppm");
  const Image grid = compose_grid(pick_snapshots(), 0, default_cameras(), 3);
  write_image(path, grid);
  EXPECT_EQ(read_ppm(path), grid);
  std::filesystem::remove(path);
  EXPECT_THROW(write_image(path.string() + ".bmp", grid), Error);
}

TEST(Render, GoldenDigest) {
  const Image grid = compose_grid(pick_snapshots(), 1, default_cameras(), 3);
  EXPECT_EQ(sha256_hex(encode_ppm(grid)), "3260ff6587eac104e74fe4279f05156e3dc44f99d41b8461d0dfccacebb88e7f");
}

TEST(Png, SignatureWhenSupported) {
  const Image img(8, 8, kBackground);
  if (!png_supported()) {
    EXPECT_THROW(encode_png(img), Error);
    GTEST_SKIP() << "built without libpng";
  }
  const std::string png = encode_png(img);
  EXPECT_EQ(png.substr(0, 8), std::string("\x89PNG\r\n\x1a\n", 8));
}
