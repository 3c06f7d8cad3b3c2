#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>

#include "spxtrack/image.hpp"
#include "spxtrack/rng.hpp"

namespace spxtest {

using spxtrack::Frame;
using spxtrack::RoiMask;

// Smooth value-noise texture: random colors on a coarse lattice,
// bilinearly interpolated, with small per-pixel jitter on top.
inline Frame textured_frame(int w, int h, std::uint64_t seed, int cell = 8, int lo = 0,
                            int hi = 200) {
  spxtrack::SplitMix64 rng(seed);
  const int nx = (w + cell - 1) / cell + 1;
  const int ny = (h + cell - 1) / cell + 1;
  std::vector<std::uint8_t> lattice(static_cast<std::size_t>(nx) * ny * 3);
  for (auto& v : lattice) {
    v = static_cast<std::uint8_t>(lo + rng.next_below(static_cast<std::uint64_t>(hi - lo + 1)));
  }
  auto lat = [&](int i, int j, int c) {
    return static_cast<double>(lattice[(static_cast<std::size_t>(j) * nx + i) * 3 + c]);
  };
  Frame f(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int i = x / cell;
      const int j = y / cell;
      const double u = static_cast<double>(x % cell) / cell;
      const double v = static_cast<double>(y % cell) / cell;
      for (int c = 0; c < 3; ++c) {
        const double top = lat(i, j, c) * (1 - u) + lat(i + 1, j, c) * u;
        const double bot = lat(i, j + 1, c) * (1 - u) + lat(i + 1, j + 1, c) * u;
        const double jitter = static_cast<double>(rng.next_below(17)) - 8.0;
        const double val = top * (1 - v) + bot * v + jitter;
        f.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(val, 0.0, 255.0));
      }
    }
  }
  return f;
}

inline Frame solid_frame(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Frame f(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      f.at(x, y, 0) = r;
      f.at(x, y, 1) = g;
      f.at(x, y, 2) = b;
    }
  }
  return f;
}

inline void paste(Frame& dst, const Frame& src, int x0, int y0) {
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      const int dx = x0 + x;
      const int dy = y0 + y;
      if (dx < 0 || dx >= dst.width || dy < 0 || dy >= dst.height) continue;
      for (int c = 0; c < 3; ++c) dst.at(dx, dy, c) = src.at(x, y, c);
    }
  }
}

// A bright textured square translating over a darker textured background.
struct DriftScene {
  int width = 160;
  int height = 120;
  int square = 30;
  int start_x = 10;
  int start_y = 45;
  int velocity = 2;  // pixels per frame, along +x
  Frame background = textured_frame(width, height, 101, 8, 0, 110);
  Frame square_tex = textured_frame(square, square, 202, 5, 150, 255);

  int pos_x(int t) const { return start_x + velocity * t; }

  Frame frame(int t) const {
    Frame f = background;
    paste(f, square_tex, pos_x(t), start_y);
    return f;
  }

  RoiMask gt(int t) const {
    RoiMask m(width, height);
    for (int y = start_y; y < start_y + square; ++y) {
      for (int x = pos_x(t); x < pos_x(t) + square; ++x) {
        if (x >= 0 && x < width && y >= 0 && y < height) m.set(x, y, true);
      }
    }
    return m;
  }
};

// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("spxtrack_" + tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace spxtest
