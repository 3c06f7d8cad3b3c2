#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "spxtrack/image.hpp"

namespace spxtrack {

/// One context feature: the mean of a box of side `box` on channel
/// `channel`, displaced by (dx, dy) from the pixel; when `diff` is set,
/// the mean of a second box (box2, (dx2, dy2), same channel) is
/// subtracted.
struct FeatureParam {
  int box = 3;
  int box2 = 3;
  int dx = 0, dy = 0;
  int dx2 = 0, dy2 = 0;
  std::uint8_t diff = 0;     // 0: single box, 1: box difference
  std::uint8_t channel = 0;  // 0=r, 1=g, 2=b
};

/// The frozen random parameter set shared by every frame of a run.
struct FeatureBank {
  int count = 0;    // number of features
  int radius = 0;   // maximal displacement radius in pixels
  std::vector<int> box_sizes;
  std::uint64_t seed = 0;
  std::vector<FeatureParam> params;
};

/// Draw a feature bank. The first |box_sizes| x 3 entries are forced
/// local-color features (no displacement, no difference) covering every
/// (box size, channel) pair; the rest use displacements sampled uniformly
/// on the closed integer disc of the given radius, box sizes uniform over
/// box_sizes, diff and channel uniform. Deterministic per seed.
FeatureBank generate_bank(std::uint64_t seed, int count = 80, int radius = 40,
                          std::vector<int> box_sizes = {3, 5, 7});

void save_bank(const FeatureBank& bank, const std::filesystem::path& path);
FeatureBank load_bank(const std::filesystem::path& path);

/// Per-channel summed-area tables of one frame, (width+1) x (height+1)
/// 64-bit accumulators with a zero first row and column.
class IntegralStack {
 public:
  explicit IntegralStack(const Frame& frame);

  int width() const { return width_; }
  int height() const { return height_; }

  /// Mean of the box x box window centered at (cx, cy) on one channel.
  /// Center and window are clamped to the image; the divisor is the
  /// clamped window's actual area, so the function is total.
  double box_mean(int cx, int cy, int box, int channel) const;

  std::uint64_t table_at(int channel, int x, int y) const {
    return sat_[static_cast<std::size_t>(channel) * plane_ +
                static_cast<std::size_t>(y) * (width_ + 1) + x];
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::size_t plane_ = 0;
  std::vector<std::uint64_t> sat_;
};

/// Evaluate the whole bank at one pixel; `out` receives bank.count values.
void features_at(const IntegralStack& stack, int x, int y, const FeatureBank& bank, double* out);

std::vector<double> features_at(const IntegralStack& stack, int x, int y,
                                const FeatureBank& bank);

}  // namespace spxtrack
