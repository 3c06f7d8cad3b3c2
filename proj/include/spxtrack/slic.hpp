#pragma once

#include <cstdint>

#include "spxtrack/image.hpp"
#include "spxtrack/segmentation.hpp"

namespace spxtrack {

struct SlicConfig {
  int target_count = 500;        // requested number of superpixels
  double compactness = 10.0;     // spatial vs color weight
  int iterations = 10;           // k-means sweeps
  double enforce_min_size = 0.25;  // minimum size as a fraction of the mean
};

/// Decompose a frame into connected superpixels by k-means clustering in
/// CIELAB+xy space with the distance
///   D = sqrt(d_lab^2 + (compactness / S)^2 * d_xy^2),  S = sqrt(W*H / K).
///
/// Deterministic for a given (frame, cfg, seed); the current seeding is
/// gradient-perturbed grid placement and consumes no random draws, so the
/// seed is accepted for interface stability and ignored.
/// Throws std::invalid_argument when target_count exceeds the pixel count.
Segmentation segment(const Frame& frame, const SlicConfig& cfg, std::uint64_t seed);

/// Split every label of a raw map into its 4-connected components, absorb
/// components smaller than min_size into their largest adjacent component,
/// and relabel densely in row-major first-appearance order.
Segmentation enforce_connectivity(const std::vector<std::uint32_t>& labels, int width,
                                  int height, std::size_t min_size);

}  // namespace spxtrack
