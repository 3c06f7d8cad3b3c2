#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace spxtrack {

/// A superpixel partition of one frame.
///
/// `labels` assigns every pixel (row-major) a superpixel index in
/// [0, count). `members[i]` lists the linear pixel indexes of superpixel i
/// and `centroids[i]` is the arithmetic mean (x, y) of those pixels.
struct Segmentation {
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> labels;
  std::uint32_t count = 0;
  std::vector<std::vector<std::uint32_t>> members;
  std::vector<std::pair<double, double>> centroids;

  std::uint32_t label_at(int x, int y) const {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
};

/// Build a Segmentation from a dense label map. Labels must cover
/// [0, max_label] with every index present at least once; throws
/// std::invalid_argument otherwise.
Segmentation segmentation_from_labels(const std::vector<std::uint32_t>& labels, int width,
                                      int height);

/// True when every superpixel's pixel set is 4-connected (flood fill from
/// any member reaches all members).
bool segmentation_is_connected(const Segmentation& seg);

}  // namespace spxtrack
