#include "spxtrack/segmentation.hpp"

#include <stdexcept>

namespace spxtrack {

Segmentation segmentation_from_labels(const std::vector<std::uint32_t>& labels, int width,
                                      int height) {
  if (width < 1 || height < 1 ||
      labels.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("segmentation: label map size disagrees with dimensions");
  }
  std::uint32_t max_label = 0;
  for (std::uint32_t l : labels) max_label = std::max(max_label, l);

  Segmentation seg;
  seg.width = width;
  seg.height = height;
  seg.labels = labels;
  seg.count = max_label + 1;
  seg.members.resize(seg.count);
  seg.centroids.assign(seg.count, {0.0, 0.0});

  for (std::uint32_t p = 0; p < labels.size(); ++p) {
    const std::uint32_t l = labels[p];
    seg.members[l].push_back(p);
    seg.centroids[l].first += static_cast<double>(p % width);
    seg.centroids[l].second += static_cast<double>(p / width);
  }
  for (std::uint32_t i = 0; i < seg.count; ++i) {
    if (seg.members[i].empty()) {
      throw std::invalid_argument("segmentation: label " + std::to_string(i) + " has no pixels");
    }
    const double n = static_cast<double>(seg.members[i].size());
    seg.centroids[i].first /= n;
    seg.centroids[i].second /= n;
  }
  return seg;
}

bool segmentation_is_connected(const Segmentation& seg) {
  const int w = seg.width;
  const int h = seg.height;
  std::vector<std::uint8_t> seen(seg.labels.size(), 0);
  std::vector<std::uint32_t> stack;
  for (std::uint32_t i = 0; i < seg.count; ++i) {
    // flood fill from the first member; the component must cover all members
    std::size_t reached = 0;
    stack.clear();
    stack.push_back(seg.members[i].front());
    seen[seg.members[i].front()] = 1;
    while (!stack.empty()) {
      const std::uint32_t p = stack.back();
      stack.pop_back();
      ++reached;
      const int x = static_cast<int>(p % w);
      const int y = static_cast<int>(p / w);
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
        const std::uint32_t q = static_cast<std::uint32_t>(ny[k]) * w + nx[k];
        if (!seen[q] && seg.labels[q] == i) {
          seen[q] = 1;
          stack.push_back(q);
        }
      }
    }
    if (reached != seg.members[i].size()) return false;
  }
  return true;
}

}  // namespace spxtrack
