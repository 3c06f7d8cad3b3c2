#include "spxtrack/roi.hpp"

#include <stdexcept>

namespace spxtrack {

std::vector<std::uint32_t> propagate_roi_labels(const RoiMask& mask, const Segmentation& seg) {
  if (mask.width != seg.width || mask.height != seg.height) {
    throw std::invalid_argument("propagate_roi_labels: mask and segmentation disagree");
  }
  std::vector<std::uint32_t> selected;
  for (std::uint32_t i = 0; i < seg.count; ++i) {
    std::size_t inside = 0;
    for (std::uint32_t p : seg.members[i]) inside += mask.bits[p];
    if (2 * inside >= seg.members[i].size()) selected.push_back(i);
  }
  return selected;
}

RoiMask paint_superpixels(const Segmentation& seg, const std::vector<std::uint32_t>& selected) {
  RoiMask mask(seg.width, seg.height);
  for (std::uint32_t i : selected) {
    for (std::uint32_t p : seg.members[i]) mask.bits[p] = 1;
  }
  return mask;
}

}  // namespace spxtrack
