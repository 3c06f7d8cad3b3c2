#pragma once

#include <cstdint>
#include <vector>

#include "spxtrack/image.hpp"
#include "spxtrack/segmentation.hpp"

namespace spxtrack {

/// Superpixel indexes whose members are at least half inside the mask
/// (>= 50% rule, boundary included).
std::vector<std::uint32_t> propagate_roi_labels(const RoiMask& mask, const Segmentation& seg);

/// Paint the given superpixels back into a mask (the quantized ROI).
RoiMask paint_superpixels(const Segmentation& seg, const std::vector<std::uint32_t>& selected);

}  // namespace spxtrack
