#pragma once

#include "spxtrack/image.hpp"
#include "spxtrack/matching.hpp"
#include "spxtrack/segmentation.hpp"

namespace spxtrack {

/// Region overlap 2|X n Y| / (|X| + |Y|); defined as 1 when both masks
/// are empty. Throws std::invalid_argument on dimension mismatch.
double dice(const RoiMask& x, const RoiMask& y);

struct ContourScore {
  double precision = 0;
  double recall = 0;
  double f_measure = 0;
};

/// Boundary matching with a disc tolerance: extract the boundary pixels
/// of each mask (mask pixels with a non-mask 4-neighbor or on the image
/// border), dilate each boundary by a Euclidean disc of the given radius,
/// and score precision/recall as the covered boundary fractions.
/// Conventions: both boundaries empty -> (1,1,1); exactly one empty ->
/// (0,0,0).
ContourScore contour_f_measure(const RoiMask& x, const RoiMask& y, int radius);

/// Tolerance radius used by default: max(1, round(0.0075 * image diagonal)).
int default_contour_radius(int width, int height);

/// Percentage of quantized-ROI pixels of the reference frame whose
/// superpixel f satisfies bw(fw(f)) == f; 100 when the quantized ROI is
/// empty. The denominator uses the ROI snapped to superpixels by the
/// 50% rule.
double fwbw_consistency(const RoiMask& ref_mask, const Segmentation& ref_seg,
                        const MatchField& fw, const MatchField& bw);

}  // namespace spxtrack
