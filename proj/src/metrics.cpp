#include "spxtrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spxtrack/roi.hpp"

namespace spxtrack {

namespace {

void require_same_dims(const RoiMask& x, const RoiMask& y, const char* who) {
  if (x.width != y.width || x.height != y.height) {
    throw std::invalid_argument(std::string(who) + ": mask dimensions disagree");
  }
}

// Boundary: mask pixels with a non-mask 4-neighbor or on the image border.
std::vector<std::uint8_t> boundary_of(const RoiMask& m) {
  std::vector<std::uint8_t> b(m.bits.size(), 0);
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      if (!m.at(x, y)) continue;
      const bool border = x == 0 || y == 0 || x == m.width - 1 || y == m.height - 1;
      const bool exposed = border || !m.at(x - 1, y) || !m.at(x + 1, y) || !m.at(x, y - 1) ||
                           !m.at(x, y + 1);
      if (exposed) b[static_cast<std::size_t>(y) * m.width + x] = 1;
    }
  }
  return b;
}

std::vector<std::uint8_t> dilate_disc(const std::vector<std::uint8_t>& src, int w, int h,
                                      int radius) {
  if (radius <= 0) return src;
  std::vector<std::pair<int, int>> offsets;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) offsets.emplace_back(dx, dy);
    }
  }
  std::vector<std::uint8_t> out(src.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!src[static_cast<std::size_t>(y) * w + x]) continue;
      for (const auto& [dx, dy] : offsets) {
        const int nx = x + dx;
        const int ny = y + dy;
        if (nx >= 0 && nx < w && ny >= 0 && ny < h) {
          out[static_cast<std::size_t>(ny) * w + nx] = 1;
        }
      }
    }
  }
  return out;
}

std::size_t count_set(const std::vector<std::uint8_t>& v) {
  std::size_t n = 0;
  for (std::uint8_t b : v) n += b;
  return n;
}

std::size_t count_overlap(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] & b[i];
  return n;
}

}  // namespace

double dice(const RoiMask& x, const RoiMask& y) {
  require_same_dims(x, y, "dice");
  std::size_t nx = 0, ny = 0, overlap = 0;
  for (std::size_t i = 0; i < x.bits.size(); ++i) {
    nx += x.bits[i];
    ny += y.bits[i];
    overlap += x.bits[i] & y.bits[i];
  }
  if (nx + ny == 0) return 1.0;
  return 2.0 * static_cast<double>(overlap) / static_cast<double>(nx + ny);
}

ContourScore contour_f_measure(const RoiMask& x, const RoiMask& y, int radius) {
  require_same_dims(x, y, "contour_f_measure");
  if (radius < 0) throw std::invalid_argument("contour_f_measure: radius must be >= 0");
  const std::vector<std::uint8_t> bx = boundary_of(x);
  const std::vector<std::uint8_t> by = boundary_of(y);
  const std::size_t nx = count_set(bx);
  const std::size_t ny = count_set(by);
  if (nx == 0 && ny == 0) return {1.0, 1.0, 1.0};
  if (nx == 0 || ny == 0) return {0.0, 0.0, 0.0};
  const std::vector<std::uint8_t> dx = dilate_disc(bx, x.width, x.height, radius);
  const std::vector<std::uint8_t> dy = dilate_disc(by, y.width, y.height, radius);
  ContourScore s;
  s.precision = static_cast<double>(count_overlap(bx, dy)) / static_cast<double>(nx);
  s.recall = static_cast<double>(count_overlap(by, dx)) / static_cast<double>(ny);
  s.f_measure =
      s.precision + s.recall > 0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

int default_contour_radius(int width, int height) {
  const double diagonal = std::sqrt(static_cast<double>(width) * width +
                                    static_cast<double>(height) * height);
  return std::max(1, static_cast<int>(std::lround(0.0075 * diagonal)));
}

double fwbw_consistency(const RoiMask& ref_mask, const Segmentation& ref_seg,
                        const MatchField& fw, const MatchField& bw) {
  if (ref_mask.width != ref_seg.width || ref_mask.height != ref_seg.height) {
    throw std::invalid_argument("fwbw_consistency: mask and segmentation disagree");
  }
  if (fw.map.size() != ref_seg.count) {
    throw std::invalid_argument("fwbw_consistency: forward field size disagrees");
  }
  const std::vector<std::uint32_t> roi = propagate_roi_labels(ref_mask, ref_seg);
  std::size_t numerator = 0;
  std::size_t denominator = 0;
  for (std::uint32_t f : roi) {
    denominator += ref_seg.members[f].size();
    const std::uint32_t forward = fw.map[f];
    if (forward >= bw.map.size()) {
      throw std::out_of_range("fwbw_consistency: forward match outside backward field");
    }
    if (bw.map[forward] == f) numerator += ref_seg.members[f].size();
  }
  if (denominator == 0) return 100.0;
  return 100.0 * static_cast<double>(numerator) / static_cast<double>(denominator);
}

}  // namespace spxtrack
