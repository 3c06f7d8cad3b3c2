#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "spxtrack/segmentation.hpp"

namespace spxtrack {

/// An RGB raster, 8 bits per channel, row-major triples.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  Frame() = default;
  Frame(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

  std::uint8_t at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  std::uint8_t& at(int x, int y, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  bool valid() const {
    return width >= 1 && height >= 1 && data.size() == pixel_count() * 3;
  }
};

/// A binary region-of-interest mask with the dimensions of its frame.
struct RoiMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // 0 or 1 per pixel, row-major

  RoiMask() = default;
  RoiMask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) {
    bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  std::size_t count_true() const;
};

/// An ordered list of same-sized frames with a designated reference frame.
/// Construction throws DataError when dimensions disagree or ref_index is
/// out of range.
class Sequence {
 public:
  Sequence(std::vector<Frame> frames, int ref_index);

  int size() const { return static_cast<int>(frames_.size()); }
  int ref_index() const { return ref_index_; }
  const Frame& frame(int i) const { return frames_.at(static_cast<std::size_t>(i)); }

 private:
  std::vector<Frame> frames_;
  int ref_index_;
};

/// Load a frame from binary PPM (P6, maxval 255) or 8-bit PNG
/// (RGB / RGBA with alpha dropped / grayscale replicated to RGB).
Frame load_frame(const std::filesystem::path& path);

/// Write a frame; format chosen by extension (.ppm -> P6, .png -> 8-bit RGB).
void write_frame(const Frame& frame, const std::filesystem::path& path);

/// Load a mask from an 8-bit grayscale or RGB image (PGM/PPM/PNG);
/// a pixel is true iff its first-channel intensity >= threshold.
RoiMask load_mask(const std::filesystem::path& path, int threshold = 128);

/// Write a mask as 8-bit grayscale, values 0/255 (.pgm -> P5, .png -> gray PNG).
void write_mask(const RoiMask& mask, const std::filesystem::path& path);

/// Emit a 16-bit single-channel PNG of superpixel indexes plus a sidecar
/// text file (same path with .txt extension) listing per-superpixel
/// centroid and size. Throws DataError above 65535 superpixels.
void write_label_map(const Segmentation& seg, const std::filesystem::path& path);

/// Read back a 16-bit label-map PNG written by write_label_map and rebuild
/// the full Segmentation (members and centroids recomputed).
Segmentation read_label_map(const std::filesystem::path& path);

}  // namespace spxtrack
