#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "spxtrack/posterior.hpp"
#include "spxtrack/segmentation.hpp"

namespace spxtrack {

/// A total map from source superpixel indexes to target superpixel
/// indexes for one ordered frame pair, with optional per-superpixel
/// probability vectors.
struct MatchField {
  int source_frame = -1;
  int target_frame = -1;
  std::vector<std::uint32_t> map;
  std::optional<std::vector<SparseProbs>> soft;

  bool operator==(const MatchField& other) const {
    return source_frame == other.source_frame && target_frame == other.target_frame &&
           map == other.map;
  }
};

/// Per-pixel class of maximal posterior; ties toward the lowest class.
std::vector<std::uint32_t> pixel_argmax(const PosteriorField& field);

/// Majority vote of the pixel-level predictions within each source
/// superpixel; ties toward the lowest target index.
MatchField match_by_vote(const std::vector<std::uint32_t>& pixel_map,
                         const Segmentation& source_seg);

/// Mean of the member pixels' posterior vectors per source superpixel.
std::vector<SparseProbs> superpixel_posteriors(const PosteriorField& field,
                                               const Segmentation& source_seg);

/// Argmax of each superpixel-level vector; the vectors are retained as
/// the soft part of the result.
MatchField match_by_soft_argmax(const std::vector<SparseProbs>& sp_posteriors);

/// Consistency-aware matching: argmax over targets of
/// forward probability times the backward probability of the source.
/// When every product is zero the forward argmax is used.
MatchField match_fwbw(const std::vector<SparseProbs>& fw, const std::vector<SparseProbs>& bw);

/// CSV cache format: one "source_index,target_index" row per superpixel.
void write_match_csv(const MatchField& field, const std::filesystem::path& path);
MatchField load_match_csv(const std::filesystem::path& path);

}  // namespace spxtrack
