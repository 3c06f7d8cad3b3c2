#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "spxtrack/classifiers.hpp"
#include "spxtrack/image.hpp"
#include "spxtrack/matching.hpp"
#include "spxtrack/multistep.hpp"
#include "spxtrack/roi.hpp"
#include "spxtrack/slic.hpp"

namespace spxtrack {

enum class ClassifierKind { forest, knn };
enum class MatcherKind { vote, soft, fwbw };
enum class Direction { to_reference, from_reference };

struct TrackerConfig {
  ClassifierKind classifier = ClassifierKind::forest;
  MatcherKind matcher = MatcherKind::fwbw;
  MsiStrategy msi_strategy = MsiStrategy::mutual;
  StepPlan plan;
  SlicConfig slic;
  int bank_count = 80;
  int bank_radius = 40;
  std::vector<int> box_sizes{3, 5, 7};
  ForestConfig forest;
  int knn_k = 5;
  Direction direction = Direction::to_reference;
  std::uint64_t master_seed = 0;
  int jobs = 1;

  // Every stream seed is a fixed offset of the master seed.
  std::uint64_t slic_seed() const { return master_seed; }
  std::uint64_t bank_seed() const { return master_seed + 1; }
  std::uint64_t forest_seed() const { return master_seed + 2; }
  std::uint64_t sampling_seed() const { return master_seed + 3; }
  std::uint64_t reverse_sampling_seed() const { return master_seed + 4; }
};

/// Write-once store of elementary match fields keyed by ordered frame
/// pair; optionally backed by a directory of CSV files so fields are
/// reused across runs and pipeline stages.
class FieldCache {
 public:
  FieldCache() = default;
  explicit FieldCache(std::filesystem::path dir);

  /// Memory first, then the backing directory. Loaded-from-disk fields
  /// count as reused.
  const MatchField* find(int from, int to) const;
  const MatchField& get(int from, int to) const;
  void put(MatchField field);

  FieldLookup lookup() const;

  std::size_t computed() const { return computed_; }
  std::size_t reused() const { return reused_; }

 private:
  std::filesystem::path csv_path(int from, int to) const;

  mutable std::mutex mutex_;
  mutable std::map<std::pair<int, int>, MatchField> fields_;
  std::optional<std::filesystem::path> dir_;
  mutable std::size_t computed_ = 0;
  mutable std::size_t reused_ = 0;
};

struct TrackResult {
  int ref_index = 0;
  std::vector<int> frames;               // every n != ref, ascending
  std::vector<MatchField> from_ref;      // reference -> n, aligned with frames
  std::vector<MatchField> to_ref;        // n -> reference, aligned with frames
  std::vector<RoiMask> masks;            // empty when no reference mask was given
  std::vector<std::uint32_t> ref_object; // reference superpixels inside the ROI
  std::vector<Segmentation> segmentations;  // one per sequence frame
  double prep_seconds = 0;
  double fields_seconds = 0;
  double integrate_seconds = 0;
};

/// One elementary match per frame against the reference, in both temporal
/// directions; masks painted along cfg.direction.
TrackResult track_dir(const Sequence& seq, const std::optional<RoiMask>& ref_mask,
                      const TrackerConfig& cfg, FieldCache* cache = nullptr);

/// Chained step-1 matching through every intermediate frame.
TrackResult track_seq(const Sequence& seq, const std::optional<RoiMask>& ref_mask,
                      const TrackerConfig& cfg, FieldCache* cache = nullptr);

/// Multi-step integration: sample step sequences per frame, compose the
/// cached elementary fields along them, and vote per cfg.msi_strategy.
TrackResult track_msi(const Sequence& seq, const std::optional<RoiMask>& ref_mask,
                      const TrackerConfig& cfg, FieldCache* cache = nullptr);

/// Precompute the elementary fields for every (n, n+step) pair of the
/// sequence, in both temporal directions.
void compute_elementary_fields(const Sequence& seq, const std::vector<int>& step_set,
                               const TrackerConfig& cfg, FieldCache& cache);

}  // namespace spxtrack
