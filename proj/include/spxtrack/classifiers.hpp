#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "spxtrack/features.hpp"
#include "spxtrack/image.hpp"
#include "spxtrack/posterior.hpp"
#include "spxtrack/segmentation.hpp"

namespace spxtrack {

struct ForestConfig {
  int trees = 100;
  int max_depth = 20;
  int min_leaf = 5;
  int split_features = 0;     // candidate features per node; 0 -> ceil(sqrt(bank.count))
  int split_thresholds = 10;  // candidate thresholds per feature
  bool bootstrap = true;
  double subsample = 1.0;  // fraction of training pixels used per tree
  std::uint64_t seed = 0;
};

/// One binary decision tree. Internal nodes route right when
/// feature value > threshold; leaves hold a normalized class histogram.
struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  SparseProbs histogram;  // leaves only
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct Forest {
  std::vector<Tree> trees;
  int feature_count = 0;        // bank size seen at training time
  std::uint32_t class_count = 0;
};

/// Grow a forest on the target frame using its superpixel indexes as
/// pixel-wise class labels. Each node picks the candidate
/// (feature, threshold) pair with maximal Shannon information gain.
/// Deterministic given all inputs; trees are independent given per-tree
/// seeds, so training may run on several threads.
Forest train_forest(const Frame& target, const Segmentation& target_seg, const FeatureBank& bank,
                    const ForestConfig& cfg, int jobs = 1);

/// Route every source pixel down all trees and average the reached leaf
/// histograms. Throws std::invalid_argument when the bank size differs
/// from the training bank.
PosteriorField forest_posteriors(const Forest& forest, const Frame& source,
                                 const FeatureBank& bank, int jobs = 1);

void save_forest(const Forest& forest, const std::filesystem::path& path);
Forest load_forest(const std::filesystem::path& path);

/// Exact k-nearest-neighbor posteriors: train on the target frame's
/// pixels, query every source pixel, posterior = class frequencies among
/// the k Euclidean-nearest training pixels (uniform weights). Distance
/// ties break toward the lower training-pixel linear index.
PosteriorField knn_posteriors(const Frame& target, const Segmentation& target_seg,
                              const Frame& source, const FeatureBank& bank, int k, int jobs = 1);

}  // namespace spxtrack
