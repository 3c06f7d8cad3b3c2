#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace spxtrack {

/// Sparse probability vector over superpixel classes, sorted by class
/// index, entries > 0, probabilities summing to 1.
using SparseProbs = std::vector<std::pair<std::uint32_t, double>>;

/// Per-pixel probability vectors over the target frame's superpixel
/// classes.
struct PosteriorField {
  int width = 0;
  int height = 0;
  std::vector<SparseProbs> probs;

  const SparseProbs& at(int x, int y) const {
    return probs[static_cast<std::size_t>(y) * width + x];
  }
};

/// Probability of one class inside a sparse vector (0 when absent).
double sparse_prob(const SparseProbs& v, std::uint32_t cls);

/// Argmax class; ties resolved toward the lowest class index.
std::uint32_t sparse_argmax(const SparseProbs& v);

/// Scale so the entries sum to 1 (no-op on an empty vector).
void sparse_normalize(SparseProbs& v);

/// Accumulator for sparse probability sums keyed by class index.
/// Deterministic: extraction sorts by class.
class SparseAccumulator {
 public:
  void add(const SparseProbs& v, double weight = 1.0);
  void add_one(std::uint32_t cls, double weight);
  SparseProbs take_normalized();
  void clear() { entries_.clear(); }

 private:
  std::vector<std::pair<std::uint32_t, double>> entries_;  // unsorted, may repeat
};

}  // namespace spxtrack
