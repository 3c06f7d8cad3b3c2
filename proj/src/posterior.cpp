#include "spxtrack/posterior.hpp"

#include <algorithm>

namespace spxtrack {

double sparse_prob(const SparseProbs& v, std::uint32_t cls) {
  auto it = std::lower_bound(v.begin(), v.end(), cls,
                             [](const auto& e, std::uint32_t c) { return e.first < c; });
  return (it != v.end() && it->first == cls) ? it->second : 0.0;
}

std::uint32_t sparse_argmax(const SparseProbs& v) {
  std::uint32_t best = 0;
  double best_p = -1.0;
  for (const auto& [cls, p] : v) {
    if (p > best_p) {
      best_p = p;
      best = cls;
    }
  }
  return best;
}

void sparse_normalize(SparseProbs& v) {
  double total = 0;
  for (const auto& e : v) total += e.second;
  if (total <= 0) return;
  for (auto& e : v) e.second /= total;
}

void SparseAccumulator::add(const SparseProbs& v, double weight) {
  for (const auto& [cls, p] : v) entries_.emplace_back(cls, p * weight);
}

void SparseAccumulator::add_one(std::uint32_t cls, double weight) {
  entries_.emplace_back(cls, weight);
}

SparseProbs SparseAccumulator::take_normalized() {
  std::sort(entries_.begin(), entries_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseProbs out;
  for (const auto& [cls, p] : entries_) {
    if (!out.empty() && out.back().first == cls) {
      out.back().second += p;
    } else {
      out.emplace_back(cls, p);
    }
  }
  entries_.clear();
  sparse_normalize(out);
  return out;
}

}  // namespace spxtrack
