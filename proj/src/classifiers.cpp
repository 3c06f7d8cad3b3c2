#include "spxtrack/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "spxtrack/errors.hpp"
#include "spxtrack/parallel.hpp"
#include "spxtrack/rng.hpp"

namespace spxtrack {

namespace {

// Row-major [pixel][feature] matrix for one frame.
std::vector<double> feature_matrix(const Frame& frame, const FeatureBank& bank, int jobs) {
  IntegralStack stack(frame);
  const std::size_t n = frame.pixel_count();
  std::vector<double> x(n * bank.count);
  parallel_for(static_cast<std::size_t>(frame.height), jobs, [&](std::size_t y) {
    for (int px = 0; px < frame.width; ++px) {
      const std::size_t p = y * frame.width + px;
      features_at(stack, px, static_cast<int>(y), bank, x.data() + p * bank.count);
    }
  });
  return x;
}

double entropy_sum(const std::vector<std::uint32_t>& counts,
                   const std::vector<std::uint32_t>& touched) {
  // sum of c * log(c); entropy = log(n) - sum / n
  double s = 0;
  for (std::uint32_t cls : touched) {
    const double c = counts[cls];
    if (c > 0) s += c * std::log(c);
  }
  return s;
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<double>& x, const std::vector<std::uint32_t>& y,
              int feature_count, std::uint32_t class_count, const ForestConfig& cfg,
              std::uint64_t seed)
      : x_(x),
        y_(y),
        feature_count_(feature_count),
        cfg_(cfg),
        split_features_(cfg.split_features > 0
                            ? cfg.split_features
                            : static_cast<int>(std::ceil(std::sqrt(feature_count)))),
        rng_(seed),
        class_counts_(class_count, 0),
        left_counts_(class_count, 0),
        bucket_counts_(static_cast<std::size_t>(cfg.split_thresholds + 1) * class_count, 0) {}

  Tree build(std::vector<std::uint32_t> samples) {
    tree_.nodes.clear();
    grow(std::move(samples), 0);
    return std::move(tree_);
  }

 private:
  double value(std::uint32_t sample, int feature) const {
    return x_[static_cast<std::size_t>(sample) * feature_count_ + feature];
  }

  std::int32_t make_leaf(const std::vector<std::uint32_t>& touched, double total) {
    TreeNode node;
    SparseProbs hist;
    std::vector<std::uint32_t> sorted = touched;
    std::sort(sorted.begin(), sorted.end());
    for (std::uint32_t cls : sorted) {
      hist.emplace_back(cls, class_counts_[cls] / total);
    }
    node.histogram = std::move(hist);
    tree_.nodes.push_back(std::move(node));
    return static_cast<std::int32_t>(tree_.nodes.size() - 1);
  }

  std::int32_t grow(std::vector<std::uint32_t> samples, int depth) {
    std::vector<std::uint32_t> touched;
    for (std::uint32_t s : samples) {
      if (class_counts_[y_[s]]++ == 0) touched.push_back(y_[s]);
    }
    const double total = static_cast<double>(samples.size());

    const bool stop = depth >= cfg_.max_depth ||
                      samples.size() < 2 * static_cast<std::size_t>(cfg_.min_leaf) ||
                      touched.size() <= 1;
    if (!stop) {
      const double node_clogc = entropy_sum(class_counts_, touched);
      int best_feature = -1;
      double best_tau = 0;
      double best_gain = 1e-12;

      std::vector<int> feat(feature_count_);
      std::iota(feat.begin(), feat.end(), 0);
      const int tries = std::min(split_features_, feature_count_);
      for (int i = 0; i < tries; ++i) {
        const std::size_t j = i + rng_.next_below(static_cast<std::uint64_t>(feature_count_ - i));
        std::swap(feat[i], feat[j]);
        const int f = feat[i];

        double lo = value(samples[0], f);
        double hi = lo;
        for (std::uint32_t s : samples) {
          const double v = value(s, f);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        if (lo == hi) continue;

        std::vector<double> taus(static_cast<std::size_t>(cfg_.split_thresholds));
        for (double& t : taus) t = lo + rng_.next_double() * (hi - lo);
        std::sort(taus.begin(), taus.end());

        // bucket(v) = number of thresholds < v; the right side of split j
        // (1-indexed) is exactly the samples with bucket >= j
        const int nb = static_cast<int>(taus.size()) + 1;
        for (std::uint32_t cls : touched) {
          for (int b = 0; b < nb; ++b) bucket_counts_[b * class_counts_.size() + cls] = 0;
        }
        std::vector<std::uint32_t> bucket_totals(nb, 0);
        for (std::uint32_t s : samples) {
          const double v = value(s, f);
          int b = 0;
          while (b < static_cast<int>(taus.size()) && taus[b] < v) ++b;
          ++bucket_counts_[static_cast<std::size_t>(b) * class_counts_.size() + y_[s]];
          ++bucket_totals[b];
        }

        for (std::uint32_t cls : touched) left_counts_[cls] = 0;
        std::uint32_t left_total = 0;
        for (int j = 1; j <= static_cast<int>(taus.size()); ++j) {
          for (std::uint32_t cls : touched) {
            left_counts_[cls] += bucket_counts_[static_cast<std::size_t>(j - 1) * class_counts_.size() + cls];
          }
          left_total += bucket_totals[j - 1];
          if (j > 1 && taus[j - 1] == taus[j - 2]) continue;  // duplicate split point
          const std::uint32_t right_total = static_cast<std::uint32_t>(samples.size()) - left_total;
          if (left_total < static_cast<std::uint32_t>(cfg_.min_leaf) ||
              right_total < static_cast<std::uint32_t>(cfg_.min_leaf)) {
            continue;
          }
          double left_clogc = 0;
          double right_clogc = 0;
          for (std::uint32_t cls : touched) {
            const double cl = left_counts_[cls];
            const double cr = class_counts_[cls] - left_counts_[cls];
            if (cl > 0) left_clogc += cl * std::log(cl);
            if (cr > 0) right_clogc += cr * std::log(cr);
          }
          // information gain, all terms multiplied by the node size
          const double nl = left_total;
          const double nr = right_total;
          const double gain_times_n = (left_clogc + right_clogc - node_clogc) -
                                      (nl * std::log(nl) + nr * std::log(nr) -
                                       total * std::log(total));
          const double gain = gain_times_n / total;
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = f;
            best_tau = taus[j - 1];
          }
        }
      }

      if (best_feature >= 0) {
        for (std::uint32_t cls : touched) class_counts_[cls] = 0;

        std::vector<std::uint32_t> left, right;
        left.reserve(samples.size());
        for (std::uint32_t s : samples) {
          (value(s, best_feature) > best_tau ? right : left).push_back(s);
        }
        samples.clear();
        samples.shrink_to_fit();

        TreeNode node;
        node.feature = best_feature;
        node.threshold = best_tau;
        tree_.nodes.push_back(std::move(node));
        const std::int32_t idx = static_cast<std::int32_t>(tree_.nodes.size() - 1);
        const std::int32_t l = grow(std::move(left), depth + 1);
        const std::int32_t r = grow(std::move(right), depth + 1);
        tree_.nodes[idx].left = l;
        tree_.nodes[idx].right = r;
        return idx;
      }
    }

    const std::int32_t leaf = make_leaf(touched, total);
    for (std::uint32_t cls : touched) class_counts_[cls] = 0;
    return leaf;
  }

  const std::vector<double>& x_;
  const std::vector<std::uint32_t>& y_;
  int feature_count_;
  const ForestConfig& cfg_;
  int split_features_;
  SplitMix64 rng_;
  Tree tree_;
  std::vector<std::uint32_t> class_counts_;
  std::vector<std::uint32_t> left_counts_;
  std::vector<std::uint32_t> bucket_counts_;
};

const SparseProbs& route_to_leaf(const Tree& tree, const double* features) {
  std::int32_t idx = 0;
  for (;;) {
    const TreeNode& node = tree.nodes[idx];
    if (node.feature < 0) return node.histogram;
    idx = features[node.feature] > node.threshold ? node.right : node.left;
  }
}

}  // namespace

Forest train_forest(const Frame& target, const Segmentation& target_seg, const FeatureBank& bank,
                    const ForestConfig& cfg, int jobs) {
  if (target.width != target_seg.width || target.height != target_seg.height) {
    throw std::invalid_argument("train_forest: frame and segmentation dimensions disagree");
  }
  if (cfg.trees < 1) throw std::invalid_argument("train_forest: trees must be >= 1");
  if (cfg.min_leaf < 1) throw std::invalid_argument("train_forest: min_leaf must be >= 1");
  const std::size_t n = target.pixel_count();
  if (n < static_cast<std::size_t>(cfg.min_leaf)) {
    throw std::invalid_argument("train_forest: fewer training samples than min_leaf");
  }

  const std::vector<double> x = feature_matrix(target, bank, jobs);

  Forest forest;
  forest.feature_count = bank.count;
  forest.class_count = target_seg.count;
  forest.trees.resize(static_cast<std::size_t>(cfg.trees));

  parallel_for(static_cast<std::size_t>(cfg.trees), jobs, [&](std::size_t t) {
    SplitMix64 rng(derive_seed(cfg.seed, t));

    std::vector<std::uint32_t> base(n);
    std::iota(base.begin(), base.end(), 0);
    if (cfg.subsample < 1.0) {
      const std::size_t m = std::max<std::size_t>(
          1, static_cast<std::size_t>(cfg.subsample * static_cast<double>(n)));
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + rng.next_below(n - i);
        std::swap(base[i], base[j]);
      }
      base.resize(m);
    }
    std::vector<std::uint32_t> samples;
    if (cfg.bootstrap) {
      samples.resize(base.size());
      for (std::uint32_t& s : samples) s = base[rng.next_below(base.size())];
    } else {
      samples = std::move(base);
    }

    TreeBuilder builder(x, target_seg.labels, bank.count, target_seg.count, cfg,
                        derive_seed(cfg.seed, 0x10000000ULL + t));
    forest.trees[t] = builder.build(std::move(samples));
  });
  return forest;
}

PosteriorField forest_posteriors(const Forest& forest, const Frame& source,
                                 const FeatureBank& bank, int jobs) {
  if (bank.count != forest.feature_count) {
    throw std::invalid_argument("forest_posteriors: feature bank size differs from training");
  }
  IntegralStack stack(source);
  PosteriorField field;
  field.width = source.width;
  field.height = source.height;
  field.probs.resize(source.pixel_count());

  const double weight = 1.0 / static_cast<double>(forest.trees.size());
  parallel_for(static_cast<std::size_t>(source.height), jobs, [&](std::size_t y) {
    std::vector<double> features(static_cast<std::size_t>(bank.count));
    SparseAccumulator acc;
    for (int px = 0; px < source.width; ++px) {
      features_at(stack, px, static_cast<int>(y), bank, features.data());
      for (const Tree& tree : forest.trees) {
        acc.add(route_to_leaf(tree, features.data()), weight);
      }
      field.probs[y * source.width + px] = acc.take_normalized();
    }
  });
  return field;
}

PosteriorField knn_posteriors(const Frame& target, const Segmentation& target_seg,
                              const Frame& source, const FeatureBank& bank, int k, int jobs) {
  if (target.width != target_seg.width || target.height != target_seg.height) {
    throw std::invalid_argument("knn_posteriors: frame and segmentation dimensions disagree");
  }
  const std::size_t n_train = target.pixel_count();
  if (k < 1) throw std::invalid_argument("knn_posteriors: k must be >= 1");
  if (static_cast<std::size_t>(k) > n_train) {
    throw std::invalid_argument("knn_posteriors: k exceeds training size");
  }

  const std::vector<double> xt = feature_matrix(target, bank, jobs);
  IntegralStack stack(source);

  PosteriorField field;
  field.width = source.width;
  field.height = source.height;
  field.probs.resize(source.pixel_count());

  using Entry = std::pair<double, std::uint32_t>;  // (squared distance, training index)
  parallel_for(static_cast<std::size_t>(source.height), jobs, [&](std::size_t y) {
    std::vector<double> q(static_cast<std::size_t>(bank.count));
    std::priority_queue<Entry> heap;  // max-heap: top is the worst kept neighbor
    for (int px = 0; px < source.width; ++px) {
      features_at(stack, px, static_cast<int>(y), bank, q.data());
      while (!heap.empty()) heap.pop();
      for (std::uint32_t i = 0; i < n_train; ++i) {
        const double* t = xt.data() + static_cast<std::size_t>(i) * bank.count;
        double d2 = 0;
        if (heap.size() < static_cast<std::size_t>(k)) {
          for (int m = 0; m < bank.count; ++m) {
            const double d = q[m] - t[m];
            d2 += d * d;
          }
          heap.emplace(d2, i);
        } else {
          const double limit = heap.top().first;
          bool over = false;
          for (int m = 0; m < bank.count; ++m) {
            const double d = q[m] - t[m];
            d2 += d * d;
            if (d2 > limit) {
              over = true;
              break;
            }
          }
          if (!over && Entry(d2, i) < heap.top()) {
            heap.pop();
            heap.emplace(d2, i);
          }
        }
      }
      // exact class frequencies among the k neighbors
      std::map<std::uint32_t, int> counts;
      while (!heap.empty()) {
        ++counts[target_seg.labels[heap.top().second]];
        heap.pop();
      }
      SparseProbs v;
      for (const auto& [cls, n] : counts) {
        v.emplace_back(cls, static_cast<double>(n) / static_cast<double>(k));
      }
      field.probs[y * source.width + px] = std::move(v);
    }
  });
  return field;
}

void save_forest(const Forest& forest, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path.string() + ": unwritable path");
  out << "spxforest 1\n";
  out << forest.trees.size() << " " << forest.feature_count << " " << forest.class_count << "\n";
  char buf[64];
  for (const Tree& tree : forest.trees) {
    out << "tree " << tree.nodes.size() << "\n";
    for (const TreeNode& node : tree.nodes) {
      std::snprintf(buf, sizeof(buf), "%.17g", node.threshold);
      out << node.feature << " " << buf << " " << node.left << " " << node.right << " "
          << node.histogram.size();
      for (const auto& [cls, p] : node.histogram) {
        std::snprintf(buf, sizeof(buf), "%.17g", p);
        out << " " << cls << " " << buf;
      }
      out << "\n";
    }
  }
  if (!out) throw DataError(path.string() + ": write failed");
}

Forest load_forest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": unreadable file");
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "spxforest" || version != 1) {
    throw DataError(path.string() + ": not a version-1 forest file");
  }
  std::size_t trees = 0;
  Forest forest;
  in >> trees >> forest.feature_count >> forest.class_count;
  forest.trees.resize(trees);
  for (Tree& tree : forest.trees) {
    std::string tag;
    std::size_t nodes = 0;
    in >> tag >> nodes;
    if (tag != "tree") throw DataError(path.string() + ": malformed forest file");
    tree.nodes.resize(nodes);
    for (TreeNode& node : tree.nodes) {
      std::size_t hist = 0;
      in >> node.feature >> node.threshold >> node.left >> node.right >> hist;
      node.histogram.resize(hist);
      for (auto& [cls, p] : node.histogram) in >> cls >> p;
    }
  }
  if (!in) throw DataError(path.string() + ": truncated forest file");
  return forest;
}

}  // namespace spxtrack
