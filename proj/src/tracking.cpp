#include "spxtrack/tracking.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "spxtrack/errors.hpp"
#include "spxtrack/parallel.hpp"
#include "spxtrack/rng.hpp"

namespace spxtrack {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

FieldCache::FieldCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(*dir_);
}

std::filesystem::path FieldCache::csv_path(int from, int to) const {
  char name[48];
  std::snprintf(name, sizeof(name), "field_%04d_%04d.csv", from, to);
  return *dir_ / name;
}

const MatchField* FieldCache::find(int from, int to) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = fields_.find({from, to});
  if (it != fields_.end()) return &it->second;
  if (dir_) {
    const std::filesystem::path p = csv_path(from, to);
    if (std::filesystem::exists(p)) {
      MatchField f = load_match_csv(p);
      f.source_frame = from;
      f.target_frame = to;
      ++reused_;
      auto [pos, inserted] = fields_.emplace(std::make_pair(from, to), std::move(f));
      return &pos->second;
    }
  }
  return nullptr;
}

const MatchField& FieldCache::get(int from, int to) const {
  const MatchField* f = find(from, to);
  if (!f) {
    throw DataError("field cache: missing elementary field (" + std::to_string(from) + ", " +
                    std::to_string(to) + ")");
  }
  return *f;
}

void FieldCache::put(MatchField field) {
  const std::pair<int, int> key{field.source_frame, field.target_frame};
  std::lock_guard<std::mutex> lock(mutex_);
  if (fields_.count(key)) return;
  if (dir_) write_match_csv(field, csv_path(key.first, key.second));
  fields_.emplace(key, std::move(field));
  ++computed_;
}

FieldLookup FieldCache::lookup() const {
  return [this](int from, int to) -> const MatchField& { return get(from, to); };
}

namespace {

// Per-run working set: bank, per-frame segmentations and integral stacks.
struct Engine {
  const Sequence& seq;
  const TrackerConfig& cfg;
  FieldCache& cache;
  FeatureBank bank;
  std::vector<Segmentation> segs;
  std::vector<IntegralStack> stacks;

  Engine(const Sequence& s, const TrackerConfig& c, FieldCache& fc)
      : seq(s), cfg(c), cache(fc) {
    bank = generate_bank(cfg.bank_seed(), cfg.bank_count, cfg.bank_radius, cfg.box_sizes);
    segs.resize(static_cast<std::size_t>(seq.size()));
    parallel_for(static_cast<std::size_t>(seq.size()), cfg.jobs, [&](std::size_t i) {
      segs[i] = segment(seq.frame(static_cast<int>(i)), cfg.slic, cfg.slic_seed());
    });
    stacks.reserve(static_cast<std::size_t>(seq.size()));
    for (int i = 0; i < seq.size(); ++i) stacks.emplace_back(seq.frame(i));
  }

  PosteriorField posteriors(int source, int target, int jobs) const {
    if (cfg.classifier == ClassifierKind::knn) {
      return knn_posteriors(seq.frame(target), segs[target], seq.frame(source), bank, cfg.knn_k,
                            jobs);
    }
    ForestConfig fc = cfg.forest;
    fc.seed = derive_seed(cfg.forest_seed(), pair_tag(target, source));
    const Forest forest = train_forest(seq.frame(target), segs[target], bank, fc, jobs);
    return forest_posteriors(forest, seq.frame(source), bank, jobs);
  }

  MatchField to_field(const PosteriorField& pf, int source, int target) const {
    MatchField f;
    if (cfg.matcher == MatcherKind::vote) {
      f = match_by_vote(pixel_argmax(pf), segs[source]);
    } else {
      f = match_by_soft_argmax(superpixel_posteriors(pf, segs[source]));
    }
    f.source_frame = source;
    f.target_frame = target;
    return f;
  }

  // Compute both directions of one frame pair and store them.
  void compute_pair(int a, int b, int jobs) {
    const PosteriorField pf_ab = posteriors(a, b, jobs);
    const PosteriorField pf_ba = posteriors(b, a, jobs);
    if (cfg.matcher == MatcherKind::fwbw) {
      const std::vector<SparseProbs> spp_ab = superpixel_posteriors(pf_ab, segs[a]);
      const std::vector<SparseProbs> spp_ba = superpixel_posteriors(pf_ba, segs[b]);
      MatchField f_ab = match_fwbw(spp_ab, spp_ba);
      f_ab.source_frame = a;
      f_ab.target_frame = b;
      MatchField f_ba = match_fwbw(spp_ba, spp_ab);
      f_ba.source_frame = b;
      f_ba.target_frame = a;
      cache.put(std::move(f_ab));
      cache.put(std::move(f_ba));
    } else {
      cache.put(to_field(pf_ab, a, b));
      cache.put(to_field(pf_ba, b, a));
    }
  }

  void ensure_pairs(const std::vector<std::pair<int, int>>& pairs) {
    std::vector<std::pair<int, int>> missing;
    for (const auto& [a, b] : pairs) {
      if (!cache.find(a, b) || !cache.find(b, a)) missing.emplace_back(a, b);
    }
    const int outer = std::min<int>(cfg.jobs, static_cast<int>(missing.size()));
    const int inner = outer > 0 ? std::max(1, cfg.jobs / outer) : 1;
    parallel_for(missing.size(), cfg.jobs,
                 [&](std::size_t i) { compute_pair(missing[i].first, missing[i].second, inner); });
  }

  std::vector<int> non_ref_frames() const {
    std::vector<int> frames;
    for (int n = 0; n < seq.size(); ++n) {
      if (n != seq.ref_index()) frames.push_back(n);
    }
    return frames;
  }

  void paint_masks(TrackResult& result, const std::optional<RoiMask>& ref_mask) const {
    if (!ref_mask) return;
    const int ref = seq.ref_index();
    if (ref_mask->width != seq.frame(0).width || ref_mask->height != seq.frame(0).height) {
      throw DataError("reference mask dimensions disagree with the sequence");
    }
    result.ref_object = propagate_roi_labels(*ref_mask, segs[ref]);
    std::vector<std::uint8_t> in_object(segs[ref].count, 0);
    for (std::uint32_t f : result.ref_object) in_object[f] = 1;

    result.masks.resize(result.frames.size());
    for (std::size_t r = 0; r < result.frames.size(); ++r) {
      const int n = result.frames[r];
      if (cfg.direction == Direction::to_reference) {
        std::vector<std::uint32_t> selected;
        const MatchField& field = result.to_ref[r];
        for (std::uint32_t f = 0; f < segs[n].count; ++f) {
          if (field.map[f] < in_object.size() && in_object[field.map[f]]) selected.push_back(f);
        }
        result.masks[r] = paint_superpixels(segs[n], selected);
      } else {
        std::set<std::uint32_t> targets;
        const MatchField& field = result.from_ref[r];
        for (std::uint32_t f : result.ref_object) targets.insert(field.map[f]);
        result.masks[r] =
            paint_superpixels(segs[n], {targets.begin(), targets.end()});
      }
    }
  }
};

std::vector<std::pair<int, int>> step_pairs(int frame_count, const std::vector<int>& step_set) {
  std::set<std::pair<int, int>> pairs;
  for (int n = 0; n < frame_count; ++n) {
    for (int a : step_set) {
      if (n + a < frame_count) pairs.insert({n, n + a});
    }
  }
  return {pairs.begin(), pairs.end()};
}

}  // namespace

void compute_elementary_fields(const Sequence& seq, const std::vector<int>& step_set,
                               const TrackerConfig& cfg, FieldCache& cache) {
  Engine engine(seq, cfg, cache);
  engine.ensure_pairs(step_pairs(seq.size(), step_set));
}

TrackResult track_dir(const Sequence& seq, const std::optional<RoiMask>& ref_mask,
                      const TrackerConfig& cfg, FieldCache* cache) {
  FieldCache local;
  FieldCache& fields = cache ? *cache : local;
  const auto t0 = Clock::now();
  Engine engine(seq, cfg, fields);

  TrackResult result;
  result.ref_index = seq.ref_index();
  result.frames = engine.non_ref_frames();
  result.prep_seconds = seconds_since(t0);

  const auto t1 = Clock::now();
  std::vector<std::pair<int, int>> pairs;
  for (int n : result.frames) pairs.emplace_back(n, seq.ref_index());
  engine.ensure_pairs(pairs);
  result.fields_seconds = seconds_since(t1);

  const auto t2 = Clock::now();
  for (int n : result.frames) {
    result.from_ref.push_back(fields.get(seq.ref_index(), n));
    result.to_ref.push_back(fields.get(n, seq.ref_index()));
  }
  engine.paint_masks(result, ref_mask);
  result.integrate_seconds = seconds_since(t2);
  result.segmentations = std::move(engine.segs);
  return result;
}

TrackResult track_seq(const Sequence& seq, const std::optional<RoiMask>& ref_mask,
                      const TrackerConfig& cfg, FieldCache* cache) {
  if (std::find(cfg.plan.step_set.begin(), cfg.plan.step_set.end(), 1) ==
      cfg.plan.step_set.end()) {
    throw ConfigError("sequential integration requires step 1 in the step set");
  }
  FieldCache local;
  FieldCache& fields = cache ? *cache : local;
  const auto t0 = Clock::now();
  Engine engine(seq, cfg, fields);

  TrackResult result;
  result.ref_index = seq.ref_index();
  result.frames = engine.non_ref_frames();
  result.prep_seconds = seconds_since(t0);

  const auto t1 = Clock::now();
  std::vector<std::pair<int, int>> pairs;
  for (int n = 0; n + 1 < seq.size(); ++n) pairs.emplace_back(n, n + 1);
  engine.ensure_pairs(pairs);
  result.fields_seconds = seconds_since(t1);

  const auto t2 = Clock::now();
  const int ref = seq.ref_index();
  std::map<int, MatchField> from_ref, to_ref;
  for (int dir : {-1, +1}) {
    MatchField forward, backward;
    bool started = false;
    for (int n = ref + dir; n >= 0 && n < seq.size(); n += dir) {
      if (!started) {
        forward = fields.get(ref, n);
        backward = fields.get(n, ref);
        started = true;
      } else {
        const MatchField& hop_fw = fields.get(n - dir, n);
        for (std::uint32_t& m : forward.map) m = hop_fw.map[m];
        forward.target_frame = n;
        const MatchField& hop_bw = fields.get(n, n - dir);
        MatchField next_bw;
        next_bw.source_frame = n;
        next_bw.target_frame = ref;
        next_bw.map.resize(hop_bw.map.size());
        for (std::size_t i = 0; i < hop_bw.map.size(); ++i) {
          next_bw.map[i] = backward.map[hop_bw.map[i]];
        }
        backward = std::move(next_bw);
      }
      from_ref[n] = forward;
      from_ref[n].soft.reset();
      to_ref[n] = backward;
      to_ref[n].soft.reset();
    }
  }
  for (int n : result.frames) {
    result.from_ref.push_back(from_ref.at(n));
    result.to_ref.push_back(to_ref.at(n));
  }
  engine.paint_masks(result, ref_mask);
  result.integrate_seconds = seconds_since(t2);
  result.segmentations = std::move(engine.segs);
  return result;
}

TrackResult track_msi(const Sequence& seq, const std::optional<RoiMask>& ref_mask,
                      const TrackerConfig& cfg, FieldCache* cache) {
  FieldCache local;
  FieldCache& fields = cache ? *cache : local;
  const auto t0 = Clock::now();
  Engine engine(seq, cfg, fields);

  TrackResult result;
  result.ref_index = seq.ref_index();
  result.frames = engine.non_ref_frames();
  result.prep_seconds = seconds_since(t0);

  const auto t1 = Clock::now();
  engine.ensure_pairs(step_pairs(seq.size(), cfg.plan.step_set));
  result.fields_seconds = seconds_since(t1);

  const auto t2 = Clock::now();
  const int ref = seq.ref_index();
  const FieldLookup lookup = fields.lookup();
  result.from_ref.resize(result.frames.size());
  result.to_ref.resize(result.frames.size());
  parallel_for(result.frames.size(), cfg.jobs, [&](std::size_t r) {
    const int n = result.frames[r];
    const int distance = std::abs(n - ref);

    StepPlan plan_fw = cfg.plan;
    plan_fw.seed = derive_seed(cfg.sampling_seed(), static_cast<std::uint64_t>(n));
    StepPlan plan_bw = cfg.plan;
    plan_bw.seed = derive_seed(cfg.reverse_sampling_seed(), static_cast<std::uint64_t>(n));
    const std::vector<StepSequence> direct = prune_and_sample(distance, plan_fw);
    const std::vector<StepSequence> reverse = prune_and_sample(distance, plan_bw);
    if (direct.empty() || reverse.empty()) {
      throw DataError("multi-step integration: distance " + std::to_string(distance) +
                      " unreachable with the configured steps and K_max");
    }

    const std::uint32_t ref_count = engine.segs[ref].count;
    const std::uint32_t n_count = engine.segs[n].count;
    MatchField fwd = select_long_term(
        gather_candidates(lookup, direct, reverse, ref, n, ref_count, n_count),
        cfg.msi_strategy);
    fwd.source_frame = ref;
    fwd.target_frame = n;
    result.from_ref[r] = std::move(fwd);

    MatchField bwd = select_long_term(
        gather_candidates(lookup, reverse, direct, n, ref, n_count, ref_count),
        cfg.msi_strategy);
    bwd.source_frame = n;
    bwd.target_frame = ref;
    result.to_ref[r] = std::move(bwd);
  });
  engine.paint_masks(result, ref_mask);
  result.integrate_seconds = seconds_since(t2);
  result.segmentations = std::move(engine.segs);
  return result;
}

}  // namespace spxtrack
