#include "spxtrack/multistep.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

#include "spxtrack/rng.hpp"

namespace spxtrack {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > kSaturated - b ? kSaturated : a + b;
}

std::vector<int> sorted_steps(const std::vector<int>& step_set) {
  std::vector<int> steps = step_set;
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  if (steps.empty() || steps.front() < 1) {
    throw std::invalid_argument("step set must contain positive steps");
  }
  return steps;
}

// counts[d * (k_max + 1) + k]: compositions of d into at most k parts
std::vector<std::uint64_t> bounded_count_table(int distance, const std::vector<int>& steps,
                                               int k_max) {
  std::vector<std::uint64_t> table(static_cast<std::size_t>(distance + 1) * (k_max + 1), 0);
  for (int k = 0; k <= k_max; ++k) table[k] = 1;  // d == 0
  for (int d = 1; d <= distance; ++d) {
    for (int k = 1; k <= k_max; ++k) {
      std::uint64_t total = 0;
      for (int a : steps) {
        if (a > d) break;
        total = saturating_add(total, table[static_cast<std::size_t>(d - a) * (k_max + 1) + k - 1]);
      }
      table[static_cast<std::size_t>(d) * (k_max + 1) + k] = total;
    }
  }
  return table;
}

// Depth-first generation, ascending steps, emitting sequence ranks in
// order. `keep` decides whether a finished sequence is materialized.
template <typename Keep>
void bounded_dfs(int distance, const std::vector<int>& steps, int k_max, Keep&& keep) {
  StepSequence current;
  std::uint64_t rank = 0;
  bool stop = false;
  auto rec = [&](auto&& self, int remaining) -> void {
    if (stop) return;
    if (remaining == 0) {
      if (!keep(rank, current)) stop = true;
      ++rank;
      return;
    }
    if (static_cast<int>(current.size()) == k_max) return;
    for (int a : steps) {
      if (a > remaining) break;
      current.push_back(a);
      self(self, remaining - a);
      current.pop_back();
      if (stop) return;
    }
  };
  rec(rec, distance);
}

}  // namespace

std::vector<StepSequence> enumerate_sequences(int distance, const std::vector<int>& step_set) {
  if (distance < 1) throw std::invalid_argument("enumerate_sequences: distance must be >= 1");
  const std::vector<int> steps = sorted_steps(step_set);
  std::vector<StepSequence> out;
  bounded_dfs(distance, steps, std::numeric_limits<int>::max(),
              [&](std::uint64_t, const StepSequence& s) {
                out.push_back(s);
                return true;
              });
  return out;
}

std::uint64_t count_sequences(int distance, const std::vector<int>& step_set) {
  if (distance < 0) throw std::invalid_argument("count_sequences: distance must be >= 0");
  const std::vector<int> steps = sorted_steps(step_set);
  std::vector<std::uint64_t> f(static_cast<std::size_t>(distance) + 1, 0);
  f[0] = 1;
  for (int d = 1; d <= distance; ++d) {
    std::uint64_t total = 0;
    for (int a : steps) {
      if (a > d) break;
      total = saturating_add(total, f[d - a]);
    }
    f[d] = total;
  }
  return f[distance];
}

std::vector<StepSequence> prune_and_sample(int distance, const StepPlan& plan) {
  if (distance < 1) throw std::invalid_argument("prune_and_sample: distance must be >= 1");
  if (plan.k_max < 1 || plan.budget < 1) {
    throw std::invalid_argument("prune_and_sample: k_max and budget must be >= 1");
  }
  const std::vector<int> steps = sorted_steps(plan.step_set);
  const std::vector<std::uint64_t> table = bounded_count_table(distance, steps, plan.k_max);
  const std::uint64_t total = table[static_cast<std::size_t>(distance) * (plan.k_max + 1) +
                                    plan.k_max];
  const std::uint64_t budget = static_cast<std::uint64_t>(plan.budget);

  std::vector<StepSequence> out;
  if (total <= budget) {
    bounded_dfs(distance, steps, plan.k_max, [&](std::uint64_t, const StepSequence& s) {
      out.push_back(s);
      return true;
    });
    return out;
  }

  SplitMix64 rng(plan.seed);
  constexpr std::uint64_t kMaterializeLimit = 5'000'000;
  if (total <= kMaterializeLimit) {
    // uniform subset of sequence ranks (Floyd), then one streaming DFS
    // pass picking out the ranked sequences
    std::set<std::uint64_t> ranks;
    for (std::uint64_t j = total - budget; j < total; ++j) {
      const std::uint64_t t = rng.next_below(j + 1);
      ranks.insert(ranks.count(t) ? j : t);
    }
    const std::uint64_t last = *ranks.rbegin();
    out.reserve(ranks.size());
    bounded_dfs(distance, steps, plan.k_max, [&](std::uint64_t rank, const StepSequence& s) {
      if (ranks.count(rank)) out.push_back(s);
      return rank < last;
    });
    return out;
  }

  // Astronomically many sequences: random root-to-leaf walks over the
  // feasibility-pruned tree, rejecting duplicates, capped at 50x budget
  // attempts.
  std::set<StepSequence> seen;
  const std::uint64_t attempts_cap = 50 * budget;
  std::vector<int> feasible;
  for (std::uint64_t attempt = 0; attempt < attempts_cap && seen.size() < budget; ++attempt) {
    StepSequence s;
    int remaining = distance;
    while (remaining > 0) {
      feasible.clear();
      const int slots = plan.k_max - static_cast<int>(s.size()) - 1;
      for (int a : steps) {
        if (a > remaining) break;
        if ((a == remaining && slots >= 0) ||
            (slots >= 1 &&
             table[static_cast<std::size_t>(remaining - a) * (plan.k_max + 1) + slots] > 0)) {
          feasible.push_back(a);
        }
      }
      if (feasible.empty()) break;
      const int a = feasible[rng.next_below(feasible.size())];
      s.push_back(a);
      remaining -= a;
    }
    if (remaining == 0) seen.insert(std::move(s));
  }
  out.assign(seen.begin(), seen.end());
  return out;
}

MatchField compose_path(const FieldLookup& fields, const StepSequence& steps, int start_frame,
                        int end_frame) {
  if (steps.empty()) throw std::invalid_argument("compose_path: empty step sequence");
  const int direction = end_frame >= start_frame ? 1 : -1;
  int total = 0;
  for (int a : steps) total += a;
  if (start_frame + direction * total != end_frame) {
    throw std::invalid_argument("compose_path: steps do not sum to the frame distance");
  }

  int frame = start_frame;
  const MatchField& first = fields(frame, frame + direction * steps.front());
  MatchField out;
  out.source_frame = start_frame;
  out.target_frame = end_frame;
  out.map = first.map;
  frame += direction * steps.front();

  for (std::size_t h = 1; h < steps.size(); ++h) {
    const int next = frame + direction * steps[h];
    const MatchField& hop = fields(frame, next);
    for (std::uint32_t& m : out.map) {
      if (m >= hop.map.size()) {
        throw std::out_of_range("compose_path: superpixel index outside hop field");
      }
      m = hop.map[m];
    }
    frame = next;
  }
  return out;
}

CandidateSet gather_candidates(const FieldLookup& fields,
                               const std::vector<StepSequence>& direct_sequences,
                               const std::vector<StepSequence>& reverse_sequences, int ref_frame,
                               int target_frame, std::uint32_t source_count,
                               std::uint32_t target_count) {
  CandidateSet set;
  set.per_source.resize(source_count);
  for (const StepSequence& seq : direct_sequences) {
    const MatchField path = compose_path(fields, seq, ref_frame, target_frame);
    if (path.map.size() != source_count) {
      throw std::invalid_argument("gather_candidates: direct path size disagrees with source");
    }
    for (std::uint32_t i = 0; i < source_count; ++i) {
      ++set.per_source[i].direct[path.map[i]];
    }
  }
  for (const StepSequence& seq : reverse_sequences) {
    const MatchField path = compose_path(fields, seq, target_frame, ref_frame);
    if (path.map.size() != target_count) {
      throw std::invalid_argument("gather_candidates: reverse path size disagrees with target");
    }
    for (std::uint32_t j = 0; j < target_count; ++j) {
      const std::uint32_t landed = path.map[j];
      if (landed < source_count) {
        ++set.per_source[landed].reverse[j];
      }
    }
  }
  return set;
}

namespace {

std::uint32_t plurality(const std::map<std::uint32_t, std::uint32_t>& votes) {
  std::uint32_t best = 0;
  std::uint32_t best_n = 0;
  for (const auto& [target, n] : votes) {
    if (n > best_n) {
      best_n = n;
      best = target;
    }
  }
  return best;
}

}  // namespace

MatchField select_long_term(const CandidateSet& candidates, MsiStrategy strategy) {
  MatchField field;
  field.map.resize(candidates.per_source.size());
  for (std::size_t i = 0; i < candidates.per_source.size(); ++i) {
    const CandidateVotes& votes = candidates.per_source[i];
    if (votes.direct.empty()) {
      throw std::runtime_error("select_long_term: superpixel " + std::to_string(i) +
                               " has no direct candidates");
    }
    if (strategy == MsiStrategy::direct_only) {
      field.map[i] = plurality(votes.direct);
      continue;
    }
    std::map<std::uint32_t, std::uint32_t> merged = votes.direct;
    for (const auto& [target, n] : votes.reverse) merged[target] += n;
    if (strategy == MsiStrategy::with_reverse) {
      field.map[i] = plurality(merged);
      continue;
    }
    // mutual: restrict to targets present with both provenances
    std::map<std::uint32_t, std::uint32_t> both;
    for (const auto& [target, n] : merged) {
      if (votes.direct.count(target) && votes.reverse.count(target)) both[target] = n;
    }
    field.map[i] = plurality(both.empty() ? merged : both);
  }
  return field;
}

}  // namespace spxtrack
