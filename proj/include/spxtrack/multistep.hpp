#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "spxtrack/matching.hpp"

namespace spxtrack {

/// An ordered list of positive inter-frame steps summing to the
/// reference-to-target distance.
using StepSequence = std::vector<int>;

struct StepPlan {
  std::vector<int> step_set{1, 2, 5, 10, 20};
  int k_max = 7;    // maximal sequence length kept before sampling
  int budget = 200; // sampled sequences per frame pair
  std::uint64_t seed = 0;
};

/// All ordered compositions of `distance` into parts from step_set, in
/// depth-first order with smaller steps explored first. Empty when the
/// distance is unreachable.
std::vector<StepSequence> enumerate_sequences(int distance, const std::vector<int>& step_set);

/// Number of compositions, by the recurrence f(d) = sum_a f(d - a) with
/// f(0) = 1, computed without materializing sequences. Saturates at the
/// maximum representable value.
std::uint64_t count_sequences(int distance, const std::vector<int>& step_set);

/// Sequences of length <= plan.k_max for the distance, generated with a
/// depth bound (longer ones are never materialized). All of them when at
/// most plan.budget exist; otherwise a uniform sample of plan.budget
/// distinct sequences drawn with plan.seed. Deterministic per
/// (distance, plan).
std::vector<StepSequence> prune_and_sample(int distance, const StepPlan& plan);

/// Elementary-field lookup by ordered frame pair; throws when a required
/// field is missing.
using FieldLookup = std::function<const MatchField&(int from, int to)>;

/// Function composition of the hop maps named by the step sequence,
/// walking from start_frame to end_frame (either temporal direction).
MatchField compose_path(const FieldLookup& fields, const StepSequence& steps, int start_frame,
                        int end_frame);

/// Candidate multiset for one source superpixel, split by provenance.
struct CandidateVotes {
  std::map<std::uint32_t, std::uint32_t> direct;   // target index -> multiplicity
  std::map<std::uint32_t, std::uint32_t> reverse;
};

struct CandidateSet {
  std::vector<CandidateVotes> per_source;
};

/// Compose every direct sequence (ref -> target) and append its landing
/// superpixel to each source's direct multiset; compose every reverse
/// sequence (target -> ref) and append each preimage to the source it
/// lands on, once per (sequence, preimage) occurrence.
CandidateSet gather_candidates(const FieldLookup& fields,
                               const std::vector<StepSequence>& direct_sequences,
                               const std::vector<StepSequence>& reverse_sequences, int ref_frame,
                               int target_frame, std::uint32_t source_count,
                               std::uint32_t target_count);

enum class MsiStrategy {
  direct_only,   // plurality over direct candidates
  with_reverse,  // plurality over direct and reverse candidates
  mutual,        // plurality over targets present with both provenances
};

/// Majority vote per source superpixel under the given strategy; ties
/// toward the lowest target index. The mutual strategy falls back to
/// with_reverse for a superpixel whose both-provenance restriction is
/// empty. Throws when a superpixel has no direct candidates.
MatchField select_long_term(const CandidateSet& candidates, MsiStrategy strategy);

}  // namespace spxtrack
