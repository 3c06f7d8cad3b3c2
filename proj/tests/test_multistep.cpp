#include <doctest.h>

#include <map>
#include <set>

#include "spxtrack/multistep.hpp"

using namespace spxtrack;

namespace {

MatchField make_field(int from, int to, std::vector<std::uint32_t> map) {
  MatchField f;
  f.source_frame = from;
  f.target_frame = to;
  f.map = std::move(map);
  return f;
}

struct FieldTable {
  std::map<std::pair<int, int>, MatchField> fields;

  void add(int from, int to, std::vector<std::uint32_t> map) {
    fields[{from, to}] = make_field(from, to, std::move(map));
  }
  FieldLookup lookup() const {
    return [this](int from, int to) -> const MatchField& {
      auto it = fields.find({from, to});
      if (it == fields.end()) throw std::runtime_error("missing field");
      return it->second;
    };
  }
};

bool valid_sequence(const StepSequence& s, int distance, const std::vector<int>& steps,
                    int k_max) {
  if (static_cast<int>(s.size()) > k_max) return false;
  int sum = 0;
  for (int a : s) {
    if (std::find(steps.begin(), steps.end(), a) == steps.end()) return false;
    sum += a;
  }
  return sum == distance;
}

}  // namespace

TEST_CASE("enumeration of distance 3 with steps 1,2,3 in depth-first order") {
  const auto got = enumerate_sequences(3, {1, 2, 3});
  const std::vector<StepSequence> want = {{1, 1, 1}, {1, 2}, {2, 1}, {3}};
  CHECK(got == want);
}

TEST_CASE("enumeration edge cases") {
  CHECK(enumerate_sequences(1, {1, 2, 5}) == std::vector<StepSequence>{{1}});
  CHECK(enumerate_sequences(4, {3}).empty());
}

TEST_CASE("sequence counting matches the published values") {
  CHECK(count_sequences(30, {1, 2, 5, 10}) == 5877241);
  CHECK(count_sequences(3, {1, 2, 3}) == 4);
  CHECK(count_sequences(0, {1, 2}) == 1);
}

TEST_CASE("counting equals exhaustive enumeration for small instances") {
  const std::vector<int> universe = {1, 2, 3, 5};
  for (int mask = 1; mask < 16; ++mask) {
    std::vector<int> steps;
    for (int b = 0; b < 4; ++b) {
      if (mask & (1 << b)) steps.push_back(universe[b]);
    }
    for (int d = 1; d <= 15; ++d) {
      CHECK(count_sequences(d, steps) == enumerate_sequences(d, steps).size());
    }
  }
}

TEST_CASE("length pruning drops long sequences during generation") {
  StepPlan plan;
  plan.step_set = {1, 2, 3};
  plan.k_max = 2;
  plan.budget = 100;
  const auto got = prune_and_sample(3, plan);
  const std::vector<StepSequence> want = {{1, 2}, {2, 1}, {3}};
  CHECK(got == want);
}

TEST_CASE("k_max one keeps only the single-step sequence when it exists") {
  StepPlan plan;
  plan.step_set = {1, 2, 5};
  plan.k_max = 1;
  plan.budget = 10;
  CHECK(prune_and_sample(5, plan) == std::vector<StepSequence>{{5}});
  CHECK(prune_and_sample(4, plan).empty());
}

TEST_CASE("sampling is deterministic, without replacement, and valid") {
  StepPlan plan;
  plan.step_set = {1, 2, 5};
  plan.k_max = 7;
  plan.budget = 40;
  plan.seed = 9;
  const int distance = 12;
  const auto a = prune_and_sample(distance, plan);
  const auto b = prune_and_sample(distance, plan);
  CHECK(a == b);
  CHECK(a.size() == 40);

  std::set<StepSequence> unique(a.begin(), a.end());
  CHECK(unique.size() == a.size());
  for (const auto& s : a) CHECK(valid_sequence(s, distance, plan.step_set, plan.k_max));

  plan.seed = 10;
  const auto c = prune_and_sample(distance, plan);
  CHECK(c != a);  // different draw, same validity
  for (const auto& s : c) CHECK(valid_sequence(s, distance, plan.step_set, plan.k_max));
}

TEST_CASE("sample size is the whole pruned set when it fits the budget") {
  StepPlan plan;
  plan.step_set = {1, 2};
  plan.k_max = 7;
  plan.budget = 500;
  const auto all = prune_and_sample(8, plan);
  // compositions of 8 into at most 7 parts from {1,2}: lengths 4..7
  std::size_t expected = 0;
  for (const auto& s : enumerate_sequences(8, {1, 2})) {
    if (s.size() <= 7) ++expected;
  }
  CHECK(all.size() == expected);
}

TEST_CASE("path composition follows the hop maps") {
  FieldTable table;
  table.add(0, 1, {1, 0});
  table.add(1, 3, {2, 2});
  table.add(0, 3, {0, 1});

  SUBCASE("two hops compose left to right") {
    const MatchField f = compose_path(table.lookup(), {1, 2}, 0, 3);
    CHECK(f.map == std::vector<std::uint32_t>{2, 2});
    CHECK(f.source_frame == 0);
    CHECK(f.target_frame == 3);
  }
  SUBCASE("a single hop is the elementary field") {
    const MatchField f = compose_path(table.lookup(), {3}, 0, 3);
    CHECK(f.map == std::vector<std::uint32_t>{0, 1});
  }
  SUBCASE("identity hops compose to the identity") {
    FieldTable id;
    id.add(0, 1, {0, 1, 2});
    id.add(1, 2, {0, 1, 2});
    const MatchField f = compose_path(id.lookup(), {1, 1}, 0, 2);
    CHECK(f.map == std::vector<std::uint32_t>{0, 1, 2});
  }
  SUBCASE("missing hop throws") {
    CHECK_THROWS(compose_path(table.lookup(), {2, 1}, 0, 3));
  }
  SUBCASE("steps must cover the distance") {
    CHECK_THROWS_AS(compose_path(table.lookup(), {1}, 0, 3), std::invalid_argument);
  }
}

TEST_CASE("composition works toward earlier frames as well") {
  FieldTable table;
  table.add(3, 2, {1, 0, 1});
  table.add(2, 0, {2, 0});
  const MatchField f = compose_path(table.lookup(), {1, 2}, 3, 0);
  CHECK(f.map == std::vector<std::uint32_t>{0, 2, 0});
}

TEST_CASE("composing one long sequence equals composing its halves") {
  FieldTable table;
  table.add(0, 2, {2, 0, 1});
  table.add(2, 5, {1, 1, 0});
  table.add(0, 5, {9, 9, 9});  // decoy; must not be used

  const MatchField whole = compose_path(table.lookup(), {2, 3}, 0, 5);
  const MatchField first = compose_path(table.lookup(), {2}, 0, 2);
  const MatchField second = compose_path(table.lookup(), {3}, 2, 5);
  for (std::size_t i = 0; i < whole.map.size(); ++i) {
    CHECK(whole.map[i] == second.map[first.map[i]]);
  }
}

TEST_CASE("candidate gathering with identity fields") {
  FieldTable table;
  table.add(0, 1, {0, 1, 2});
  table.add(1, 0, {0, 1, 2});
  const CandidateSet set =
      gather_candidates(table.lookup(), {{1}}, {{1}}, 0, 1, 3, 3);
  REQUIRE(set.per_source.size() == 3);
  for (std::uint32_t i = 0; i < 3; ++i) {
    CHECK(set.per_source[i].direct.at(i) == 1);
    CHECK(set.per_source[i].reverse.at(i) == 1);
  }
}

TEST_CASE("reverse candidates follow preimages") {
  FieldTable table;
  table.add(0, 1, {0, 0});        // direct fields (unused by reverse side)
  table.add(1, 0, {0, 0});        // both targets land on source 0
  const CandidateSet set =
      gather_candidates(table.lookup(), {{1}}, {{1}}, 0, 1, 2, 2);
  CHECK(set.per_source[0].reverse.size() == 2);
  CHECK(set.per_source[0].reverse.at(0) == 1);
  CHECK(set.per_source[0].reverse.at(1) == 1);
  CHECK(set.per_source[1].reverse.empty());
}

TEST_CASE("every direct sequence contributes exactly one entry per superpixel") {
  FieldTable table;
  table.add(0, 1, {1, 0});
  table.add(1, 2, {0, 1});
  table.add(0, 2, {1, 1});
  const std::vector<StepSequence> direct = {{1, 1}, {2}};
  const CandidateSet set = gather_candidates(table.lookup(), direct, {}, 0, 2, 2, 2);
  for (std::uint32_t i = 0; i < 2; ++i) {
    std::uint32_t entries = 0;
    for (const auto& [target, n] : set.per_source[i].direct) entries += n;
    CHECK(entries == direct.size());
  }
}

TEST_CASE("long-term selection strategies") {
  CandidateSet set;
  set.per_source.resize(1);
  auto& votes = set.per_source[0];
  const std::uint32_t A = 2;
  const std::uint32_t B = 5;

  SUBCASE("direct plurality") {
    votes.direct = {{A, 2}, {B, 1}};
    CHECK(select_long_term(set, MsiStrategy::direct_only).map[0] == A);
  }
  SUBCASE("reverse entries can flip the vote") {
    votes.direct = {{A, 1}, {B, 1}};
    votes.reverse = {{B, 2}};
    CHECK(select_long_term(set, MsiStrategy::with_reverse).map[0] == B);
    CHECK(select_long_term(set, MsiStrategy::direct_only).map[0] == A);
  }
  SUBCASE("mutual restriction keeps only both-provenance targets") {
    votes.direct = {{A, 2}, {B, 1}};
    votes.reverse = {{B, 1}};
    CHECK(select_long_term(set, MsiStrategy::mutual).map[0] == B);
  }
  SUBCASE("empty restriction falls back to the merged vote") {
    votes.direct = {{A, 2}, {B, 1}};
    votes.reverse = {};
    CHECK(select_long_term(set, MsiStrategy::mutual).map[0] == A);
    votes.reverse = {{7, 5}};  // reverse-only target dominates the merge
    CHECK(select_long_term(set, MsiStrategy::mutual).map[0] == 7);
  }
  SUBCASE("ties go to the lowest target index") {
    votes.direct = {{A, 1}, {B, 1}};
    CHECK(select_long_term(set, MsiStrategy::direct_only).map[0] == A);
  }
  SUBCASE("no direct candidates is an error") {
    votes.direct = {};
    votes.reverse = {{B, 1}};
    CHECK_THROWS(select_long_term(set, MsiStrategy::with_reverse));
  }
}
