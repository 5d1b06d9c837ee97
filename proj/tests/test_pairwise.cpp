#include <doctest.h>

#include <algorithm>

#include "prefkit/pairwise.hpp"
#include "prefkit/rng.hpp"

#include "oracles.hpp"

using namespace prefkit;

namespace {

ApprovalRecord approval(std::string user, int proposal, int agree,
                        std::int64_t secs = 0) {
  return {std::move(user), proposal, agree, 5, 0.9,
          Instant{secs * 1'000'000}, "fr"};
}

RankRecord panel(std::string user, std::vector<int> ids, std::int64_t secs = 0) {
  return {std::move(user), std::move(ids), true, 5, 0.9,
          Instant{secs * 1'000'000}};
}

PairwiseRecord direct(std::string user, int a, int b, int chosen,
                      std::optional<std::int32_t> panel_seq = std::nullopt,
                      std::int64_t secs = 0) {
  PairwiseRecord rec;
  rec.user_id = std::move(user);
  rec.pair = PairId::of(a, b);
  rec.selected = chosen == 0 ? PairChoice::none
                             : (chosen == rec.pair.low ? PairChoice::low
                                                       : PairChoice::high);
  rec.panel_seq = panel_seq;
  rec.timestamp = Instant{secs * 1'000'000};
  rec.universe = 5;
  return rec;
}

}  // namespace

TEST_CASE("approvals expand to approved x disapproved") {
  // approved {1,2}, disapproved {3,4} -> 1>3, 1>4, 2>3, 2>4
  std::vector<ApprovalRecord> approvals = {
      approval("u", 1, 1), approval("u", 2, 1), approval("u", 3, -1),
      approval("u", 4, -1)};
  auto pairs = approvals_to_pairs(approvals);
  REQUIRE(pairs.size() == 4);
  for (const auto& rec : pairs) {
    CHECK((rec.chosen_id() == 1 || rec.chosen_id() == 2));
    CHECK((rec.other_id() == 3 || rec.other_id() == 4));
    CHECK(rec.source == RecordSource::approval);
  }
}

TEST_CASE("all-approved and abstentions yield no pairs") {
  std::vector<ApprovalRecord> all_approved = {approval("u", 1, 1),
                                              approval("u", 2, 1)};
  CHECK(approvals_to_pairs(all_approved).empty());

  std::vector<ApprovalRecord> with_abstention = {
      approval("u", 1, 1), approval("u", 2, 0), approval("u", 3, -1)};
  auto pairs = approvals_to_pairs(with_abstention);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].chosen_id() == 1);
  CHECK(pairs[0].other_id() == 3);
}

TEST_CASE("a re-vote overrides the earlier approval stance") {
  std::vector<ApprovalRecord> approvals = {
      approval("u", 1, 1, 10), approval("u", 2, -1, 10),
      approval("u", 1, -1, 20),  // changed their mind
  };
  auto pairs = approvals_to_pairs(approvals);
  CHECK(pairs.empty());  // both now disapproved
}

TEST_CASE("rank panels expand to all within-panel pairs") {
  std::vector<RankRecord> one = {panel("u", {1, 2, 3, 4})};
  auto pairs = ranks_to_pairs(one);
  CHECK(pairs.size() == 6);
  // highest-listed proposal wins every pair it appears in
  for (const auto& rec : pairs) {
    CHECK(rec.source == RecordSource::rank);
    REQUIRE(rec.panel_seq.has_value());
    CHECK(*rec.panel_seq == 0);
  }
  CHECK(pairs[0].chosen_id() == 1);

  std::vector<RankRecord> single = {panel("u", {5})};
  CHECK(ranks_to_pairs(single).empty());
  std::vector<RankRecord> two = {panel("u", {9, 4})};
  auto duo = ranks_to_pairs(two);
  REQUIRE(duo.size() == 1);
  CHECK(duo[0].chosen_id() == 9);
  CHECK(duo[0].pair.card_id() == "4-9");
}

TEST_CASE("panel pair count is k choose 2 and never crosses panels") {
  Rng rng(3);
  for (int k = 2; k <= 6; ++k) {
    std::vector<int> ids;
    for (int i = 1; i <= k; ++i) ids.push_back(i);
    std::vector<RankRecord> panels = {panel("u", ids, 1),
                                      panel("u", {10, 11}, 2)};
    auto pairs = ranks_to_pairs(panels);
    CHECK(static_cast<int>(pairs.size()) == k * (k - 1) / 2 + 1);
    for (const auto& rec : pairs) {
      bool cross = rec.pair.low <= k && rec.pair.high >= 10;
      CHECK_FALSE(cross);
    }
  }
}

TEST_CASE("build_tally counts wins and skips ties") {
  ProposalIndex index({1, 2, 3});
  std::vector<PairwiseRecord> records = {
      direct("u1", 1, 2, 1), direct("u2", 1, 2, 0),  // tie: excluded
      direct("u3", 2, 3, 3)};
  auto tally = build_tally(records, index);
  CHECK(tally.at(0, 1) == 1);
  CHECK(tally.at(1, 0) == 0);
  CHECK(tally.at(2, 1) == 1);
  CHECK(tally.total() == 2);

  CHECK(build_tally({}, index).total() == 0);
}

TEST_CASE("build_tally rejects records outside the index") {
  ProposalIndex index({1, 2});
  std::vector<PairwiseRecord> records = {direct("u", 1, 9, 9)};
  CHECK_THROWS_AS(build_tally(records, index), FormatError);
}

TEST_CASE("tally is linear in record concatenation") {
  Rng rng(17);
  auto r1 = oracle::random_records(rng, 5, 6, 40);
  auto r2 = oracle::random_records(rng, 5, 6, 25);
  std::vector<int> ids = {1, 2, 3, 4, 5};
  ProposalIndex index(ids);
  auto t1 = build_tally(r1, index);
  auto t2 = build_tally(r2, index);
  auto both = r1;
  both.insert(both.end(), r2.begin(), r2.end());
  auto tboth = build_tally(both, index);
  for (std::size_t i = 0; i < index.size(); ++i) {
    for (std::size_t j = 0; j < index.size(); ++j) {
      CHECK(tboth.at(i, j) == t1.at(i, j) + t2.at(i, j));
    }
  }
}

TEST_CASE("consistency of unanimous and split cells") {
  // three identical judgments: cell value 1.0
  std::vector<PairwiseRecord> unanimous = {
      direct("u", 1, 2, 1), direct("u", 1, 2, 1), direct("u", 1, 2, 1)};
  auto result = consistency(unanimous);
  REQUIRE(result.overall.has_value());
  CHECK(*result.overall == 1.0);
  CHECK(result.repeated_cells == 1);

  // 3-1 split: modal fraction 0.75
  std::vector<PairwiseRecord> split = {direct("u", 1, 2, 1), direct("u", 1, 2, 1),
                                       direct("u", 1, 2, 1), direct("u", 1, 2, 2)};
  auto split_result = consistency(split);
  REQUIRE(split_result.overall.has_value());
  CHECK(*split_result.overall == doctest::Approx(0.75));

  // strict pair-agreement alternative: C(3,2)/C(4,2) = 0.5
  auto strict = consistency(split, ConsistencyMode::pair_agreement);
  REQUIRE(strict.overall.has_value());
  CHECK(*strict.overall == doctest::Approx(0.5));
}

TEST_CASE("consistency is undefined without repeated cells") {
  std::vector<PairwiseRecord> records = {direct("u", 1, 2, 1),
                                         direct("u", 2, 3, 2)};
  auto result = consistency(records);
  CHECK_FALSE(result.overall.has_value());
  CHECK(result.repeated_cells == 0);
}

TEST_CASE("consistency excludes tie records") {
  std::vector<PairwiseRecord> records = {
      direct("u", 1, 2, 1), direct("u", 1, 2, 0), direct("u", 1, 2, 0)};
  auto result = consistency(records);
  // only one non-tie observation: no repeated cell
  CHECK_FALSE(result.overall.has_value());
}

TEST_CASE("consistency weights cells by observations") {
  // cell A: 4 observations at 0.75; cell B: 2 observations at 1.0
  std::vector<PairwiseRecord> records = {
      direct("u", 1, 2, 1), direct("u", 1, 2, 1), direct("u", 1, 2, 1),
      direct("u", 1, 2, 2), direct("u", 3, 4, 3), direct("u", 3, 4, 3)};
  auto result = consistency(records);
  REQUIRE(result.overall.has_value());
  CHECK(*result.overall == doctest::Approx((3.0 + 2.0) / 6.0));
}

TEST_CASE("transitivity reproduces the 50% worked example") {
  // A>B five times, B>C five times, A>C once, C>A once.
  std::vector<PairwiseRecord> records;
  for (int i = 0; i < 5; ++i) records.push_back(direct("u", 1, 2, 1));
  for (int i = 0; i < 5; ++i) records.push_back(direct("u", 2, 3, 2));
  records.push_back(direct("u", 1, 3, 1));
  records.push_back(direct("u", 1, 3, 3));
  auto result = transitivity(records);
  REQUIRE(result.overall.has_value());
  CHECK(*result.overall == 0.5);  // 25 acyclic of 50 combinations, exactly
  CHECK(result.triplets == 1);
}

TEST_CASE("transitivity of a consistent linear user is 100%") {
  std::vector<PairwiseRecord> records = {
      direct("u", 1, 2, 1), direct("u", 2, 3, 2), direct("u", 1, 3, 1),
      direct("u", 1, 2, 1)};
  auto result = transitivity(records);
  REQUIRE(result.overall.has_value());
  CHECK(*result.overall == 1.0);
}

TEST_CASE("a pure 3-cycle is 0% transitive") {
  std::vector<PairwiseRecord> records = {
      direct("u", 1, 2, 1), direct("u", 2, 3, 2), direct("u", 1, 3, 3)};
  auto result = transitivity(records);
  REQUIRE(result.overall.has_value());
  CHECK(*result.overall == 0.0);
}

TEST_CASE("triplets implied by a single panel are excluded") {
  std::vector<RankRecord> panels = {panel("u", {1, 2, 3})};
  auto records = ranks_to_pairs(panels);
  auto result = transitivity(records);
  CHECK_FALSE(result.overall.has_value());
  CHECK(result.triplets == 0);

  // the same relations from two different panels do qualify
  std::vector<RankRecord> two_panels = {panel("u", {1, 2, 3}, 1),
                                        panel("u", {1, 2, 3}, 2)};
  auto repeated = transitivity(ranks_to_pairs(two_panels));
  REQUIRE(repeated.overall.has_value());
  CHECK(*repeated.overall == 1.0);
}

TEST_CASE("consistency and transitivity ignore record order") {
  Rng rng(23);
  auto records = oracle::random_records(rng, 5, 4, 60);
  auto base_consistency = consistency(records);
  auto base_transitivity = transitivity(records);
  for (int trial = 0; trial < 5; ++trial) {
    auto shuffled = records;
    rng.shuffle(shuffled);
    auto c = consistency(shuffled);
    auto t = transitivity(shuffled);
    REQUIRE(c.overall.has_value() == base_consistency.overall.has_value());
    if (c.overall) {
      CHECK(*c.overall == doctest::Approx(*base_consistency.overall).epsilon(1e-12));
    }
    REQUIRE(t.overall.has_value() == base_transitivity.overall.has_value());
    if (t.overall) {
      CHECK(*t.overall == doctest::Approx(*base_transitivity.overall).epsilon(1e-12));
    }
  }
}

TEST_CASE("pairwise records serialize with sorted options and card ids") {
  std::vector<PairwiseRecord> records = {direct("u1", 9, 4, 9),
                                         direct("u2", 1, 2, 0)};
  auto csv = serialize_pairwise(records);
  CHECK(csv.find("4,9,4-9,9,rank") != std::string::npos);
  CHECK(csv.find("1,2,1-2,0,rank") != std::string::npos);

  auto parsed = parse_pairwise_text(csv, "pairs.csv");
  CHECK(parsed.errors.empty());
  REQUIRE(parsed.records.size() == 2);
  CHECK(parsed.records[0].chosen_id() == 9);
  CHECK(parsed.records[1].is_tie());
}

TEST_CASE("pairwise parser rejects malformed rows") {
  auto parsed = parse_pairwise_text(
      "user_id,option_a_sorted,option_b_sorted,card_id,selected,source,"
      "universe,score,created_at,panel_seq\n"
      "u,9,4,4-9,9,rank,5,,2022-04-01T00:00:00Z,\n"   // a >= b
      "u,4,9,4-9,7,rank,5,,2022-04-01T00:00:00Z,\n"   // selected not in pair
      "u,4,9,4-9,9,webcam,5,,2022-04-01T00:00:00Z,\n",  // bad source
      "pairs.csv");
  CHECK(parsed.records.empty());
  CHECK(parsed.errors.size() == 3);
}
