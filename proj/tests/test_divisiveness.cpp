#include <doctest.h>

#include <cmath>

#include "prefkit/divisiveness.hpp"
#include "prefkit/rng.hpp"
#include "prefkit/synthgen.hpp"

#include "oracles.hpp"

using namespace prefkit;

namespace {

PairwiseRecord rec(std::string user, int a, int b, int chosen,
                   std::int64_t secs = 0) {
  PairwiseRecord r;
  r.user_id = std::move(user);
  r.pair = PairId::of(a, b);
  r.selected = chosen == r.pair.low ? PairChoice::low : PairChoice::high;
  r.timestamp = Instant{secs * 1'000'000};
  r.universe = 5;
  return r;
}

ParticipantProfile profile(std::string user, int politics) {
  ParticipantProfile p;
  p.user_id = user;
  p.politics = politics;
  p.sex = 1;
  p.age = 1;
  p.education = 1;
  p.zone = 1;
  p.location = 31;
  return p;
}

SplitSpec politics_split() {
  SplitSpec split;
  split.dimension = "politics";
  split.label_a = "right";
  split.label_b = "left";
  split.mapping = {{4, SplitSide::group_a},
                   {5, SplitSide::group_a},
                   {1, SplitSide::group_b},
                   {2, SplitSide::group_b}};
  return split;
}

}  // namespace

TEST_CASE("split_scores errors when a side is empty") {
  std::unordered_map<std::string, ParticipantProfile> profiles;
  profiles["u1"] = profile("u1", 4);
  profiles["u2"] = profile("u2", 4);
  std::vector<PairwiseRecord> records = {rec("u1", 1, 2, 1)};
  ProposalIndex index({1, 2});
  CHECK_THROWS_WITH_AS(
      split_scores(records, profiles, politics_split(), score_win(), index),
      "split politics: side 'left' has no users", ComputeError);
}

TEST_CASE("identical behavior on both sides gives equal tables") {
  std::unordered_map<std::string, ParticipantProfile> profiles;
  profiles["r1"] = profile("r1", 4);
  profiles["l1"] = profile("l1", 1);
  std::vector<PairwiseRecord> records = {
      rec("r1", 1, 2, 1), rec("r1", 1, 2, 1), rec("r1", 1, 2, 2),
      rec("l1", 1, 2, 1), rec("l1", 1, 2, 1), rec("l1", 1, 2, 2)};
  ProposalIndex index({1, 2});
  auto [a, b] = split_scores(records, profiles, politics_split(), score_win(), index);
  for (int id : {1, 2}) {
    CHECK(*a.value(id) == *b.value(id));
  }
  auto table = split_divisiveness(records, profiles, politics_split(),
                                  score_win(), index);
  for (const auto& row : table.rows) {
    CHECK(row.defined);
    CHECK(row.value == 0.0);
  }
}

TEST_CASE("hand-built four-user split matches per-side brute force") {
  std::unordered_map<std::string, ParticipantProfile> profiles;
  profiles["r1"] = profile("r1", 4);
  profiles["r2"] = profile("r2", 5);
  profiles["l1"] = profile("l1", 1);
  profiles["l2"] = profile("l2", 2);
  Rng rng(5);
  std::vector<PairwiseRecord> records;
  for (const auto& user : {"r1", "r2", "l1", "l2"}) {
    auto user_records = oracle::random_records(rng, 4, 1, 20);
    for (auto& r : user_records) {
      r.user_id = user;
      records.push_back(r);
    }
  }
  ProposalIndex index({1, 2, 3, 4});
  auto [a, b] = split_scores(records, profiles, politics_split(), score_win(), index);

  std::vector<PairwiseRecord> side_a, side_b;
  for (const auto& r : records) {
    if (r.user_id[0] == 'r') side_a.push_back(r);
    if (r.user_id[0] == 'l') side_b.push_back(r);
  }
  for (int id : {1, 2, 3, 4}) {
    auto oracle_a = oracle::win_percentage(side_a, id);
    auto oracle_b = oracle::win_percentage(side_b, id);
    REQUIRE(a.value(id).has_value() == oracle_a.has_value());
    REQUIRE(b.value(id).has_value() == oracle_b.has_value());
    if (oracle_a) CHECK(*a.value(id) == *oracle_a);
    if (oracle_b) CHECK(*b.value(id) == *oracle_b);
  }
}

TEST_CASE("split divisiveness reproduces the 60/40 -> 20pp example exactly") {
  std::unordered_map<std::string, ParticipantProfile> profiles;
  profiles["r1"] = profile("r1", 4);
  profiles["l1"] = profile("l1", 1);
  // right side: proposal 1 wins 3 of 5; left side: wins 2 of 5
  std::vector<PairwiseRecord> records;
  for (int i = 0; i < 3; ++i) records.push_back(rec("r1", 1, 2, 1, i));
  for (int i = 0; i < 2; ++i) records.push_back(rec("r1", 1, 2, 2, 10 + i));
  for (int i = 0; i < 2; ++i) records.push_back(rec("l1", 1, 2, 1, 20 + i));
  for (int i = 0; i < 3; ++i) records.push_back(rec("l1", 1, 2, 2, 30 + i));
  ProposalIndex index({1, 2});
  auto table = split_divisiveness(records, profiles, politics_split(),
                                  score_win(), index);
  const double expected = 3.0 / 5.0 - 2.0 / 5.0;  // twenty percentage points
  CHECK(table.value(1) == expected);
  CHECK(table.value(2) == -expected);
}

TEST_CASE("swapping the split sides negates every gap") {
  Rng rng(7);
  std::unordered_map<std::string, ParticipantProfile> profiles;
  std::vector<PairwiseRecord> records;
  for (int u = 0; u < 8; ++u) {
    std::string user = "u" + std::to_string(u);
    profiles[user] = profile(user, u % 2 == 0 ? 4 : 1);
    auto user_records = oracle::random_records(rng, 5, 1, 25);
    for (auto& r : user_records) {
      r.user_id = user;
      records.push_back(r);
    }
  }
  ProposalIndex index({1, 2, 3, 4, 5});
  auto split = politics_split();
  auto forward = split_divisiveness(records, profiles, split, score_win(), index);
  std::swap(split.label_a, split.label_b);
  for (auto& [label, side] : split.mapping) {
    side = side == SplitSide::group_a ? SplitSide::group_b : SplitSide::group_a;
  }
  auto reversed = split_divisiveness(records, profiles, split, score_win(), index);
  for (const auto& row : forward.rows) {
    auto other = reversed.row(row.proposal_id);
    REQUIRE(other != nullptr);
    REQUIRE(other->defined == row.defined);
    if (row.defined) CHECK(other->value == doctest::Approx(-row.value));
  }
}

TEST_CASE("aggregate divisiveness is zero for identical or mirrored scores") {
  ScoreTable a, b;
  for (int id = 1; id <= 5; ++id) {
    double v = 0.1 * id;
    a.rows.push_back({id, v, v, v, 10, true});
    b.rows.push_back({id, v, v, v, 10, true});
  }
  CHECK(aggregate_divisiveness(a, b) == doctest::Approx(0.0).epsilon(1e-12));

  ScoreTable mirrored;
  for (int id = 1; id <= 5; ++id) {
    double v = 1.0 - 0.1 * id;
    mirrored.rows.push_back({id, v, v, v, 10, true});
  }
  // anti-correlation squares away
  CHECK(aggregate_divisiveness(a, mirrored) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("aggregate divisiveness needs three common proposals") {
  ScoreTable a, b;
  a.rows = {{1, 0.5, 0, 0, 1, true}, {2, 0.6, 0, 0, 1, true}};
  b.rows = {{1, 0.5, 0, 0, 1, true}, {2, 0.4, 0, 0, 1, true}};
  CHECK_THROWS_AS(aggregate_divisiveness(a, b), ComputeError);
}

TEST_CASE("two proposals with unanimous users puts divisiveness at one") {
  // every user judges the single pair repeatedly and unanimously
  std::vector<PairwiseRecord> records;
  for (int u = 0; u < 6; ++u) {
    std::string user = "u" + std::to_string(u);
    int choice = u < 3 ? 1 : 2;
    for (int k = 0; k < 3; ++k) {
      records.push_back(rec(user, 1, 2, choice, u * 10 + k));
    }
  }
  ProposalIndex index({1, 2});
  auto table = pairwise_divisiveness(records, score_win(), index);
  CHECK(*table.value(1) == 1.0);
  CHECK(*table.value(2) == 1.0);
  CHECK(table.row(1)->n_valid_terms == 1);
}

TEST_CASE("a perfectly homogeneous population has no valid terms") {
  std::vector<PairwiseRecord> records;
  for (int u = 0; u < 4; ++u) {
    std::string user = "u" + std::to_string(u);
    records.push_back(rec(user, 1, 2, 1));
    records.push_back(rec(user, 1, 3, 1));
    records.push_back(rec(user, 2, 3, 2));
  }
  ProposalIndex index({1, 2, 3});
  auto table = pairwise_divisiveness(records, score_win(), index);
  for (const auto& row : table.rows) {
    CHECK_FALSE(row.defined);
    CHECK(row.value == 0.0);
    CHECK(row.n_valid_terms == 0);
  }
}

TEST_CASE("pairwise divisiveness matches the literal oracle") {
  Rng rng(11);
  std::vector<int> ids = {1, 2, 3, 4};
  ProposalIndex index(ids);
  for (int trial = 0; trial < 25; ++trial) {
    auto records = oracle::random_records(rng, 4, 8, 70);
    auto table = pairwise_divisiveness(records, score_win(), index);
    for (int id : ids) {
      auto expected = oracle::pairwise_divisiveness(records, id, ids);
      auto actual = table.value(id);
      REQUIRE(expected.has_value() == actual.has_value());
      if (expected) {
        CHECK(*actual == doctest::Approx(*expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("generic scoring route agrees with the win fast path") {
  Rng rng(13);
  auto records = oracle::random_records(rng, 4, 10, 120);
  ProposalIndex index({1, 2, 3, 4});
  auto fast = pairwise_divisiveness(records, score_win(), index);
  ScoreFunction generic{ScoreKind::custom, "win-generic",
                        score_win().fn};
  auto slow = pairwise_divisiveness(records, generic, index);
  for (const auto& row : fast.rows) {
    auto other = slow.row(row.proposal_id);
    REQUIRE(other->defined == row.defined);
    if (row.defined) CHECK(other->value == row.value);
  }
}

TEST_CASE("relabeling users never changes divisiveness") {
  Rng rng(17);
  auto records = oracle::random_records(rng, 4, 8, 80);
  ProposalIndex index({1, 2, 3, 4});
  auto base = pairwise_divisiveness(records, score_win(), index);
  auto relabeled = records;
  for (auto& r : relabeled) r.user_id = "prefix-" + r.user_id + "-suffix";
  auto after = pairwise_divisiveness(relabeled, score_win(), index);
  for (const auto& row : base.rows) {
    auto other = after.row(row.proposal_id);
    REQUIRE(other->defined == row.defined);
    if (row.defined) CHECK(other->value == row.value);
  }
}

TEST_CASE("planted divisive proposals dominate the divisiveness ranking") {
  ElectorateSpec spec;
  spec.n_proposals = 12;
  spec.n_users = 120;
  spec.model = ElectorateModel::two_bloc;
  spec.divisive_proposals = {1, 12};
  spec.noise_rate = 0.05;
  spec.seed = 21;
  spec.panels_per_user = 10;
  auto corpus = generate(spec);
  auto records = ranks_to_pairs(corpus.ranks);
  ProposalIndex index = ProposalIndex::from_catalog(corpus.catalog);
  auto table = pairwise_divisiveness(records, score_win(), index);
  double min_divisive = 1e9, max_consensus = -1e9;
  for (const auto& row : table.rows) {
    bool planted = row.proposal_id == 1 || row.proposal_id == 12;
    if (planted) {
      min_divisive = std::min(min_divisive, row.value);
    } else {
      max_consensus = std::max(max_consensus, row.value);
    }
  }
  CHECK(min_divisive > max_consensus);
}

TEST_CASE("the literal denominator divides by N-1 regardless of skips") {
  // Only the 1-2 pair has opposing choosers; pairs with 3 contribute no
  // valid term for proposal 1.
  std::vector<PairwiseRecord> records = {
      rec("a", 1, 2, 1), rec("b", 1, 2, 2),
      rec("a", 1, 3, 1), rec("b", 1, 3, 1), rec("a", 2, 3, 2)};
  ProposalIndex index({1, 2, 3});
  DivisivenessConfig config;
  auto renormalized = pairwise_divisiveness(records, score_win(), index, config);
  config.renormalize_by_valid_terms = false;
  auto literal = pairwise_divisiveness(records, score_win(), index, config);
  REQUIRE(renormalized.value(1).has_value());
  REQUIRE(literal.value(1).has_value());
  CHECK(*literal.value(1) == doctest::Approx(*renormalized.value(1) / 2.0));
}

TEST_CASE("per-record membership mode can place a user on both sides") {
  // u flips between the two options; majority mode drops them, per-record
  // mode counts them in both sub-populations.
  std::vector<PairwiseRecord> records = {
      rec("u", 1, 2, 1, 1),  rec("u", 1, 2, 2, 2),
      rec("a", 1, 2, 1, 3),  rec("b", 1, 2, 2, 4)};
  ProposalIndex index({1, 2});
  DivisivenessConfig config;
  auto majority = pairwise_divisiveness(records, score_win(), index, config);
  config.membership = MembershipMode::per_record;
  auto per_record = pairwise_divisiveness(records, score_win(), index, config);
  // majority: populations are {a} vs {b}: W_1 = 1 vs 0 -> D = 1
  CHECK(*majority.value(1) == 1.0);
  // per-record: {a,u} vs {b,u}: W_1 = 2/3 vs 1/3 -> D = 1/3
  CHECK(*per_record.value(1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("responsiveness matrix tabulates approval rates by side") {
  PreferenceCorpus corpus;
  for (int id = 1; id <= 4; ++id) {
    Proposal p;
    p.id = id;
    p.text = "Proposal " + std::to_string(id);
    corpus.catalog.push_back(p);
  }
  // proposals 1,2 from the left candidate; 3,4 from the right candidate
  corpus.catalog[0].candidate_ids = {"Lcand"};
  corpus.catalog[1].candidate_ids = {"Lcand"};
  corpus.catalog[2].candidate_ids = {"Rcand"};
  corpus.catalog[3].candidate_ids = {"Rcand"};
  corpus.profiles["lu"] = profile("lu", 1);
  corpus.profiles["ru"] = profile("ru", 4);
  auto approve = [&](std::string user, int proposal, int agree) {
    corpus.approvals.push_back({std::move(user), proposal, agree, 5, 0.9,
                                Instant{static_cast<std::int64_t>(
                                    corpus.approvals.size())},
                                "fr"});
  };
  // left participant approves both left proposals, rejects right ones
  approve("lu", 1, 1);
  approve("lu", 2, 1);
  approve("lu", 3, -1);
  approve("lu", 4, -1);
  // right participant approves one of each side
  approve("ru", 1, 1);
  approve("ru", 2, -1);
  approve("ru", 3, 1);
  approve("ru", 4, 1);

  std::unordered_map<std::string, Orientation> orientations = {
      {"Lcand", Orientation::left}, {"Rcand", Orientation::right}};
  auto matrix = responsiveness_matrix(corpus, orientations,
                                      CentristScenario::exclude,
                                      politics_split());
  CHECK(matrix.left_proposals == 2);
  CHECK(matrix.right_proposals == 2);
  CHECK(matrix.rate[0][0] == doctest::Approx(1.0));   // left on left
  CHECK(matrix.rate[0][1] == doctest::Approx(0.0));   // left on right
  CHECK(matrix.rate[1][0] == doctest::Approx(0.5));   // right on left
  CHECK(matrix.rate[1][1] == doctest::Approx(1.0));   // right on right
}

TEST_CASE("exclude-centrist drops the centrist's exclusive proposals") {
  PreferenceCorpus corpus;
  for (int id = 1; id <= 3; ++id) {
    Proposal p;
    p.id = id;
    p.text = "Proposal " + std::to_string(id);
    corpus.catalog.push_back(p);
  }
  corpus.catalog[0].candidate_ids = {"Lcand"};
  corpus.catalog[1].candidate_ids = {"Ccand"};  // centrist only
  corpus.catalog[2].candidate_ids = {"Rcand"};
  corpus.profiles["lu"] = profile("lu", 1);
  corpus.approvals.push_back({"lu", 2, 1, 5, 0.9, Instant{}, "fr"});
  std::unordered_map<std::string, Orientation> orientations = {
      {"Lcand", Orientation::left},
      {"Rcand", Orientation::right},
      {"Ccand", Orientation::centrist}};

  auto excluded = responsiveness_matrix(corpus, orientations,
                                        CentristScenario::exclude,
                                        politics_split());
  CHECK(excluded.dropped_proposals == 1);

  auto as_left = responsiveness_matrix(corpus, orientations,
                                       CentristScenario::as_left,
                                       politics_split());
  CHECK(as_left.dropped_proposals == 0);
  CHECK(as_left.left_proposals == 2);
}

TEST_CASE("unlabeled candidates are a config error") {
  PreferenceCorpus corpus;
  Proposal p;
  p.id = 1;
  p.text = "Proposal";
  p.candidate_ids = {"mystery"};
  corpus.catalog.push_back(p);
  CHECK_THROWS_AS(responsiveness_matrix(corpus, {}, CentristScenario::exclude,
                                        politics_split()),
                  ConfigError);
}

TEST_CASE("multidimensional report has one column per split plus D") {
  ElectorateSpec spec;
  spec.n_proposals = 8;
  spec.n_users = 40;
  spec.model = ElectorateModel::two_bloc;
  spec.divisive_proposals = {1, 8};
  spec.noise_rate = 0.1;
  spec.seed = 3;
  auto corpus = generate(spec);
  auto records = ranks_to_pairs(corpus.ranks);
  ProposalIndex index = ProposalIndex::from_catalog(corpus.catalog);
  auto splits = std::vector<SplitSpec>{politics_split()};
  auto report = multidimensional_report(records, corpus.profiles, splits,
                                        score_win(), index);
  REQUIRE(report.columns.size() == 2);
  CHECK(report.columns[0] == "|d:politics|");
  CHECK(report.columns[1] == "D");
  REQUIRE(report.values.size() == 8);

  // the politics gap column dominates for the planted proposals
  double planted_gap = *report.values[0][0];
  double consensus_gap = *report.values[4][0];
  CHECK(planted_gap > consensus_gap);
}
