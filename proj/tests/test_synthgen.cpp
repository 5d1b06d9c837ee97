#include <doctest.h>

#include <cmath>

#include "prefkit/audit.hpp"
#include "prefkit/pairwise.hpp"
#include "prefkit/synthgen.hpp"

using namespace prefkit;

TEST_CASE("identical specs generate identical corpora") {
  ElectorateSpec spec;
  spec.n_proposals = 10;
  spec.n_users = 30;
  spec.model = ElectorateModel::two_bloc;
  spec.divisive_proposals = {2, 5};
  spec.noise_rate = 0.2;
  spec.seed = 77;
  auto a = generate(spec);
  auto b = generate(spec);
  REQUIRE(a.ranks.size() == b.ranks.size());
  for (std::size_t i = 0; i < a.ranks.size(); ++i) {
    CHECK(a.ranks[i].user_id == b.ranks[i].user_id);
    CHECK(a.ranks[i].panel == b.ranks[i].panel);
    CHECK(a.ranks[i].timestamp == b.ranks[i].timestamp);
  }
  CHECK(serialize_profiles(a.profiles) == serialize_profiles(b.profiles));

  spec.seed = 78;
  auto c = generate(spec);
  bool any_difference = false;
  for (std::size_t i = 0; i < a.ranks.size(); ++i) {
    if (a.ranks[i].panel != c.ranks[i].panel) any_difference = true;
  }
  CHECK(any_difference);
}

TEST_CASE("noise-free blocs are perfectly self-consistent") {
  ElectorateSpec spec;
  spec.n_proposals = 8;
  spec.n_users = 20;
  spec.model = ElectorateModel::two_bloc;
  spec.divisive_proposals = {1, 4};
  spec.noise_rate = 0.0;
  spec.seed = 3;
  spec.panels_per_user = 15;
  auto corpus = generate(spec);
  auto records = ranks_to_pairs(corpus.ranks);
  auto result = consistency(records);
  REQUIRE(result.overall.has_value());
  CHECK(*result.overall == doctest::Approx(1.0));
}

TEST_CASE("uniform-random win rates concentrate around one half") {
  ElectorateSpec spec;
  spec.n_proposals = 10;
  spec.n_users = 200;
  spec.model = ElectorateModel::uniform_random;
  spec.seed = 13;
  spec.panels_per_user = 10;
  auto corpus = generate(spec);
  auto records = ranks_to_pairs(corpus.ranks);
  ProposalIndex index = ProposalIndex::from_catalog(corpus.catalog);
  auto table = win_percentage(build_tally(records, index));
  for (const auto& row : table.rows) {
    REQUIRE(row.defined);
    // ~4000 appearances per proposal; 5 sigma of a fair binomial is ~4%
    double sigma = 0.5 / std::sqrt(static_cast<double>(row.n));
    CHECK(std::abs(row.mean - 0.5) < 5.0 * sigma + 1e-9);
  }
}

TEST_CASE("noise-free transitive electorate is fully pairwise efficient") {
  ElectorateSpec spec;
  spec.n_proposals = 12;
  spec.n_users = 50;
  spec.model = ElectorateModel::transitive_noise;
  spec.noise_rate = 0.0;
  spec.seed = 29;
  auto corpus = generate(spec);
  auto records = ranks_to_pairs(corpus.ranks);
  ProposalIndex index = ProposalIndex::from_catalog(corpus.catalog);
  auto tally = build_tally(records, index);
  auto matrix = pairwise_matrix(tally);
  auto ranking = rank_from_scores(win_percentage(tally));
  CHECK(pairwise_efficiency(matrix, ranking) == doctest::Approx(1.0));
}

TEST_CASE("profiles carry the bloc as a politics label") {
  ElectorateSpec spec;
  spec.n_proposals = 6;
  spec.n_users = 10;
  spec.model = ElectorateModel::two_bloc;
  spec.divisive_proposals = {1};
  spec.bloc_fraction = 0.3;
  spec.seed = 31;
  auto corpus = generate(spec);
  long liberal = 0, conservative = 0;
  for (const auto& [_, profile] : corpus.profiles) {
    if (profile.politics == 1) ++liberal;
    if (profile.politics == 4) ++conservative;
  }
  CHECK(liberal == 3);
  CHECK(conservative == 7);
}

TEST_CASE("a generated corpus survives the canonical disk round trip") {
  ElectorateSpec spec;
  spec.n_proposals = 10;
  spec.n_users = 25;
  spec.model = ElectorateModel::two_bloc;
  spec.divisive_proposals = {1, 10};
  spec.noise_rate = 0.1;
  spec.seed = 41;
  auto corpus = generate(spec);
  write_corpus(corpus, "/tmp/prefkit_synth_roundtrip");
  auto back = read_corpus("/tmp/prefkit_synth_roundtrip");
  CHECK(serialize_proposals(back.catalog) == serialize_proposals(corpus.catalog));
  CHECK(serialize_ranks(back.ranks) == serialize_ranks(corpus.ranks));
  CHECK(serialize_profiles(back.profiles) == serialize_profiles(corpus.profiles));
}

TEST_CASE("spec files round-trip and reject bad values") {
  ElectorateSpec spec;
  spec.n_proposals = 9;
  spec.n_users = 33;
  spec.model = ElectorateModel::two_bloc;
  spec.divisive_proposals = {2, 3};
  spec.bloc_fraction = 0.4;
  spec.noise_rate = 0.15;
  spec.seed = 99;
  spec.panel_size = 4;
  spec.panels_per_user = 7;
  auto text = serialize_electorate_spec(spec);
  auto parsed = parse_electorate_spec_text(text);
  CHECK(parsed.n_proposals == spec.n_proposals);
  CHECK(parsed.n_users == spec.n_users);
  CHECK(parsed.model == spec.model);
  CHECK(parsed.divisive_proposals == spec.divisive_proposals);
  CHECK(parsed.bloc_fraction == doctest::Approx(spec.bloc_fraction));
  CHECK(parsed.noise_rate == doctest::Approx(spec.noise_rate));
  CHECK(parsed.seed == spec.seed);
  CHECK(parsed.panel_size == spec.panel_size);
  CHECK(parsed.panels_per_user == spec.panels_per_user);

  CHECK_THROWS_AS(parse_electorate_spec_text("nonsense\n"), ConfigError);
  CHECK_THROWS_AS(parse_electorate_spec_text("unknown_key = 5\n"), ConfigError);
  CHECK_THROWS_AS(
      parse_electorate_spec_text("n_proposals = 4\npanel_size = 9\n"),
      ConfigError);
  CHECK_THROWS_AS(parse_electorate_spec_text(
                      "model = two-bloc\nbloc_fraction = 0.5\n"),
                  ConfigError);  // two-bloc without a divisive set
}
