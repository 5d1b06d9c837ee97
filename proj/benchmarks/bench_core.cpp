#include <benchmark/benchmark.h>

#include "prefkit/audit.hpp"
#include "prefkit/divisiveness.hpp"
#include "prefkit/pairwise.hpp"
#include "prefkit/synthgen.hpp"

using namespace prefkit;

namespace {

PreferenceCorpus make_corpus(std::size_t n_users) {
  ElectorateSpec spec;
  spec.n_proposals = 60;
  spec.n_users = n_users;
  spec.model = ElectorateModel::two_bloc;
  for (int id = 3; id <= 60; id += 3) spec.divisive_proposals.push_back(id);
  spec.noise_rate = 0.1;
  spec.seed = 1;
  return generate(spec);
}

}  // namespace

static void BM_RanksToPairs(benchmark::State& state) {
  auto corpus = make_corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto pairs = ranks_to_pairs(corpus.ranks);
    benchmark::DoNotOptimize(pairs);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long>(corpus.ranks.size()));
}
BENCHMARK(BM_RanksToPairs)->Arg(100)->Arg(400);

static void BM_BuildTally(benchmark::State& state) {
  auto corpus = make_corpus(static_cast<std::size_t>(state.range(0)));
  auto records = ranks_to_pairs(corpus.ranks);
  auto index = ProposalIndex::from_catalog(corpus.catalog);
  for (auto _ : state) {
    auto tally = build_tally(records, index);
    benchmark::DoNotOptimize(tally);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long>(records.size()));
}
BENCHMARK(BM_BuildTally)->Arg(100)->Arg(400);

static void BM_PairwiseDivisiveness(benchmark::State& state) {
  auto corpus = make_corpus(static_cast<std::size_t>(state.range(0)));
  auto records = ranks_to_pairs(corpus.ranks);
  auto index = ProposalIndex::from_catalog(corpus.catalog);
  for (auto _ : state) {
    auto table = pairwise_divisiveness(records, score_win(), index);
    benchmark::DoNotOptimize(table);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long>(records.size()));
}
BENCHMARK(BM_PairwiseDivisiveness)->Arg(100)->Arg(400);

static void BM_SvdFactors(benchmark::State& state) {
  auto corpus = make_corpus(200);
  auto records = ranks_to_pairs(corpus.ranks);
  auto index = ProposalIndex::from_catalog(corpus.catalog);
  auto matrix = pairwise_matrix(build_tally(records, index));
  for (auto _ : state) {
    auto report = svd_factors(matrix, 5);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_SvdFactors);

BENCHMARK_MAIN();
