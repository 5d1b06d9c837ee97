#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "prefkit/pairwise.hpp"

namespace prefkit {

// Per-proposal score with optional bootstrap bounds. `defined` is false only
// when the proposal had zero comparisons (or, for bootstrapped tables, was
// defined in no iteration).
struct ScoreRow {
  int proposal_id = 0;
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  long n = 0;
  bool defined = true;
};

struct ScoreTable {
  std::string function;
  std::vector<ScoreRow> rows;  // ascending proposal_id

  const ScoreRow* row(int proposal_id) const;
  std::optional<double> value(int proposal_id) const;
};

// Ordering derived from a score table: rank 1 is best, ties broken by
// ascending proposal id, undefined proposals kept aside.
struct Ranking {
  std::vector<int> ordered_ids;            // defined proposals, best first
  std::unordered_map<int, int> position;   // proposal id -> 1-based rank
  std::vector<int> undefined_ids;          // ascending id
};

// Fraction of pairwise contests won over all appearances.
ScoreTable win_percentage(const PairwiseTally& tally);

// Fraction of pairwise majority contests won, ties counting one half.
ScoreTable copeland(const PairwiseTally& tally);

struct EloConfig {
  double k_factor = 10.0;
  double s0 = 400.0;  // initial rating, also the logistic scale
  int shuffles = 30;
  std::uint64_t seed = 0;
};

// Sequential Elo ratings averaged over seeded shuffles of the record
// stream. The per-update delta is applied symmetrically, so the rating sum
// is conserved exactly. Tie records are skipped.
ScoreTable elo(std::span<const PairwiseRecord> records,
               const ProposalIndex& index, const EloConfig& config = {});

struct AhpConfig {
  double epsilon = 1e-6;    // win-rate clamp before the reciprocal transform
  double tolerance = 1e-10;  // L1 distance between successive vectors
  long max_iterations = 10000;
  bool allow_unobserved = true;  // unobserved pairs enter as an even split
};

// Priority vector of the column-normalized reciprocal comparison matrix,
// computed by power iteration; sums to 1.
ScoreTable ahp(const PairwiseTally& tally, const AhpConfig& config = {});

// A named scoring routine over pairwise records. The kind tag lets
// downstream analyses pick specialized fast paths while keeping the same
// results as the generic callable.
enum class ScoreKind { win, copeland, elo, ahp, custom };

struct ScoreFunction {
  ScoreKind kind = ScoreKind::custom;
  std::string name;
  std::function<ScoreTable(std::span<const PairwiseRecord>,
                           const ProposalIndex&)>
      fn;
};

ScoreFunction score_win();
ScoreFunction score_copeland();
ScoreFunction score_elo(const EloConfig& config = {});
ScoreFunction score_ahp(const AhpConfig& config = {});
ScoreFunction score_by_name(const std::string& name, std::uint64_t seed);

struct BootstrapConfig {
  int iterations = 30;
  double fraction = 0.5;  // sampled without replacement
  std::uint64_t seed = 0;
};

// Applies `fn` to `iterations` subsamples (each of floor(fraction * N)
// records, drawn without replacement, original order preserved) and reports
// the per-proposal mean with an empirical 95% interval. Deterministic in
// the seed.
ScoreTable bootstrap(const ScoreFunction& fn,
                     std::span<const PairwiseRecord> records,
                     const ProposalIndex& index, const BootstrapConfig& config);

// Generic value-vector bootstrap used by both score and divisiveness
// tables: `eval` maps a record subset to one value per index position
// (nullopt = undefined in that iteration).
struct BootstrapSummary {
  std::vector<double> mean;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  std::vector<long> defined_iterations;
};
BootstrapSummary bootstrap_values(
    const std::function<std::vector<std::optional<double>>(
        std::span<const PairwiseRecord>)>& eval,
    std::size_t width, std::span<const PairwiseRecord> records,
    const BootstrapConfig& config);

// Descending by mean score, ties by ascending proposal id; undefined
// proposals land in undefined_ids. Throws ComputeError when nothing is
// defined.
Ranking rank_from_scores(const ScoreTable& scores);

}  // namespace prefkit
