#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "prefkit/aggregation.hpp"
#include "prefkit/divisiveness.hpp"
#include "prefkit/pairwise.hpp"
#include "prefkit/stats.hpp"

namespace prefkit {

// Dense head-to-head win-rate matrix. Observed cells satisfy
// w(i,j) + w(j,i) = 1; never-compared cells are imputed (default one half)
// and masked; the diagonal is fixed at one half and masked.
struct PairwiseMatrix {
  ProposalIndex index;
  std::vector<double> w;        // n*n row-major
  std::vector<char> observed;   // mask

  std::size_t n() const { return index.size(); }
  double at(std::size_t i, std::size_t j) const { return w[i * n() + j]; }
  bool is_observed(std::size_t i, std::size_t j) const {
    return observed[i * n() + j] != 0;
  }
};

PairwiseMatrix pairwise_matrix(const PairwiseTally& tally, double impute = 0.5);

// Fraction of observed contests won by the higher-ranked proposal (its cell
// exceeds the transposed cell); exact ties count one half. Pairs not
// covered by the ranking are skipped; throws ComputeError when nothing is
// countable. Also applicable to factor matrices, whose cells are not
// complementary.
double pairwise_efficiency(const PairwiseMatrix& matrix, const Ranking& ranking);

// Builds a ranking from a record subset; the unit IIA and convergence
// audits rerun.
using RankBuilder = std::function<Ranking(std::span<const PairwiseRecord>)>;
RankBuilder make_rank_builder(const ScoreFunction& fn,
                              const ProposalIndex& index);

// Ranking built from a divisiveness table (descending D).
RankBuilder make_divisiveness_rank_builder(const ScoreFunction& fn,
                                           const ProposalIndex& index,
                                           const DivisivenessConfig& config = {});

struct IiaRemoval {
  int removed_id = 0;
  // (remaining proposal id, |position difference|), ascending id.
  std::vector<std::pair<int, int>> distances;
  bool failed = false;  // the reduced data produced no ranking
};

struct IiaReport {
  int threshold = 4;
  double robustness = 0.0;      // 1 - violation rate over all cells
  double top_robustness = 0.0;  // winner unchanged under non-winner removals
  long cells = 0;
  long violations = 0;
  long missing = 0;  // remaining proposals that lost their ranking entirely
  std::vector<IiaRemoval> removals;
};

// Independence-of-irrelevant-alternatives audit: remove each proposal's
// comparisons, rebuild the ranking, and measure per-proposal position
// shifts against the base ranking with the removed proposal excised.
// A shift beyond `threshold` positions counts as a violation.
IiaReport iia_robustness(std::span<const PairwiseRecord> records,
                         const RankBuilder& build, int threshold);

struct ConvergencePoint {
  std::size_t size = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  std::vector<double> taus;
};

struct ConvergenceReport {
  std::vector<ConvergencePoint> points;
  double tau_threshold = 0.75;
  std::optional<std::size_t> converged_size;  // smallest size with median >= threshold
};

// Subsamples the record stream at each size and reports the distribution of
// Kendall-tau correlations against the full-data ranking. Bit-reproducible
// for a given seed.
ConvergenceReport convergence_curve(std::span<const PairwiseRecord> records,
                                    const RankBuilder& build,
                                    std::span<const std::size_t> sizes,
                                    int iterations, std::uint64_t seed,
                                    double tau_threshold = 0.75);

struct SpectralReport {
  std::size_t n = 0;
  std::size_t k = 0;                       // factors retained
  std::vector<double> singular_values;     // all n, nonincreasing
  std::vector<double> variance_share;      // sigma^2 / sum(sigma^2)
  std::vector<std::vector<double>> left_vectors;   // first k, length n
  std::vector<std::vector<double>> right_vectors;  // first k, length n
  std::vector<std::vector<double>> factors;        // first k, n*n row-major
};

// Full SVD of the win-rate matrix. Factor t is sigma_t * u_t * v_t';
// singular vectors are sign-normalized so each u_t's largest-magnitude
// entry is positive.
SpectralReport svd_factors(const PairwiseMatrix& matrix, std::size_t k);

struct AlignmentRow {
  std::size_t vector_index = 0;  // 1-based
  std::optional<double> r2_vs_score;
  std::optional<double> p_vs_score;
  std::optional<double> r2_vs_divisiveness;
  std::optional<double> p_vs_divisiveness;
};

struct AlignmentTable {
  std::vector<AlignmentRow> rows;  // first min(k, 5) singular vectors
  std::optional<stats::RegressionSummary> score_regression;
  std::optional<stats::RegressionSummary> divisiveness_regression;
};

// Correlates each leading left singular vector with the agreement scores
// and the divisiveness values, and fits both on the first three vectors.
AlignmentTable eigenvector_alignment(const SpectralReport& report,
                                     const ScoreTable& scores,
                                     const DivisivenessTable& divisiveness,
                                     const ProposalIndex& index);

}  // namespace prefkit
