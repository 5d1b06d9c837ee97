#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "prefkit/aggregation.hpp"
#include "prefkit/corpus.hpp"
#include "prefkit/pairwise.hpp"

namespace prefkit {

enum class SplitSide { group_a, group_b, excluded };

// A demographic partition over participants: profile labels map to one of
// two sides or are excluded. Labels not listed fall back to `fallback`
// (Brazil's location table assigns "all other labels" to one side).
struct SplitSpec {
  std::string dimension;  // profile dimension the labels come from
  std::string label_a;    // human-readable side names, e.g. "right"/"left"
  std::string label_b;
  std::unordered_map<int, SplitSide> mapping;
  SplitSide fallback = SplitSide::excluded;

  SplitSide side_of(int label) const {
    auto it = mapping.find(label);
    return it == mapping.end() ? fallback : it->second;
  }
};

// Default split tables from the platform codebooks.
std::vector<SplitSpec> default_splits_france();
std::vector<SplitSpec> default_splits_brazil();
std::vector<SplitSpec> default_splits(const std::string& country);

struct DivisivenessRow {
  int proposal_id = 0;
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  long n_valid_terms = 0;
  bool defined = true;
};

struct DivisivenessTable {
  std::string metric;  // "pairwise" or "split:<dimension>"
  std::vector<DivisivenessRow> rows;  // ascending proposal_id

  const DivisivenessRow* row(int proposal_id) const;
  std::optional<double> value(int proposal_id) const;
};

// Users of each side of a split, resolved through profiles. Users without a
// profile or with an excluded label take no side.
struct SplitPartition {
  std::vector<std::string> users_a;
  std::vector<std::string> users_b;
  long excluded_users = 0;
};
SplitPartition split_users(
    const std::unordered_map<std::string, ParticipantProfile>& profiles,
    const SplitSpec& split);

// Applies the score function independently to each side's records.
// Throws ComputeError naming the side when one side has no users.
std::pair<ScoreTable, ScoreTable> split_scores(
    std::span<const PairwiseRecord> records,
    const std::unordered_map<std::string, ParticipantProfile>& profiles,
    const SplitSpec& split, const ScoreFunction& fn,
    const ProposalIndex& index);

// Signed per-proposal score gap between the two sides of a split, in the
// score function's units. Proposals undefined on either side are flagged.
DivisivenessTable split_divisiveness(
    std::span<const PairwiseRecord> records,
    const std::unordered_map<std::string, ParticipantProfile>& profiles,
    const SplitSpec& split, const ScoreFunction& fn, const ProposalIndex& index,
    const std::optional<BootstrapConfig>& bootstrap = std::nullopt);

// Aggregate divisiveness of a split: 1 - R^2 across the two score vectors
// over commonly defined proposals. Requires >= 3 common proposals.
double aggregate_divisiveness(const ScoreTable& side_a, const ScoreTable& side_b);

enum class MembershipMode {
  // A user joins the sub-population whose proposal they chose on the
  // majority of their judgments of that pair; tied users are excluded.
  user_majority,
  // A user joins every side they ever chose (can be both); sensitivity
  // alternative.
  per_record,
};

struct DivisivenessConfig {
  MembershipMode membership = MembershipMode::user_majority;
  // Divide by the number of valid terms (skips don't deflate the score).
  // false divides by N-1 regardless, the literal denominator.
  bool renormalize_by_valid_terms = true;
  std::optional<BootstrapConfig> bootstrap;
};

// Demographic-free divisiveness: for each proposal i, the mean absolute gap
// in i's score between the choosers and rejecters of i across all pairings
// {i, j}. Each sub-population is scored on its full record set. Terms with
// an empty side or an undefined score are skipped; a proposal with no valid
// terms gets value 0 and defined=false.
DivisivenessTable pairwise_divisiveness(std::span<const PairwiseRecord> records,
                                        const ScoreFunction& fn,
                                        const ProposalIndex& index,
                                        const DivisivenessConfig& config = {});

// --- political responsiveness ------------------------------------------------

enum class Orientation { left, right, centrist };
enum class CentristScenario { exclude, as_right, as_left };

CentristScenario scenario_by_name(const std::string& name);

// 2x2 approval rates: participants (left/right, from the politics split) x
// proposals (left/right, from the orientations of the candidates that
// included them). rate[p][q]: p = participant side, q = proposal side;
// index 0 = left, 1 = right.
struct ResponsivenessMatrix {
  double rate[2][2] = {{0, 0}, {0, 0}};
  long denom[2][2] = {{0, 0}, {0, 0}};  // judgments with a stated preference
  long left_proposals = 0;
  long right_proposals = 0;
  long dropped_proposals = 0;
};

ResponsivenessMatrix responsiveness_matrix(
    const PreferenceCorpus& corpus,
    const std::unordered_map<std::string, Orientation>& candidate_orientations,
    CentristScenario scenario, const SplitSpec& politics_split);

// --- multidimensional assembly -------------------------------------------------

// One |d| column per split plus the pairwise D column, aligned by proposal;
// input to the standardized divisiveness regression.
struct MultidimensionalReport {
  std::vector<std::string> columns;  // "|d:<dim>|"... then "D"
  std::vector<int> proposal_ids;
  std::vector<std::vector<std::optional<double>>> values;  // [proposal][column]
};

MultidimensionalReport multidimensional_report(
    std::span<const PairwiseRecord> records,
    const std::unordered_map<std::string, ParticipantProfile>& profiles,
    std::span<const SplitSpec> splits, const ScoreFunction& fn,
    const ProposalIndex& index);

}  // namespace prefkit
