#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prefkit/corpus.hpp"

namespace prefkit {

// Canonical identifier of an unordered proposal pair; always low < high.
struct PairId {
  int low = 0;
  int high = 0;

  static PairId of(int a, int b) { return a < b ? PairId{a, b} : PairId{b, a}; }
  std::string card_id() const {
    return std::to_string(low) + "-" + std::to_string(high);
  }
  std::uint64_t key() const {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(low)) << 32) |
           static_cast<std::uint32_t>(high);
  }
  friend bool operator==(const PairId&, const PairId&) = default;
};

enum class PairChoice { low, high, none };
enum class RecordSource { approval, rank };

// One pairwise judgment derived from a ballot (or ingested directly).
// selected == none encodes the "Don't have preference" option from the
// Brazilian universe-2 screens; such records are kept but excluded from
// every tally and metric.
struct PairwiseRecord {
  std::string user_id;
  PairId pair;
  PairChoice selected = PairChoice::low;
  RecordSource source = RecordSource::rank;
  int universe = 0;
  std::optional<double> score;
  Instant timestamp;
  // Ordinal of the rank panel this record came from; nullopt for
  // approval-derived or externally ingested records.
  std::optional<std::int32_t> panel_seq;

  bool is_tie() const { return selected == PairChoice::none; }
  int chosen_id() const {
    return selected == PairChoice::low ? pair.low : pair.high;
  }
  int other_id() const {
    return selected == PairChoice::low ? pair.high : pair.low;
  }
};

// Win-count matrix: at(i,j) = number of times proposal i beat proposal j,
// indexed through a ProposalIndex.
struct PairwiseTally {
  ProposalIndex index;
  std::vector<long> counts;  // n*n row-major

  std::size_t n() const { return index.size(); }
  long at(std::size_t i, std::size_t j) const { return counts[i * n() + j]; }
  long& at(std::size_t i, std::size_t j) { return counts[i * n() + j]; }
  long total() const;
};

// Expands approvals into pairwise records: per user, every approved
// proposal beats every disapproved one; abstentions contribute nothing.
// When a user re-voted on a proposal only the latest judgment counts.
std::vector<PairwiseRecord> approvals_to_pairs(
    std::span<const ApprovalRecord> approvals);

// Expands rank panels: a panel of length k yields k(k-1)/2 records, each
// higher-listed proposal beating each lower-listed one. No cross-panel
// transitivity is assumed.
std::vector<PairwiseRecord> ranks_to_pairs(std::span<const RankRecord> ranks);

// Accumulates win counts. Tie records are skipped; a record referencing a
// proposal outside the index throws FormatError.
PairwiseTally build_tally(std::span<const PairwiseRecord> records,
                          const ProposalIndex& index);

// --- consistency / transitivity diagnostics --------------------------------

enum class ConsistencyMode {
  // Cell value = modal direction count / observations (default reading).
  modal_fraction,
  // Cell value = agreeing observation pairs / all observation pairs;
  // stricter alternative for sensitivity analysis.
  pair_agreement,
};

struct UserConsistency {
  std::string user_id;
  long repeated_cells = 0;
  long observations = 0;  // over repeated cells only
  double value = 0.0;
};

struct ConsistencyResult {
  std::optional<double> overall;  // nullopt when no repeated cells exist
  long repeated_cells = 0;
  long observations = 0;
  std::vector<UserConsistency> per_user;  // sorted by user_id
};

// Agreement rate of repeated judgments on the same (user, pair) cell,
// observation-weighted across cells. Ties are excluded.
ConsistencyResult consistency(
    std::span<const PairwiseRecord> records,
    ConsistencyMode mode = ConsistencyMode::modal_fraction);

struct UserTransitivity {
  std::string user_id;
  long triplets = 0;
  double value = 0.0;
};

struct TransitivityResult {
  std::optional<double> overall;  // nullopt when no qualifying triplets
  long triplets = 0;
  std::vector<UserTransitivity> per_user;  // sorted by user_id
};

// Acyclic fraction of observed preference triplets per user. For a triplet
// with all three pairs observed, every combination of recorded directions
// is counted (product of per-pair direction counts) and the acyclic share
// is taken; the final value is the mean over all qualifying (user, triplet)
// percentages. Triplets whose observations all come from one rank panel are
// trivially transitive and excluded.
TransitivityResult transitivity(std::span<const PairwiseRecord> records);

// --- serialization (mirrors the platform's pairwise table) -----------------

std::string serialize_pairwise(std::span<const PairwiseRecord> records);
ParseResult<std::vector<PairwiseRecord>> parse_pairwise(const std::string& path);
ParseResult<std::vector<PairwiseRecord>> parse_pairwise_text(
    std::string_view text, std::string name);

}  // namespace prefkit
