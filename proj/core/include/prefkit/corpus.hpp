#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "prefkit/errors.hpp"
#include "prefkit/instant.hpp"

namespace prefkit {

// One catalog entry: a policy proposal participants vote on.
struct Proposal {
  int id = 0;  // positive catalog id
  std::string text;
  std::set<std::string> candidate_ids;  // candidates whose program included it
};

// A single approval-screen judgment: approve (+1), disapprove (-1), abstain (0).
struct ApprovalRecord {
  std::string user_id;
  int proposal_id = 0;
  int agree = 0;
  int universe = 0;
  std::optional<double> score;  // reCAPTCHA score in [0,1]
  Instant timestamp;
  std::string locale;
};

// One rank-screen submission: proposals shown in a panel, most preferred first.
struct RankRecord {
  std::string user_id;
  std::vector<int> panel;
  bool updated = false;  // user reordered the randomly generated panel
  int universe = 0;
  std::optional<double> score;
  Instant timestamp;
};

// Self-reported demographics. Integer labels follow the platform codebooks;
// the split tables decide which labels map to which side of a partition.
struct ParticipantProfile {
  std::string user_id;
  int sex = 0;
  int age = 0;
  int education = 0;
  int zone = 0;
  int location = 0;
  int politics = 0;
  int universe = 0;
  Instant timestamp;

  int label(const std::string& dimension) const;
};

// A validated bundle of catalog + ballots + profiles. Immutable once built;
// safe to share across threads.
struct PreferenceCorpus {
  std::vector<Proposal> catalog;
  std::vector<ApprovalRecord> approvals;
  std::vector<RankRecord> ranks;
  std::unordered_map<std::string, ParticipantProfile> profiles;

  // Checks catalog id uniqueness and that every ballot reference resolves.
  // Throws FormatError on violation.
  void validate() const;

  const Proposal* find_proposal(int id) const;
};

// Collected row-level problems from a parse; the records that survived are
// returned in `records`. Header-level problems throw SchemaError instead.
template <typename T>
struct ParseResult {
  T records;
  std::vector<RowError> errors;
};

// Dense index over the catalog ids used by tallies and matrices.
class ProposalIndex {
 public:
  ProposalIndex() = default;
  explicit ProposalIndex(std::vector<int> sorted_ids);
  static ProposalIndex from_catalog(const std::vector<Proposal>& catalog);

  std::size_t size() const { return ids_.size(); }
  int id_at(std::size_t pos) const { return ids_[pos]; }
  std::optional<std::size_t> find(int id) const;
  const std::vector<int>& ids() const { return ids_; }

 private:
  std::vector<int> ids_;  // ascending
  std::unordered_map<int, std::size_t> pos_;
};

// --- Parsers -------------------------------------------------------------
//
// All parsers take comma-delimited UTF-8 tables with a header row. Unknown
// extra columns are ignored. Rows that cannot be decoded are rejected and
// reported in ParseResult::errors with their line numbers.

ParseResult<std::vector<Proposal>> parse_proposals(const std::string& path);

ParseResult<std::vector<ApprovalRecord>> parse_approvals(
    const std::string& path, const std::vector<Proposal>& catalog);

ParseResult<std::vector<RankRecord>> parse_ranks(
    const std::string& path, const std::vector<Proposal>& catalog);

// Keeps only the most recent profile per user (ties broken by later row).
ParseResult<std::unordered_map<std::string, ParticipantProfile>> parse_profiles(
    const std::string& path);

// PrefLib strict-order-complete file: '#'-prefixed metadata lines, then
// "multiplicity: id,id,...,id" data lines. Every panel must be a complete
// permutation of the declared alternatives; violations throw FormatError.
// Voters are expanded to synthetic ids "soc:<line>:<k>".
PreferenceCorpus parse_preflib_soc(const std::string& path);

// String-input variants used by tests and by the PrefLib reader.
ParseResult<std::vector<Proposal>> parse_proposals_text(std::string_view text,
                                                        std::string name);
ParseResult<std::vector<ApprovalRecord>> parse_approvals_text(
    std::string_view text, std::string name,
    const std::vector<Proposal>& catalog);
ParseResult<std::vector<RankRecord>> parse_ranks_text(
    std::string_view text, std::string name,
    const std::vector<Proposal>& catalog);
ParseResult<std::unordered_map<std::string, ParticipantProfile>>
parse_profiles_text(std::string_view text, std::string name);
PreferenceCorpus parse_preflib_soc_text(std::string_view text,
                                        std::string name);

// --- Canonical serialization ---------------------------------------------
//
// The canonical on-disk layout is four CSV files (proposals.csv,
// approvals.csv, ranks.csv, profiles.csv) in one directory; column sets are
// documented in the repo docs. Round-trips are field-exact.

std::string serialize_proposals(const std::vector<Proposal>& catalog);
std::string serialize_approvals(const std::vector<ApprovalRecord>& approvals);
std::string serialize_ranks(const std::vector<RankRecord>& ranks);
std::string serialize_profiles(
    const std::unordered_map<std::string, ParticipantProfile>& profiles);

// Writes/reads the four canonical files under `dir`.
void write_corpus(const PreferenceCorpus& corpus, const std::string& dir);
PreferenceCorpus read_corpus(const std::string& dir);

}  // namespace prefkit
