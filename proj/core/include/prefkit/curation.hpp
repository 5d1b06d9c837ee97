#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "prefkit/corpus.hpp"
#include "prefkit/pairwise.hpp"

namespace prefkit {

// Thresholds and optional side tables for the six suspicious-participation
// criteria. Criteria whose inputs are absent (consent table, IP data,
// reCAPTCHA scores) disable cleanly and are listed in the report.
struct CurationConfig {
  std::set<int> accepted_universes = {2, 4, 5, 6};
  double recaptcha_threshold = 0.7;
  double static_rank_max_update_rate = 0.10;
  int static_rank_min_panels = 3;
  // Approval rows above this count flag over-participation; defaults to the
  // catalog size when unset.
  std::optional<long> max_approvals;
  std::optional<std::set<std::string>> consent_ids;
  // Criterion 5 needs both: which IP hash each user came from, and the
  // scores observed per IP hash.
  std::optional<std::unordered_map<std::string, std::string>> user_ip_hash;
  std::optional<std::unordered_map<std::string, std::vector<double>>> ip_scores;
};

struct SuspicionEntry {
  std::set<int> criteria;  // triggered criteria, numbered 1..6
  bool flagged = false;
};

struct SuspicionReport {
  std::map<std::string, SuspicionEntry> users;
  std::set<int> disabled_criteria;

  bool is_flagged(const std::string& user_id) const {
    auto it = users.find(user_id);
    return it != users.end() && it->second.flagged;
  }
  long flagged_count() const;
};

// Evaluates the six criteria over every user appearing in the corpus:
//   1. a record in a universe outside accepted_universes
//   2. user absent from the consent table
//   3. >= min_panels rank panels with update rate below the threshold
//   4. mean reCAPTCHA score below the threshold
//   5. user's IP hash has mean score below the threshold
//   6. more approval rows than the over-participation bound
CurationConfig resolve_config(const CurationConfig& config,
                              const PreferenceCorpus& corpus);
SuspicionReport detect_suspicious(const PreferenceCorpus& corpus,
                                  const CurationConfig& config);

// Drops records from flagged users, then keeps only the latest record per
// (user, pair); equal timestamps resolve to the later input position.
// Idempotent.
std::vector<PairwiseRecord> curate(std::span<const PairwiseRecord> pairs,
                                   const SuspicionReport& report);

}  // namespace prefkit
