#include "prefkit/curation.hpp"

#include <algorithm>

namespace prefkit {

long SuspicionReport::flagged_count() const {
  long count = 0;
  for (const auto& [_, entry] : users) {
    if (entry.flagged) ++count;
  }
  return count;
}

CurationConfig resolve_config(const CurationConfig& config,
                              const PreferenceCorpus& corpus) {
  CurationConfig resolved = config;
  if (!resolved.max_approvals) {
    resolved.max_approvals = static_cast<long>(corpus.catalog.size());
  }
  return resolved;
}

namespace {

struct UserStats {
  bool bad_universe = false;
  long rank_panels = 0;    // panels long enough to be reorderable
  long updated_panels = 0;
  double score_sum = 0.0;
  long score_count = 0;
  long approval_rows = 0;
};

}  // namespace

SuspicionReport detect_suspicious(const PreferenceCorpus& corpus,
                                  const CurationConfig& raw_config) {
  const CurationConfig config = resolve_config(raw_config, corpus);
  SuspicionReport report;

  std::map<std::string, UserStats> stats;
  for (const auto& rec : corpus.approvals) {
    auto& s = stats[rec.user_id];
    if (!config.accepted_universes.count(rec.universe)) s.bad_universe = true;
    if (rec.score) {
      s.score_sum += *rec.score;
      ++s.score_count;
    }
    ++s.approval_rows;
  }
  for (const auto& rec : corpus.ranks) {
    auto& s = stats[rec.user_id];
    if (!config.accepted_universes.count(rec.universe)) s.bad_universe = true;
    if (rec.score) {
      s.score_sum += *rec.score;
      ++s.score_count;
    }
    // Single-proposal panels cannot be reordered and do not count toward
    // the update rate.
    if (rec.panel.size() >= 2) {
      ++s.rank_panels;
      if (rec.updated) ++s.updated_panels;
    }
  }
  for (const auto& [user, _] : corpus.profiles) stats.try_emplace(user);

  bool any_scores = false;
  for (const auto& [_, s] : stats) {
    if (s.score_count > 0) {
      any_scores = true;
      break;
    }
  }
  if (!config.consent_ids) report.disabled_criteria.insert(2);
  if (!any_scores) report.disabled_criteria.insert(4);
  if (!config.user_ip_hash || !config.ip_scores) {
    report.disabled_criteria.insert(5);
  }

  // Mean score per IP hash, for criterion 5.
  std::unordered_map<std::string, double> ip_means;
  if (config.ip_scores) {
    for (const auto& [ip, scores] : *config.ip_scores) {
      if (scores.empty()) continue;
      double sum = 0;
      for (double v : scores) sum += v;
      ip_means[ip] = sum / static_cast<double>(scores.size());
    }
  }

  for (const auto& [user, s] : stats) {
    SuspicionEntry entry;
    if (s.bad_universe) entry.criteria.insert(1);
    if (config.consent_ids && !config.consent_ids->count(user)) {
      entry.criteria.insert(2);
    }
    if (s.rank_panels >= config.static_rank_min_panels) {
      double rate = static_cast<double>(s.updated_panels) /
                    static_cast<double>(s.rank_panels);
      if (rate < config.static_rank_max_update_rate) entry.criteria.insert(3);
    }
    if (s.score_count > 0 &&
        s.score_sum / static_cast<double>(s.score_count) <
            config.recaptcha_threshold) {
      entry.criteria.insert(4);
    }
    if (config.user_ip_hash && config.ip_scores) {
      auto ip = config.user_ip_hash->find(user);
      if (ip != config.user_ip_hash->end()) {
        auto mean = ip_means.find(ip->second);
        if (mean != ip_means.end() && mean->second < config.recaptcha_threshold) {
          entry.criteria.insert(5);
        }
      }
    }
    if (s.approval_rows > *config.max_approvals) entry.criteria.insert(6);
    entry.flagged = !entry.criteria.empty();
    report.users[user] = std::move(entry);
  }
  return report;
}

std::vector<PairwiseRecord> curate(std::span<const PairwiseRecord> pairs,
                                   const SuspicionReport& report) {
  // Latest record per (user, card); later input position wins ties.
  std::unordered_map<std::string, std::unordered_map<std::uint64_t, std::size_t>>
      keep;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& rec = pairs[i];
    if (report.is_flagged(rec.user_id)) continue;
    auto& slot = keep[rec.user_id];
    auto [it, inserted] = slot.try_emplace(rec.pair.key(), i);
    if (!inserted && pairs[i].timestamp >= pairs[it->second].timestamp) {
      it->second = i;
    }
  }
  std::vector<std::size_t> kept;
  for (const auto& [_, cards] : keep) {
    for (const auto& [_, idx] : cards) kept.push_back(idx);
  }
  std::sort(kept.begin(), kept.end());
  std::vector<PairwiseRecord> out;
  out.reserve(kept.size());
  for (std::size_t idx : kept) out.push_back(pairs[idx]);
  return out;
}

}  // namespace prefkit
