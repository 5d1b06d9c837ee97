#include "prefkit/divisiveness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "prefkit/stats.hpp"

namespace prefkit {

namespace {

SplitSpec make_split(std::string dimension, std::string label_a,
                     std::string label_b, std::initializer_list<int> a,
                     std::initializer_list<int> b,
                     std::initializer_list<int> excluded,
                     SplitSide fallback = SplitSide::excluded) {
  SplitSpec split;
  split.dimension = std::move(dimension);
  split.label_a = std::move(label_a);
  split.label_b = std::move(label_b);
  split.fallback = fallback;
  for (int v : a) split.mapping[v] = SplitSide::group_a;
  for (int v : b) split.mapping[v] = SplitSide::group_b;
  for (int v : excluded) split.mapping[v] = SplitSide::excluded;
  return split;
}

}  // namespace

std::vector<SplitSpec> default_splits_france() {
  std::vector<SplitSpec> splits;
  splits.push_back(
      make_split("politics", "right", "left", {4, 5}, {1, 2}, {}));
  splits.push_back(make_split(
      "location", "capital", "region", {75, 77, 78, 91, 92, 93, 94, 95},
      {1,  2,  3,  4,  5,  6,  7,  8,  9,  10, 11, 12, 13, 14, 16, 17,
       18, 21, 22, 24, 25, 26, 27, 28, 29, 30, 31, 32, 33, 34, 35, 37,
       38, 39, 41, 42, 44, 45, 46, 47, 49, 50, 51, 53, 54, 55, 56, 57,
       58, 59, 60, 62, 63, 64, 65, 66, 67, 68, 69, 70, 71, 73, 74, 76,
       79, 80, 81, 82, 83, 84, 85, 86, 87, 88, 89, 90, 972, 973},
      {998, 999}));
  splits.push_back(make_split("sex", "female", "male", {1}, {2}, {98, 99}));
  splits.push_back(
      make_split("age", "old", "young", {5, 6, 7}, {1, 2, 3, 4}, {98, 99}));
  splits.push_back(make_split("education", "undergraduate_or_more",
                              "less_than_undergraduate", {4, 5, 6, 7},
                              {1, 2, 3}, {99}));
  splits.push_back(make_split("zone", "urban", "rural", {1}, {2}, {99}));
  return splits;
}

std::vector<SplitSpec> default_splits_brazil() {
  std::vector<SplitSpec> splits;
  splits.push_back(
      make_split("politics", "right", "left", {4, 5}, {1, 2}, {}));
  // Capital covers Rio de Janeiro, Sao Paulo and Brasilia; every other
  // location label is a region.
  splits.push_back(make_split("location", "capital", "region",
                              {3516, 2699, 2392}, {}, {998, 999},
                              SplitSide::group_b));
  splits.push_back(make_split("sex", "female", "male", {1}, {2}, {98, 99}));
  splits.push_back(
      make_split("age", "old", "young", {5, 6, 7}, {1, 2, 3, 4}, {98, 99}));
  splits.push_back(make_split("education", "undergraduate_or_more",
                              "less_than_undergraduate", {4, 5, 6, 7},
                              {1, 2, 3}, {99}));
  splits.push_back(make_split("zone", "urban", "rural", {1}, {2}, {99}));
  return splits;
}

std::vector<SplitSpec> default_splits(const std::string& country) {
  if (country == "france") return default_splits_france();
  if (country == "brazil") return default_splits_brazil();
  throw ConfigError("unknown codebook '" + country +
                    "' (expected france or brazil)");
}

const DivisivenessRow* DivisivenessTable::row(int proposal_id) const {
  auto it = std::lower_bound(
      rows.begin(), rows.end(), proposal_id,
      [](const DivisivenessRow& r, int id) { return r.proposal_id < id; });
  if (it == rows.end() || it->proposal_id != proposal_id) return nullptr;
  return &*it;
}

std::optional<double> DivisivenessTable::value(int proposal_id) const {
  const DivisivenessRow* r = row(proposal_id);
  if (!r || !r->defined) return std::nullopt;
  return r->value;
}

SplitPartition split_users(
    const std::unordered_map<std::string, ParticipantProfile>& profiles,
    const SplitSpec& split) {
  SplitPartition partition;
  for (const auto& [user, profile] : profiles) {
    switch (split.side_of(profile.label(split.dimension))) {
      case SplitSide::group_a:
        partition.users_a.push_back(user);
        break;
      case SplitSide::group_b:
        partition.users_b.push_back(user);
        break;
      case SplitSide::excluded:
        ++partition.excluded_users;
        break;
    }
  }
  std::sort(partition.users_a.begin(), partition.users_a.end());
  std::sort(partition.users_b.begin(), partition.users_b.end());
  return partition;
}

namespace {

std::vector<PairwiseRecord> records_of_users(
    std::span<const PairwiseRecord> records,
    const std::vector<std::string>& sorted_users) {
  std::vector<PairwiseRecord> out;
  for (const auto& rec : records) {
    if (std::binary_search(sorted_users.begin(), sorted_users.end(),
                           rec.user_id)) {
      out.push_back(rec);
    }
  }
  return out;
}

}  // namespace

std::pair<ScoreTable, ScoreTable> split_scores(
    std::span<const PairwiseRecord> records,
    const std::unordered_map<std::string, ParticipantProfile>& profiles,
    const SplitSpec& split, const ScoreFunction& fn,
    const ProposalIndex& index) {
  auto partition = split_users(profiles, split);
  if (partition.users_a.empty()) {
    throw ComputeError("split " + split.dimension + ": side '" +
                       split.label_a + "' has no users");
  }
  if (partition.users_b.empty()) {
    throw ComputeError("split " + split.dimension + ": side '" +
                       split.label_b + "' has no users");
  }
  auto records_a = records_of_users(records, partition.users_a);
  auto records_b = records_of_users(records, partition.users_b);
  return {fn.fn(records_a, index), fn.fn(records_b, index)};
}

DivisivenessTable split_divisiveness(
    std::span<const PairwiseRecord> records,
    const std::unordered_map<std::string, ParticipantProfile>& profiles,
    const SplitSpec& split, const ScoreFunction& fn, const ProposalIndex& index,
    const std::optional<BootstrapConfig>& bootstrap_config) {
  DivisivenessTable table;
  table.metric = "split:" + split.dimension;

  auto [side_a, side_b] = split_scores(records, profiles, split, fn, index);
  for (std::size_t i = 0; i < index.size(); ++i) {
    int id = index.id_at(i);
    DivisivenessRow row;
    row.proposal_id = id;
    auto a = side_a.value(id);
    auto b = side_b.value(id);
    if (a && b) {
      row.value = *a - *b;
      row.ci_low = row.ci_high = row.value;
    } else {
      row.defined = false;
    }
    table.rows.push_back(row);
  }

  if (bootstrap_config) {
    auto eval = [&](std::span<const PairwiseRecord> subset)
        -> std::vector<std::optional<double>> {
      std::vector<std::optional<double>> values(index.size());
      try {
        auto [sa, sb] = split_scores(subset, profiles, split, fn, index);
        for (std::size_t i = 0; i < index.size(); ++i) {
          auto a = sa.value(index.id_at(i));
          auto b = sb.value(index.id_at(i));
          if (a && b) values[i] = *a - *b;
        }
      } catch (const ComputeError&) {
        // a side lost all users in this subsample; contributes nothing
      }
      return values;
    };
    auto summary =
        bootstrap_values(eval, index.size(), records, *bootstrap_config);
    for (std::size_t i = 0; i < index.size(); ++i) {
      if (summary.defined_iterations[i] > 0) {
        table.rows[i].value = summary.mean[i];
        table.rows[i].ci_low = summary.ci_low[i];
        table.rows[i].ci_high = summary.ci_high[i];
        table.rows[i].defined = true;
      }
    }
  }
  return table;
}

double aggregate_divisiveness(const ScoreTable& side_a,
                              const ScoreTable& side_b) {
  std::vector<double> a, b;
  for (const auto& row : side_a.rows) {
    if (!row.defined) continue;
    auto other = side_b.value(row.proposal_id);
    if (!other) continue;
    a.push_back(row.mean);
    b.push_back(*other);
  }
  if (a.size() < 3) {
    throw ComputeError(
        "aggregate divisiveness requires >= 3 commonly defined proposals, got " +
        std::to_string(a.size()));
  }
  auto corr = stats::pearson_r2(a, b);
  return 1.0 - corr.r2;
}

// --- pairwise divisiveness ------------------------------------------------------

namespace {

// Interned per-user tallies: direction counts per card plus per-proposal
// win/appearance counts for the win-percentage fast path.
struct UserData {
  std::map<std::uint64_t, std::pair<long, long>> cards;  // low wins, high wins
  std::unordered_map<std::size_t, std::pair<long, long>> win_apps;
};

struct InternedRecords {
  std::vector<std::string> users;  // by first appearance
  std::vector<UserData> data;
  std::vector<std::vector<std::size_t>> record_indices;  // per user
};

InternedRecords intern(std::span<const PairwiseRecord> records,
                       const ProposalIndex& index) {
  InternedRecords interned;
  std::unordered_map<std::string, std::size_t> ids;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.is_tie()) continue;
    auto [it, inserted] = ids.try_emplace(rec.user_id, interned.users.size());
    if (inserted) {
      interned.users.push_back(rec.user_id);
      interned.data.emplace_back();
      interned.record_indices.emplace_back();
    }
    auto& user = interned.data[it->second];
    interned.record_indices[it->second].push_back(r);
    auto& card = user.cards[rec.pair.key()];
    if (rec.selected == PairChoice::low) {
      ++card.first;
    } else {
      ++card.second;
    }
    auto winner = index.find(rec.chosen_id());
    auto loser = index.find(rec.other_id());
    if (!winner || !loser) {
      throw FormatError("divisiveness: record references proposal outside the index");
    }
    ++user.win_apps[*winner].first;
    ++user.win_apps[*winner].second;
    ++user.win_apps[*loser].second;
  }
  return interned;
}

// Sub-population membership lists per card.
struct CardMembers {
  std::vector<std::size_t> chose_low;
  std::vector<std::size_t> chose_high;
};

std::map<std::uint64_t, CardMembers> card_membership(
    const InternedRecords& interned, MembershipMode mode) {
  std::map<std::uint64_t, CardMembers> cards;
  for (std::size_t u = 0; u < interned.data.size(); ++u) {
    for (const auto& [key, counts] : interned.data[u].cards) {
      auto& members = cards[key];
      if (mode == MembershipMode::user_majority) {
        if (counts.first > counts.second) {
          members.chose_low.push_back(u);
        } else if (counts.second > counts.first) {
          members.chose_high.push_back(u);
        }
        // tied users take no side
      } else {
        if (counts.first > 0) members.chose_low.push_back(u);
        if (counts.second > 0) members.chose_high.push_back(u);
      }
    }
  }
  return cards;
}

std::vector<std::optional<double>> eval_pairwise_divisiveness(
    std::span<const PairwiseRecord> records, const ScoreFunction& fn,
    const ProposalIndex& index, const DivisivenessConfig& config) {
  const std::size_t n = index.size();
  auto interned = intern(records, index);
  auto cards = card_membership(interned, config.membership);

  std::vector<double> sums(n, 0.0);
  std::vector<long> valid(n, 0);

  if (fn.kind == ScoreKind::win) {
    // Win percentage of proposal p over a user set is a ratio of summed
    // integer counts, so each term is computed incrementally and exactly.
    auto win_rate = [&](const std::vector<std::size_t>& members,
                        std::size_t pos) -> std::optional<double> {
      long wins = 0;
      long apps = 0;
      for (std::size_t u : members) {
        auto it = interned.data[u].win_apps.find(pos);
        if (it != interned.data[u].win_apps.end()) {
          wins += it->second.first;
          apps += it->second.second;
        }
      }
      if (apps == 0) return std::nullopt;
      return static_cast<double>(wins) / static_cast<double>(apps);
    };
    for (const auto& [key, members] : cards) {
      if (members.chose_low.empty() || members.chose_high.empty()) continue;
      PairId pair{static_cast<int>(key >> 32),
                  static_cast<int>(key & 0xffffffffu)};
      std::size_t low_pos = *index.find(pair.low);
      std::size_t high_pos = *index.find(pair.high);
      // Term for the low proposal: its score among its choosers vs the rest.
      auto low_in_choosers = win_rate(members.chose_low, low_pos);
      auto low_in_rejecters = win_rate(members.chose_high, low_pos);
      if (low_in_choosers && low_in_rejecters) {
        sums[low_pos] += std::abs(*low_in_choosers - *low_in_rejecters);
        ++valid[low_pos];
      }
      auto high_in_choosers = win_rate(members.chose_high, high_pos);
      auto high_in_rejecters = win_rate(members.chose_low, high_pos);
      if (high_in_choosers && high_in_rejecters) {
        sums[high_pos] += std::abs(*high_in_choosers - *high_in_rejecters);
        ++valid[high_pos];
      }
    }
  } else {
    // Generic route: score each sub-population's full record set.
    auto subset_records = [&](const std::vector<std::size_t>& members) {
      std::vector<PairwiseRecord> out;
      for (std::size_t u : members) {
        for (std::size_t r : interned.record_indices[u]) {
          out.push_back(records[r]);
        }
      }
      return out;
    };
    for (const auto& [key, members] : cards) {
      if (members.chose_low.empty() || members.chose_high.empty()) continue;
      PairId pair{static_cast<int>(key >> 32),
                  static_cast<int>(key & 0xffffffffu)};
      std::size_t low_pos = *index.find(pair.low);
      std::size_t high_pos = *index.find(pair.high);
      ScoreTable chose_low = fn.fn(subset_records(members.chose_low), index);
      ScoreTable chose_high = fn.fn(subset_records(members.chose_high), index);
      auto li = chose_low.value(pair.low);
      auto lr = chose_high.value(pair.low);
      if (li && lr) {
        sums[low_pos] += std::abs(*li - *lr);
        ++valid[low_pos];
      }
      auto hi = chose_high.value(pair.high);
      auto hr = chose_low.value(pair.high);
      if (hi && hr) {
        sums[high_pos] += std::abs(*hi - *hr);
        ++valid[high_pos];
      }
    }
  }

  std::vector<std::optional<double>> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (valid[i] == 0) continue;
    double denom = config.renormalize_by_valid_terms
                       ? static_cast<double>(valid[i])
                       : static_cast<double>(n - 1);
    values[i] = sums[i] / denom;
  }
  return values;
}

}  // namespace

DivisivenessTable pairwise_divisiveness(std::span<const PairwiseRecord> records,
                                        const ScoreFunction& fn,
                                        const ProposalIndex& index,
                                        const DivisivenessConfig& config) {
  DivisivenessTable table;
  table.metric = "pairwise";

  // Valid-term counts always come from the full data set.
  const std::size_t n = index.size();
  auto interned = intern(records, index);
  auto cards = card_membership(interned, config.membership);
  std::vector<long> valid(n, 0);
  {
    DivisivenessConfig base = config;
    base.bootstrap.reset();
    auto values = eval_pairwise_divisiveness(records, fn, index, base);
    for (std::size_t i = 0; i < n; ++i) {
      DivisivenessRow row;
      row.proposal_id = index.id_at(i);
      if (values[i]) {
        row.value = *values[i];
        row.ci_low = row.ci_high = row.value;
      } else {
        row.defined = false;
      }
      table.rows.push_back(row);
    }
  }
  // Count valid terms for reporting.
  for (const auto& [key, members] : cards) {
    if (members.chose_low.empty() || members.chose_high.empty()) continue;
    PairId pair{static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu)};
    ++valid[*index.find(pair.low)];
    ++valid[*index.find(pair.high)];
  }
  for (std::size_t i = 0; i < n; ++i) {
    table.rows[i].n_valid_terms = valid[i];
  }

  if (config.bootstrap) {
    DivisivenessConfig base = config;
    base.bootstrap.reset();
    auto eval = [&](std::span<const PairwiseRecord> subset) {
      return eval_pairwise_divisiveness(subset, fn, index, base);
    };
    auto summary = bootstrap_values(eval, n, records, *config.bootstrap);
    for (std::size_t i = 0; i < n; ++i) {
      if (summary.defined_iterations[i] > 0) {
        table.rows[i].value = summary.mean[i];
        table.rows[i].ci_low = summary.ci_low[i];
        table.rows[i].ci_high = summary.ci_high[i];
        table.rows[i].defined = true;
      }
    }
  }
  return table;
}

// --- political responsiveness ----------------------------------------------------

CentristScenario scenario_by_name(const std::string& name) {
  if (name == "exclude-centrist") return CentristScenario::exclude;
  if (name == "centrist-right") return CentristScenario::as_right;
  if (name == "centrist-left") return CentristScenario::as_left;
  throw ConfigError("unknown scenario '" + name +
                    "' (expected exclude-centrist, centrist-right, or "
                    "centrist-left)");
}

ResponsivenessMatrix responsiveness_matrix(
    const PreferenceCorpus& corpus,
    const std::unordered_map<std::string, Orientation>& candidate_orientations,
    CentristScenario scenario, const SplitSpec& politics_split) {
  // Resolve every candidate through the scenario; centrists either drop out
  // or join one wing.
  std::set<std::string> left_candidates, right_candidates;
  auto resolved = [&](Orientation o) -> std::optional<Orientation> {
    if (o != Orientation::centrist) return o;
    switch (scenario) {
      case CentristScenario::exclude:
        return std::nullopt;
      case CentristScenario::as_right:
        return Orientation::right;
      case CentristScenario::as_left:
        return Orientation::left;
    }
    return std::nullopt;
  };
  for (const auto& [candidate, orientation] : candidate_orientations) {
    auto r = resolved(orientation);
    if (!r) continue;
    (*r == Orientation::left ? left_candidates : right_candidates)
        .insert(candidate);
  }
  for (const auto& proposal : corpus.catalog) {
    for (const auto& candidate : proposal.candidate_ids) {
      if (!candidate_orientations.count(candidate)) {
        throw ConfigError("candidate '" + candidate +
                          "' has no orientation label");
      }
    }
  }
  if (left_candidates.empty() || right_candidates.empty()) {
    throw ConfigError("responsiveness needs at least one candidate per wing");
  }

  // Proposal side: included by >= 50% of one wing and < 50% of the other.
  std::unordered_map<int, int> proposal_side;  // 0 = left, 1 = right
  ResponsivenessMatrix matrix;
  for (const auto& proposal : corpus.catalog) {
    long in_left = 0, in_right = 0;
    for (const auto& candidate : proposal.candidate_ids) {
      if (left_candidates.count(candidate)) ++in_left;
      if (right_candidates.count(candidate)) ++in_right;
    }
    double left_share = static_cast<double>(in_left) /
                        static_cast<double>(left_candidates.size());
    double right_share = static_cast<double>(in_right) /
                         static_cast<double>(right_candidates.size());
    if (left_share >= 0.5 && right_share < 0.5) {
      proposal_side[proposal.id] = 0;
      ++matrix.left_proposals;
    } else if (right_share >= 0.5 && left_share < 0.5) {
      proposal_side[proposal.id] = 1;
      ++matrix.right_proposals;
    } else {
      ++matrix.dropped_proposals;
    }
  }

  auto participant_side = [&](const std::string& user) -> std::optional<int> {
    auto it = corpus.profiles.find(user);
    if (it == corpus.profiles.end()) return std::nullopt;
    switch (politics_split.side_of(it->second.label(politics_split.dimension))) {
      case SplitSide::group_a:
        return politics_split.label_a == "left" ? 0 : 1;
      case SplitSide::group_b:
        return politics_split.label_b == "left" ? 0 : 1;
      case SplitSide::excluded:
        return std::nullopt;
    }
    return std::nullopt;
  };

  // Latest stance per (user, proposal).
  std::map<std::pair<std::string, int>, const ApprovalRecord*> stances;
  for (const auto& rec : corpus.approvals) {
    auto& slot = stances[{rec.user_id, rec.proposal_id}];
    if (slot == nullptr || rec.timestamp >= slot->timestamp) slot = &rec;
  }

  long approvals[2][2] = {{0, 0}, {0, 0}};
  for (const auto& [key, rec] : stances) {
    if (rec->agree == 0) continue;
    auto pside = proposal_side.find(rec->proposal_id);
    if (pside == proposal_side.end()) continue;
    auto uside = participant_side(rec->user_id);
    if (!uside) continue;
    ++matrix.denom[*uside][pside->second];
    if (rec->agree == 1) ++approvals[*uside][pside->second];
  }
  for (int p = 0; p < 2; ++p) {
    for (int q = 0; q < 2; ++q) {
      matrix.rate[p][q] = matrix.denom[p][q] > 0
                              ? static_cast<double>(approvals[p][q]) /
                                    static_cast<double>(matrix.denom[p][q])
                              : 0.0;
    }
  }
  return matrix;
}

MultidimensionalReport multidimensional_report(
    std::span<const PairwiseRecord> records,
    const std::unordered_map<std::string, ParticipantProfile>& profiles,
    std::span<const SplitSpec> splits, const ScoreFunction& fn,
    const ProposalIndex& index) {
  if (splits.empty()) {
    throw ConfigError("multidimensional report needs at least one split");
  }
  MultidimensionalReport report;
  report.proposal_ids = index.ids();
  std::vector<DivisivenessTable> tables;
  for (const auto& split : splits) {
    report.columns.push_back("|d:" + split.dimension + "|");
    tables.push_back(
        split_divisiveness(records, profiles, split, fn, index));
  }
  report.columns.push_back("D");
  tables.push_back(pairwise_divisiveness(records, fn, index));

  report.values.assign(index.size(),
                       std::vector<std::optional<double>>(tables.size()));
  for (std::size_t i = 0; i < index.size(); ++i) {
    for (std::size_t c = 0; c < tables.size(); ++c) {
      auto v = tables[c].value(index.id_at(i));
      if (!v) continue;
      // Split gaps enter as magnitudes; the pairwise metric already is one.
      report.values[i][c] = (c + 1 == tables.size()) ? *v : std::abs(*v);
    }
  }
  return report;
}

}  // namespace prefkit
