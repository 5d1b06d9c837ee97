// Brute-force reference implementations used as independent oracles. These
// deliberately recompute everything from the raw record list with nested
// loops and no shared code with the library paths they check.
#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "prefkit/pairwise.hpp"
#include "prefkit/rng.hpp"

namespace oracle {

using prefkit::PairChoice;
using prefkit::PairwiseRecord;

inline std::optional<double> win_percentage(
    std::span<const PairwiseRecord> records, int proposal) {
  long wins = 0;
  long apps = 0;
  for (const auto& rec : records) {
    if (rec.is_tie()) continue;
    if (rec.pair.low != proposal && rec.pair.high != proposal) continue;
    ++apps;
    if (rec.chosen_id() == proposal) ++wins;
  }
  if (apps == 0) return std::nullopt;
  return static_cast<double>(wins) / static_cast<double>(apps);
}

inline std::optional<double> copeland(std::span<const PairwiseRecord> records,
                                      int proposal,
                                      const std::vector<int>& all_ids) {
  long apps = 0;
  double contests = 0.0;
  for (int other : all_ids) {
    if (other == proposal) continue;
    long wins = 0, losses = 0;
    for (const auto& rec : records) {
      if (rec.is_tie()) continue;
      if (rec.chosen_id() == proposal && rec.other_id() == other) ++wins;
      if (rec.chosen_id() == other && rec.other_id() == proposal) ++losses;
    }
    apps += wins + losses;
    if (wins > losses) {
      contests += 1.0;
    } else if (wins == losses) {
      contests += 0.5;
    }
  }
  if (apps == 0) return std::nullopt;
  return contests / static_cast<double>(all_ids.size() - 1);
}

// Literal evaluation of the demographic-free divisiveness definition with
// user-majority membership: for each pair {i, j}, split users by their
// majority choice, score proposal i on each side's full record set with the
// win rate, and average the absolute gaps over valid pairs.
inline std::optional<double> pairwise_divisiveness(
    std::span<const PairwiseRecord> records, int proposal,
    const std::vector<int>& all_ids) {
  double sum = 0.0;
  long valid = 0;
  for (int other : all_ids) {
    if (other == proposal) continue;
    // Users who majority-chose `proposal` / `other` on this pair.
    std::set<std::string> users;
    for (const auto& rec : records) {
      if (rec.is_tie()) continue;
      if ((rec.pair.low == proposal && rec.pair.high == other) ||
          (rec.pair.low == other && rec.pair.high == proposal)) {
        users.insert(rec.user_id);
      }
    }
    std::vector<std::string> chose_i, chose_j;
    for (const auto& user : users) {
      long for_i = 0, for_j = 0;
      for (const auto& rec : records) {
        if (rec.is_tie() || rec.user_id != user) continue;
        if (rec.chosen_id() == proposal && rec.other_id() == other) ++for_i;
        if (rec.chosen_id() == other && rec.other_id() == proposal) ++for_j;
      }
      if (for_i > for_j) chose_i.push_back(user);
      if (for_j > for_i) chose_j.push_back(user);
    }
    if (chose_i.empty() || chose_j.empty()) continue;

    auto side_score = [&](const std::vector<std::string>& side)
        -> std::optional<double> {
      std::vector<PairwiseRecord> subset;
      for (const auto& rec : records) {
        for (const auto& user : side) {
          if (rec.user_id == user) subset.push_back(rec);
        }
      }
      return win_percentage(subset, proposal);
    };
    auto a = side_score(chose_i);
    auto b = side_score(chose_j);
    if (!a || !b) continue;
    sum += std::abs(*a - *b);
    ++valid;
  }
  if (valid == 0) return std::nullopt;
  return sum / static_cast<double>(valid);
}

// Random pairwise corpus for oracle-equivalence sweeps: ids 1..n_proposals,
// users "u0".."u<k>", with repeated judgments allowed.
inline std::vector<PairwiseRecord> random_records(prefkit::Rng& rng,
                                                  int n_proposals, int n_users,
                                                  int n_records) {
  std::vector<PairwiseRecord> records;
  for (int r = 0; r < n_records; ++r) {
    int a = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_proposals)));
    int b = a;
    while (b == a) {
      b = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_proposals)));
    }
    PairwiseRecord rec;
    rec.user_id = "u" + std::to_string(rng.below(static_cast<std::uint64_t>(n_users)));
    rec.pair = prefkit::PairId::of(a, b);
    rec.selected = rng.below(2) == 0 ? PairChoice::low : PairChoice::high;
    rec.source = prefkit::RecordSource::rank;
    rec.universe = 5;
    rec.timestamp = prefkit::Instant{static_cast<std::int64_t>(r) * 1'000'000};
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace oracle
