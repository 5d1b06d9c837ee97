#include "prefkit/aggregation.hpp"

#include <algorithm>
#include <cmath>

#include "prefkit/rng.hpp"

namespace prefkit {

const ScoreRow* ScoreTable::row(int proposal_id) const {
  auto it = std::lower_bound(
      rows.begin(), rows.end(), proposal_id,
      [](const ScoreRow& r, int id) { return r.proposal_id < id; });
  if (it == rows.end() || it->proposal_id != proposal_id) return nullptr;
  return &*it;
}

std::optional<double> ScoreTable::value(int proposal_id) const {
  const ScoreRow* r = row(proposal_id);
  if (!r || !r->defined) return std::nullopt;
  return r->mean;
}

ScoreTable win_percentage(const PairwiseTally& tally) {
  ScoreTable table;
  table.function = "win";
  const std::size_t n = tally.n();
  for (std::size_t i = 0; i < n; ++i) {
    long wins = 0;
    long appearances = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      wins += tally.at(i, j);
      appearances += tally.at(i, j) + tally.at(j, i);
    }
    ScoreRow row;
    row.proposal_id = tally.index.id_at(i);
    row.n = appearances;
    if (appearances > 0) {
      row.mean = static_cast<double>(wins) / static_cast<double>(appearances);
    } else {
      row.defined = false;
    }
    row.ci_low = row.ci_high = row.mean;
    table.rows.push_back(row);
  }
  return table;
}

ScoreTable copeland(const PairwiseTally& tally) {
  const std::size_t n = tally.n();
  if (n < 2) throw ComputeError("copeland requires at least 2 proposals");
  ScoreTable table;
  table.function = "copeland";
  for (std::size_t i = 0; i < n; ++i) {
    double contests = 0.0;
    long appearances = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      long xij = tally.at(i, j);
      long xji = tally.at(j, i);
      appearances += xij + xji;
      if (xij > xji) {
        contests += 1.0;
      } else if (xij == xji) {
        contests += 0.5;
      }
    }
    ScoreRow row;
    row.proposal_id = tally.index.id_at(i);
    row.n = appearances;
    if (appearances > 0) {
      row.mean = contests / static_cast<double>(n - 1);
    } else {
      row.defined = false;
    }
    row.ci_low = row.ci_high = row.mean;
    table.rows.push_back(row);
  }
  return table;
}

ScoreTable elo(std::span<const PairwiseRecord> records,
               const ProposalIndex& index, const EloConfig& config) {
  if (config.shuffles < 1) {
    throw ConfigError("elo: shuffles must be >= 1");
  }
  const std::size_t n = index.size();

  // Timestamp-ordered baseline (stable on ties) that each shuffle permutes.
  std::vector<std::size_t> baseline;
  baseline.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].is_tie()) baseline.push_back(i);
  }
  std::stable_sort(baseline.begin(), baseline.end(),
                   [&](std::size_t a, std::size_t b) {
                     return records[a].timestamp < records[b].timestamp;
                   });

  std::vector<long> appearances(n, 0);
  for (std::size_t idx : baseline) {
    auto w = index.find(records[idx].chosen_id());
    auto l = index.find(records[idx].other_id());
    if (!w || !l) {
      throw FormatError("elo: record references proposal outside the index");
    }
    ++appearances[*w];
    ++appearances[*l];
  }

  std::vector<double> sum(n, 0.0);
  std::vector<double> ratings(n);
  std::vector<std::size_t> order;
  for (int s = 0; s < config.shuffles; ++s) {
    order = baseline;
    Rng rng(Rng::derive(config.seed, static_cast<std::uint64_t>(s)));
    rng.shuffle(order);
    std::fill(ratings.begin(), ratings.end(), config.s0);
    for (std::size_t idx : order) {
      const auto& rec = records[idx];
      std::size_t w = *index.find(rec.chosen_id());
      std::size_t l = *index.find(rec.other_id());
      double expected_w =
          1.0 / (1.0 + std::pow(10.0, (ratings[l] - ratings[w]) / config.s0));
      // One delta applied to both sides keeps the rating sum exact.
      double delta = config.k_factor * (1.0 - expected_w);
      ratings[w] += delta;
      ratings[l] -= delta;
    }
    for (std::size_t i = 0; i < n; ++i) sum[i] += ratings[i];
  }

  ScoreTable table;
  table.function = "elo";
  for (std::size_t i = 0; i < n; ++i) {
    ScoreRow row;
    row.proposal_id = index.id_at(i);
    row.mean = sum[i] / config.shuffles;
    row.n = appearances[i];
    row.defined = appearances[i] > 0;
    row.ci_low = row.ci_high = row.mean;
    table.rows.push_back(row);
  }
  return table;
}

ScoreTable ahp(const PairwiseTally& tally, const AhpConfig& config) {
  const std::size_t n = tally.n();
  if (n < 2) throw ComputeError("ahp requires at least 2 proposals");

  // Reciprocal comparison matrix from clamped win rates. The odds transform
  // p/(1-p) puts an even split at exactly 1, matching the unit diagonal.
  std::vector<double> a(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      long xij = tally.at(i, j);
      long xji = tally.at(j, i);
      double p;
      if (xij + xji == 0) {
        if (!config.allow_unobserved) {
          throw ComputeError("ahp: pair " + std::to_string(tally.index.id_at(i)) +
                             "," + std::to_string(tally.index.id_at(j)) +
                             " never compared");
        }
        p = 0.5;
      } else {
        p = static_cast<double>(xij) / static_cast<double>(xij + xji);
      }
      p = std::clamp(p, config.epsilon, 1.0 - config.epsilon);
      a[i * n + j] = p / (1.0 - p);
      a[j * n + i] = 1.0 / a[i * n + j];
    }
  }

  // Column normalization.
  for (std::size_t j = 0; j < n; ++j) {
    double colsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) colsum += a[i * n + j];
    for (std::size_t i = 0; i < n; ++i) a[i * n + j] /= colsum;
  }

  // Power iteration; the normalized matrix is column-stochastic, so the
  // vector sum stays at 1 and the principal eigenvalue is 1.
  std::vector<double> v(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  double residual = 0.0;
  bool converged = false;
  for (long iter = 0; iter < config.max_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += a[i * n + j] * v[j];
      next[i] = acc;
    }
    double total = 0.0;
    for (double x : next) total += x;
    for (double& x : next) x /= total;
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual += std::abs(next[i] - v[i]);
    v.swap(next);
    if (residual <= config.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ComputeError("ahp: power iteration did not converge, residual " +
                       std::to_string(residual));
  }

  ScoreTable table;
  table.function = "ahp";
  for (std::size_t i = 0; i < n; ++i) {
    long appearances = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) appearances += tally.at(i, j) + tally.at(j, i);
    }
    ScoreRow row;
    row.proposal_id = tally.index.id_at(i);
    row.mean = v[i];
    row.n = appearances;
    row.defined = appearances > 0;
    row.ci_low = row.ci_high = row.mean;
    table.rows.push_back(row);
  }
  return table;
}

ScoreFunction score_win() {
  return {ScoreKind::win, "win",
          [](std::span<const PairwiseRecord> records,
             const ProposalIndex& index) {
            return win_percentage(build_tally(records, index));
          }};
}

ScoreFunction score_copeland() {
  return {ScoreKind::copeland, "copeland",
          [](std::span<const PairwiseRecord> records,
             const ProposalIndex& index) {
            return copeland(build_tally(records, index));
          }};
}

ScoreFunction score_elo(const EloConfig& config) {
  return {ScoreKind::elo, "elo",
          [config](std::span<const PairwiseRecord> records,
                   const ProposalIndex& index) {
            return elo(records, index, config);
          }};
}

ScoreFunction score_ahp(const AhpConfig& config) {
  return {ScoreKind::ahp, "ahp",
          [config](std::span<const PairwiseRecord> records,
                   const ProposalIndex& index) {
            return ahp(build_tally(records, index), config);
          }};
}

ScoreFunction score_by_name(const std::string& name, std::uint64_t seed) {
  if (name == "win") return score_win();
  if (name == "copeland") return score_copeland();
  if (name == "elo") {
    EloConfig config;
    config.seed = seed;
    return score_elo(config);
  }
  if (name == "ahp") return score_ahp();
  throw ConfigError("unknown score function '" + name +
                    "' (expected win, copeland, elo, or ahp)");
}

namespace {

double percentile(std::vector<double> sorted, double p) {
  if (sorted.empty()) return 0.0;
  if (sorted.size() == 1) return sorted.front();
  double idx = p * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(idx);
  double frac = idx - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (sorted[lo + 1] - sorted[lo]) * frac;
}

}  // namespace

BootstrapSummary bootstrap_values(
    const std::function<std::vector<std::optional<double>>(
        std::span<const PairwiseRecord>)>& eval,
    std::size_t width, std::span<const PairwiseRecord> records,
    const BootstrapConfig& config) {
  if (config.iterations < 1) {
    throw ConfigError("bootstrap: iterations must be >= 1");
  }
  if (!(config.fraction > 0.0) || config.fraction > 1.0) {
    throw ConfigError("bootstrap: fraction must be in (0, 1]");
  }
  const std::size_t sample_size = static_cast<std::size_t>(
      config.fraction * static_cast<double>(records.size()));

  std::vector<std::vector<double>> samples(width);
  std::vector<PairwiseRecord> subset;
  for (int iter = 0; iter < config.iterations; ++iter) {
    Rng rng(Rng::derive(config.seed, static_cast<std::uint64_t>(iter)));
    auto indices = rng.sample_indices(records.size(), sample_size);
    subset.clear();
    subset.reserve(indices.size());
    for (std::size_t idx : indices) subset.push_back(records[idx]);
    auto values = eval(subset);
    for (std::size_t i = 0; i < width && i < values.size(); ++i) {
      if (values[i]) samples[i].push_back(*values[i]);
    }
  }

  BootstrapSummary summary;
  summary.mean.assign(width, 0.0);
  summary.ci_low.assign(width, 0.0);
  summary.ci_high.assign(width, 0.0);
  summary.defined_iterations.assign(width, 0);
  for (std::size_t i = 0; i < width; ++i) {
    auto& vals = samples[i];
    summary.defined_iterations[i] = static_cast<long>(vals.size());
    if (vals.empty()) continue;
    double sum = 0.0;
    for (double v : vals) sum += v;
    summary.mean[i] = sum / static_cast<double>(vals.size());
    std::sort(vals.begin(), vals.end());
    summary.ci_low[i] = percentile(vals, 0.025);
    summary.ci_high[i] = percentile(std::move(vals), 0.975);
  }
  return summary;
}

ScoreTable bootstrap(const ScoreFunction& fn,
                     std::span<const PairwiseRecord> records,
                     const ProposalIndex& index,
                     const BootstrapConfig& config) {
  auto eval = [&](std::span<const PairwiseRecord> subset) {
    ScoreTable table = fn.fn(subset, index);
    std::vector<std::optional<double>> values(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) {
      values[i] = table.value(index.id_at(i));
    }
    return values;
  };
  auto summary = bootstrap_values(eval, index.size(), records, config);

  ScoreTable table;
  table.function = fn.name;
  for (std::size_t i = 0; i < index.size(); ++i) {
    ScoreRow row;
    row.proposal_id = index.id_at(i);
    row.mean = summary.mean[i];
    row.ci_low = summary.ci_low[i];
    row.ci_high = summary.ci_high[i];
    row.n = summary.defined_iterations[i];
    row.defined = summary.defined_iterations[i] > 0;
    table.rows.push_back(row);
  }
  return table;
}

Ranking rank_from_scores(const ScoreTable& scores) {
  Ranking ranking;
  std::vector<const ScoreRow*> defined;
  for (const auto& row : scores.rows) {
    if (row.defined) {
      defined.push_back(&row);
    } else {
      ranking.undefined_ids.push_back(row.proposal_id);
    }
  }
  if (defined.empty()) {
    throw ComputeError("rank_from_scores: no proposal has a defined score");
  }
  std::sort(defined.begin(), defined.end(),
            [](const ScoreRow* a, const ScoreRow* b) {
              if (a->mean != b->mean) return a->mean > b->mean;
              return a->proposal_id < b->proposal_id;
            });
  std::sort(ranking.undefined_ids.begin(), ranking.undefined_ids.end());
  for (std::size_t i = 0; i < defined.size(); ++i) {
    ranking.ordered_ids.push_back(defined[i]->proposal_id);
    ranking.position[defined[i]->proposal_id] = static_cast<int>(i + 1);
  }
  return ranking;
}

}  // namespace prefkit
