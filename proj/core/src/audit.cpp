#include "prefkit/audit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "prefkit/rng.hpp"

namespace prefkit {

PairwiseMatrix pairwise_matrix(const PairwiseTally& tally, double impute) {
  const std::size_t n = tally.n();
  PairwiseMatrix matrix;
  matrix.index = tally.index;
  matrix.w.assign(n * n, impute);
  matrix.observed.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    matrix.w[i * n + i] = 0.5;
    for (std::size_t j = i + 1; j < n; ++j) {
      long xij = tally.at(i, j);
      long xji = tally.at(j, i);
      if (xij + xji == 0) continue;
      double rate = static_cast<double>(xij) / static_cast<double>(xij + xji);
      matrix.w[i * n + j] = rate;
      matrix.w[j * n + i] = 1.0 - rate;
      matrix.observed[i * n + j] = 1;
      matrix.observed[j * n + i] = 1;
    }
  }
  return matrix;
}

double pairwise_efficiency(const PairwiseMatrix& matrix,
                           const Ranking& ranking) {
  const std::size_t n = matrix.n();
  double sum = 0.0;
  long counted = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto ri = ranking.position.find(matrix.index.id_at(i));
    if (ri == ranking.position.end()) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !matrix.is_observed(i, j)) continue;
      auto rj = ranking.position.find(matrix.index.id_at(j));
      if (rj == ranking.position.end()) continue;
      if (ri->second >= rj->second) continue;  // count each pair once, from above
      // Comparing against the transpose cell keeps this meaningful for
      // factor matrices, where cells are not complementary.
      double w = matrix.at(i, j);
      double wr = matrix.at(j, i);
      sum += w > wr ? 1.0 : (w == wr ? 0.5 : 0.0);
      ++counted;
    }
  }
  if (counted == 0) {
    throw ComputeError("pairwise efficiency: no observed ranked pairs");
  }
  return sum / static_cast<double>(counted);
}

RankBuilder make_rank_builder(const ScoreFunction& fn,
                              const ProposalIndex& index) {
  return [fn, index](std::span<const PairwiseRecord> records) {
    return rank_from_scores(fn.fn(records, index));
  };
}

RankBuilder make_divisiveness_rank_builder(const ScoreFunction& fn,
                                           const ProposalIndex& index,
                                           const DivisivenessConfig& config) {
  return [fn, index, config](std::span<const PairwiseRecord> records) {
    auto table = pairwise_divisiveness(records, fn, index, config);
    ScoreTable scores;
    scores.function = "divisiveness";
    for (const auto& row : table.rows) {
      ScoreRow s;
      s.proposal_id = row.proposal_id;
      s.mean = row.value;
      s.n = row.n_valid_terms;
      s.defined = row.defined;
      scores.rows.push_back(s);
    }
    return rank_from_scores(scores);
  };
}

IiaReport iia_robustness(std::span<const PairwiseRecord> records,
                         const RankBuilder& build, int threshold) {
  Ranking base = build(records);
  if (base.ordered_ids.size() < 3) {
    throw ComputeError("iia: need at least 3 ranked proposals");
  }
  IiaReport report;
  report.threshold = threshold;
  const int base_top = base.ordered_ids.front();
  long top_preserved = 0;
  long top_cases = 0;

  std::vector<PairwiseRecord> reduced;
  for (int removed : base.ordered_ids) {
    reduced.clear();
    for (const auto& rec : records) {
      if (rec.pair.low == removed || rec.pair.high == removed) continue;
      reduced.push_back(rec);
    }
    IiaRemoval removal;
    removal.removed_id = removed;

    Ranking rebuilt;
    try {
      rebuilt = build(reduced);
    } catch (const ComputeError&) {
      removal.failed = true;
      report.removals.push_back(std::move(removal));
      continue;
    }

    // Base ranking with the removed proposal excised and ranks closed up.
    std::unordered_map<int, int> base_pos;
    int next = 1;
    for (int id : base.ordered_ids) {
      if (id == removed) continue;
      base_pos[id] = next++;
    }
    for (int id : base.ordered_ids) {
      if (id == removed) continue;
      auto it = rebuilt.position.find(id);
      if (it == rebuilt.position.end()) {
        ++report.missing;
        continue;
      }
      int distance = std::abs(base_pos[id] - it->second);
      removal.distances.emplace_back(id, distance);
      ++report.cells;
      if (distance > threshold) ++report.violations;
    }
    std::sort(removal.distances.begin(), removal.distances.end());
    if (removed != base_top && !rebuilt.ordered_ids.empty()) {
      ++top_cases;
      if (rebuilt.ordered_ids.front() == base_top) ++top_preserved;
    }
    report.removals.push_back(std::move(removal));
  }
  report.robustness =
      report.cells > 0
          ? 1.0 - static_cast<double>(report.violations) /
                      static_cast<double>(report.cells)
          : 0.0;
  report.top_robustness =
      top_cases > 0
          ? static_cast<double>(top_preserved) / static_cast<double>(top_cases)
          : 1.0;
  return report;
}

namespace {

double percentile_of(std::vector<double> sorted, double p) {
  if (sorted.empty()) return 0.0;
  double idx = p * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(idx);
  double frac = idx - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (sorted[lo + 1] - sorted[lo]) * frac;
}

// Kendall tau between two rankings over their commonly ranked proposals.
std::optional<double> ranking_tau(const Ranking& a, const Ranking& b) {
  std::vector<double> pa, pb;
  for (int id : a.ordered_ids) {
    auto it = b.position.find(id);
    if (it == b.position.end()) continue;
    pa.push_back(static_cast<double>(a.position.at(id)));
    pb.push_back(static_cast<double>(it->second));
  }
  if (pa.size() < 2) return std::nullopt;
  return stats::kendall_tau(pa, pb).value;
}

}  // namespace

ConvergenceReport convergence_curve(std::span<const PairwiseRecord> records,
                                    const RankBuilder& build,
                                    std::span<const std::size_t> sizes,
                                    int iterations, std::uint64_t seed,
                                    double tau_threshold) {
  if (iterations < 1) {
    throw ConfigError("convergence: iterations must be >= 1");
  }
  Ranking full = build(records);

  ConvergenceReport report;
  report.tau_threshold = tau_threshold;
  std::vector<PairwiseRecord> subset;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    std::size_t size = sizes[s];
    if (size > records.size()) {
      throw ComputeError("convergence: sample size " + std::to_string(size) +
                         " exceeds record count " +
                         std::to_string(records.size()));
    }
    ConvergencePoint point;
    point.size = size;
    for (int iter = 0; iter < iterations; ++iter) {
      Rng rng(Rng::derive(Rng::derive(seed, s), static_cast<std::uint64_t>(iter)));
      auto indices = rng.sample_indices(records.size(), size);
      subset.clear();
      subset.reserve(indices.size());
      for (std::size_t idx : indices) subset.push_back(records[idx]);
      try {
        Ranking sampled = build(subset);
        if (auto tau = ranking_tau(full, sampled)) {
          point.taus.push_back(*tau);
        }
      } catch (const ComputeError&) {
        // sample too sparse to rank anything; contributes no tau
      }
    }
    std::vector<double> sorted = point.taus;
    std::sort(sorted.begin(), sorted.end());
    point.median = percentile_of(sorted, 0.5);
    point.q25 = percentile_of(sorted, 0.25);
    point.q75 = percentile_of(std::move(sorted), 0.75);
    if (!report.converged_size && !point.taus.empty() &&
        point.median >= tau_threshold) {
      report.converged_size = size;
    }
    report.points.push_back(std::move(point));
  }
  return report;
}

SpectralReport svd_factors(const PairwiseMatrix& matrix, std::size_t k) {
  const std::size_t n = matrix.n();
  if (k > n) {
    throw ComputeError("svd: requested " + std::to_string(k) +
                       " factors from a " + std::to_string(n) + "x" +
                       std::to_string(n) + " matrix");
  }
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = matrix.at(i, j);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) {
    throw ComputeError("svd: decomposition failed to converge");
  }

  SpectralReport report;
  report.n = n;
  report.k = k;
  double total = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    double sigma = svd.singularValues()(t);
    report.singular_values.push_back(sigma);
    total += sigma * sigma;
  }
  for (double sigma : report.singular_values) {
    report.variance_share.push_back(total > 0 ? sigma * sigma / total : 0.0);
  }
  for (std::size_t t = 0; t < k; ++t) {
    Eigen::VectorXd u = svd.matrixU().col(t);
    Eigen::VectorXd v = svd.matrixV().col(t);
    // Sign convention: the largest-magnitude entry of u is positive.
    Eigen::Index arg = 0;
    u.cwiseAbs().maxCoeff(&arg);
    if (u(arg) < 0) {
      u = -u;
      v = -v;
    }
    report.left_vectors.emplace_back(u.data(), u.data() + n);
    report.right_vectors.emplace_back(v.data(), v.data() + n);
    double sigma = report.singular_values[t];
    std::vector<double> factor(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        factor[i * n + j] = sigma * u(static_cast<Eigen::Index>(i)) *
                            v(static_cast<Eigen::Index>(j));
      }
    }
    report.factors.push_back(std::move(factor));
  }
  return report;
}

AlignmentTable eigenvector_alignment(const SpectralReport& report,
                                     const ScoreTable& scores,
                                     const DivisivenessTable& divisiveness,
                                     const ProposalIndex& index) {
  if (report.n != index.size()) {
    throw ComputeError("alignment: spectral report and index sizes differ");
  }
  AlignmentTable table;
  const std::size_t vectors = std::min<std::size_t>(report.k, 5);

  auto correlate = [&](const std::vector<double>& vec,
                       auto value_of) -> std::pair<std::optional<double>,
                                                   std::optional<double>> {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < index.size(); ++i) {
      auto v = value_of(index.id_at(i));
      if (!v) continue;
      xs.push_back(vec[i]);
      ys.push_back(*v);
    }
    try {
      auto corr = stats::pearson_r2(xs, ys);
      return {corr.r2, corr.p_value};
    } catch (const ComputeError&) {
      return {std::nullopt, std::nullopt};
    }
  };

  for (std::size_t t = 0; t < vectors; ++t) {
    AlignmentRow row;
    row.vector_index = t + 1;
    auto [r2s, ps] = correlate(report.left_vectors[t], [&](int id) {
      return scores.value(id);
    });
    row.r2_vs_score = r2s;
    row.p_vs_score = ps;
    auto [r2d, pd] = correlate(report.left_vectors[t], [&](int id) {
      return divisiveness.value(id);
    });
    row.r2_vs_divisiveness = r2d;
    row.p_vs_divisiveness = pd;
    table.rows.push_back(row);
  }

  // Regression on the first three singular vectors.
  const std::size_t regressors = std::min<std::size_t>(report.k, 3);
  auto regress = [&](auto value_of) -> std::optional<stats::RegressionSummary> {
    std::vector<double> y;
    std::vector<std::vector<double>> cols(regressors);
    for (std::size_t i = 0; i < index.size(); ++i) {
      auto v = value_of(index.id_at(i));
      if (!v) continue;
      y.push_back(*v);
      for (std::size_t t = 0; t < regressors; ++t) {
        cols[t].push_back(report.left_vectors[t][i]);
      }
    }
    std::vector<std::string> names;
    for (std::size_t t = 0; t < regressors; ++t) {
      names.push_back("eig" + std::to_string(t + 1));
    }
    try {
      return stats::ols_standardized(cols, y, names);
    } catch (const ComputeError&) {
      return std::nullopt;
    }
  };
  if (regressors > 0) {
    table.score_regression = regress([&](int id) { return scores.value(id); });
    table.divisiveness_regression =
        regress([&](int id) { return divisiveness.value(id); });
  }
  return table;
}

}  // namespace prefkit
