#include "prefkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace prefkit::stats {

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

// Two-sided p for a t statistic with df degrees of freedom.
double t_p_value(double t, double df) {
  if (df <= 0) return 1.0;
  if (!std::isfinite(t)) return 0.0;
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

}  // namespace

CorrelationResult pearson_r2(std::span<const double> x,
                             std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ComputeError("pearson: input lengths differ");
  }
  const std::size_t n = x.size();
  if (n < 3) throw ComputeError("pearson: need at least 3 points");
  double mx = mean_of(x);
  double my = mean_of(y);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw ComputeError("pearson: zero variance input");
  }
  double r = sxy / std::sqrt(sxx * syy);
  r = std::clamp(r, -1.0, 1.0);

  CorrelationResult result;
  result.value = r;
  result.r2 = r * r;
  result.n = n;
  double df = static_cast<double>(n - 2);
  if (result.r2 >= 1.0) {
    result.p_value = 0.0;
  } else {
    double t = r * std::sqrt(df / (1.0 - r * r));
    result.p_value = t_p_value(t, df);
  }
  return result;
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

CorrelationResult spearman(std::span<const double> x,
                           std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ComputeError("spearman: input lengths differ");
  }
  auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  return pearson_r2(rx, ry);
}

CorrelationResult kendall_tau(std::span<const double> a,
                              std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ComputeError("kendall: input lengths differ");
  }
  const std::size_t n = a.size();
  if (n < 2) throw ComputeError("kendall: need at least 2 points");

  long long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double da = a[i] - a[j];
      double db = b[i] - b[j];
      double prod = da * db;
      if (prod > 0) ++concordant;
      if (prod < 0) ++discordant;
    }
  }

  // Tie groups in each input.
  auto tie_sizes = [](std::span<const double> v) {
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<long long> sizes;
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
      if (j > i) sizes.push_back(static_cast<long long>(j - i + 1));
      i = j + 1;
    }
    return sizes;
  };
  auto ties_a = tie_sizes(a);
  auto ties_b = tie_sizes(b);

  auto sum_t = [](const std::vector<long long>& ties,
                  auto term) -> double {
    double total = 0;
    for (long long t : ties) total += term(static_cast<double>(t));
    return total;
  };
  const double nn = static_cast<double>(n);
  const double n0 = nn * (nn - 1.0) / 2.0;
  const double n1 = sum_t(ties_a, [](double t) { return t * (t - 1) / 2; });
  const double n2 = sum_t(ties_b, [](double t) { return t * (t - 1) / 2; });

  double denom = std::sqrt((n0 - n1) * (n0 - n2));
  if (denom == 0.0) {
    throw ComputeError("kendall: zero variance input");
  }
  double diff = static_cast<double>(concordant - discordant);
  double tau = diff / denom;
  tau = std::clamp(tau, -1.0, 1.0);

  CorrelationResult result;
  result.value = tau;
  result.r2 = tau * tau;
  result.n = n;

  // Tie-adjusted asymptotic variance of (concordant - discordant).
  const double v0 = nn * (nn - 1) * (2 * nn + 5);
  const double vt =
      sum_t(ties_a, [](double t) { return t * (t - 1) * (2 * t + 5); });
  const double vu =
      sum_t(ties_b, [](double t) { return t * (t - 1) * (2 * t + 5); });
  const double v1a = sum_t(ties_a, [](double t) { return t * (t - 1); });
  const double v1b = sum_t(ties_b, [](double t) { return t * (t - 1); });
  const double v2a = sum_t(ties_a, [](double t) { return t * (t - 1) * (t - 2); });
  const double v2b = sum_t(ties_b, [](double t) { return t * (t - 1) * (t - 2); });
  double var = (v0 - vt - vu) / 18.0 + v1a * v1b / (2.0 * nn * (nn - 1));
  if (nn > 2) {
    // the triple-tie term vanishes identically at n = 2
    var += v2a * v2b / (9.0 * nn * (nn - 1) * (nn - 2));
  }
  if (var <= 0) {
    result.p_value = 1.0;
  } else {
    boost::math::normal norm;
    double z = diff / std::sqrt(var);
    result.p_value =
        2.0 * boost::math::cdf(boost::math::complement(norm, std::abs(z)));
  }
  return result;
}

RegressionSummary ols_standardized(
    const std::vector<std::vector<double>>& predictors,
    std::span<const double> response, const std::vector<std::string>& names) {
  const std::size_t p = predictors.size();
  const std::size_t n = response.size();
  if (p == 0) throw ComputeError("ols: no predictors");
  if (names.size() != p) throw ComputeError("ols: names/predictors mismatch");
  for (const auto& col : predictors) {
    if (col.size() != n) throw ComputeError("ols: column length mismatch");
  }
  if (n <= p + 1) {
    throw ComputeError("ols: need more observations than predictors");
  }

  auto standardize = [&](std::span<const double> v,
                         const std::string& name) -> std::vector<double> {
    double m = mean_of(v);
    double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd == 0.0) {
      throw ComputeError("ols: column '" + name + "' has zero variance");
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = (v[i] - m) / sd;
    return out;
  };

  Eigen::MatrixXd design(n, p + 1);
  for (std::size_t i = 0; i < n; ++i) design(i, 0) = 1.0;
  for (std::size_t j = 0; j < p; ++j) {
    auto col = standardize(predictors[j], names[j]);
    for (std::size_t i = 0; i < n; ++i) design(i, j + 1) = col[i];
  }
  auto y_std = standardize(response, "response");
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) y(i) = y_std[i];

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < static_cast<Eigen::Index>(p + 1)) {
    // Name the columns the pivoting pushed past the rank boundary.
    std::string dependent;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index k = qr.rank(); k < perm.size(); ++k) {
      Eigen::Index col = perm(k);
      if (!dependent.empty()) dependent += ", ";
      dependent += col == 0 ? "(intercept)" : names[col - 1];
    }
    throw ComputeError("ols: rank-deficient design; dependent columns: " +
                       dependent);
  }
  Eigen::VectorXd beta = qr.solve(y);
  Eigen::VectorXd residuals = y - design * beta;

  const double rss = residuals.squaredNorm();
  double tss = 0;
  for (std::size_t i = 0; i < n; ++i) tss += y(i) * y(i);  // y is centered
  const long df = static_cast<long>(n) - static_cast<long>(p) - 1;
  const double sigma2 = rss / static_cast<double>(df);

  Eigen::MatrixXd xtx_inv =
      (design.transpose() * design).ldlt().solve(
          Eigen::MatrixXd::Identity(p + 1, p + 1));

  RegressionSummary summary;
  summary.n = n;
  summary.df = df;
  summary.r2 = tss > 0 ? 1.0 - rss / tss : 0.0;
  summary.adjusted_r2 =
      1.0 - (1.0 - summary.r2) * static_cast<double>(n - 1) /
                static_cast<double>(df);
  summary.residual_std_error = std::sqrt(sigma2);
  summary.names.push_back("(intercept)");
  for (const auto& name : names) summary.names.push_back(name);
  for (std::size_t j = 0; j <= p; ++j) {
    double se = std::sqrt(sigma2 * xtx_inv(j, j));
    double t = se > 0 ? beta(j) / se : 0.0;
    summary.coefficients.push_back(beta(j));
    summary.std_errors.push_back(se);
    summary.t_values.push_back(t);
    summary.p_values.push_back(t_p_value(t, static_cast<double>(df)));
  }
  return summary;
}

}  // namespace prefkit::stats
