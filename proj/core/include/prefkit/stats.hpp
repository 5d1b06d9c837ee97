#pragma once

#include <span>
#include <string>
#include <vector>

#include "prefkit/errors.hpp"

namespace prefkit::stats {

struct CorrelationResult {
  double value = 0.0;    // r, rho, or tau-b
  double r2 = 0.0;       // value squared
  double p_value = 1.0;  // two-sided
  std::size_t n = 0;
};

// Pearson correlation with a two-sided t-test p-value. Requires equal
// lengths >= 3 and nonzero variance on both sides.
CorrelationResult pearson_r2(std::span<const double> x,
                             std::span<const double> y);

// Pearson on average-rank-transformed inputs.
CorrelationResult spearman(std::span<const double> x,
                           std::span<const double> y);

// Kendall tau-b (tie corrected) with the asymptotic normal p-value.
// Requires equal lengths >= 2.
CorrelationResult kendall_tau(std::span<const double> a,
                              std::span<const double> b);

// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> values);

struct RegressionSummary {
  std::vector<std::string> names;  // "(intercept)" first
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> t_values;
  std::vector<double> p_values;
  double r2 = 0.0;
  double adjusted_r2 = 0.0;
  double residual_std_error = 0.0;
  long df = 0;
  std::size_t n = 0;
};

// OLS with every variable standardized to mean 0 / sd 1, fit with an
// intercept. Throws ComputeError on a rank-deficient design, naming the
// dependent columns.
RegressionSummary ols_standardized(
    const std::vector<std::vector<double>>& predictors,
    std::span<const double> response, const std::vector<std::string>& names);

}  // namespace prefkit::stats
