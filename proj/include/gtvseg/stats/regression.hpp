#pragma once

#include <string>
#include <vector>

namespace gtvseg::stats {

struct OlsFit {
  std::vector<double> coef;  // intercept first
  std::vector<double> se;
  std::vector<double> p;     // two-tailed t-test per coefficient
  double rss = 0;
  double r2 = 0;
  std::size_t df = 0;
};

/// Least squares with an intercept via a Cholesky solve of the normal
/// equations. Throws when the design is rank-deficient or n <= p + 1.
OlsFit ols(const std::vector<double>& y, const std::vector<std::vector<double>>& columns);

struct StepwiseResult {
  std::vector<std::string> selected;  // in order of entry
  OlsFit fit;                         // final model
};

/// Forward entry at p < p_enter with backward removal at p > p_stay after each
/// entry. Candidates that would make the design singular are skipped, and
/// selection stops once the current model fits exactly.
StepwiseResult stepwise_regression(const std::vector<double>& y,
                                   const std::vector<std::vector<double>>& columns,
                                   const std::vector<std::string>& names, double p_enter = 0.05,
                                   double p_stay = 0.10);

}  // namespace gtvseg::stats
