#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace gtvseg::stats {

enum class Method { exact, normal_approx };
std::string to_string(Method m);

struct TestResult {
  double statistic = 0;
  double p_two_tailed = 1;
  std::size_t n_effective = 0;
  Method method = Method::exact;
};

struct CIResult {
  double mean = 0;
  double lo = 0;
  double hi = 0;
  double level = 0.95;
};

/// Mid-ranks (1-based) with ties sharing the mean rank.
std::vector<double> midranks(const std::vector<double>& v);

/// Zero differences dropped. Statistic min(W+, W-). Exact two-tailed p,
/// P(|W+ - mean| >= |observed - mean|), for n <= 25, otherwise a normal
/// approximation with continuity and tie corrections.
TestResult wilcoxon_signed_rank(const std::vector<std::pair<double, double>>& pairs);

/// Statistic min(U_x, U_y). Exact permutation p when nx*ny <= 400, otherwise a
/// tie-corrected normal approximation with continuity correction.
TestResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y);

struct SpearmanResult {
  double rho = 0;
  TestResult test;
};
/// Pearson correlation of mid-ranks; p from t = rho*sqrt((n-2)/(1-rho^2)), n-2 df.
SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Pearson chi-square on an r x c table (no continuity correction);
/// n_effective holds the degrees of freedom.
TestResult chi_square(const std::vector<std::vector<double>>& table);

/// mean +- t_{(1+level)/2, n-1} * s / sqrt(n).
CIResult mean_ci(const std::vector<double>& xs, double level = 0.95);

/// `test,name,statistic,p,method,n` rows.
struct NamedResult {
  std::string test;
  std::string name;
  TestResult result;
};
std::string results_csv(const std::vector<NamedResult>& rows);

}  // namespace gtvseg::stats
