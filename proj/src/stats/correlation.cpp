#include "gtvseg/stats/tests.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gtvseg/stats/special.hpp"

namespace gtvseg::stats {

SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: samples differ in length");
  if (x.size() < 3) throw std::invalid_argument("spearman needs at least 3 pairs");
  const auto rx = midranks(x), ry = midranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) throw std::invalid_argument("spearman: a sample is constant");
  SpearmanResult r;
  r.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  r.test.statistic = r.rho;
  r.test.n_effective = x.size();
  r.test.method = Method::normal_approx;
  const double df = n - 2;
  if (std::abs(r.rho) >= 1.0) {
    r.test.p_two_tailed = 0.0;
  } else {
    const double t = r.rho * std::sqrt(df / (1 - r.rho * r.rho));
    r.test.p_two_tailed = std::min(1.0, 2.0 * (1.0 - student_t_cdf(std::abs(t), df)));
  }
  return r;
}

TestResult chi_square(const std::vector<std::vector<double>>& table) {
  const std::size_t rows = table.size();
  if (rows < 2) throw std::invalid_argument("chi_square needs at least 2 rows");
  const std::size_t cols = table[0].size();
  if (cols < 2) throw std::invalid_argument("chi_square needs at least 2 columns");
  std::vector<double> rs(rows, 0), cs(cols, 0);
  double total = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (table[i].size() != cols) throw std::invalid_argument("chi_square: ragged table");
    for (std::size_t j = 0; j < cols; ++j) {
      if (table[i][j] < 0) throw std::invalid_argument("chi_square: negative count");
      rs[i] += table[i][j];
      cs[j] += table[i][j];
      total += table[i][j];
    }
  }
  double stat = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double e = rs[i] * cs[j] / total;
      if (e <= 0) throw std::invalid_argument("chi_square: zero expected count");
      stat += (table[i][j] - e) * (table[i][j] - e) / e;
    }
  }
  TestResult r;
  r.statistic = stat;
  r.n_effective = (rows - 1) * (cols - 1);
  r.method = Method::normal_approx;
  r.p_two_tailed = chi2_sf(stat, static_cast<double>(r.n_effective));
  return r;
}

CIResult mean_ci(const std::vector<double>& xs, double level) {
  if (xs.size() < 2) throw std::invalid_argument("mean_ci needs at least 2 values");
  if (!(level > 0 && level < 1)) throw std::invalid_argument("mean_ci level must be in (0, 1)");
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double se = std::sqrt(ss / (n - 1)) / std::sqrt(n);
  const double t = student_t_quantile(0.5 * (1 + level), n - 1);
  return {mean, mean - t * se, mean + t * se, level};
}

std::string results_csv(const std::vector<NamedResult>& rows) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "test,name,statistic,p,method,n\n";
  for (const auto& r : rows) {
    os << r.test << ',' << r.name << ',' << r.result.statistic << ',' << r.result.p_two_tailed << ','
       << to_string(r.result.method) << ',' << r.result.n_effective << '\n';
  }
  return os.str();
}

}  // namespace gtvseg::stats
