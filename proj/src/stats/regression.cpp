#include "gtvseg/stats/regression.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "gtvseg/stats/special.hpp"

namespace gtvseg::stats {
namespace {

std::optional<OlsFit> try_ols(const std::vector<double>& y, const std::vector<std::vector<double>>& cols) {
  const Eigen::Index n = static_cast<Eigen::Index>(y.size());
  const Eigen::Index k = static_cast<Eigen::Index>(cols.size()) + 1;
  if (n <= k) return std::nullopt;
  Eigen::MatrixXd X(n, k);
  Eigen::VectorXd Y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    Y(i) = y[i];
    for (Eigen::Index j = 1; j < k; ++j) X(i, j) = cols[j - 1][i];
  }
  const Eigen::MatrixXd xtx = X.transpose() * X;
  Eigen::LLT<Eigen::MatrixXd> llt(xtx);
  if (llt.info() != Eigen::Success) return std::nullopt;
  // Reject near-singular designs that Cholesky still factors.
  const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (diag(j) * diag(j) <= 1e-10 * xtx(j, j)) return std::nullopt;
  }
  const Eigen::VectorXd beta = llt.solve(X.transpose() * Y);
  const Eigen::VectorXd resid = Y - X * beta;
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(k, k));

  OlsFit f;
  f.df = static_cast<std::size_t>(n - k);
  f.rss = resid.squaredNorm();
  const double mean = Y.mean();
  const double tss = (Y.array() - mean).square().sum();
  f.r2 = tss > 0 ? 1.0 - f.rss / tss : 1.0;
  const double sigma2 = f.rss / static_cast<double>(f.df);
  for (Eigen::Index j = 0; j < k; ++j) {
    f.coef.push_back(beta(j));
    const double se = std::sqrt(std::max(0.0, sigma2 * inv(j, j)));
    f.se.push_back(se);
    double p;
    if (se > 0) {
      const double t = beta(j) / se;
      p = 2.0 * (1.0 - student_t_cdf(std::abs(t), static_cast<double>(f.df)));
    } else {
      p = beta(j) != 0 ? 0.0 : 1.0;
    }
    f.p.push_back(std::clamp(p, 0.0, 1.0));
  }
  return f;
}

bool exact_fit(const OlsFit& f, const std::vector<double>& y) {
  double scale = 1.0;
  for (double v : y) scale = std::max(scale, v * v);
  return f.rss <= 1e-20 * scale * static_cast<double>(y.size());
}

}  // namespace

OlsFit ols(const std::vector<double>& y, const std::vector<std::vector<double>>& columns) {
  for (const auto& c : columns) {
    if (c.size() != y.size()) throw std::invalid_argument("ols: column length differs from y");
  }
  auto f = try_ols(y, columns);
  if (!f) throw std::invalid_argument("ols: design is rank-deficient or has too few rows");
  return *f;
}

StepwiseResult stepwise_regression(const std::vector<double>& y,
                                   const std::vector<std::vector<double>>& columns,
                                   const std::vector<std::string>& names, double p_enter,
                                   double p_stay) {
  if (columns.size() != names.size()) throw std::invalid_argument("stepwise: names and columns differ");
  if (p_enter > p_stay) throw std::invalid_argument("stepwise: p_enter must not exceed p_stay");
  if (y.size() < 3) throw std::invalid_argument("stepwise needs at least 3 observations");
  for (const auto& c : columns) {
    if (c.size() != y.size()) throw std::invalid_argument("stepwise: column length differs from y");
  }

  std::vector<std::size_t> in;
  auto design = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::vector<double>> cols;
    for (std::size_t i : idx) cols.push_back(columns[i]);
    return cols;
  };
  OlsFit current = ols(y, {});
  // Each predictor may enter at most twice, which bounds add/remove cycling.
  std::vector<int> entries(columns.size(), 0);

  while (!exact_fit(current, y)) {
    std::optional<std::size_t> best;
    double best_p = p_enter;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (std::find(in.begin(), in.end(), c) != in.end() || entries[c] >= 2) continue;
      auto idx = in;
      idx.push_back(c);
      const auto f = try_ols(y, design(idx));
      if (!f) continue;
      if (f->p.back() < best_p) {
        best_p = f->p.back();
        best = c;
      }
    }
    if (!best) break;
    in.push_back(*best);
    ++entries[*best];
    current = ols(y, design(in));

    // Backward removal of the weakest term while it exceeds p_stay.
    while (!in.empty() && !exact_fit(current, y)) {
      std::size_t worst = 0;
      for (std::size_t j = 1; j < in.size(); ++j) {
        if (current.p[j + 1] > current.p[worst + 1]) worst = j;
      }
      if (current.p[worst + 1] <= p_stay) break;
      in.erase(in.begin() + static_cast<std::ptrdiff_t>(worst));
      current = ols(y, design(in));
    }
  }

  StepwiseResult r;
  for (std::size_t i : in) r.selected.push_back(names[i]);
  r.fit = current;
  return r;
}

}  // namespace gtvseg::stats
