#include "gtvseg/stats/tests.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "gtvseg/stats/special.hpp"

namespace gtvseg::stats {

std::string to_string(Method m) { return m == Method::exact ? "exact" : "normal_approx"; }

std::vector<double> midranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = rank;
    i = j + 1;
  }
  return r;
}

namespace {

// Sum over tie groups of t^3 - t.
double tie_term(const std::vector<double>& v) {
  std::map<double, double> counts;
  for (double x : v) counts[x] += 1.0;
  double s = 0;
  for (const auto& [value, t] : counts) s += t * t * t - t;
  return s;
}

}  // namespace

TestResult wilcoxon_signed_rank(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("wilcoxon_signed_rank needs at least one pair");
  std::vector<double> d;
  for (const auto& [x, y] : pairs) {
    if (x - y != 0) d.push_back(x - y);
  }
  TestResult r;
  const std::size_t n = d.size();
  r.n_effective = n;
  if (n == 0) return r;  // every difference zero: p = 1

  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(d[i]);
  const std::vector<double> ranks = midranks(mag);
  double w_plus = 0, total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += ranks[i];
    if (d[i] > 0) w_plus += ranks[i];
  }
  r.statistic = std::min(w_plus, total - w_plus);

  if (n <= 25) {
    r.method = Method::exact;
    // Doubled mid-ranks are integers; count subsets by their doubled sum.
    std::vector<long> dr(n);
    long sum2 = 0;
    for (std::size_t i = 0; i < n; ++i) sum2 += dr[i] = std::lround(2.0 * ranks[i]);
    std::vector<double> ways(sum2 + 1, 0.0);
    ways[0] = 1.0;
    for (long w : dr) {
      for (long s = sum2; s >= w; --s) ways[s] += ways[s - w];
    }
    const long obs = std::lround(2.0 * w_plus);
    const long dev = std::abs(2 * obs - sum2);  // doubled |W+ - mean|, x2 again
    double hits = 0;
    for (long s = 0; s <= sum2; ++s) {
      if (std::abs(2 * s - sum2) >= dev) hits += ways[s];
    }
    r.p_two_tailed = std::min(1.0, hits / std::ldexp(1.0, static_cast<int>(n)));
    return r;
  }

  r.method = Method::normal_approx;
  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1) / 4.0;
  const double var = nn * (nn + 1) * (2 * nn + 1) / 24.0 - tie_term(mag) / 48.0;
  const double num = std::max(0.0, std::abs(w_plus - mean) - 0.5);
  r.p_two_tailed = var > 0 ? std::min(1.0, 2.0 * normal_sf(num / std::sqrt(var))) : 1.0;
  return r;
}

TestResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("mann_whitney_u needs two nonempty samples");
  std::vector<double> pooled(x);
  pooled.insert(pooled.end(), y.begin(), y.end());
  const std::vector<double> ranks = midranks(pooled);
  const std::size_t nx = x.size(), ny = y.size(), N = nx + ny;
  double rx = 0;
  for (std::size_t i = 0; i < nx; ++i) rx += ranks[i];
  const double ux = rx - static_cast<double>(nx) * (nx + 1) / 2.0;
  const double prod = static_cast<double>(nx) * static_cast<double>(ny);
  TestResult r;
  r.statistic = std::min(ux, prod - ux);
  r.n_effective = N;

  if (nx * ny <= 400) {
    r.method = Method::exact;
    // ways[k][s]: labelings choosing k of the items seen so far with doubled rank sum s.
    std::vector<long> dr(N);
    long sum2 = 0;
    for (std::size_t i = 0; i < N; ++i) sum2 += dr[i] = std::lround(2.0 * ranks[i]);
    std::vector<std::vector<double>> ways(nx + 1, std::vector<double>(sum2 + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t k = std::min(nx, i + 1); k >= 1; --k) {
        for (long s = sum2; s >= dr[i]; --s) ways[k][s] += ways[k - 1][s - dr[i]];
      }
    }
    const long obs = std::lround(2.0 * rx);
    const long mean2 = static_cast<long>(nx) * static_cast<long>(N + 1);  // doubled mean rank sum
    const long dev = std::abs(obs - mean2);
    double hits = 0, all = 0;
    for (long s = 0; s <= sum2; ++s) {
      all += ways[nx][s];
      if (std::abs(s - mean2) >= dev) hits += ways[nx][s];
    }
    r.p_two_tailed = std::min(1.0, hits / all);
    return r;
  }

  r.method = Method::normal_approx;
  const double n = static_cast<double>(N);
  const double var = prod / 12.0 * ((n + 1) - tie_term(pooled) / (n * (n - 1)));
  const double num = std::max(0.0, std::abs(ux - prod / 2.0) - 0.5);
  r.p_two_tailed = var > 0 ? std::min(1.0, 2.0 * normal_sf(num / std::sqrt(var))) : 1.0;
  return r;
}

}  // namespace gtvseg::stats
