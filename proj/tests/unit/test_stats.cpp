#include <doctest.h>

#include <cmath>

#include "../common/oracles.hpp"
#include "gtvseg/stats/regression.hpp"
#include "gtvseg/stats/special.hpp"
#include "gtvseg/stats/tests.hpp"

using namespace gtvseg;
using namespace gtvseg::stats;

TEST_CASE("special functions against closed forms") {
  // P(1, x) = 1 - e^-x; I_x(1, 1) = x; I_x(a, 1) = x^a.
  for (double x : {0.1, 0.9, 2.0, 7.5}) CHECK(gamma_p(1, x) == doctest::Approx(1 - std::exp(-x)).epsilon(1e-13));
  for (double x : {0.2, 0.5, 0.93}) {
    CHECK(beta_inc(1, 1, x) == doctest::Approx(x).epsilon(1e-13));
    CHECK(beta_inc(3, 1, x) == doctest::Approx(x * x * x).epsilon(1e-13));
  }
  // Series and continued-fraction branches meet at x = a + 1.
  CHECK(gamma_p(4, 4.999999) == doctest::Approx(gamma_p(4, 5.000001)).epsilon(1e-5));
  CHECK(gamma_p(2.5, 3) + gamma_q(2.5, 3) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  // t with 1 df is Cauchy.
  CHECK(student_t_cdf(1.0, 1) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(student_t_quantile(0.975, 1) == doctest::Approx(12.706204736174705).epsilon(1e-9));
  CHECK(student_t_quantile(0.975, 10) == doctest::Approx(2.2281388519649385).epsilon(1e-9));
  CHECK(student_t_cdf(student_t_quantile(0.3, 4.5), 4.5) == doctest::Approx(0.3).epsilon(1e-12));
  // chi-square with 2 df has survival e^{-x/2}.
  CHECK(chi2_sf(3.0, 2) == doctest::Approx(std::exp(-1.5)).epsilon(1e-13));
  CHECK(chi2_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-10));
}

TEST_CASE("midranks share tied positions") {
  const auto r = midranks({10, 20, 20, 5, 20});
  CHECK(r == std::vector<double>{2, 4, 4, 1, 4});
  CHECK(r == oracle::ranks({10, 20, 20, 5, 20}));
}

TEST_CASE("wilcoxon degenerate and six positive differences") {
  const auto same = wilcoxon_signed_rank({{1, 1}, {2, 2}});
  CHECK(same.p_two_tailed == 1.0);
  CHECK(same.n_effective == 0);
  CHECK(same.method == Method::exact);
  const auto r = wilcoxon_signed_rank({{2, 1}, {4, 1}, {7, 1}, {11, 1}, {16, 1}, {22, 1}});
  CHECK(r.statistic == 0.0);
  CHECK(r.p_two_tailed == doctest::Approx(0.03125).epsilon(1e-15));
  CHECK_THROWS(wilcoxon_signed_rank({}));
}

TEST_CASE("wilcoxon exact matches enumeration with ties and zeros") {
  Rng rng(21);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 1 + rng.below(12);
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
      pairs.push_back({static_cast<double>(rng.below(5)), static_cast<double>(rng.below(5))});
    }
    CHECK(wilcoxon_signed_rank(pairs).p_two_tailed ==
          doctest::Approx(oracle::wilcoxon_enum_p(pairs)).epsilon(1e-12));
  }
}

TEST_CASE("wilcoxon switches to the normal approximation above 25 pairs") {
  std::vector<std::pair<double, double>> pairs;
  for (int i = 0; i < 30; ++i) pairs.push_back({i + 0.5 * (1 + i % 3), static_cast<double>(i)});
  const auto r = wilcoxon_signed_rank(pairs);
  CHECK(r.method == Method::normal_approx);
  CHECK(r.p_two_tailed >= 0.0);
  CHECK(r.p_two_tailed <= 1.0);
}

TEST_CASE("mann-whitney separation, symmetry and enumeration") {
  const auto sep = mann_whitney_u({1, 2, 3}, {4, 5, 6, 7});
  CHECK(sep.statistic == 0.0);
  CHECK(sep.p_two_tailed == doctest::Approx(oracle::mann_whitney_enum_p({1, 2, 3}, {4, 5, 6, 7})).epsilon(1e-12));
  CHECK(sep.p_two_tailed == doctest::Approx(2.0 / 35.0).epsilon(1e-12));
  CHECK(mann_whitney_u({1, 2, 2, 5}, {5, 2, 1, 2}).p_two_tailed == doctest::Approx(1.0).epsilon(1e-9));
  Rng rng(4);
  for (int t = 0; t < 40; ++t) {
    const std::size_t nx = 1 + rng.below(6), ny = 1 + rng.below(6);
    std::vector<double> x, y;
    for (std::size_t i = 0; i < nx; ++i) x.push_back(static_cast<double>(rng.below(6)));
    for (std::size_t i = 0; i < ny; ++i) y.push_back(static_cast<double>(rng.below(6)));
    CHECK(mann_whitney_u(x, y).p_two_tailed ==
          doctest::Approx(oracle::mann_whitney_enum_p(x, y)).epsilon(1e-12));
  }
}

TEST_CASE("rank tests are invariant under monotone transforms") {
  std::vector<double> x{0.3, 1.2, 2.2, 0.9, 4.1}, y{1.7, 0.2, 3.3, 5.0, 2.8, 0.1};
  auto tx = x, ty = y;
  for (auto& v : tx) v = std::exp(v);
  for (auto& v : ty) v = std::exp(v);
  CHECK(mann_whitney_u(x, y).p_two_tailed == mann_whitney_u(tx, ty).p_two_tailed);
}

TEST_CASE("mann-whitney uses the normal approximation for large samples") {
  std::vector<double> x, y;
  for (int i = 0; i < 25; ++i) {
    x.push_back(i);
    y.push_back(i + 10.5);
  }
  const auto r = mann_whitney_u(x, y);
  CHECK(r.method == Method::normal_approx);
  CHECK(r.p_two_tailed < 0.05);
}

TEST_CASE("spearman extremes and rank-pearson oracle") {
  CHECK(spearman({1, 2, 3, 4}, {2, 4, 8, 16}).rho == 1.0);
  const auto neg = spearman({1, 2, 3, 4}, {9, 5, 2, 1});
  CHECK(neg.rho == -1.0);
  CHECK(neg.test.p_two_tailed == 0.0);
  Rng rng(8);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> x, y;
    for (int i = 0; i < 15; ++i) {
      x.push_back(static_cast<double>(rng.below(7)));
      y.push_back(rng.uniform());
    }
    CHECK(spearman(x, y).rho == doctest::Approx(oracle::rank_pearson(x, y)).epsilon(1e-12));
  }
  CHECK_THROWS(spearman({1, 1, 1}, {1, 2, 3}));
  CHECK_THROWS(spearman({1, 2}, {1, 2}));
}

TEST_CASE("chi-square closed forms") {
  const auto prop = chi_square({{10, 20}, {20, 40}});
  CHECK(prop.statistic == doctest::Approx(0.0));
  CHECK(prop.p_two_tailed == doctest::Approx(1.0));
  const auto diag = chi_square({{10, 0}, {0, 10}});
  CHECK(diag.statistic == doctest::Approx(20.0));
  CHECK(diag.n_effective == 1);
  // Row permutation invariance.
  CHECK(chi_square({{3, 5, 2}, {7, 1, 4}}).statistic == doctest::Approx(chi_square({{7, 1, 4}, {3, 5, 2}}).statistic));
  CHECK_THROWS(chi_square({{0, 0}, {1, 2}}));
}

TEST_CASE("mean confidence interval") {
  const auto c = mean_ci({4, 4, 4});
  CHECK(c.lo == 4.0);
  CHECK(c.hi == 4.0);
  const auto two = mean_ci({0, 1});
  CHECK(two.mean == 0.5);
  CHECK(two.hi - two.mean == doctest::Approx(12.706204736174705 * 0.5).epsilon(1e-9));
  const std::vector<double> xs{1, 3, 2, 5, 4};
  CHECK(mean_ci(xs, 0.99).hi - mean_ci(xs, 0.99).lo > mean_ci(xs, 0.9).hi - mean_ci(xs, 0.9).lo);
  CHECK(mean_ci(xs).mean - mean_ci(xs).lo == doctest::Approx(mean_ci(xs).hi - mean_ci(xs).mean));
  CHECK_THROWS(mean_ci({1}));
}

TEST_CASE("ols matches a hand-solved three point line") {
  // Points (0,1), (1,3), (2,4): slope 1.5, intercept 7/6.
  const auto f = ols({1, 3, 4}, {{0, 1, 2}});
  CHECK(f.coef[0] == doctest::Approx(7.0 / 6.0).epsilon(1e-12));
  CHECK(f.coef[1] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK_THROWS(ols({1, 2, 3, 4}, {{1, 2, 3, 4}, {2, 4, 6, 8}}));
}

TEST_CASE("stepwise regression recovers a planted predictor") {
  Rng rng(12);
  std::vector<std::vector<double>> cols(4);
  std::vector<double> y;
  for (int i = 0; i < 40; ++i) {
    for (auto& c : cols) c.push_back(rng.normal());
    y.push_back(2.0 * cols[1].back());
  }
  const auto r = stepwise_regression(y, cols, {"a", "b", "c", "d"});
  REQUIRE(r.selected == std::vector<std::string>{"b"});
  CHECK(std::abs(r.fit.coef[1] - 2.0) < 1e-6);

  const auto flat = stepwise_regression(std::vector<double>(40, 3.0), cols, {"a", "b", "c", "d"});
  CHECK(flat.selected.empty());
}

TEST_CASE("stepwise regression with noise keeps the strong predictor") {
  Rng rng(13);
  std::vector<std::vector<double>> cols(3);
  std::vector<double> y;
  for (int i = 0; i < 60; ++i) {
    for (auto& c : cols) c.push_back(rng.bernoulli(0.5));
    y.push_back(0.8 - 0.3 * cols[2].back() + 0.05 * rng.normal());
  }
  const auto r = stepwise_regression(y, cols, {"x0", "x1", "x2"});
  REQUIRE_FALSE(r.selected.empty());
  CHECK(r.selected.front() == "x2");
}

TEST_CASE("results CSV layout") {
  const std::string csv = results_csv({{"wilcoxon", "a vs b", {3, 0.25, 6, Method::exact}}});
  CHECK(csv == "test,name,statistic,p,method,n\nwilcoxon,a vs b,3,0.25,exact,6\n");
}
