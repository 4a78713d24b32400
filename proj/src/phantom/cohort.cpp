#include "gtvseg/phantom/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "gtvseg/volcore/parallel.hpp"
#include "gtvseg/volcore/rng.hpp"

namespace gtvseg::phantom {

Strata default_strata() {
  return {{TStage::cT2, std::nullopt, 0.21},
          {TStage::cT3, std::nullopt, 0.50},
          {TStage::cT4, std::nullopt, 0.29}};
}

Strata uniform_location_strata() {
  Strata s;
  for (Location l : kAllLocations) s.push_back({std::nullopt, l, 1.0});
  return s;
}

std::vector<double> default_location_weights() { return {17, 40, 50, 20}; }

std::vector<std::size_t> allocate_counts(const std::vector<double>& weights, std::size_t n) {
  if (weights.empty()) throw Error("cohort: empty strata");
  double total = 0;
  for (double w : weights) {
    if (!(w >= 0) || !std::isfinite(w)) throw Error("cohort: stratum weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0)) throw Error("cohort: strata weights sum to zero");
  std::vector<std::size_t> counts(weights.size());
  std::vector<double> remainder(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = static_cast<double>(n) * weights[i] / total;
    counts[i] = static_cast<std::size_t>(std::floor(quota));
    remainder[i] = quota - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t r = 0; assigned < n; ++r, ++assigned) ++counts[order[r % order.size()]];
  return counts;
}

namespace {

template <typename T, std::size_t N>
T draw_weighted(Rng& rng, const T (&values)[N], const std::vector<double>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < N; ++i) {
    if (u < weights[i]) return values[i];
    u -= weights[i];
  }
  return values[N - 1];
}

}  // namespace

PhantomSpec draw_spec(TStage stage, Location location, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 303));
  PhantomSpec s;
  s.seed = seed;
  s.t_stage = stage;
  s.tumor_location = location;
  switch (stage) {
    case TStage::cT2:
      s.tumor_radius = rng.uniform(3, 4);
      s.ct_contrast = rng.uniform(5, 12);
      s.tumor_length = rng.uniform(20, 30);
      break;
    case TStage::cT3:
      s.tumor_radius = rng.uniform(5, 7);
      s.ct_contrast = rng.uniform(30, 50);
      s.tumor_length = rng.uniform(30, 50);
      break;
    case TStage::cT4:
      s.tumor_radius = rng.uniform(7, 9);
      s.ct_contrast = rng.uniform(40, 60);
      s.tumor_length = rng.uniform(40, 60);
      break;
  }
  s.pet_contrast = rng.uniform(3, 5);
  s.segments = rng.bernoulli(0.1) ? 2 : 1;
  return s;
}

std::string case_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "case_%03zu", index);
  return buf;
}

std::vector<PhantomSpec> plan_cohort(std::size_t n, std::uint64_t seed, const Strata& strata) {
  if (n < 1) throw Error("cohort: n must be >= 1");
  std::vector<double> weights;
  for (const auto& c : strata) weights.push_back(c.weight);
  const auto counts = allocate_counts(weights, n);

  std::vector<std::size_t> cells;
  for (std::size_t c = 0; c < counts.size(); ++c) cells.insert(cells.end(), counts[c], c);
  Rng order_rng(derive_seed(seed, 0xC0401));
  order_rng.shuffle(cells);

  const std::vector<double> stage_weights{0.21, 0.50, 0.29};
  const std::vector<double> location_weights = default_location_weights();
  std::vector<PhantomSpec> specs;
  specs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t case_seed = derive_seed(seed, i);
    Rng rng(derive_seed(case_seed, 404));
    const StratumCell& cell = strata[cells[i]];
    const TStage stage = cell.t_stage ? *cell.t_stage : draw_weighted(rng, kAllStages, stage_weights);
    const Location loc =
        cell.location ? *cell.location : draw_weighted(rng, kAllLocations, location_weights);
    specs.push_back(draw_spec(stage, loc, case_seed));
  }
  return specs;
}

std::vector<CaseBundle> generate_cohort(std::size_t n, std::uint64_t seed, const Strata& strata,
                                        int threads) {
  const auto specs = plan_cohort(n, seed, strata);
  std::vector<CaseBundle> out(n);
  parallel_for(n, threads, [&](std::size_t i) { out[i] = generate_case(specs[i], case_id(i)); });
  return out;
}

}  // namespace gtvseg::phantom
