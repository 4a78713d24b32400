#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gtvseg/phantom/phantom.hpp"

namespace gtvseg::phantom {

/// One cell of a stratification. An unset axis is drawn per case from the
/// default distribution of that axis.
struct StratumCell {
  std::optional<TStage> t_stage;
  std::optional<Location> location;
  double weight = 1;
};
using Strata = std::vector<StratumCell>;

/// T-stage proportions of the external cohort (21% cT2, 50% cT3, 29% cT4).
Strata default_strata();
/// Equal weight on each of the four locations.
Strata uniform_location_strata();

/// Default per-case distribution over locations when a cell leaves it unset.
std::vector<double> default_location_weights();

/// Largest-remainder apportionment of n over the weights; ties go to the
/// lower index. Each count differs from n*w/sum(w) by less than 1.
std::vector<std::size_t> allocate_counts(const std::vector<double>& weights, std::size_t n);

/// Draws stage-dependent tumor size and contrast for a case.
PhantomSpec draw_spec(TStage stage, Location location, std::uint64_t seed);

std::string case_id(std::size_t index);

/// Per-case specs (seed = derive_seed(cohort seed, i)) in shuffled stratum order.
std::vector<PhantomSpec> plan_cohort(std::size_t n, std::uint64_t seed, const Strata& strata);

std::vector<CaseBundle> generate_cohort(std::size_t n, std::uint64_t seed,
                                        const Strata& strata = default_strata(),
                                        int threads = 1);

}  // namespace gtvseg::phantom
