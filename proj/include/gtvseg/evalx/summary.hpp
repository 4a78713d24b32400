#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gtvseg/evalx/metrics.hpp"
#include "gtvseg/evalx/revision.hpp"

namespace gtvseg::eval {

/// Sample standard deviation over mean (n - 1 denominator). Throws for n < 2
/// or a zero mean.
double volume_cov(const std::vector<double>& volumes);

struct SegScores {
  std::string case_id;
  std::string variant;
  double dsc = 0;
  std::optional<double> hd95_mm;
  std::optional<double> asd_mm;
  double revised_fraction = 0;
  RevisionCategory category = RevisionCategory::none;
  bool unacceptable = false;
};

SegScores score_case(const Mask& pred, const Mask& gt, const std::string& case_id,
                     const std::string& variant, double tau = 0.7,
                     Hd95Mode mode = Hd95Mode::pooled);

struct MetricStats {
  std::size_t n = 0;
  double mean = 0;
  std::optional<double> ci_lo;  // 95% t interval, needs n >= 2
  std::optional<double> ci_hi;
};

struct CategoryRow {
  RevisionCategory category = RevisionCategory::none;
  std::size_t count = 0;
  MetricStats dsc, hd95, asd;
};

struct CohortSummary {
  std::size_t n = 0;
  std::size_t unacceptable = 0;
  double unacceptable_pct = 0;
  // Over acceptable cases only.
  MetricStats dsc, hd95, asd;
  // Over all cases, one row per category.
  std::array<CategoryRow, 5> by_category;
};

CohortSummary cohort_summary(const std::vector<SegScores>& scores);

/// `case_id,variant,dsc,hd95_mm,asd_mm,revised_fraction,category,unacceptable`;
/// undefined distances are empty fields.
std::string scores_csv(const std::vector<SegScores>& scores);
std::vector<SegScores> parse_scores_csv(const std::string& text);
void write_scores_csv(const std::filesystem::path& p, const std::vector<SegScores>& scores);
std::vector<SegScores> read_scores_csv(const std::filesystem::path& p);

std::string summary_text(const CohortSummary& s, const std::string& title);

/// Report preamble: interval method and the revision proxy definition.
std::string report_header(double tau = 0.7);

}  // namespace gtvseg::eval
