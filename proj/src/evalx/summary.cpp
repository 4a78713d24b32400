#include "gtvseg/evalx/summary.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "gtvseg/stats/tests.hpp"
#include "gtvseg/volcore/geometry.hpp"

namespace gtvseg::eval {

double volume_cov(const std::vector<double>& v) {
  if (v.size() < 2) throw Error("volume_cov needs at least 2 volumes");
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (mean == 0) throw Error("volume_cov: mean volume is zero");
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1)) / mean;
}

SegScores score_case(const Mask& pred, const Mask& gt, const std::string& case_id,
                     const std::string& variant, double tau, Hd95Mode mode) {
  SegScores s;
  s.case_id = case_id;
  s.variant = variant;
  s.dsc = dsc(pred, gt);
  s.hd95_mm = hd95(pred, gt, mode);
  s.asd_mm = asd(pred, gt);
  const Revision r = revision_degree(pred, gt, tau);
  s.revised_fraction = r.revised_fraction;
  s.category = r.category;
  s.unacceptable = r.category == RevisionCategory::unacceptable;
  return s;
}

namespace {

MetricStats describe(const std::vector<double>& xs) {
  MetricStats m;
  m.n = xs.size();
  if (xs.empty()) return m;
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() >= 2) {
    const auto ci = stats::mean_ci(xs);
    m.ci_lo = ci.lo;
    m.ci_hi = ci.hi;
  }
  return m;
}

template <typename Pred>
void collect(const std::vector<SegScores>& scores, Pred keep, MetricStats& d, MetricStats& h,
             MetricStats& a) {
  std::vector<double> dv, hv, av;
  for (const auto& s : scores) {
    if (!keep(s)) continue;
    dv.push_back(s.dsc);
    if (s.hd95_mm) hv.push_back(*s.hd95_mm);
    if (s.asd_mm) av.push_back(*s.asd_mm);
  }
  d = describe(dv);
  h = describe(hv);
  a = describe(av);
}

std::string fmt(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os << std::setprecision(10) << *v;
  return os.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

const char* kHeader = "case_id,variant,dsc,hd95_mm,asd_mm,revised_fraction,category,unacceptable";

}  // namespace

CohortSummary cohort_summary(const std::vector<SegScores>& scores) {
  CohortSummary s;
  s.n = scores.size();
  for (const auto& x : scores) s.unacceptable += x.unacceptable;
  s.unacceptable_pct = s.n ? 100.0 * static_cast<double>(s.unacceptable) / static_cast<double>(s.n) : 0.0;
  collect(scores, [](const SegScores& x) { return !x.unacceptable; }, s.dsc, s.hd95, s.asd);
  for (std::size_t i = 0; i < 5; ++i) {
    CategoryRow& row = s.by_category[i];
    row.category = kAllCategories[i];
    for (const auto& x : scores) row.count += x.category == row.category;
    collect(scores, [&](const SegScores& x) { return x.category == row.category; }, row.dsc, row.hd95,
            row.asd);
  }
  return s;
}

std::string scores_csv(const std::vector<SegScores>& scores) {
  std::ostringstream os;
  os << kHeader << '\n';
  for (const auto& s : scores) {
    os << s.case_id << ',' << s.variant << ',' << fmt(s.dsc) << ',' << fmt(s.hd95_mm) << ','
       << fmt(s.asd_mm) << ',' << fmt(s.revised_fraction) << ',' << to_string(s.category) << ','
       << (s.unacceptable ? 1 : 0) << '\n';
  }
  return os.str();
}

std::vector<SegScores> parse_scores_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || split_csv(line) != split_csv(kHeader)) {
    throw Error("scores CSV must start with header '" + std::string(kHeader) + "'");
  }
  std::vector<SegScores> out;
  int lineno = 1;
  auto num = [&](const std::string& f) {
    try {
      std::size_t used = 0;
      const double v = std::stod(f, &used);
      if (used != f.size()) throw std::invalid_argument(f);
      return v;
    } catch (const std::exception&) {
      throw Error("scores CSV line " + std::to_string(lineno) + ": bad number '" + f + "'");
    }
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    if (f.size() != 8) throw Error("scores CSV line " + std::to_string(lineno) + ": expected 8 fields");
    SegScores s;
    s.case_id = f[0];
    s.variant = f[1];
    s.dsc = num(f[2]);
    if (!f[3].empty()) s.hd95_mm = num(f[3]);
    if (!f[4].empty()) s.asd_mm = num(f[4]);
    s.revised_fraction = num(f[5]);
    s.category = parse_category(f[6]);
    if (f[7] != "0" && f[7] != "1") throw Error("scores CSV line " + std::to_string(lineno) + ": unacceptable must be 0 or 1");
    s.unacceptable = f[7] == "1";
    out.push_back(s);
  }
  return out;
}

void write_scores_csv(const std::filesystem::path& p, const std::vector<SegScores>& scores) {
  std::ofstream os(p);
  if (!os) throw Error("cannot write " + p.string());
  os << scores_csv(scores);
}

std::vector<SegScores> read_scores_csv(const std::filesystem::path& p) {
  std::ifstream is(p);
  if (!is) throw Error("cannot read " + p.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_scores_csv(ss.str());
}

std::string summary_text(const CohortSummary& s, const std::string& title) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  auto line = [&](const char* name, const MetricStats& m) {
    os << "  " << name << ": n=" << m.n;
    if (m.n) os << " mean=" << m.mean;
    if (m.ci_lo) os << " ci95=[" << *m.ci_lo << ", " << *m.ci_hi << "]";
    os << '\n';
  };
  os << title << ": " << s.n << " cases, " << s.unacceptable << " unacceptable ("
     << std::setprecision(1) << s.unacceptable_pct << "%)\n" << std::setprecision(3);
  line("dsc", s.dsc);
  line("hd95_mm", s.hd95);
  line("asd_mm", s.asd);
  for (const auto& row : s.by_category) {
    os << "  [" << to_string(row.category) << "] count=" << row.count;
    if (row.count) os << " dsc=" << row.dsc.mean;
    os << '\n';
  }
  return os.str();
}

std::string report_header(double tau) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "# ci95: t-based interval of the mean over acceptable cases\n"
     << "# revision: proxy measure, fraction of ground-truth slices with slice DSC < " << tau << "\n";
  return os.str();
}

}  // namespace gtvseg::eval
