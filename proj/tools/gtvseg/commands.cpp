#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "gtvseg/evalx/summary.hpp"
#include "gtvseg/phantom/cohort.hpp"
#include "gtvseg/pipeline/binarize.hpp"
#include "gtvseg/pipeline/training.hpp"
#include "gtvseg/registration/align.hpp"
#include "gtvseg/registration/lungs.hpp"
#include "gtvseg/stats/regression.hpp"
#include "gtvseg/stats/tests.hpp"
#include "gtvseg/volcore/io.hpp"
#include "gtvseg/volcore/keyvalue.hpp"
#include "gtvseg/volcore/parallel.hpp"
#include "svg.hpp"

namespace gtvseg::cli {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out;
  std::string preset = "desk";
};

/// Collects outputs and timings, then writes manifest.json into the output dir.
class Manifest {
 public:
  Manifest(std::string command, fs::path out) : command_(std::move(command)), out_(std::move(out)) {
    fs::create_directories(out_);
    start_ = Clock::now();
  }
  void config(const KeyValues& kv) {
    for (const auto& [k, v] : kv.entries()) config_[k] = v;
  }
  void input(const std::string& key, const std::string& value) { inputs_[key] = value; }
  void artifact(const fs::path& p) { artifacts_.push_back(fs::relative(p, out_).generic_string()); }
  void timing(const std::string& stage, double seconds) { timings_[stage] = seconds; }
  const fs::path& out() const { return out_; }

  void write(std::uint64_t seed) {
    timing("total", std::chrono::duration<double>(Clock::now() - start_).count());
    json j;
    j["command"] = command_;
    j["tool_version"] = kVersion;
    j["seed"] = seed;
    j["inputs"] = inputs_;
    j["config"] = config_;
    std::sort(artifacts_.begin(), artifacts_.end());
    j["artifacts"] = artifacts_;
    j["timings_s"] = timings_;
    std::ofstream os(out_ / "manifest.json");
    if (!os) throw Error("cannot write " + (out_ / "manifest.json").string());
    os << j.dump(2) << '\n';
  }

 private:
  using Clock = std::chrono::steady_clock;
  std::string command_;
  fs::path out_;
  Clock::time_point start_;
  json config_ = json::object(), inputs_ = json::object(), timings_ = json::object();
  std::vector<std::string> artifacts_;
};

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

pipeline::TrainConfig effective_config(const Globals& g) {
  pipeline::TrainConfig base;
  if (g.preset == "desk") {
    base = pipeline::desk_config();
  } else if (g.preset == "full") {
    base = pipeline::full_config();
  } else if (g.preset != "default") {
    throw Error("unknown preset '" + g.preset + "' (expected desk, full or default)");
  }
  if (!g.config.empty()) base = pipeline::TrainConfig::load(g.config, base);
  if (g.seed) base.seed = *g.seed;
  base.threads = g.threads;
  base.validate();
  return base;
}

fs::path require_out(const Globals& g) {
  if (g.out.empty()) throw Error("--out is required");
  return g.out;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot write " + p.string());
  os << text;
}

// ---------------------------------------------------------------------------
// Case discovery

struct CaseRef {
  std::string id;
  fs::path dir;
};

bool is_case_dir(const fs::path& p) { return fs::exists(p / "meta.txt"); }

/// Case directories under a cohort (its cases/ subdir or itself), sorted by
/// name and restricted to the half-open index range `select` ("a:b").
std::vector<CaseRef> discover_cases(const fs::path& root, const std::string& select) {
  std::vector<CaseRef> all;
  if (is_case_dir(root)) {
    all.push_back({phantom::read_meta(root).id, root});
  } else {
    const fs::path base = fs::exists(root / "cases") ? root / "cases" : root;
    if (!fs::is_directory(base)) throw Error("no such cohort directory: " + root.string());
    for (const auto& e : fs::directory_iterator(base)) {
      if (e.is_directory() && is_case_dir(e.path())) all.push_back({e.path().filename().string(), e.path()});
    }
    std::sort(all.begin(), all.end(), [](const CaseRef& a, const CaseRef& b) { return a.id < b.id; });
  }
  if (all.empty()) throw Error("no cases found under " + root.string());
  if (select.empty()) return all;
  const auto parts = split(select, ':');
  if (parts.size() != 2) throw Error("--select expects a:b, got '" + select + "'");
  const long long a = parts[0].empty() ? 0 : parse_int(parts[0]);
  const long long b = parts[1].empty() ? static_cast<long long>(all.size()) : parse_int(parts[1]);
  if (a < 0 || b > static_cast<long long>(all.size()) || a >= b) {
    throw Error("--select " + select + " is outside [0, " + std::to_string(all.size()) + "]");
  }
  return {all.begin() + a, all.begin() + b};
}

std::vector<pipeline::PreparedCase> prepare_all(const std::vector<CaseRef>& refs,
                                                const pipeline::TrainConfig& cfg) {
  std::vector<pipeline::PreparedCase> out(refs.size());
  reg::RegParams rp;
  parallel_for(refs.size(), cfg.threads, [&](std::size_t i) {
    out[i] = pipeline::prepare_case(phantom::load_case(refs[i].dir), cfg, rp);
  });
  return out;
}

std::string join_select(const std::string& s) { return s.empty() ? "all" : s; }

// ---------------------------------------------------------------------------
// phantom

int cmd_phantom(const Globals& g, std::size_t n, const std::string& strata_name) {
  const fs::path out = require_out(g);
  const std::uint64_t seed = g.seed.value_or(0);
  phantom::Strata strata;
  if (strata_name == "default") {
    strata = phantom::default_strata();
  } else if (strata_name == "uniform-location") {
    strata = phantom::uniform_location_strata();
  } else {
    throw Error("unknown strata '" + strata_name + "' (expected default or uniform-location)");
  }
  Manifest m("phantom", out);
  m.input("n", std::to_string(n));
  m.input("strata", strata_name);
  Stopwatch sw;
  const auto cohort = phantom::generate_cohort(n, seed, strata, g.threads);
  m.timing("generate", sw.lap());
  std::ostringstream csv;
  csv << "case_id,t_stage,location,locations,volume_mm3,ct_contrast,pet_contrast,segments\n";
  for (const auto& c : cohort) {
    const fs::path dir = out / "cases" / c.meta.id;
    phantom::save_case(c, dir);
    m.artifact(dir);
    std::string locs;
    for (auto l : c.meta.locations) locs += (locs.empty() ? "" : ";") + phantom::to_string(l);
    csv << c.meta.id << ',' << phantom::to_string(c.meta.t_stage) << ','
        << phantom::to_string(c.meta.requested_location) << ',' << locs << ','
        << format_double(c.meta.volume_mm3) << ',' << format_double(c.meta.spec.ct_contrast) << ','
        << format_double(c.meta.spec.pet_contrast) << ',' << c.meta.spec.segments << '\n';
  }
  write_text(out / "cases.csv", csv.str());
  m.artifact(out / "cases.csv");
  m.timing("write", sw.lap());
  m.write(seed);
  std::cerr << "wrote " << cohort.size() << " cases to " << out << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// register

int cmd_register(const Globals& g, const std::string& cases, const std::string& select) {
  const fs::path out = require_out(g);
  const auto refs = discover_cases(cases, select);
  Manifest m("register", out);
  m.input("cases", cases);
  m.input("select", join_select(select));
  reg::RegParams rp;
  rp.threads = g.threads;
  std::ostringstream csv;
  csv << "case_id,init_x_mm,init_y_mm,init_z_mm,epe_mean_mm,epe_max_mm\n";
  Stopwatch sw;
  for (const auto& r : refs) {
    if (!fs::exists(header_path(r.dir / "pet"))) {
      std::cerr << "warning: " << r.id << " has no PET, skipped\n";
      continue;
    }
    const Volume pct = load_volume(r.dir / "pct");
    const Volume diag = load_volume(r.dir / "diag_ct");
    const Volume pet = load_volume(r.dir / "pet");
    const auto res = reg::register_ct_pair(pct, diag, rp);
    const Volume aligned = reg::apply_field(res.field, pet, Interp::trilinear, kPetBackground);
    const fs::path dir = out / r.id;
    fs::create_directories(dir);
    save_volume(aligned, dir / "aligned_pet");
    reg::save_field(res.field, dir / "field");
    m.artifact(dir / "aligned_pet.hdr");
    m.artifact(dir / "field.hdr");
    csv << r.id << ',' << format_double(res.init.x) << ',' << format_double(res.init.y) << ','
        << format_double(res.init.z) << ',';
    if (fs::exists(header_path(r.dir / "true_field"))) {
      const auto truth = reg::load_field(r.dir / "true_field");
      const Mask region = phantom::esophagus_region(pct.geometry());
      double worst = 0;
      for (std::size_t i = 0; i < region.size(); ++i) {
        if (region[i]) worst = std::max(worst, (res.field.at(i) - truth.at(i)).norm());
      }
      csv << format_double(reg::mean_endpoint_error(res.field, truth, &region)) << ','
          << format_double(worst);
    } else {
      csv << ',';
    }
    csv << '\n';
    std::cerr << "registered " << r.id << '\n';
  }
  m.timing("register", sw.lap());
  write_text(out / "registration.csv", csv.str());
  m.artifact(out / "registration.csv");
  m.write(g.seed.value_or(0));
  return 0;
}

// ---------------------------------------------------------------------------
// train

int cmd_train(const Globals& g, const std::string& cases, const std::string& select,
              const std::string& variant, const std::string& early_dir) {
  const fs::path out = require_out(g);
  const auto cfg = effective_config(g);
  std::vector<models::Variant> todo;
  if (variant == "all") {
    todo = {models::Variant::pct, models::Variant::early, models::Variant::late};
  } else {
    todo = {models::parse_variant(variant)};
  }
  // The late stream needs early checkpoints, either trained now or on disk.
  std::optional<pipeline::Ensemble> early;
  const fs::path early_path = early_dir.empty() ? out / "early" : fs::path(early_dir);
  const bool trains_early = std::find(todo.begin(), todo.end(), models::Variant::early) != todo.end();
  if (std::find(todo.begin(), todo.end(), models::Variant::late) != todo.end() && !trains_early) {
    if (!fs::exists(early_path / "ensemble.txt")) {
      throw Error("late training needs early checkpoints at " + early_path.string() +
                  " (train variant early first or pass --early)");
    }
    early = pipeline::load_ensemble(early_path, models::Variant::early);
  }

  Manifest m("train", out);
  m.config(cfg.to_keyvalues());
  m.input("cases", cases);
  m.input("select", join_select(select));
  m.input("variant", variant);
  Stopwatch sw;
  const auto refs = discover_cases(cases, select);
  const auto prepared = prepare_all(refs, cfg);
  m.timing("prepare", sw.lap());
  std::string ids;
  for (const auto& r : refs) ids += r.id + "\n";
  write_text(out / "train_cases.txt", ids);
  m.artifact(out / "train_cases.txt");

  auto progress = [](const std::string& s) { std::cerr << s << '\n'; };
  for (auto v : todo) {
    auto ens = pipeline::cross_validate(prepared, v, cfg, early ? &*early : nullptr, progress);
    const fs::path dir = out / to_string(v);
    pipeline::save_ensemble(ens, dir);
    for (std::size_t f = 0; f < ens.members.size(); ++f) {
      m.artifact(dir / ("fold" + std::to_string(f) + ".hdr"));
      m.artifact(dir / ("fold" + std::to_string(f) + ".raw"));
    }
    m.artifact(dir / "ensemble.txt");
    m.artifact(dir / "train_log.csv");
    m.timing("train_" + to_string(v), sw.lap());
    if (v == models::Variant::early) early = std::move(ens);
  }
  m.write(cfg.seed);
  return 0;
}

// ---------------------------------------------------------------------------
// infer

int cmd_infer(const Globals& g, const std::string& models_dir, const std::string& cases,
              const std::string& select, bool with_pet) {
  const fs::path out = require_out(g);
  const auto cfg = effective_config(g);
  const fs::path md = models_dir;
  const std::string variant = with_pet ? "fused" : "pct";
  pipeline::Ensemble pct, early, late;
  if (with_pet) {
    early = pipeline::load_ensemble(md / "early", models::Variant::early);
    late = pipeline::load_ensemble(md / "late", models::Variant::late);
  } else {
    pct = pipeline::load_ensemble(md / "pct", models::Variant::pct);
  }
  Manifest m("infer", out);
  m.config(cfg.to_keyvalues());
  m.input("models", models_dir);
  m.input("cases", cases);
  m.input("select", join_select(select));
  m.input("variant", variant);
  Stopwatch sw;
  const auto refs = discover_cases(cases, select);
  std::ostringstream csv;
  csv << "case_id,variant,volume_mm3\n";
  for (const auto& r : refs) {
    const auto c = pipeline::prepare_case(phantom::load_case(r.dir), cfg);
    const Volume prob = with_pet ? pipeline::predict_fused(early, late, c, cfg)
                                 : pipeline::predict_pct(pct, c, cfg);
    const Mask mask = pipeline::binarize(prob, cfg.threshold, cfg.min_component_mm3);
    const fs::path dir = out / r.id;
    fs::create_directories(dir);
    save_volume(prob, dir / "prob");
    save_mask(mask, dir / "mask");
    m.artifact(dir / "prob.hdr");
    m.artifact(dir / "mask.hdr");
    csv << r.id << ',' << variant << ',' << format_double(mask_volume_mm3(mask)) << '\n';
    std::cerr << "inferred " << r.id << '\n';
  }
  m.timing("infer", sw.lap());
  write_text(out / "predictions.csv", csv.str());
  m.artifact(out / "predictions.csv");
  m.write(cfg.seed);
  return 0;
}

// ---------------------------------------------------------------------------
// eval

std::map<std::string, phantom::CaseMeta> load_metas(const std::string& cases) {
  std::map<std::string, phantom::CaseMeta> out;
  for (const auto& r : discover_cases(cases, "")) out[r.id] = phantom::read_meta(r.dir);
  return out;
}

int cmd_eval(const Globals& g, const std::string& preds, const std::string& cases,
             const std::string& variant_opt) {
  const fs::path out = require_out(g);
  const fs::path pd = preds;
  std::map<std::string, std::string> variant_of;
  if (fs::exists(pd / "predictions.csv")) {
    std::ifstream is(pd / "predictions.csv");
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
      const auto f = split(line, ',');
      if (f.size() >= 2) variant_of[f[0]] = f[1];
    }
  }
  std::vector<std::string> ids;
  for (const auto& e : fs::directory_iterator(pd)) {
    if (e.is_directory() && fs::exists(header_path(e.path() / "mask"))) ids.push_back(e.path().filename().string());
  }
  std::sort(ids.begin(), ids.end());
  if (ids.empty()) throw Error("no prediction masks under " + pd.string());
  const auto refs = discover_cases(cases, "");
  std::map<std::string, fs::path> case_dir;
  for (const auto& r : refs) case_dir[r.id] = r.dir;

  Manifest m("eval", out);
  m.input("preds", preds);
  m.input("cases", cases);
  std::vector<eval::SegScores> scores;
  std::map<std::string, std::vector<eval::SegScores>> by_stage, by_location;
  for (const auto& id : ids) {
    auto it = case_dir.find(id);
    if (it == case_dir.end()) throw Error("prediction " + id + " has no case under " + cases);
    const Mask gt = load_mask(it->second / "gt");
    const Mask pred = load_mask(pd / id / "mask");
    const std::string variant =
        !variant_opt.empty() ? variant_opt : (variant_of.count(id) ? variant_of[id] : "model");
    scores.push_back(eval::score_case(pred, gt, id, variant));
    const auto meta = phantom::read_meta(it->second);
    by_stage[phantom::to_string(meta.t_stage)].push_back(scores.back());
    for (auto l : meta.locations) by_location[phantom::to_string(l)].push_back(scores.back());
  }
  eval::write_scores_csv(out / "scores.csv", scores);
  m.artifact(out / "scores.csv");
  std::string text = eval::report_header() + eval::summary_text(eval::cohort_summary(scores), "all");
  for (const auto& [k, v] : by_stage) text += eval::summary_text(eval::cohort_summary(v), "t_stage " + k);
  for (const auto& [k, v] : by_location) text += eval::summary_text(eval::cohort_summary(v), "location " + k);
  write_text(out / "summary.txt", text);
  m.artifact(out / "summary.txt");
  m.write(g.seed.value_or(0));
  std::cout << text;
  return 0;
}

// ---------------------------------------------------------------------------
// stats

std::vector<eval::SegScores> read_all_scores(const std::vector<std::string>& files) {
  std::vector<eval::SegScores> all;
  for (const auto& f : files) {
    auto s = eval::read_scores_csv(f);
    all.insert(all.end(), s.begin(), s.end());
  }
  return all;
}

std::vector<std::string> variants_in(const std::vector<eval::SegScores>& s) {
  std::vector<std::string> v;
  for (const auto& x : s) {
    if (std::find(v.begin(), v.end(), x.variant) == v.end()) v.push_back(x.variant);
  }
  return v;
}

int cmd_stats(const Globals& g, const std::vector<std::string>& score_files, const std::string& cases) {
  const fs::path out = require_out(g);
  const auto scores = read_all_scores(score_files);
  const auto metas = load_metas(cases);
  Manifest m("stats", out);
  for (std::size_t i = 0; i < score_files.size(); ++i) m.input("scores" + std::to_string(i), score_files[i]);
  m.input("cases", cases);

  std::vector<stats::NamedResult> rows;
  std::ostringstream ci;
  ci << "variant,metric,mean,lo,hi,n,method\n";
  const auto variants = variants_in(scores);
  auto of = [&](const std::string& v) {
    std::vector<eval::SegScores> s;
    for (const auto& x : scores) {
      if (x.variant == v) s.push_back(x);
    }
    return s;
  };
  auto meta = [&](const std::string& id) -> const phantom::CaseMeta& {
    auto it = metas.find(id);
    if (it == metas.end()) throw Error("scored case " + id + " is not in " + cases);
    return it->second;
  };

  // Paired comparison of each variant pair on shared cases.
  for (std::size_t a = 0; a < variants.size(); ++a) {
    for (std::size_t b = a + 1; b < variants.size(); ++b) {
      std::map<std::string, double> da;
      for (const auto& x : of(variants[a])) da[x.case_id] = x.dsc;
      std::vector<std::pair<double, double>> pairs;
      for (const auto& x : of(variants[b])) {
        if (da.count(x.case_id)) pairs.push_back({da[x.case_id], x.dsc});
      }
      if (!pairs.empty()) {
        rows.push_back({"wilcoxon", "dsc " + variants[a] + " vs " + variants[b], stats::wilcoxon_signed_rank(pairs)});
      }
    }
  }
  for (const auto& v : variants) {
    const auto s = of(v);
    std::map<std::string, std::vector<double>> stage_dsc;
    for (const auto& x : s) stage_dsc[phantom::to_string(meta(x.case_id).t_stage)].push_back(x.dsc);
    for (auto i = stage_dsc.begin(); i != stage_dsc.end(); ++i) {
      for (auto j = std::next(i); j != stage_dsc.end(); ++j) {
        rows.push_back({"mann_whitney", "dsc " + v + " " + i->first + " vs " + j->first,
                        stats::mann_whitney_u(i->second, j->second)});
      }
    }
    std::vector<double> d, rf;
    for (const auto& x : s) {
      d.push_back(x.dsc);
      rf.push_back(x.revised_fraction);
    }
    try {
      rows.push_back({"spearman", "dsc vs revised_fraction " + v, stats::spearman(d, rf).test});
    } catch (const std::exception& e) {
      std::cerr << "warning: spearman skipped for " << v << ": " << e.what() << '\n';
    }

    // Category x T-stage contingency, empty rows and columns dropped.
    std::map<std::string, std::map<eval::RevisionCategory, double>> counts;
    std::set<eval::RevisionCategory> cats;
    for (const auto& x : s) {
      counts[phantom::to_string(meta(x.case_id).t_stage)][x.category] += 1;
      cats.insert(x.category);
    }
    if (counts.size() >= 2 && cats.size() >= 2) {
      std::vector<std::vector<double>> table;
      for (const auto& [stage, row] : counts) {
        std::vector<double> r;
        for (auto c : cats) r.push_back(row.count(c) ? row.at(c) : 0.0);
        table.push_back(r);
      }
      rows.push_back({"chi_square", "category x t_stage " + v, stats::chi_square(table)});
    }

    // DSC on location indicator columns.
    std::vector<std::vector<double>> cols(4);
    std::vector<std::string> names;
    for (auto l : phantom::kAllLocations) names.push_back(phantom::to_string(l));
    for (const auto& x : s) {
      const auto& locs = meta(x.case_id).locations;
      for (std::size_t k = 0; k < 4; ++k) {
        cols[k].push_back(std::find(locs.begin(), locs.end(), phantom::kAllLocations[k]) != locs.end());
      }
    }
    try {
      const auto sr = stats::stepwise_regression(d, cols, names);
      if (sr.selected.empty()) {
        rows.push_back({"stepwise", "dsc ~ location " + v + " none", {0, 1, s.size(), stats::Method::exact}});
      }
      for (std::size_t k = 0; k < sr.selected.size(); ++k) {
        rows.push_back({"stepwise", "dsc ~ location " + v + " " + sr.selected[k],
                        {sr.fit.coef[k + 1], sr.fit.p[k + 1], s.size(), stats::Method::exact}});
      }
    } catch (const std::exception& e) {
      std::cerr << "warning: stepwise regression skipped for " << v << ": " << e.what() << '\n';
    }

    std::vector<double> acc_d, acc_h, acc_a;
    for (const auto& x : s) {
      if (x.unacceptable) continue;
      acc_d.push_back(x.dsc);
      if (x.hd95_mm) acc_h.push_back(*x.hd95_mm);
      if (x.asd_mm) acc_a.push_back(*x.asd_mm);
    }
    for (const auto& [name, xs] : {std::pair{"dsc", acc_d}, std::pair{"hd95_mm", acc_h}, std::pair{"asd_mm", acc_a}}) {
      if (xs.size() < 2) continue;
      const auto r = stats::mean_ci(xs);
      ci << v << ',' << name << ',' << format_double(r.mean) << ',' << format_double(r.lo) << ','
         << format_double(r.hi) << ',' << xs.size() << ",t-based\n";
    }
  }
  write_text(out / "tests.csv", stats::results_csv(rows));
  write_text(out / "ci.csv", ci.str());
  m.artifact(out / "tests.csv");
  m.artifact(out / "ci.csv");
  m.write(g.seed.value_or(0));
  std::cout << stats::results_csv(rows);
  return 0;
}

// ---------------------------------------------------------------------------
// report

int cmd_report(const Globals& g, const std::string& run_dir, const std::string& cases) {
  const fs::path out = require_out(g);
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(run_dir)) {
    if (e.is_regular_file() && e.path().filename() == "scores.csv") files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("no scores.csv under " + run_dir);
  const auto scores = read_all_scores(files);
  std::map<std::string, phantom::CaseMeta> metas;
  if (!cases.empty()) metas = load_metas(cases);

  Manifest m("report", out);
  m.input("run", run_dir);
  for (std::size_t i = 0; i < files.size(); ++i) m.input("scores" + std::to_string(i), files[i]);
  std::string tables = eval::report_header();
  for (const auto& v : variants_in(scores)) {
    std::vector<eval::SegScores> s;
    for (const auto& x : scores) {
      if (x.variant == v) s.push_back(x);
    }
    tables += eval::summary_text(eval::cohort_summary(s), v);
    struct Metric {
      const char* name;
      const char* label;
      std::function<std::optional<double>(const eval::SegScores&)> get;
    };
    const std::vector<Metric> metrics = {
        {"dsc", "DSC", [](const eval::SegScores& x) { return std::optional<double>(x.dsc); }},
        {"hd95", "HD95 (mm)", [](const eval::SegScores& x) { return x.hd95_mm; }},
        {"asd", "ASD (mm)", [](const eval::SegScores& x) { return x.asd_mm; }}};
    for (const auto& met : metrics) {
      std::vector<BoxGroup> groups{{"all", {}}};
      std::map<std::string, std::vector<double>> by_stage;
      for (const auto& x : s) {
        const auto val = met.get(x);
        if (!val) continue;
        groups[0].values.push_back(*val);
        if (auto it = metas.find(x.case_id); it != metas.end()) {
          by_stage[phantom::to_string(it->second.t_stage)].push_back(*val);
        }
      }
      for (auto& [stage, vals] : by_stage) groups.push_back({stage, vals});
      const fs::path p = out / ("boxplot_" + std::string(met.name) + "_" + v + ".svg");
      write_text(p, boxplot_svg(groups, std::string(met.label) + " (" + v + ")", met.label));
      m.artifact(p);
    }
    std::vector<double> rf, d;
    for (const auto& x : s) {
      rf.push_back(x.revised_fraction);
      d.push_back(x.dsc);
    }
    std::string note = "Spearman rho undefined";
    try {
      const auto sp = stats::spearman(rf, d);
      char buf[96];
      std::snprintf(buf, sizeof buf, "Spearman rho = %.3f, p = %.3g, n = %zu", sp.rho, sp.test.p_two_tailed, d.size());
      note = buf;
    } catch (const std::exception&) {
    }
    const fs::path p = out / ("scatter_dsc_revision_" + v + ".svg");
    write_text(p, scatter_svg(rf, d, "DSC vs revised slice fraction (" + v + ")", "revised fraction", "DSC", note));
    m.artifact(p);
  }
  write_text(out / "tables.txt", tables);
  m.artifact(out / "tables.txt");
  m.write(g.seed.value_or(0));
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Esophageal GTV segmentation toolkit: phantoms, registration, training, evaluation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Master seed");
  app.add_option("--config", g.config, "key=value training config file")->check(CLI::ExistingFile);
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--preset", g.preset, "Base training config: desk, full or default")
      ->check(CLI::IsMember({"desk", "full", "default"}));

  std::size_t n = 30;
  std::string strata = "default", cases, select, variant = "all", early_dir, models_dir, preds,
              eval_variant, run_dir;
  std::vector<std::string> score_files;
  bool no_pet = false;

  auto* ph = app.add_subcommand("phantom", "Generate a synthetic cohort");
  ph->add_option("--n", n, "Number of cases")->check(CLI::PositiveNumber);
  ph->add_option("--strata", strata, "default or uniform-location");

  auto* rg = app.add_subcommand("register", "Register diagnostic CT to pCT and align PET");
  rg->add_option("--cases", cases, "Cohort or case directory")->required();
  rg->add_option("--select", select, "Half-open case index range a:b");

  auto* tr = app.add_subcommand("train", "Cross-validated training");
  tr->add_option("--cases", cases, "Cohort directory")->required();
  tr->add_option("--select", select, "Half-open case index range a:b");
  tr->add_option("--variant", variant, "pct, early, late or all")
      ->check(CLI::IsMember({"pct", "early", "late", "all"}));
  tr->add_option("--early", early_dir, "Existing early ensemble for late training");

  auto* in = app.add_subcommand("infer", "Ensemble inference");
  in->add_option("--models", models_dir, "Directory with pct/, early/, late/")->required();
  in->add_option("--cases", cases, "Cohort directory")->required();
  in->add_option("--select", select, "Half-open case index range a:b");
  in->add_flag("--no-pet", no_pet, "Use the pCT stream only");

  auto* ev = app.add_subcommand("eval", "Score predictions against ground truth");
  ev->add_option("--preds", preds, "Output directory of infer")->required();
  ev->add_option("--cases", cases, "Cohort directory")->required();
  ev->add_option("--variant", eval_variant, "Variant label (default: from predictions.csv)");

  auto* st = app.add_subcommand("stats", "Statistical tests over score tables");
  st->add_option("--scores", score_files, "scores.csv files")->required()->check(CLI::ExistingFile);
  st->add_option("--cases", cases, "Cohort directory for case metadata")->required();

  auto* rp = app.add_subcommand("report", "SVG plots and summary tables");
  rp->add_option("--run", run_dir, "Directory searched for scores.csv")->required();
  rp->add_option("--cases", cases, "Cohort directory for T-stage grouping");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*ph) return cmd_phantom(g, n, strata);
    if (*rg) return cmd_register(g, cases, select);
    if (*tr) return cmd_train(g, cases, select, variant, early_dir);
    if (*in) return cmd_infer(g, models_dir, cases, select, !no_pet);
    if (*ev) return cmd_eval(g, preds, cases, eval_variant);
    if (*st) return cmd_stats(g, score_files, cases);
    if (*rp) return cmd_report(g, run_dir, cases);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace gtvseg::cli
