#include "gtvseg/pipeline/training.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gtvseg/evalx/metrics.hpp"
#include "gtvseg/nnet/optim.hpp"
#include "gtvseg/pipeline/augment.hpp"
#include "gtvseg/pipeline/binarize.hpp"
#include "gtvseg/pipeline/inference.hpp"
#include "gtvseg/pipeline/normalize.hpp"
#include "gtvseg/pipeline/vois.hpp"
#include "gtvseg/registration/align.hpp"
#include "gtvseg/registration/lungs.hpp"
#include "gtvseg/volcore/keyvalue.hpp"
#include "gtvseg/volcore/parallel.hpp"

namespace gtvseg::pipeline {

using models::Psnn;
using models::Variant;

PreparedCase prepare_case(const phantom::CaseBundle& b, const TrainConfig& cfg,
                          const reg::RegParams& rp) {
  PreparedCase c;
  c.id = b.meta.id;
  c.meta = b.meta;
  const Volume pet = reg::align_pet(b.pct, b.diag_ct, b.pet, rp);
  c.ct = normalize_ct(b.pct);
  c.pet = normalize_pet(pet);
  c.gt = b.gt;
  c.crop = lung_crop(reg::segment_lungs(b.pct), cfg.lung_margin);
  return c;
}

std::vector<Volume> model_inputs(const PreparedCase& c, Variant v, const Volume* early_prob) {
  switch (v) {
    case Variant::pct: return {c.ct};
    case Variant::early: return {c.ct, c.pet};
    case Variant::late:
      if (!early_prob) throw Error("late model inputs need the early probability map");
      return {c.ct, c.pet, *early_prob};
  }
  return {};
}

Volume infer_members(std::vector<Psnn>& members, const std::vector<Volume>& inputs, const Box& crop,
                     const TrainConfig& cfg) {
  return sliding_window_infer(inputs, crop, cfg.voi, cfg.stride, ensemble_model(members));
}

namespace {

// Stream indices below the master seed.
constexpr std::uint64_t kInitStream = 0x1717;
constexpr std::uint64_t kDataStream = 0xDA7A;

std::uint64_t fold_seed(std::uint64_t seed, Variant v, int fold, std::uint64_t stream) {
  return derive_seed(derive_seed(derive_seed(seed, stream), static_cast<std::uint64_t>(v)),
                     static_cast<std::uint64_t>(fold));
}

nn::TensorPtr stack(const std::vector<Patch>& patches, std::size_t begin, std::size_t end,
                    bool gt) {
  const nn::Shape s = gt ? patches[begin].gt.shape() : patches[begin].image.shape();
  auto t = nn::make_tensor({static_cast<int>(end - begin), s.c, s.d, s.h, s.w});
  for (std::size_t i = begin; i < end; ++i) {
    const auto& src = gt ? patches[i].gt.data() : patches[i].image.data();
    std::copy(src.begin(), src.end(), t->data().begin() + static_cast<std::ptrdiff_t>((i - begin) * s.numel()));
  }
  return t;
}

struct FoldResult {
  Psnn model;
  int best_epoch = 0;
  std::vector<EpochRecord> log;
};

FoldResult train_fold(const std::vector<PreparedCase>& cases, const std::vector<std::size_t>& train,
                      const std::vector<std::size_t>& val, Variant v, int fold, const TrainConfig& cfg,
                      Psnn* early_member, const Progress& progress) {
  // Third input channel for the late variant, precomputed once per fold.
  std::vector<std::optional<Volume>> early_prob(cases.size());
  if (v == Variant::late) {
    std::vector<Psnn> one{*early_member};
    for (std::size_t i : train) {
      early_prob[i] = infer_members(one, model_inputs(cases[i], Variant::early), cases[i].crop, cfg);
    }
    for (std::size_t i : val) {
      early_prob[i] = infer_members(one, model_inputs(cases[i], Variant::early), cases[i].crop, cfg);
    }
  }
  auto inputs = [&](std::size_t i) {
    return model_inputs(cases[i], v, early_prob[i] ? &*early_prob[i] : nullptr);
  };

  Psnn model(cfg.psnn(v), fold_seed(cfg.seed, v, fold, kInitStream));
  const int epochs = cfg.epochs(v);
  const std::size_t per_epoch = train.size() * static_cast<std::size_t>(cfg.pos_per_volume + cfg.neg_per_volume);
  const long steps_per_epoch = static_cast<long>((per_epoch + cfg.batch - 1) / cfg.batch);
  nn::PolySchedule sched{cfg.lr0, cfg.poly_power, steps_per_epoch * epochs};
  nn::SgdNesterov opt(model.parameters(), sched, cfg.momentum);
  Rng rng(fold_seed(cfg.seed, v, fold, kDataStream));
  const int image_channels = std::min(models::input_channels(v), 2);

  FoldResult best;
  double best_dsc = -1;
  long t = 0;
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    std::vector<Patch> patches;
    for (std::size_t i : train) {
      auto p = sample_vois(inputs(i), cases[i].gt, cfg, rng);
      std::move(p.begin(), p.end(), std::back_inserter(patches));
    }
    rng.shuffle(patches);
    if (cfg.aug.enabled) {
      for (auto& p : patches) augment(p, draw_aug(cfg.aug, rng), image_channels, rng);
    }
    double loss_sum = 0;
    for (std::size_t b = 0; b < patches.size(); b += cfg.batch) {
      const std::size_t e = std::min(patches.size(), b + cfg.batch);
      nn::Tape tape;
      const auto x = stack(patches, b, e, false);
      const auto gt = stack(patches, b, e, true);
      const auto out = model.forward(&tape, x, true);
      const auto loss = models::deep_supervision_loss(&tape, out, *gt);
      opt.zero_grad();
      tape.backward(loss);
      opt.step(t++);
      loss_sum += (*loss)[0];
    }
    std::vector<Psnn> one{model};
    double dsc_sum = 0;
    for (std::size_t i : val) {
      const Volume prob = infer_members(one, inputs(i), cases[i].crop, cfg);
      dsc_sum += eval::dsc(binarize(prob, cfg.threshold, cfg.min_component_mm3), cases[i].gt);
    }
    EpochRecord rec{fold, epoch, loss_sum / static_cast<double>(steps_per_epoch),
                    dsc_sum / static_cast<double>(val.size())};
    best.log.push_back(rec);
    if (rec.val_dsc > best_dsc) {
      best_dsc = rec.val_dsc;
      best.model = model.clone();
      best.best_epoch = epoch;
    }
    if (progress) {
      std::ostringstream os;
      os << to_string(v) << " fold " << fold << " epoch " << epoch << "/" << epochs
         << " loss " << rec.loss << " val_dsc " << rec.val_dsc;
      progress(os.str());
    }
  }
  return best;
}

}  // namespace

Ensemble cross_validate(const std::vector<PreparedCase>& cases, Variant v, const TrainConfig& cfg,
                        const Ensemble* early, const Progress& progress) {
  cfg.validate();
  if (cases.size() < static_cast<std::size_t>(2 * cfg.folds)) {
    throw Error("cross_validate needs at least " + std::to_string(2 * cfg.folds) + " cases, got " +
                std::to_string(cases.size()));
  }
  Ensemble ens;
  ens.variant = v;
  ens.split = make_folds(cases.size(), cfg.folds, cfg.seed);
  if (v == Variant::late) {
    if (!early || early->variant != Variant::early) throw Error("late training needs the early ensemble");
    if (early->split != ens.split) throw Error("early ensemble was trained on a different fold split");
  }
  std::vector<FoldResult> results(cfg.folds);
  std::vector<Psnn> early_members;
  if (early) {
    for (const auto& m : early->members) early_members.push_back(m.clone());
  }
  parallel_for(static_cast<std::size_t>(cfg.folds), cfg.threads, [&](std::size_t f) {
    const int fold = static_cast<int>(f);
    results[f] = train_fold(cases, training_indices(ens.split, fold), ens.split[f], v, fold, cfg,
                            early ? &early_members[f] : nullptr, progress);
  });
  for (auto& r : results) {
    ens.members.push_back(std::move(r.model));
    ens.best_epoch.push_back(r.best_epoch);
    ens.log.insert(ens.log.end(), r.log.begin(), r.log.end());
  }
  return ens;
}

Volume predict_pct(Ensemble& pct, const PreparedCase& c, const TrainConfig& cfg) {
  if (pct.variant != Variant::pct) throw Error("predict_pct needs a pct ensemble");
  return infer_members(pct.members, model_inputs(c, Variant::pct), c.crop, cfg);
}

Volume predict_fused(Ensemble& early, Ensemble& late, const PreparedCase& c, const TrainConfig& cfg) {
  if (early.variant != Variant::early || late.variant != Variant::late) {
    throw Error("predict_fused needs early and late ensembles");
  }
  const Volume pe = infer_members(early.members, model_inputs(c, Variant::early), c.crop, cfg);
  return infer_members(late.members, model_inputs(c, Variant::late, &pe), c.crop, cfg);
}

std::string training_log_csv(const Ensemble& e) {
  std::ostringstream os;
  os << "variant,fold,epoch,loss,val_dsc,selected\n";
  for (const auto& r : e.log) {
    os << to_string(e.variant) << ',' << r.fold << ',' << r.epoch << ',' << format_double(r.loss) << ','
       << format_double(r.val_dsc) << ',' << (e.best_epoch[r.fold] == r.epoch ? 1 : 0) << '\n';
  }
  return os.str();
}

void save_ensemble(const Ensemble& e, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  KeyValues kv;
  kv.add("variant", to_string(e.variant));
  kv.add("members", std::to_string(e.members.size()));
  for (std::size_t f = 0; f < e.members.size(); ++f) {
    std::string ids;
    for (std::size_t i : e.split[f]) ids += (ids.empty() ? "" : " ") + std::to_string(i);
    kv.add("fold" + std::to_string(f), ids);
    kv.add("best_epoch" + std::to_string(f), std::to_string(e.best_epoch[f]));
    models::save_model(e.members[f], e.variant, dir / ("fold" + std::to_string(f)));
  }
  kv.write_file(dir / "ensemble.txt");
  std::ofstream log(dir / "train_log.csv");
  if (!log) throw Error("cannot write " + (dir / "train_log.csv").string());
  log << training_log_csv(e);
}

Ensemble load_ensemble(const std::filesystem::path& dir, Variant v) {
  const KeyValues kv = KeyValues::read_file(dir / "ensemble.txt");
  if (models::parse_variant(kv.get("variant")) != v) {
    throw Error(dir.string() + " holds a " + kv.get("variant") + " ensemble, expected " + to_string(v));
  }
  Ensemble e;
  e.variant = v;
  const long long n = parse_int(kv.get("members"));
  for (long long f = 0; f < n; ++f) {
    const std::string k = std::to_string(f);
    std::vector<std::size_t> ids;
    for (int i : parse_ints(kv.get("fold" + k))) ids.push_back(static_cast<std::size_t>(i));
    e.split.push_back(ids);
    e.best_epoch.push_back(static_cast<int>(parse_int(kv.get("best_epoch" + k))));
    e.members.push_back(models::load_model(dir / ("fold" + k), v));
  }
  return e;
}

}  // namespace gtvseg::pipeline
