#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gtvseg/models/psnn.hpp"
#include "gtvseg/phantom/phantom.hpp"
#include "gtvseg/pipeline/config.hpp"
#include "gtvseg/pipeline/folds.hpp"
#include "gtvseg/registration/deeds.hpp"

namespace gtvseg::pipeline {

/// A case ready for training or inference: normalized pCT, PET registered onto
/// the pCT grid and normalized, GT and the lung crop box.
struct PreparedCase {
  std::string id;
  phantom::CaseMeta meta;
  Volume ct;
  Volume pet;
  Mask gt;
  Box crop;
};

PreparedCase prepare_case(const phantom::CaseBundle& b, const TrainConfig& cfg,
                          const reg::RegParams& rp = {});

/// Channel list for a variant; the late variant needs the early probability.
std::vector<Volume> model_inputs(const PreparedCase& c, models::Variant v,
                                 const Volume* early_prob = nullptr);

/// Sliding-window probability of the member mean over the case's lung crop.
Volume infer_members(std::vector<models::Psnn>& members, const std::vector<Volume>& inputs,
                     const Box& crop, const TrainConfig& cfg);

struct EpochRecord {
  int fold = 0;
  int epoch = 0;        // 1-based
  double loss = 0;      // mean training loss over the epoch
  double val_dsc = 0;   // mean held-out DSC after the epoch
};

struct Ensemble {
  models::Variant variant = models::Variant::pct;
  std::vector<models::Psnn> members;  // one per fold, best validation epoch
  std::vector<int> best_epoch;
  FoldSplit split;
  std::vector<EpochRecord> log;
};

using Progress = std::function<void(const std::string&)>;

/// k-fold training. Fold f trains on every other fold and keeps the epoch with
/// the best mean validation DSC on fold f (earliest on ties). The late variant
/// takes its third channel from `early->members[f]`, which must come from the
/// same split. Throws for fewer than 2 * folds cases.
Ensemble cross_validate(const std::vector<PreparedCase>& cases, models::Variant v,
                        const TrainConfig& cfg, const Ensemble* early = nullptr,
                        const Progress& progress = {});

/// pCT-only ensemble probability.
Volume predict_pct(Ensemble& pct, const PreparedCase& c, const TrainConfig& cfg);
/// Early ensemble probability, then the late ensemble on (pCT, PET, early).
Volume predict_fused(Ensemble& early, Ensemble& late, const PreparedCase& c,
                     const TrainConfig& cfg);

/// Members as fold<k>.hdr/.raw plus ensemble.txt and train_log.csv.
void save_ensemble(const Ensemble& e, const std::filesystem::path& dir);
Ensemble load_ensemble(const std::filesystem::path& dir, models::Variant v);
std::string training_log_csv(const Ensemble& e);

}  // namespace gtvseg::pipeline
