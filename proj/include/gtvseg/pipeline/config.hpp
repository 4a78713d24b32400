#pragma once

#include <cstdint>
#include <filesystem>

#include "gtvseg/models/psnn.hpp"
#include "gtvseg/volcore/geometry.hpp"
#include "gtvseg/volcore/keyvalue.hpp"

namespace gtvseg::pipeline {

struct AugConfig {
  bool enabled = true;
  bool flip = true;
  double rot_deg = 10;
  double scale_lo = 0.75, scale_hi = 1.25;
  double noise_var_max = 0.1;
};

struct TrainConfig {
  Index3 voi{32, 32, 32};  // x, y, z voxels
  Index3 stride{16, 16, 16};
  int pos_per_volume = 8;
  int neg_per_volume = 20;
  int batch = 4;
  int epochs_pct = 150, epochs_early = 150, epochs_late = 50;
  double epoch_factor = 1.0;  // scales every epoch count; at least 1 epoch survives
  int folds = 4;
  std::array<int, 4> widths{16, 32, 64, 128};
  double lr0 = 0.01;
  double momentum = 0.99;
  double poly_power = 0.9;
  AugConfig aug;
  int lung_margin = 2;
  double threshold = 0.5;
  double min_component_mm3 = 100;
  std::uint64_t seed = 0;
  int threads = 1;

  void validate() const;
  int epochs(models::Variant v) const;
  models::PsnnConfig psnn(models::Variant v) const;

  /// Every field as key=value, in a fixed order.
  KeyValues to_keyvalues() const;
  /// Overrides fields of `base` with the keys present; unknown keys throw.
  static TrainConfig from_keyvalues(const KeyValues& kv, TrainConfig base);
  static TrainConfig load(const std::filesystem::path& path, TrainConfig base);
};

/// Full-scale settings (96x96x64 VOI, 64x64x32 stride, batch 12).
TrainConfig full_config();
/// Desk-scale settings used by the end-to-end experiment.
TrainConfig desk_config();

}  // namespace gtvseg::pipeline
