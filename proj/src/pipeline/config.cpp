#include "gtvseg/pipeline/config.hpp"

#include <cmath>
#include <functional>
#include <map>

namespace gtvseg::pipeline {

void TrainConfig::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (voi[a] < 8 || voi[a] % 8) throw Error("voi dims must be positive multiples of 8");
    if (stride[a] < 1 || stride[a] > voi[a]) throw Error("stride must lie in [1, voi]");
  }
  if (pos_per_volume < 0 || neg_per_volume < 0 || pos_per_volume + neg_per_volume == 0) {
    throw Error("need at least one VOI per volume");
  }
  if (batch < 1) throw Error("batch must be >= 1");
  if (epochs_pct < 1 || epochs_early < 1 || epochs_late < 1 || !(epoch_factor > 0)) {
    throw Error("epochs must be > 0");
  }
  if (folds < 2) throw Error("need at least 2 folds");
  models::PsnnConfig{1, widths}.validate();
  if (!(lr0 > 0) || momentum < 0 || momentum >= 1 || poly_power < 0) {
    throw Error("invalid optimizer settings");
  }
  if (aug.rot_deg < 0 || aug.scale_lo <= 0 || aug.scale_hi < aug.scale_lo || aug.noise_var_max < 0) {
    throw Error("invalid augmentation settings");
  }
  if (lung_margin < 0) throw Error("lung_margin must be >= 0");
  if (threads < 1) throw Error("threads must be >= 1");
}

int TrainConfig::epochs(models::Variant v) const {
  const int base = v == models::Variant::pct     ? epochs_pct
                   : v == models::Variant::early ? epochs_early
                                                 : epochs_late;
  return std::max(1, static_cast<int>(std::lround(base * epoch_factor)));
}

models::PsnnConfig TrainConfig::psnn(models::Variant v) const {
  return models::PsnnConfig{models::input_channels(v), widths};
}

namespace {

std::string idx3(Index3 i) {
  return std::to_string(i.x) + " " + std::to_string(i.y) + " " + std::to_string(i.z);
}

Index3 parse_idx3(const std::string& s) {
  const auto v = parse_ints(s);
  if (v.size() != 3) throw Error("expected 3 integers, got '" + s + "'");
  return {v[0], v[1], v[2]};
}

struct Field {
  std::function<std::string(const TrainConfig&)> get;
  std::function<void(TrainConfig&, const std::string&)> set;
};

const std::vector<std::pair<std::string, Field>>& fields() {
  using C = TrainConfig;
  static const std::vector<std::pair<std::string, Field>> f = {
      {"voi", {[](const C& c) { return idx3(c.voi); }, [](C& c, const std::string& s) { c.voi = parse_idx3(s); }}},
      {"stride", {[](const C& c) { return idx3(c.stride); }, [](C& c, const std::string& s) { c.stride = parse_idx3(s); }}},
      {"pos_per_volume", {[](const C& c) { return std::to_string(c.pos_per_volume); }, [](C& c, const std::string& s) { c.pos_per_volume = static_cast<int>(parse_int(s)); }}},
      {"neg_per_volume", {[](const C& c) { return std::to_string(c.neg_per_volume); }, [](C& c, const std::string& s) { c.neg_per_volume = static_cast<int>(parse_int(s)); }}},
      {"batch", {[](const C& c) { return std::to_string(c.batch); }, [](C& c, const std::string& s) { c.batch = static_cast<int>(parse_int(s)); }}},
      {"epochs_pct", {[](const C& c) { return std::to_string(c.epochs_pct); }, [](C& c, const std::string& s) { c.epochs_pct = static_cast<int>(parse_int(s)); }}},
      {"epochs_early", {[](const C& c) { return std::to_string(c.epochs_early); }, [](C& c, const std::string& s) { c.epochs_early = static_cast<int>(parse_int(s)); }}},
      {"epochs_late", {[](const C& c) { return std::to_string(c.epochs_late); }, [](C& c, const std::string& s) { c.epochs_late = static_cast<int>(parse_int(s)); }}},
      {"epoch_factor", {[](const C& c) { return format_double(c.epoch_factor); }, [](C& c, const std::string& s) { c.epoch_factor = parse_double(s); }}},
      {"folds", {[](const C& c) { return std::to_string(c.folds); }, [](C& c, const std::string& s) { c.folds = static_cast<int>(parse_int(s)); }}},
      {"widths", {[](const C& c) { return std::to_string(c.widths[0]) + " " + std::to_string(c.widths[1]) + " " + std::to_string(c.widths[2]) + " " + std::to_string(c.widths[3]); },
                  [](C& c, const std::string& s) {
                    const auto v = parse_ints(s);
                    if (v.size() != 4) throw Error("widths needs 4 integers");
                    for (int i = 0; i < 4; ++i) c.widths[i] = v[i];
                  }}},
      {"lr0", {[](const C& c) { return format_double(c.lr0); }, [](C& c, const std::string& s) { c.lr0 = parse_double(s); }}},
      {"momentum", {[](const C& c) { return format_double(c.momentum); }, [](C& c, const std::string& s) { c.momentum = parse_double(s); }}},
      {"poly_power", {[](const C& c) { return format_double(c.poly_power); }, [](C& c, const std::string& s) { c.poly_power = parse_double(s); }}},
      {"aug.enabled", {[](const C& c) { return std::string(c.aug.enabled ? "true" : "false"); }, [](C& c, const std::string& s) { c.aug.enabled = parse_bool(s); }}},
      {"aug.flip", {[](const C& c) { return std::string(c.aug.flip ? "true" : "false"); }, [](C& c, const std::string& s) { c.aug.flip = parse_bool(s); }}},
      {"aug.rot_deg", {[](const C& c) { return format_double(c.aug.rot_deg); }, [](C& c, const std::string& s) { c.aug.rot_deg = parse_double(s); }}},
      {"aug.scale", {[](const C& c) { return format_double(c.aug.scale_lo) + " " + format_double(c.aug.scale_hi); },
                     [](C& c, const std::string& s) {
                       const auto v = parse_doubles(s);
                       if (v.size() != 2) throw Error("aug.scale needs 2 numbers");
                       c.aug.scale_lo = v[0];
                       c.aug.scale_hi = v[1];
                     }}},
      {"aug.noise_var_max", {[](const C& c) { return format_double(c.aug.noise_var_max); }, [](C& c, const std::string& s) { c.aug.noise_var_max = parse_double(s); }}},
      {"lung_margin", {[](const C& c) { return std::to_string(c.lung_margin); }, [](C& c, const std::string& s) { c.lung_margin = static_cast<int>(parse_int(s)); }}},
      {"threshold", {[](const C& c) { return format_double(c.threshold); }, [](C& c, const std::string& s) { c.threshold = parse_double(s); }}},
      {"min_component_mm3", {[](const C& c) { return format_double(c.min_component_mm3); }, [](C& c, const std::string& s) { c.min_component_mm3 = parse_double(s); }}},
      {"seed", {[](const C& c) { return std::to_string(c.seed); }, [](C& c, const std::string& s) { c.seed = std::stoull(s); }}},
      {"threads", {[](const C& c) { return std::to_string(c.threads); }, [](C& c, const std::string& s) { c.threads = static_cast<int>(parse_int(s)); }}},
  };
  return f;
}

}  // namespace

KeyValues TrainConfig::to_keyvalues() const {
  KeyValues kv;
  for (const auto& [name, f] : fields()) kv.add(name, f.get(*this));
  return kv;
}

TrainConfig TrainConfig::from_keyvalues(const KeyValues& kv, TrainConfig base) {
  for (const auto& [key, value] : kv.entries()) {
    auto it = std::find_if(fields().begin(), fields().end(), [&](const auto& f) { return f.first == key; });
    if (it == fields().end()) throw Error("unknown config key '" + key + "'");
    try {
      it->second.set(base, trim(value));
    } catch (const std::exception& e) {
      throw Error("config key '" + key + "': " + e.what());
    }
  }
  base.validate();
  return base;
}

TrainConfig TrainConfig::load(const std::filesystem::path& path, TrainConfig base) {
  return from_keyvalues(KeyValues::read_file(path, true), base);
}

TrainConfig full_config() {
  TrainConfig c;
  c.voi = {96, 96, 64};
  c.stride = {64, 64, 32};
  c.batch = 12;
  return c;
}

TrainConfig desk_config() {
  TrainConfig c;
  c.widths = {8, 16, 32, 64};
  c.epoch_factor = 0.05;
  return c;
}

}  // namespace gtvseg::pipeline
