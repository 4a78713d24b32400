#include "gtvseg/models/psnn.hpp"

#include "gtvseg/nnet/loss.hpp"
#include "gtvseg/volcore/geometry.hpp"
#include "gtvseg/volcore/keyvalue.hpp"
#include "gtvseg/volcore/rng.hpp"

namespace gtvseg::models {

using nn::Shape;
using nn::TensorPtr;

void PsnnConfig::validate() const {
  if (in_channels < 1 || in_channels > 3) throw Error("PSNN in_channels must be 1, 2 or 3");
  if (block_convs != std::array<int, 4>{2, 2, 3, 3}) {
    throw Error("PSNN blocks must have 2, 2, 3, 3 conv layers");
  }
  if (widths[0] < 1) throw Error("PSNN widths must be positive");
  for (int b = 1; b < 4; ++b) {
    if (widths[b] <= widths[b - 1]) throw Error("PSNN widths must be strictly increasing");
  }
}

Psnn::Psnn(const PsnnConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg.validate();
  std::uint64_t stream = 0;
  int in = cfg.in_channels;
  for (int b = 0; b < 4; ++b) {
    std::vector<ConvLayer> layers;
    for (int l = 0; l < cfg.block_convs[b]; ++l) {
      ConvLayer layer{nn::make_tensor({cfg.widths[b], in, 3, 3, 3}), nn::BatchNorm(cfg.widths[b])};
      nn::he_normal(*layer.weight, derive_seed(seed, stream++));
      layers.push_back(std::move(layer));
      in = cfg.widths[b];
    }
    blocks_.push_back(std::move(layers));
    Head h{nn::make_tensor({1, cfg.widths[b], 1, 1, 1}), nn::make_tensor({1, 1, 1, 1, 1})};
    nn::he_normal(*h.weight, derive_seed(seed, stream++));
    heads_.push_back(h);
  }
}

Psnn Psnn::clone() const {
  Psnn copy(cfg_, 0);
  nn::Checkpoint ck;
  ck.arrays = state();
  copy.load_state(ck);
  return copy;
}

PsnnOutput Psnn::forward(nn::Tape* tape, const TensorPtr& x, bool train) {
  const Shape s = x->shape();
  if (s.c != cfg_.in_channels) {
    throw Error("PSNN expects " + std::to_string(cfg_.in_channels) + " input channels, got " +
                std::to_string(s.c));
  }
  if (s.d % 8 || s.h % 8 || s.w % 8) {
    throw Error("PSNN input spatial dims must be divisible by 8, got " + nn::to_string(s));
  }
  std::vector<TensorPtr> head_logits;
  TensorPtr h = x;
  for (int b = 0; b < 4; ++b) {
    if (b > 0) h = nn::maxpool2x(tape, h);
    for (auto& layer : blocks_[b]) {
      h = nn::conv3d(tape, h, layer.weight, nullptr);
      h = nn::batchnorm3d(tape, h, layer.bn, train);
      h = nn::relu(tape, h);
    }
    head_logits.push_back(nn::conv3d(tape, h, heads_[b].weight, heads_[b].bias));
  }
  PsnnOutput out;
  TensorPtr combined = head_logits[3];
  out.logits.push_back(combined);
  for (int b = 2; b >= 0; --b) {
    combined = nn::add(tape, head_logits[b], nn::upsample2x(tape, combined));
    out.logits.push_back(combined);
  }
  for (const auto& l : out.logits) out.maps.push_back(nn::sigmoid(tape, l));
  return out;
}

std::vector<nn::Param> Psnn::parameters() const {
  std::vector<nn::Param> ps;
  for (int b = 0; b < 4; ++b) {
    for (std::size_t l = 0; l < blocks_[b].size(); ++l) {
      const std::string p = "b" + std::to_string(b) + "c" + std::to_string(l);
      ps.push_back({p + ".w", blocks_[b][l].weight});
      ps.push_back({p + ".gamma", blocks_[b][l].bn.gamma});
      ps.push_back({p + ".beta", blocks_[b][l].bn.beta});
    }
    ps.push_back({"head" + std::to_string(b) + ".w", heads_[b].weight});
    ps.push_back({"head" + std::to_string(b) + ".b", heads_[b].bias});
  }
  return ps;
}

std::vector<nn::NamedArray> Psnn::state() const {
  std::vector<nn::NamedArray> out;
  for (const auto& p : parameters()) out.push_back({p.name, p.tensor->shape(), p.tensor->data()});
  for (int b = 0; b < 4; ++b) {
    for (std::size_t l = 0; l < blocks_[b].size(); ++l) {
      const std::string p = "b" + std::to_string(b) + "c" + std::to_string(l);
      const auto& bn = blocks_[b][l].bn;
      const Shape s{1, bn.channels(), 1, 1, 1};
      out.push_back({p + ".running_mean", s, bn.running_mean});
      out.push_back({p + ".running_var", s, bn.running_var});
    }
  }
  return out;
}

void Psnn::load_state(const nn::Checkpoint& ck) {
  auto fill = [&](const std::string& name, std::vector<float>& dst, const Shape& expect) {
    const auto& a = ck.get(name);
    if (!(a.shape == expect)) {
      throw Error("checkpoint tensor '" + name + "' has shape " + nn::to_string(a.shape) +
                  ", model expects " + nn::to_string(expect));
    }
    dst = a.values;
  };
  for (const auto& p : parameters()) fill(p.name, p.tensor->data(), p.tensor->shape());
  for (int b = 0; b < 4; ++b) {
    for (std::size_t l = 0; l < blocks_[b].size(); ++l) {
      const std::string p = "b" + std::to_string(b) + "c" + std::to_string(l);
      auto& bn = blocks_[b][l].bn;
      const Shape s{1, bn.channels(), 1, 1, 1};
      fill(p + ".running_mean", bn.running_mean, s);
      fill(p + ".running_var", bn.running_var, s);
    }
  }
}

nn::Tensor downsample_nearest(const nn::Tensor& t, int factor) {
  const Shape s = t.shape();
  if (factor < 1 || s.d % factor || s.h % factor || s.w % factor) {
    throw Error("downsample_nearest: factor " + std::to_string(factor) + " does not divide " +
                nn::to_string(s));
  }
  if (factor == 1) return t;
  const Shape os{s.n, s.c, s.d / factor, s.h / factor, s.w / factor};
  nn::Tensor out(os);
  std::size_t o = 0;
  for (int nc = 0; nc < s.n * s.c; ++nc) {
    const float* src = t.data().data() + static_cast<std::size_t>(nc) * s.spatial();
    for (int z = 0; z < os.d; ++z) {
      for (int y = 0; y < os.h; ++y) {
        for (int x = 0; x < os.w; ++x) {
          out[o++] = src[(static_cast<std::size_t>(z * factor) * s.h + y * factor) * s.w + x * factor];
        }
      }
    }
  }
  return out;
}

TensorPtr deep_supervision_loss(nn::Tape* tape, const PsnnOutput& out, const nn::Tensor& gt) {
  if (out.logits.size() != 4) throw Error("deep supervision expects 4 scales");
  const Shape fine = out.logits.back()->shape();
  if (!(gt.shape() == fine)) {
    throw Error("deep supervision: gt " + nn::to_string(gt.shape()) + " vs finest map " +
                nn::to_string(fine));
  }
  // Equal-weight mean: each per-scale loss contributes 1/4.
  auto total = nn::make_tensor({1, 1, 1, 1, 1});
  std::vector<TensorPtr> parts;
  double sum = 0.0;
  for (int s = 0; s < 4; ++s) {
    const int factor = 1 << (3 - s);
    const nn::Tensor target = downsample_nearest(gt, factor);
    parts.push_back(nn::dice_bce_loss(tape, out.logits[s], target));
    sum += (*parts.back())[0];
  }
  (*total)[0] = static_cast<float>(sum / 4.0);
  if (tape) {
    tape->record([total, parts]() {
      const auto& g = total->grad();
      if (g.empty()) return;
      for (const auto& p : parts) p->grad()[0] += g[0] / 4.0f;
    });
  }
  return total;
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::pct: return "pct";
    case Variant::early: return "early";
    case Variant::late: return "late";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "pct") return Variant::pct;
  if (s == "early") return Variant::early;
  if (s == "late") return Variant::late;
  throw Error("unknown model variant '" + s + "' (expected pct, early or late)");
}

int input_channels(Variant v) {
  switch (v) {
    case Variant::pct: return 1;
    case Variant::early: return 2;
    case Variant::late: return 3;
  }
  return 0;
}

void save_model(const Psnn& m, Variant v, const std::filesystem::path& base) {
  const PsnnConfig& c = m.config();
  KeyValues meta;
  meta.add("format", "psnn");
  meta.add("variant", to_string(v));
  meta.add("in_channels", std::to_string(c.in_channels));
  meta.add("widths", std::to_string(c.widths[0]) + " " + std::to_string(c.widths[1]) + " " +
                         std::to_string(c.widths[2]) + " " + std::to_string(c.widths[3]));
  meta.add("block_convs", "2 2 3 3");
  nn::save_checkpoint(base, meta, m.state());
}

Psnn load_model(const std::filesystem::path& base, Variant expected) {
  const nn::Checkpoint ck = nn::load_checkpoint(base);
  const Variant stored = parse_variant(ck.meta.get("variant"));
  if (stored != expected) {
    throw Error("checkpoint " + base.string() + " holds variant " + to_string(stored) + ", expected " +
                to_string(expected));
  }
  PsnnConfig cfg;
  cfg.in_channels = static_cast<int>(parse_int(ck.meta.get("in_channels")));
  const auto w = parse_ints(ck.meta.get("widths"));
  if (w.size() != 4) throw Error("checkpoint widths must list 4 values");
  for (int b = 0; b < 4; ++b) cfg.widths[b] = w[b];
  if (cfg.in_channels != input_channels(expected)) {
    throw Error("checkpoint in_channels does not match variant " + to_string(expected));
  }
  Psnn m(cfg, 0);
  m.load_state(ck);
  return m;
}

}  // namespace gtvseg::models
