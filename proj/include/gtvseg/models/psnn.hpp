#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gtvseg/nnet/checkpoint.hpp"
#include "gtvseg/nnet/ops.hpp"

namespace gtvseg::models {

struct PsnnConfig {
  int in_channels = 1;
  std::array<int, 4> widths{16, 32, 64, 128};
  std::array<int, 4> block_convs{2, 2, 3, 3};

  void validate() const;
  bool operator==(const PsnnConfig&) const = default;
};

struct PsnnOutput {
  std::vector<nn::TensorPtr> logits;  // combined logits per scale, coarse -> fine
  std::vector<nn::TensorPtr> maps;    // sigmoid of logits, coarse -> fine
};

/// Progressive semantically-nested network: four conv blocks with 2x max
/// pooling in between, a 1x1x1 logit head per block, and a parameter-free
/// decoder where each scale adds the upsampled coarser combined logits.
class Psnn {
 public:
  struct ConvLayer {
    nn::TensorPtr weight;  // (out, in, 3, 3, 3); no bias, BN follows
    nn::BatchNorm bn;
  };
  struct Head {
    nn::TensorPtr weight;  // (1, width, 1, 1, 1)
    nn::TensorPtr bias;    // (1, 1, 1, 1, 1)
  };

  Psnn() = default;
  Psnn(const PsnnConfig& cfg, std::uint64_t seed);

  const PsnnConfig& config() const { return cfg_; }
  /// Deep copy (parameters are shared pointers, so plain copies alias).
  Psnn clone() const;

  /// Input spatial dims must be divisible by 8. `train` selects batch
  /// statistics (and updates running statistics).
  PsnnOutput forward(nn::Tape* tape, const nn::TensorPtr& x, bool train);

  std::vector<nn::Param> parameters() const;
  std::vector<std::vector<ConvLayer>>& blocks() { return blocks_; }
  std::vector<Head>& heads() { return heads_; }

  /// Parameters and running statistics in a fixed order.
  std::vector<nn::NamedArray> state() const;
  void load_state(const nn::Checkpoint& ck);

 private:
  PsnnConfig cfg_;
  std::vector<std::vector<ConvLayer>> blocks_;
  std::vector<Head> heads_;
};

/// Equal-weight mean of dice_bce_loss over the four scales; the ground truth
/// (N,1,D,H,W) is nearest-downsampled to each scale.
nn::TensorPtr deep_supervision_loss(nn::Tape* tape, const PsnnOutput& out, const nn::Tensor& gt);

/// Nearest (top-left sample of each 2^s cell) downsampling of a mask tensor.
nn::Tensor downsample_nearest(const nn::Tensor& t, int factor);

enum class Variant { pct, early, late };
std::string to_string(Variant v);
Variant parse_variant(const std::string& s);
int input_channels(Variant v);

void save_model(const Psnn& m, Variant v, const std::filesystem::path& base);
/// Throws when the stored variant differs from `expected`.
Psnn load_model(const std::filesystem::path& base, Variant expected);

}  // namespace gtvseg::models
