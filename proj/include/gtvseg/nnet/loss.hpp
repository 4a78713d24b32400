#pragma once

#include "gtvseg/nnet/tensor.hpp"

namespace gtvseg::nn {

/// 0.5 * (1 - softDice(sigmoid(logits), target; smooth 1)) + 0.5 * mean BCE,
/// Dice pooled over the whole tensor. Returns a (1,1,1,1,1) tensor.
/// The target receives no gradient.
TensorPtr dice_bce_loss(Tape* tape, const TensorPtr& logits, const Tensor& target);

}  // namespace gtvseg::nn
