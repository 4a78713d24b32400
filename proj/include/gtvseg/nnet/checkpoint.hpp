#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gtvseg/nnet/tensor.hpp"
#include "gtvseg/volcore/keyvalue.hpp"

namespace gtvseg::nn {

struct NamedArray {
  std::string name;
  Shape shape;
  std::vector<float> values;
};

/// `<base>.hdr`: caller metadata followed by one `tensor=<name> N C D H W`
/// line per array and `file=<base>.raw`; `<base>.raw`: the arrays back to
/// back as little-endian f32.
void save_checkpoint(const std::filesystem::path& base, const KeyValues& meta,
                     const std::vector<NamedArray>& arrays);

struct Checkpoint {
  KeyValues meta;  // every header entry except tensor= and file=
  std::vector<NamedArray> arrays;

  const NamedArray& get(const std::string& name) const;
};

Checkpoint load_checkpoint(const std::filesystem::path& base);

}  // namespace gtvseg::nn
