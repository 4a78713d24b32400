#include "gtvseg/nnet/checkpoint.hpp"

#include "gtvseg/volcore/geometry.hpp"
#include "gtvseg/volcore/io.hpp"

namespace gtvseg::nn {
namespace fs = std::filesystem;

namespace {

fs::path with_ext(const fs::path& base, const char* ext) {
  fs::path p = base;
  if (p.extension() == ".hdr" || p.extension() == ".raw") p.replace_extension();
  p += ext;
  return p;
}

}  // namespace

void save_checkpoint(const fs::path& base, const KeyValues& meta,
                     const std::vector<NamedArray>& arrays) {
  KeyValues kv = meta;
  std::vector<float> blob;
  for (const auto& a : arrays) {
    if (a.values.size() != a.shape.numel()) {
      throw Error("checkpoint array '" + a.name + "' has " + std::to_string(a.values.size()) +
                  " values for shape " + to_string(a.shape));
    }
    if (a.name.empty() || a.name.find_first_of(" \t\n=") != std::string::npos) {
      throw Error("checkpoint array name '" + a.name + "' must be non-empty without spaces");
    }
    kv.add("tensor", a.name + " " + std::to_string(a.shape.n) + " " + std::to_string(a.shape.c) +
                         " " + std::to_string(a.shape.d) + " " + std::to_string(a.shape.h) + " " +
                         std::to_string(a.shape.w));
    blob.insert(blob.end(), a.values.begin(), a.values.end());
  }
  const fs::path raw = with_ext(base, ".raw");
  kv.add("file", raw.filename().string());
  if (raw.has_parent_path()) fs::create_directories(raw.parent_path());
  write_f32_le(raw, blob);
  kv.write_file(with_ext(base, ".hdr"));
}

Checkpoint load_checkpoint(const fs::path& base) {
  const fs::path hdr = with_ext(base, ".hdr");
  if (!fs::exists(hdr)) throw Error("checkpoint header not found: " + hdr.string());
  const KeyValues kv = KeyValues::read_file(hdr);
  Checkpoint ck;
  std::string file;
  for (const auto& [k, v] : kv.entries()) {
    if (k == "tensor") {
      const auto parts = split_ws(v);
      if (parts.size() != 6) throw Error("malformed checkpoint tensor line: " + v);
      NamedArray a;
      a.name = parts[0];
      a.shape = {static_cast<int>(parse_int(parts[1])), static_cast<int>(parse_int(parts[2])),
                 static_cast<int>(parse_int(parts[3])), static_cast<int>(parse_int(parts[4])),
                 static_cast<int>(parse_int(parts[5]))};
      ck.arrays.push_back(std::move(a));
    } else if (k == "file") {
      file = v;
    } else {
      ck.meta.add(k, v);
    }
  }
  if (file.empty()) throw Error("checkpoint header lacks file=: " + hdr.string());
  const std::vector<float> blob = read_f32_le(hdr.parent_path() / file);
  std::size_t offset = 0;
  for (auto& a : ck.arrays) {
    const std::size_t n = a.shape.numel();
    if (offset + n > blob.size()) throw Error("checkpoint blob too short: " + file);
    a.values.assign(blob.begin() + offset, blob.begin() + offset + n);
    offset += n;
  }
  if (offset != blob.size()) throw Error("checkpoint blob has trailing data: " + file);
  return ck;
}

const NamedArray& Checkpoint::get(const std::string& name) const {
  for (const auto& a : arrays) {
    if (a.name == name) return a;
  }
  throw Error("checkpoint has no tensor '" + name + "'");
}

}  // namespace gtvseg::nn
