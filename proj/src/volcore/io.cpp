#include "gtvseg/volcore/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "gtvseg/volcore/keyvalue.hpp"

namespace gtvseg {
namespace fs = std::filesystem;

namespace {

constexpr const char* kKeyOrder[] = {"dims", "spacing", "origin", "dtype", "file"};

std::vector<char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto n = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<char> bytes(n);
  in.read(bytes.data(), static_cast<std::streamsize>(n));
  if (!in) throw Error("read failed: " + path.string());
  return bytes;
}

void write_bytes(const fs::path& path, const char* data, std::size_t n) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(data, static_cast<std::streamsize>(n));
  if (!out) throw Error("write failed: " + path.string());
}

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
}

std::string vec_text(Vec3 v) {
  return format_double(v.x) + ' ' + format_double(v.y) + ' ' + format_double(v.z);
}

void write_header(const fs::path& hdr, const Geometry& g, DType dtype, int channels) {
  KeyValues kv;
  kv.add("dims", std::to_string(g.dims.x) + ' ' + std::to_string(g.dims.y) + ' ' +
                     std::to_string(g.dims.z));
  kv.add("spacing", vec_text(g.spacing));
  kv.add("origin", vec_text(g.origin));
  kv.add("dtype", dtype == DType::f32 ? "f32" : "u8");
  kv.add("file", fs::path(hdr).replace_extension(".raw").filename().string());
  if (channels != 1) kv.add("channels", std::to_string(channels));
  kv.write_file(hdr);
}

fs::path raw_path_for(const fs::path& hdr, const RawHeader& h) {
  return hdr.parent_path() / h.file;
}

std::vector<char> read_payload(const fs::path& hdr, const RawHeader& h, std::size_t elem_size) {
  const auto bytes = read_bytes(raw_path_for(hdr, h));
  const std::size_t expected =
      h.geometry.voxel_count() * static_cast<std::size_t>(h.channels) * elem_size;
  if (bytes.size() != expected) {
    throw Error("raw length mismatch for " + hdr.string() + ": expected " +
                std::to_string(expected) + " bytes, found " + std::to_string(bytes.size()));
  }
  return bytes;
}

std::vector<float> decode_f32(const std::vector<char>& bytes) {
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t n = 0; n < out.size(); ++n) {
    std::uint32_t u;
    std::memcpy(&u, bytes.data() + 4 * n, 4);
    out[n] = std::bit_cast<float>(to_le(u));
  }
  return out;
}

std::vector<char> encode_f32(std::span<const float> values) {
  std::vector<char> bytes(values.size() * 4);
  for (std::size_t n = 0; n < values.size(); ++n) {
    const std::uint32_t u = to_le(std::bit_cast<std::uint32_t>(values[n]));
    std::memcpy(bytes.data() + 4 * n, &u, 4);
  }
  return bytes;
}

void check_finite(std::span<const float> values, const fs::path& path) {
  for (float x : values) {
    if (!std::isfinite(x)) throw Error("non-finite value in " + path.string());
  }
}

}  // namespace

fs::path header_path(const fs::path& path) {
  fs::path p = path;
  if (p.extension() == ".hdr") return p;
  if (p.extension() == ".raw") return p.replace_extension(".hdr");
  p += ".hdr";
  return p;
}

RawHeader read_header(const fs::path& path) {
  const fs::path hdr = header_path(path);
  if (!fs::exists(hdr)) throw Error("missing header file " + hdr.string());
  const KeyValues kv = KeyValues::read_file(hdr);
  const auto& e = kv.entries();
  if (e.size() < 5) throw Error("incomplete header " + hdr.string());
  for (std::size_t n = 0; n < 5; ++n) {
    if (e[n].first != kKeyOrder[n]) {
      throw Error("header " + hdr.string() + ": expected key '" + kKeyOrder[n] + "' at line " +
                  std::to_string(n + 1) + ", found '" + e[n].first + "'");
    }
  }
  RawHeader h;
  const auto dims = parse_ints(e[0].second);
  const auto spacing = parse_doubles(e[1].second);
  const auto origin = parse_doubles(e[2].second);
  if (dims.size() != 3 || spacing.size() != 3 || origin.size() != 3) {
    throw Error("header " + hdr.string() + ": dims/spacing/origin need three values");
  }
  h.geometry.dims = {dims[0], dims[1], dims[2]};
  h.geometry.spacing = {spacing[0], spacing[1], spacing[2]};
  h.geometry.origin = {origin[0], origin[1], origin[2]};
  h.geometry.validate();
  if (e[3].second == "f32") {
    h.dtype = DType::f32;
  } else if (e[3].second == "u8") {
    h.dtype = DType::u8;
  } else {
    throw Error("header " + hdr.string() + ": unknown dtype '" + e[3].second + "'");
  }
  h.file = e[4].second;
  if (auto c = kv.find("channels")) h.channels = static_cast<int>(parse_int(*c));
  if (h.channels < 1) throw Error("header " + hdr.string() + ": channels must be >= 1");
  return h;
}

Volume load_volume(const fs::path& path) {
  const fs::path hdr = header_path(path);
  const RawHeader h = read_header(hdr);
  if (h.channels != 1) throw Error(hdr.string() + " is a multi-channel blob, not a volume");
  if (h.dtype == DType::u8) {
    const auto bytes = read_payload(hdr, h, 1);
    std::vector<float> data(bytes.size());
    for (std::size_t n = 0; n < bytes.size(); ++n) {
      data[n] = static_cast<float>(static_cast<std::uint8_t>(bytes[n]));
    }
    return Volume(h.geometry, std::move(data));
  }
  auto data = decode_f32(read_payload(hdr, h, 4));
  check_finite(data, hdr);
  return Volume(h.geometry, std::move(data));
}

Mask load_mask(const fs::path& path) {
  const fs::path hdr = header_path(path);
  const RawHeader h = read_header(hdr);
  if (h.dtype != DType::u8 || h.channels != 1) {
    throw Error(hdr.string() + " is not a u8 mask");
  }
  const auto bytes = read_payload(hdr, h, 1);
  std::vector<std::uint8_t> data(bytes.begin(), bytes.end());
  Mask m(h.geometry, std::move(data));
  if (!is_binary(m)) throw Error(hdr.string() + ": mask values must be 0 or 1");
  return m;
}

void save_volume(const Volume& v, const fs::path& path) {
  const fs::path hdr = header_path(path);
  write_header(hdr, v.geometry(), DType::f32, 1);
  const auto bytes = encode_f32(v.data());
  write_bytes(fs::path(hdr).replace_extension(".raw"), bytes.data(), bytes.size());
}

void save_mask(const Mask& m, const fs::path& path) {
  const fs::path hdr = header_path(path);
  write_header(hdr, m.geometry(), DType::u8, 1);
  write_bytes(fs::path(hdr).replace_extension(".raw"),
              reinterpret_cast<const char*>(m.data().data()), m.size());
}

std::vector<float> load_channels(const fs::path& path, int channels, Geometry* geometry) {
  const fs::path hdr = header_path(path);
  const RawHeader h = read_header(hdr);
  if (h.dtype != DType::f32 || h.channels != channels) {
    throw Error(hdr.string() + ": expected " + std::to_string(channels) + "-channel f32 blob");
  }
  auto data = decode_f32(read_payload(hdr, h, 4));
  check_finite(data, hdr);
  if (geometry) *geometry = h.geometry;
  return data;
}

void save_channels(const fs::path& path, const Geometry& geometry,
                   std::span<const std::span<const float>> channels) {
  const fs::path hdr = header_path(path);
  for (const auto& c : channels) {
    if (c.size() != geometry.voxel_count()) throw Error("channel length does not match geometry");
  }
  write_header(hdr, geometry, DType::f32, static_cast<int>(channels.size()));
  std::vector<char> bytes;
  bytes.reserve(geometry.voxel_count() * channels.size() * 4);
  for (const auto& c : channels) {
    const auto b = encode_f32(c);
    bytes.insert(bytes.end(), b.begin(), b.end());
  }
  write_bytes(fs::path(hdr).replace_extension(".raw"), bytes.data(), bytes.size());
}

void write_f32_le(const fs::path& path, std::span<const float> values) {
  const auto bytes = encode_f32(values);
  write_bytes(path, bytes.data(), bytes.size());
}

std::vector<float> read_f32_le(const fs::path& path) {
  const auto bytes = read_bytes(path);
  if (bytes.size() % 4 != 0) throw Error(path.string() + ": length is not a multiple of 4");
  return decode_f32(bytes);
}

}  // namespace gtvseg
