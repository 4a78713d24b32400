#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gtvseg/volcore/volume.hpp"

// Interchange format: `<name>.hdr` holds, in this order,
//   dims=X Y Z / spacing=SX SY SZ / origin=OX OY OZ / dtype=f32|u8 / file=<name>.raw
// and `<name>.raw` holds the little-endian x-fastest array. Multi-channel
// float blobs (deformation fields) append `channels=N` after `file` and store
// the channels as consecutive blocks.

namespace gtvseg {

enum class DType { f32, u8 };

struct RawHeader {
  Geometry geometry;
  DType dtype = DType::f32;
  std::string file;
  int channels = 1;
};

/// Accepts `name`, `name.hdr` or `name.raw`; returns `name.hdr`.
std::filesystem::path header_path(const std::filesystem::path& path);

RawHeader read_header(const std::filesystem::path& path);

/// u8 files are widened to float.
Volume load_volume(const std::filesystem::path& path);
Mask load_mask(const std::filesystem::path& path);
void save_volume(const Volume& v, const std::filesystem::path& path);
void save_mask(const Mask& m, const std::filesystem::path& path);

/// Float blob with `channels` blocks of geometry.voxel_count() values each.
std::vector<float> load_channels(const std::filesystem::path& path, int channels,
                                 Geometry* geometry);
void save_channels(const std::filesystem::path& path, const Geometry& geometry,
                   std::span<const std::span<const float>> channels);

/// Raw little-endian f32 helpers shared with the checkpoint writer.
void write_f32_le(const std::filesystem::path& path, std::span<const float> values);
std::vector<float> read_f32_le(const std::filesystem::path& path);

}  // namespace gtvseg
