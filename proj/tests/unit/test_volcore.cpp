#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>

#include "gtvseg/volcore/components.hpp"
#include "gtvseg/volcore/io.hpp"
#include "gtvseg/volcore/keyvalue.hpp"
#include "gtvseg/volcore/parallel.hpp"
#include "gtvseg/volcore/rng.hpp"
#include "gtvseg/volcore/sampling.hpp"
#include "gtvseg/volcore/volume.hpp"

using namespace gtvseg;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gtvseg_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Geometry small_geometry() { return Geometry{{5, 4, 3}, {0.5, 1.5, 2.0}, {-3, 7, 1}}; }

}  // namespace

TEST_CASE("geometry index and world round trips") {
  const Geometry g = small_geometry();
  for (std::size_t n = 0; n < g.voxel_count(); ++n) {
    const Index3 i = g.unravel(n);
    CHECK(g.linear(i) == n);
    CHECK(g.nearest_voxel(g.voxel_to_world(i)) == i);
  }
  CHECK(g.voxel_volume() == doctest::Approx(1.5));
  CHECK_THROWS_AS((Geometry{{0, 1, 1}}.validate()), Error);
  CHECK_THROWS_AS((Geometry{{1, 1, 1}, {1, -1, 1}}.validate()), Error);
}

TEST_CASE("image construction checks the data length") {
  CHECK_THROWS_AS(Volume(small_geometry(), std::vector<float>(3)), Error);
  Volume v(small_geometry(), 2.0f);
  CHECK(v.size() == 60);
  CHECK(all_finite(v));
  v[0] = NAN;
  CHECK_FALSE(all_finite(v));
}

TEST_CASE("crop and paste are inverse and crop keeps world placement") {
  Volume v(small_geometry());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = static_cast<float>(n);
  const Volume c = crop(v, {1, 1, 1}, {4, 3, 3});
  CHECK(c.dims() == Index3{3, 2, 2});
  CHECK(c.geometry().voxel_to_world(Index3{0, 0, 0}) == v.geometry().voxel_to_world(Index3{1, 1, 1}));
  CHECK(c.at(0, 0, 0) == v.at(1, 1, 1));
  Volume w(small_geometry());
  paste(w, c, {1, 1, 1});
  CHECK(w.at(3, 2, 2) == v.at(3, 2, 2));
  CHECK(w.at(0, 0, 0) == 0.0f);
  CHECK_THROWS_AS(crop(v, {0, 0, 0}, {6, 1, 1}), Error);
}

TEST_CASE("bounding box and mask volume") {
  Mask m(small_geometry());
  CHECK(bounding_box(m).empty());
  m.at(1, 2, 0) = 1;
  m.at(3, 1, 2) = 1;
  const Box b = bounding_box(m);
  CHECK(b.lo == Index3{1, 1, 0});
  CHECK(b.hi == Index3{4, 3, 3});
  CHECK(mask_volume_mm3(m) == doctest::Approx(3.0));
}

TEST_CASE("key-value records parse, format and reject malformed lines") {
  const auto kv = KeyValues::parse("a=1\n\nb = x y \n# note\nc=3\n", true);
  CHECK(kv.get("a") == "1");
  CHECK(kv.contains("c"));
  CHECK_FALSE(kv.contains("note"));
  CHECK_THROWS_AS(kv.get("zzz"), Error);
  CHECK_THROWS_AS(KeyValues::parse("no equals sign\n"), Error);
  for (double d : {0.1, 1.0 / 3.0, -2.5e-7, 123456789.0}) CHECK(parse_double(format_double(d)) == d);
  CHECK(parse_ints("4 5 6") == std::vector<int>{4, 5, 6});
  CHECK(parse_bool("true"));
  CHECK_FALSE(parse_bool("0"));
  CHECK_THROWS_AS(parse_int("12x"), Error);
  const auto back = KeyValues::parse(kv.to_string());
  CHECK(back.entries() == kv.entries());
}

TEST_CASE("volume, mask and multi-channel IO round trip") {
  const fs::path dir = temp_dir("io");
  Volume v(small_geometry());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = 0.25f * static_cast<float>(n) - 3.0f;
  save_volume(v, dir / "v");
  CHECK(load_volume(dir / "v.hdr") == v);
  CHECK(load_volume(dir / "v.raw") == v);
  Mask m(small_geometry());
  m[7] = 1;
  save_mask(m, dir / "m");
  CHECK(load_mask(dir / "m") == m);
  CHECK(load_volume(dir / "m")[7] == 1.0f);
  CHECK_THROWS_AS(load_mask(dir / "v"), Error);
  CHECK_THROWS_AS(load_volume(dir / "missing"), Error);

  std::vector<float> a(60, 1.0f), b(60, 2.0f);
  const std::span<const float> parts[] = {a, b};
  save_channels(dir / "c", small_geometry(), parts);
  Geometry g;
  const auto blob = load_channels(dir / "c", 2, &g);
  CHECK(g == small_geometry());
  CHECK(blob.size() == 120);
  CHECK(blob[60] == 2.0f);
  CHECK_THROWS_AS(load_channels(dir / "c", 3, &g), Error);
}

TEST_CASE("header declares the raw file and little-endian payload") {
  const fs::path dir = temp_dir("hdr");
  Volume v(Geometry{{2, 1, 1}}, 1.0f);
  save_volume(v, dir / "x");
  const auto kv = KeyValues::read_file(dir / "x.hdr");
  CHECK(kv.get("dtype") == "f32");
  CHECK(kv.get("file") == "x.raw");
  CHECK(fs::file_size(dir / "x.raw") == 8);
  std::ifstream is(dir / "x.raw", std::ios::binary);
  unsigned char bytes[4];
  is.read(reinterpret_cast<char*>(bytes), 4);
  CHECK(bytes[3] == 0x3f);  // 1.0f = 0x3f800000
}

TEST_CASE("trilinear sampling reproduces affine fields and honours the background") {
  const Geometry g{{6, 5, 4}, {1, 2, 3}, {1, 2, 3}};
  Volume v(g);
  auto f = [](Vec3 p) { return static_cast<float>(2 * p.x - p.y + 0.5 * p.z); };
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = f(g.voxel_to_world(g.unravel(n)));
  const Vec3 p{3.3, 5.1, 7.7};
  CHECK(sample_trilinear(v, p) == doctest::Approx(f(p)).epsilon(1e-5));
  CHECK(sample_trilinear(v, {-10, 0, 0}, -7.0f) == -7.0f);
  CHECK(sample_nearest(v, g.voxel_to_world(Index3{2, 2, 2}), 0.0f) == v.at(2, 2, 2));
  const Volume same = resample(v, g);
  for (std::size_t n = 0; n < v.size(); ++n) CHECK(same[n] == doctest::Approx(v[n]));
}

TEST_CASE("component labelling, selection and hole filling") {
  Mask m(Geometry{{6, 6, 2}});
  m.at(0, 0, 0) = 1;
  m.at(1, 0, 0) = 1;
  m.at(4, 4, 1) = 1;
  m.at(1, 1, 0) = 1;  // 6-connected to (1,0,0)
  m.at(2, 2, 0) = 1;  // only diagonal neighbours: separate
  const auto c = label_components(m);
  REQUIRE(c.count() == 3);
  CHECK(c.sizes[0] == 3);
  CHECK(c.labels.at(4, 4, 1) != c.labels.at(2, 2, 0));
  CHECK(count_set(select_components(c, {1})) == 3);

  Mask ring(Geometry{{5, 5, 1}});
  for (int j = 1; j <= 3; ++j)
    for (int i = 1; i <= 3; ++i) ring.at(i, j, 0) = !(i == 2 && j == 2);
  CHECK(fill_holes_per_slice(ring).at(2, 2, 0) == 1);
  Volume v(Geometry{{3, 1, 1}}, std::vector<float>{-500, 0, 200});
  CHECK(count_set(threshold(v, 0.0f)) == 2);
  CHECK(count_set(threshold(v, 0.0f, true)) == 1);
}

TEST_CASE("rng is reproducible and derive_seed separates streams") {
  Rng a(42), b(42), c(43);
  CHECK(a.next() == b.next());
  CHECK(a.next() != c.next());
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 5) == derive_seed(1, 5));
  Rng r(7);
  double sum = 0, sq = 0;
  for (int i = 0; i < 20000; ++i) {
    const double x = r.normal();
    sum += x;
    sq += x * x;
    const auto k = r.below(5);
    CHECK(k < 5);
  }
  CHECK(std::abs(sum / 20000) < 0.05);
  CHECK(std::abs(sq / 20000 - 1) < 0.05);
  std::vector<int> v{1, 2, 3, 4, 5};
  r.shuffle(v);
  std::sort(v.begin(), v.end());
  CHECK(v == std::vector<int>{1, 2, 3, 4, 5});
}

TEST_CASE("parallel_for visits every index once for any thread count") {
  for (int threads : {1, 2, 3, 8}) {
    std::vector<std::atomic<int>> hits(37);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
  CHECK_THROWS_AS(parallel_for(4, 2, [](std::size_t i) {
                    if (i == 3) throw Error("boom");
                  }),
                  Error);
}
