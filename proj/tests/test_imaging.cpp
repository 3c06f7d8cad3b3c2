#include <doctest.h>

#include <cstring>
#include <fstream>

#include "spxtrack/errors.hpp"
#include "spxtrack/image.hpp"
#include "support/synthetic.hpp"

using namespace spxtrack;
using spxtest::TempDir;

namespace {

void write_bytes(const std::filesystem::path& p, const void* data, std::size_t len) {
  std::ofstream out(p, std::ios::binary);
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
}

// 2x1 RGBA PNG: (10,20,30,128), (200,100,50,0)
const unsigned char kRgbaPng[] = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44,
    0x52, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x01, 0x08, 0x06, 0x00, 0x00, 0x00, 0xf4,
    0x22, 0x7f, 0x8a, 0x00, 0x00, 0x00, 0x11, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0xe0,
    0x12, 0x91, 0x6b, 0x38, 0x91, 0x62, 0xc4, 0x00, 0x00, 0x08, 0xc9, 0x02, 0x1b, 0x0d, 0x1e,
    0x7a, 0xf2, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82,
};

// 2x1 gray PNG: 0, 255
const unsigned char kGrayPng[] = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44,
    0x52, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x01, 0x08, 0x00, 0x00, 0x00, 0x00, 0xd1,
    0x49, 0x20, 0x56, 0x00, 0x00, 0x00, 0x0b, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0x60,
    0xf8, 0x0f, 0x00, 0x01, 0x02, 0x01, 0x00, 0x42, 0xbe, 0xbc, 0x68, 0x00, 0x00, 0x00, 0x00,
    0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82,
};

}  // namespace

TEST_CASE("load_frame reads a 1x1 P6 file byte for byte") {
  TempDir dir("imaging");
  const char header[] = "P6\n1 1\n255\n";
  std::string bytes(header);
  bytes += '\xff';
  bytes += '\x00';
  bytes += '\x00';
  const auto p = dir.path / "one.ppm";
  write_bytes(p, bytes.data(), bytes.size());

  const Frame f = load_frame(p);
  CHECK(f.width == 1);
  CHECK(f.height == 1);
  REQUIRE(f.data.size() == 3);
  CHECK(f.data[0] == 255);
  CHECK(f.data[1] == 0);
  CHECK(f.data[2] == 0);
}

TEST_CASE("frame round-trips byte-exact through ppm and png") {
  TempDir dir("imaging");
  const Frame f = spxtest::textured_frame(13, 7, 5);
  for (const char* name : {"rt.ppm", "rt.png"}) {
    const auto p = dir.path / name;
    write_frame(f, p);
    const Frame back = load_frame(p);
    CHECK(back.width == f.width);
    CHECK(back.height == f.height);
    CHECK(back.data == f.data);
  }
}

TEST_CASE("truncated P6 payload is a dimension mismatch") {
  TempDir dir("imaging");
  const char bytes[] = "P6\n2 1\n255\nabc";  // 3 bytes, 6 needed
  const auto p = dir.path / "short.ppm";
  write_bytes(p, bytes, sizeof(bytes) - 1);
  CHECK_THROWS_WITH_AS(load_frame(p), doctest::Contains("dimension mismatch"), DataError);
}

TEST_CASE("load_frame rejects missing and unknown files") {
  TempDir dir("imaging");
  CHECK_THROWS_AS(load_frame(dir.path / "absent.ppm"), DataError);
  const auto p = dir.path / "odd.txt";
  write_bytes(p, "hello", 5);
  CHECK_THROWS_AS(load_frame(p), DataError);
}

TEST_CASE("rgba png loads with alpha dropped, gray replicated") {
  TempDir dir("imaging");
  const auto rgba = dir.path / "a.png";
  write_bytes(rgba, kRgbaPng, sizeof(kRgbaPng));
  const Frame f = load_frame(rgba);
  REQUIRE(f.width == 2);
  CHECK(f.at(0, 0, 0) == 10);
  CHECK(f.at(0, 0, 1) == 20);
  CHECK(f.at(0, 0, 2) == 30);
  CHECK(f.at(1, 0, 0) == 200);

  const auto gray = dir.path / "g.png";
  write_bytes(gray, kGrayPng, sizeof(kGrayPng));
  const Frame g = load_frame(gray);
  CHECK(g.at(0, 0, 0) == 0);
  CHECK(g.at(1, 0, 1) == 255);
  CHECK(g.at(1, 0, 2) == 255);
}

TEST_CASE("mask thresholding") {
  TempDir dir("imaging");
  Frame img = spxtest::solid_frame(4, 3, 0, 0, 0);
  const auto p = dir.path / "m.ppm";

  SUBCASE("all zero -> all false") {
    write_frame(img, p);
    CHECK(load_mask(p).count_true() == 0);
  }
  SUBCASE("all 255 -> all true") {
    img = spxtest::solid_frame(4, 3, 255, 255, 255);
    write_frame(img, p);
    CHECK(load_mask(p).count_true() == 12);
  }
  SUBCASE("single 200 pixel above default threshold") {
    img.at(2, 1, 0) = 200;
    write_frame(img, p);
    const RoiMask m = load_mask(p);
    CHECK(m.count_true() == 1);
    CHECK(m.at(2, 1));
  }
  SUBCASE("threshold boundary is inclusive") {
    img.at(0, 0, 0) = 128;
    img.at(1, 0, 0) = 127;
    write_frame(img, p);
    const RoiMask m = load_mask(p);
    CHECK(m.at(0, 0));
    CHECK_FALSE(m.at(1, 0));
  }
}

TEST_CASE("mask round-trips through png and pgm") {
  TempDir dir("imaging");
  RoiMask m(5, 4);
  m.set(0, 0, true);
  m.set(4, 3, true);
  m.set(2, 2, true);
  for (const char* name : {"m.png", "m.pgm"}) {
    const auto p = dir.path / name;
    write_mask(m, p);
    CHECK(load_mask(p).bits == m.bits);
  }
}

TEST_CASE("label maps round-trip with sidecar") {
  TempDir dir("imaging");
  std::vector<std::uint32_t> labels = {0, 0, 1, 1, 0, 0, 1, 1};
  const Segmentation seg = segmentation_from_labels(labels, 4, 2);
  const auto p = dir.path / "labels.png";
  write_label_map(seg, p);
  CHECK(std::filesystem::exists(dir.path / "labels.txt"));

  const Segmentation back = read_label_map(p);
  CHECK(back.count == 2);
  CHECK(back.labels == labels);
  CHECK(back.members == seg.members);
}

TEST_CASE("label map write refuses more than 65535 superpixels") {
  TempDir dir("imaging");
  const int w = 700;
  const int h = 100;
  std::vector<std::uint32_t> labels(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<std::uint32_t>(i);
  const Segmentation seg = segmentation_from_labels(labels, w, h);
  CHECK_THROWS_AS(write_label_map(seg, dir.path / "big.png"), DataError);
}

TEST_CASE("sequence construction checks dimensions and reference index") {
  std::vector<Frame> frames;
  frames.push_back(spxtest::solid_frame(4, 4, 1, 2, 3));
  frames.push_back(spxtest::solid_frame(4, 4, 9, 9, 9));
  CHECK_NOTHROW(Sequence(frames, 1));
  CHECK_THROWS_AS(Sequence(frames, 2), DataError);
  frames.push_back(spxtest::solid_frame(5, 4, 0, 0, 0));
  CHECK_THROWS_AS(Sequence(frames, 0), DataError);
}
