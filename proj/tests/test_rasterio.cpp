#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "sflow/errors.hpp"
#include "sflow/rasterio.hpp"
#include "test_helpers.hpp"

using namespace sflow;
namespace fs = std::filesystem;

using sflow::testing::TempDir;

TEST_CASE("disparity decode follows s/256 with 0 reserved as invalid") {
  TempDir tmp;
  DisparityMap map(3, 1);
  map.set(0, 0, 1.0);             // -> stored 256
  map.setInvalid(1, 0);           // -> stored 0
  map.set(2, 0, 65535.0 / 256.0); // -> stored 65535
  writeDisparity(map, tmp.file("d.png"));

  DisparityMap back = readDisparity(tmp.file("d.png"));
  CHECK(back.get(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(back.isValid(1, 0));
  CHECK(back.get(2, 0) == doctest::Approx(255.99609375).epsilon(1e-12));
}

TEST_CASE("sub-quantization disparity clamps away from the invalid code") {
  TempDir tmp;
  DisparityMap map(1, 1);
  map.set(0, 0, 0.001);  // round(0.256) = 0, must clamp to stored 1
  writeDisparity(map, tmp.file("d.png"));
  DisparityMap back = readDisparity(tmp.file("d.png"));
  CHECK(back.isValid(0, 0));
  CHECK(back.get(0, 0) == doctest::Approx(1.0 / 256.0));
}

TEST_CASE("disparity encode rejects values out of range") {
  TempDir tmp;
  DisparityMap map(1, 1);
  map.set(0, 0, 256.0);
  CHECK_THROWS_AS(writeDisparity(map, tmp.file("d.png")), DomainError);
}

TEST_CASE("flow encode formula at zero and for negative components") {
  TempDir tmp;
  FlowMap map(2, 1);
  map.set(0, 0, 0.0, 0.0);
  map.set(1, 0, -1.5, 3.25);
  writeFlow(map, tmp.file("f.png"));
  FlowMap back = readFlow(tmp.file("f.png"));
  CHECK(back.u(0, 0) == 0.0);    // stored (32768, 32768, 1)
  CHECK(back.v(0, 0) == 0.0);
  CHECK(back.u(1, 0) == -1.5);   // stored s1 = 32672
  CHECK(back.v(1, 0) == 3.25);
}

TEST_CASE("invalid flow pixels round-trip as invalid") {
  TempDir tmp;
  FlowMap map(2, 1);
  map.set(0, 0, 1.0, 2.0);
  map.setInvalid(1, 0);
  writeFlow(map, tmp.file("f.png"));
  FlowMap back = readFlow(tmp.file("f.png"));
  CHECK(back.isValid(0, 0));
  CHECK_FALSE(back.isValid(1, 0));
}

TEST_CASE("wrong bit depth is a format error") {
  TempDir tmp;
  GrayImage g(4, 4);
  writeGray(g, tmp.file("g.png"));
  CHECK_THROWS_AS(readDisparity(tmp.file("g.png")), FormatError);
  CHECK_THROWS_AS(readFlow(tmp.file("g.png")), FormatError);
}

TEST_CASE("wrong channel count is a format error") {
  TempDir tmp;
  DisparityMap d(4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) d.set(x, y, 1.0);
  writeDisparity(d, tmp.file("d.png"));
  CHECK_THROWS_AS(readFlow(tmp.file("d.png")), FormatError);

  ColorRaster c(4, 4);
  writeColor(c, tmp.file("c.png"));
  CHECK_THROWS_AS(readGrayStrict(tmp.file("c.png")), FormatError);
}

TEST_CASE("malformed file is a decode error") {
  TempDir tmp;
  {
    std::FILE* f = std::fopen(tmp.file("junk.png").c_str(), "wb");
    std::fputs("definitely not a png", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(readDisparity(tmp.file("junk.png")), FormatError);
}

TEST_CASE("gray decode scales to [0,1] and applies luma on RGB") {
  TempDir tmp;
  ColorRaster c(3, 1);
  c.set(0, 0, 255, 255, 255);
  c.set(1, 0, 0, 0, 0);
  c.set(2, 0, 255, 0, 0);
  writeColor(c, tmp.file("c.png"));
  GrayImage g = readGray(tmp.file("c.png"));
  CHECK(g.get(0, 0) == doctest::Approx(1.0));
  CHECK(g.get(1, 0) == doctest::Approx(0.0));
  CHECK(g.get(2, 0) == doctest::Approx(0.299));
}

TEST_CASE("quantization-grid round trips are exact, invalid positions included") {
  TempDir tmp;
  std::mt19937_64 rng(12345);
  for (int iter = 0; iter < 25; ++iter) {
    DisparityMap d = testing::randomQuantizedDisparity(17, 13, rng, 0.2);
    writeDisparity(d, tmp.file("d.png"));
    DisparityMap dback = readDisparity(tmp.file("d.png"));
    for (int y = 0; y < 13; ++y)
      for (int x = 0; x < 17; ++x) {
        REQUIRE(d.isValid(x, y) == dback.isValid(x, y));
        if (d.isValid(x, y)) REQUIRE(d.get(x, y) == dback.get(x, y));
      }

    FlowMap f = testing::randomQuantizedFlow(17, 13, rng, 0.2);
    writeFlow(f, tmp.file("f.png"));
    FlowMap fback = readFlow(tmp.file("f.png"));
    for (int y = 0; y < 13; ++y)
      for (int x = 0; x < 17; ++x) {
        REQUIRE(f.isValid(x, y) == fback.isValid(x, y));
        if (f.isValid(x, y)) {
          REQUIRE(f.u(x, y) == fback.u(x, y));
          REQUIRE(f.v(x, y) == fback.v(x, y));
        }
      }
  }
}

TEST_CASE("decoding never produces NaN or infinity") {
  TempDir tmp;
  std::mt19937_64 rng(99);
  DisparityMap d = testing::randomQuantizedDisparity(32, 32, rng, 0.5);
  writeDisparity(d, tmp.file("d.png"));
  DisparityMap back = readDisparity(tmp.file("d.png"));
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x)
      if (back.isValid(x, y)) CHECK(std::isfinite(back.get(x, y)));
}
