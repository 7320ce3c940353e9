#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "sflow/rasterio.hpp"
#include "sflow/synthgen.hpp"
#include "test_helpers.hpp"

using namespace sflow;
using sflow::testing::TempDir;
namespace fs = std::filesystem;

TEST_CASE("later regions occlude earlier ones") {
  SceneSpec spec = sflow::testing::twoPlaneScene(40, 30);
  CHECK(spec.regionAt(5.0, 5.0) == 0);
  CHECK(spec.regionAt(30.0, 5.0) == 1);  // right half overlays the full frame
  SceneSpec one = sflow::testing::singlePlaneScene(40, 30);
  CHECK(one.regionAt(-5.0, -5.0) == -1);
}

TEST_CASE("reference channels match the analytic planes and motions") {
  SceneSpec spec = sflow::testing::singlePlaneScene(32, 24);
  SynthBundle b = render(spec);
  const RegionSpec& r = spec.regions[0];
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 32; ++x) {
      REQUIRE(b.d_t.isValid(x, y));
      CHECK(b.d_t.get(x, y) == doctest::Approx(r.plane.evaluate(x, y)).epsilon(1e-10));
      // flow and next disparity agree with moving the 3D point rigidly
      ScenePoint p = pixelToPoint(x, y, b.d_t.get(x, y), spec.rig);
      ScenePoint q{p.X + r.translation[0], p.Y + r.translation[1],
                   p.Z + r.translation[2]};
      SceneFlow3D w{p, q.X - p.X, q.Y - p.Y, q.Z - p.Z};
      double xr, yr;
      PixelSceneFlow sf;
      worldToImage(w, spec.rig, xr, yr, sf);
      CHECK(b.flow.u(x, y) == doctest::Approx(sf.u).epsilon(1e-9));
      CHECK(b.flow.v(x, y) == doctest::Approx(sf.v).epsilon(1e-9));
      CHECK(b.gt.d_next.get(x, y) == doctest::Approx(sf.d_next).epsilon(1e-9));
    }
}

TEST_CASE("warping the rendered frames reproduces the ground truth") {
  for (SceneSpec spec : {sflow::testing::singlePlaneScene(40, 30),
                         sflow::testing::twoPlaneScene(40, 30)}) {
    SynthBundle b = render(spec);
    DisparityMap warped = warpDisparity(b.d_next_frame, b.flow);
    int checked = 0;
    for (int y = 0; y < 30; ++y)
      for (int x = 0; x < 40; ++x) {
        if (b.occluded(x, y)) continue;
        REQUIRE(warped.isValid(x, y));
        CHECK(warped.get(x, y) ==
              doctest::Approx(b.gt.d_next.get(x, y)).epsilon(1e-6));
        ++checked;
      }
    CHECK(checked > 30 * 40 / 2);
  }
}

TEST_CASE("ground truth is dense") {
  SynthBundle b = render(sflow::testing::twoPlaneScene(32, 24));
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 32; ++x) CHECK(b.gt.fullyValid(x, y));
}

TEST_CASE("edge map marks the region boundary") {
  int w = 40, h = 24;
  SynthBundle b = render(sflow::testing::twoPlaneScene(w, h));
  bool boundary_hit = false;
  for (int y = 2; y < h - 2; ++y) {
    for (int x : {w / 2 - 1, w / 2}) boundary_hit |= b.edges.get(x, y) == 1.0;
    CHECK(b.edges.get(5, y) == 0.0);
    CHECK(b.edges.get(w - 5, y) == 0.0);
  }
  CHECK(boundary_hit);
}

TEST_CASE("sparsify removes an exact deterministic fraction") {
  SceneSpec spec = sflow::testing::singlePlaneScene(30, 20);
  SynthBundle a = render(spec);
  SynthBundle b = render(spec);
  size_t before = a.d_next_frame.validCount();
  sparsify(a, 0.4, 99);
  sparsify(b, 0.4, 99);
  size_t expect_removed = static_cast<size_t>(std::llround(0.4 * double(before)));
  CHECK(a.d_next_frame.validCount() == before - expect_removed);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 30; ++x)
      CHECK(a.d_next_frame.isValid(x, y) == b.d_next_frame.isValid(x, y));
  // ground truth stays dense
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 30; ++x) CHECK(a.gt.fullyValid(x, y));

  SynthBundle c = render(spec);
  sparsify(c, 0.4, 100);  // a different seed picks a different subset
  bool differs = false;
  for (int y = 0; y < 20 && !differs; ++y)
    for (int x = 0; x < 30; ++x)
      if (a.d_next_frame.isValid(x, y) != c.d_next_frame.isValid(x, y)) {
        differs = true;
        break;
      }
  CHECK(differs);

  CHECK_THROWS_AS(sparsify(c, 1.0, 1), DomainError);
  CHECK_THROWS_AS(sparsify(c, -0.1, 1), DomainError);
}

TEST_CASE("scene specs parse from text") {
  const char* text = R"(
width = 16
height = 12
fx = 200
fy = 200
cx = 8
cy = 6
baseline = 0.5
occlusion_fraction = 0.25
seed = 7

[region]
polygon = -1 -1, 17 -1, 17 13, -1 13
plane = 0.01 0.02 10
translation = 0.1 0 0

[region]
polygon = 8 -1, 17 -1, 17 13, 8 13
plane = 0 0 30
axis_angle = 0 0 1 0
)";
  SceneSpec spec = parseSceneSpec(text);
  CHECK(spec.width == 16);
  CHECK(spec.height == 12);
  CHECK(spec.rig.fx == 200.0);
  CHECK(spec.occlusion_fraction == 0.25);
  CHECK(spec.seed == 7);
  REQUIRE(spec.regions.size() == 2);
  CHECK(spec.regions[0].plane.c == 10.0);
  CHECK(spec.regions[0].translation[0] == 0.1);
  // zero-angle axis gives the identity rotation
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      CHECK(spec.regions[1].rotation[r][c] == doctest::Approx(r == c ? 1.0 : 0.0));
  CHECK(render(spec).gt.fullyValid(3, 3));
}

TEST_CASE("spec errors are configuration errors") {
  CHECK_THROWS_AS(parseSceneSpec("width = 4\n"), ConfigError);  // missing fx
  const char* no_region = "width=4\nheight=4\nfx=10\nfy=10\ncx=2\ncy=2\nbaseline=0.5\n";
  CHECK_THROWS_AS(parseSceneSpec(no_region), ConfigError);

  // region that does not cover the frame
  SceneSpec spec = sflow::testing::singlePlaneScene(16, 12);
  spec.regions[0].polygon = {{-1.0, -1.0}, {8.0, -1.0}, {8.0, 13.0}, {-1.0, 13.0}};
  CHECK_THROWS_AS(render(spec), ConfigError);

  // nonpositive disparity over the frame
  SceneSpec bad = sflow::testing::singlePlaneScene(16, 12);
  bad.regions[0].plane = {0.0, 0.0, -2.0};
  CHECK_THROWS_AS(render(bad), ConfigError);
}

TEST_CASE("bundles write the directory layout and survive quantization") {
  TempDir tmp;
  SynthBundle b = render(sflow::testing::twoPlaneScene(24, 16));
  sparsify(b, 0.3, 3);
  writeBundle(b, tmp.file("out"), "000004");

  for (const char* rel :
       {"disp_0/000004_10.png", "disp_1/000004_11.png", "flow/000004_10.png",
        "image/000004_10.png", "edges/000004_10.png", "occ/000004_10.png",
        "gt/disp_0/000004_10.png", "gt/disp_1/000004_10.png", "gt/flow/000004_10.png"})
    CHECK(fs::exists(fs::path(tmp.file("out")) / rel));

  DisparityMap d = readDisparity(tmp.file("out/disp_0/000004_10.png"));
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 24; ++x) {
      REQUIRE(d.isValid(x, y));
      CHECK(d.get(x, y) == doctest::Approx(b.d_t.get(x, y)).epsilon(1e-2));
    }
  DisparityMap d1 = readDisparity(tmp.file("out/disp_1/000004_11.png"));
  CHECK(d1.validCount() == b.d_next_frame.validCount());
  FlowMap f = readFlow(tmp.file("out/flow/000004_10.png"));
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 24; ++x)
      CHECK(std::abs(f.u(x, y) - b.flow.u(x, y)) <= 0.5 / 64.0);
}
