#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "sflow/geodesic.hpp"

using namespace sflow;

namespace {

std::vector<PixelCoord> sortSeeds(std::vector<PixelCoord> seeds) {
  std::sort(seeds.begin(), seeds.end(), [](const PixelCoord& a, const PixelCoord& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  return seeds;
}

}  // namespace

TEST_CASE("uniform cost reduces to scaled Manhattan distance") {
  EdgeCostMap cost(20, 20);  // all zero
  auto seeds = sortSeeds({{2, 2}, {10, 2}, {2, 12}, {17, 17}});
  double step = 0.01;
  auto nb = geodesicNeighborsExact(seeds, cost, 5, 5, 4, step);
  REQUIRE(nb.size() == 4);
  for (const auto& [idx, dist] : nb) {
    int manhattan = std::abs(seeds[idx].x - 5) + std::abs(seeds[idx].y - 5);
    CHECK(dist == doctest::Approx(step * manhattan).epsilon(1e-12));
  }
  // sorted by distance
  for (size_t i = 1; i < nb.size(); ++i) CHECK(nb[i - 1].distance <= nb[i].distance);
}

TEST_CASE("a cost barrier outranks a same-hop-distance seed") {
  int w = 21, h = 9;
  EdgeCostMap cost(w, h);
  for (int y = 0; y < h; ++y) cost.set(10, y, 1.0);  // full-height wall
  // target at (8,4); seed beyond the wall at (12,4) and one on this side at (4,4)
  auto seeds = sortSeeds({{12, 4}, {4, 4}});
  auto nb = geodesicNeighborsExact(seeds, cost, 8, 4, 2, 0.01);
  REQUIRE(nb.size() == 2);
  CHECK(seeds[nb[0].seed_index].x == 4);   // same side wins
  CHECK(seeds[nb[1].seed_index].x == 12);
  CHECK(nb[1].distance >= 1.0);            // every crossing pays the barrier
}

TEST_CASE("k larger than the seed count returns all seeds") {
  EdgeCostMap cost(10, 10);
  auto seeds = sortSeeds({{1, 1}, {8, 8}});
  auto nb = geodesicNeighborsExact(seeds, cost, 5, 5, 25, 0.01);
  CHECK(nb.size() == 2);
  GeodesicField field(seeds, cost, 25, 0.01);
  CHECK(field.neighbors(5, 5).size() == 2);
}

TEST_CASE("empty seed set is an error") {
  EdgeCostMap cost(4, 4);
  std::vector<PixelCoord> none;
  CHECK_THROWS_AS(geodesicNeighborsExact(none, cost, 1, 1, 3, 0.01), NoDataError);
  CHECK_THROWS_AS(GeodesicField(none, cost, 3, 0.01), NoDataError);
}

TEST_CASE("distance is symmetric between pixel pairs") {
  int w = 16, h = 16;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> uc(0.0, 1.0);
  EdgeCostMap cost(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) cost.set(x, y, uc(rng));

  std::uniform_int_distribution<int> pix(0, 15);
  for (int i = 0; i < 30; ++i) {
    PixelCoord a{pix(rng), pix(rng)}, b{pix(rng), pix(rng)};
    if (a.x == b.x && a.y == b.y) continue;
    std::vector<PixelCoord> sa{a}, sb{b};
    double dab = geodesicNeighborsExact(sa, cost, b.x, b.y, 1, 0.01)[0].distance;
    double dba = geodesicNeighborsExact(sb, cost, a.x, a.y, 1, 0.01)[0].distance;
    CHECK(dab == doctest::Approx(dba).epsilon(1e-12));
  }
}

TEST_CASE("the global field agrees with exact per-target retrieval") {
  int w = 32, h = 32;
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> uc(0.0, 1.0);
  EdgeCostMap cost(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) cost.set(x, y, uc(rng));

  std::vector<PixelCoord> seeds;
  for (int y = 1; y < h; y += 5)
    for (int x = 2; x < w; x += 5) seeds.push_back({x, y});
  seeds = sortSeeds(seeds);

  int k = 6;
  GeodesicField field(seeds, cost, k, 0.01);
  std::uniform_int_distribution<int> pix(0, 31);
  for (int i = 0; i < 50; ++i) {
    int tx = pix(rng), ty = pix(rng);
    auto exact = geodesicNeighborsExact(seeds, cost, tx, ty, k, 0.01);
    auto fast = field.neighbors(tx, ty);
    REQUIRE(fast.size() == exact.size());
    for (size_t j = 0; j < exact.size(); ++j) {
      CHECK(fast[j].seed_index == exact[j].seed_index);
      CHECK(fast[j].distance == doctest::Approx(exact[j].distance).epsilon(1e-9));
    }
  }
}

TEST_CASE("ties break toward the seed with smaller (y, x)") {
  EdgeCostMap cost(9, 9);
  // two seeds equidistant from the center
  auto seeds = sortSeeds({{4, 2}, {2, 4}});  // sorted: (4,2) first (smaller y)
  auto nb = geodesicNeighborsExact(seeds, cost, 4, 4, 1, 0.01);
  REQUIRE(nb.size() == 1);
  CHECK(seeds[nb[0].seed_index].y == 2);

  GeodesicField field(seeds, cost, 1, 0.01);
  auto fast = field.neighbors(4, 4);
  REQUIRE(fast.size() == 1);
  CHECK(fast[0].seed_index == nb[0].seed_index);
}
