#include "sflow/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "sflow/errors.hpp"

namespace sflow {

namespace {

const int kDx[4] = {1, -1, 0, 0};
const int kDy[4] = {0, 0, 1, -1};

inline double stepWeight(const EdgeCostMap& cost, double step_cost,
                         int x0, int y0, int x1, int y1) {
  return step_cost + 0.5 * (cost.get(x0, y0) + cost.get(x1, y1));
}

}  // namespace

std::vector<SeedDistance> geodesicNeighborsExact(std::span<const PixelCoord> seeds,
                                                 const EdgeCostMap& cost,
                                                 int tx, int ty, int k,
                                                 double step_cost) {
  if (seeds.empty()) throw NoDataError("geodesicNeighborsExact: empty seed set");
  const int w = cost.width(), h = cost.height();
  const size_t n = static_cast<size_t>(w) * h;

  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<uint8_t> done(n, 0);
  std::vector<int> seed_at(n, -1);
  for (size_t i = 0; i < seeds.size(); ++i)
    seed_at[static_cast<size_t>(seeds[i].y) * w + seeds[i].x] = static_cast<int>(i);

  using Item = std::pair<double, size_t>;  // (distance, pixel index)
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  size_t start = static_cast<size_t>(ty) * w + tx;
  dist[start] = 0.0;
  heap.push({0.0, start});

  std::vector<SeedDistance> found;
  double cutoff = std::numeric_limits<double>::infinity();

  while (!heap.empty()) {
    auto [d, p] = heap.top();
    heap.pop();
    if (done[p]) continue;
    done[p] = 1;
    if (d > cutoff) break;
    if (seed_at[p] >= 0) {
      found.push_back({seed_at[p], d});
      // Settle every seed tied with the k-th distance before stopping so
      // tie-breaking stays deterministic.
      if (static_cast<int>(found.size()) >= k && !std::isfinite(cutoff)) cutoff = d;
    }
    int px = static_cast<int>(p % w), py = static_cast<int>(p / w);
    for (int i = 0; i < 4; ++i) {
      int qx = px + kDx[i], qy = py + kDy[i];
      if (qx < 0 || qx >= w || qy < 0 || qy >= h) continue;
      size_t q = static_cast<size_t>(qy) * w + qx;
      if (done[q]) continue;
      double nd = d + stepWeight(cost, step_cost, px, py, qx, qy);
      if (nd < dist[q]) {
        dist[q] = nd;
        heap.push({nd, q});
      }
    }
  }

  std::stable_sort(found.begin(), found.end(),
                   [&](const SeedDistance& a, const SeedDistance& b) {
                     if (a.distance != b.distance) return a.distance < b.distance;
                     return a.seed_index < b.seed_index;  // seeds sorted by (y, x)
                   });
  if (static_cast<int>(found.size()) > k) found.resize(k);
  return found;
}

GeodesicField::GeodesicField(std::vector<PixelCoord> seeds, const EdgeCostMap& cost,
                             int k, double step_cost)
    : width_(cost.width()), height_(cost.height()), k_(k), seeds_(std::move(seeds)) {
  if (seeds_.empty()) throw NoDataError("GeodesicField: empty seed set");
  if (k_ < 1) throw DomainError("GeodesicField: k must be >= 1");

  const size_t n = static_cast<size_t>(width_) * height_;
  entries_.assign(n * k_, SeedDistance{});
  counts_.assign(n, 0);

  // (distance, seed index, pixel index); the seed index component keeps the
  // settle order at every pixel aligned with the exact mode's tie-breaking.
  using Item = std::tuple<double, int, size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (size_t i = 0; i < seeds_.size(); ++i) {
    size_t p = static_cast<size_t>(seeds_[i].y) * width_ + seeds_[i].x;
    heap.push({0.0, static_cast<int>(i), p});
  }

  auto settled = [&](size_t p, int s) {
    for (int j = 0; j < counts_[p]; ++j)
      if (entries_[p * k_ + j].seed_index == s) return true;
    return false;
  };

  while (!heap.empty()) {
    auto [d, s, p] = heap.top();
    heap.pop();
    if (counts_[p] >= k_ || settled(p, s)) continue;
    entries_[p * k_ + counts_[p]] = SeedDistance{s, d};
    ++counts_[p];

    int px = static_cast<int>(p % width_), py = static_cast<int>(p / width_);
    for (int i = 0; i < 4; ++i) {
      int qx = px + kDx[i], qy = py + kDy[i];
      if (qx < 0 || qx >= width_ || qy < 0 || qy >= height_) continue;
      size_t q = static_cast<size_t>(qy) * width_ + qx;
      if (counts_[q] >= k_ || settled(q, s)) continue;
      heap.push({d + stepWeight(cost, step_cost, px, py, qx, qy), s, q});
    }
  }
}

std::span<const SeedDistance> GeodesicField::neighbors(int x, int y) const {
  size_t p = static_cast<size_t>(y) * width_ + x;
  return {&entries_[p * k_], static_cast<size_t>(counts_[p])};
}

}  // namespace sflow
