#ifndef SFLOW_GEODESIC_HPP
#define SFLOW_GEODESIC_HPP

#include <span>
#include <vector>

#include "sflow/edgecost.hpp"

namespace sflow {

struct PixelCoord {
  int x = 0;
  int y = 0;
};

struct SeedDistance {
  int seed_index = 0;  // index into the seed list passed in
  double distance = 0.0;
};

// Path distance over the 4-connected grid: each step p -> q costs
// step_cost + (c(p) + c(q)) / 2, which is symmetric in p and q.
// Seed lists must be sorted by (y, x); ties in distance resolve in that order.

// Exact per-target Dijkstra over the pixel grid. Returns up to k seeds by
// increasing distance. Intended for verification and small images.
std::vector<SeedDistance> geodesicNeighborsExact(std::span<const PixelCoord> seeds,
                                                 const EdgeCostMap& cost,
                                                 int tx, int ty, int k,
                                                 double step_cost);

// One global multi-source pass that settles each pixel up to k times, once
// per distinct seed, yielding the k nearest seeds of every pixel at once.
class GeodesicField {
 public:
  GeodesicField(std::vector<PixelCoord> seeds, const EdgeCostMap& cost, int k,
                double step_cost);

  std::span<const SeedDistance> neighbors(int x, int y) const;
  const std::vector<PixelCoord>& seeds() const { return seeds_; }

 private:
  int width_ = 0, height_ = 0, k_ = 0;
  std::vector<PixelCoord> seeds_;
  std::vector<SeedDistance> entries_;  // k slots per pixel
  std::vector<int> counts_;
};

}  // namespace sflow

#endif
