#ifndef SFLOW_EDGECOST_HPP
#define SFLOW_EDGECOST_HPP

#include <string>
#include <vector>

#include "sflow/image.hpp"

namespace sflow {

// Nonnegative per-pixel boundary cost in [0, 1] steering geodesic distances.
class EdgeCostMap {
 public:
  EdgeCostMap() = default;
  EdgeCostMap(int width, int height)
      : width_(width), height_(height),
        cost_(static_cast<size_t>(width) * height, 0.0) {
    if (width <= 0 || height <= 0) throw ShapeError("EdgeCostMap: nonpositive size");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  double get(int x, int y) const { return cost_[static_cast<size_t>(y) * width_ + x]; }
  void set(int x, int y, double c) { cost_[static_cast<size_t>(y) * width_ + x] = c; }

 private:
  int width_ = 0, height_ = 0;
  std::vector<double> cost_;
};

// Central-difference gradient magnitude (one-sided at borders), normalized by
// its 95th percentile and clipped to [0, 1]. Constant images give all zeros.
EdgeCostMap gradientEdgeCost(const GrayImage& img);

// Single-channel 8-bit PNG, cost = stored / 255. Lets users plug in
// externally computed edge maps (e.g. a learned detector).
EdgeCostMap loadEdgeMap(const std::string& path);

void writeEdgeMap(const EdgeCostMap& cost, const std::string& path);

}  // namespace sflow

#endif
