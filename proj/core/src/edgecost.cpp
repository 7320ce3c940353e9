#include "sflow/edgecost.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sflow/rasterio.hpp"

namespace sflow {

EdgeCostMap gradientEdgeCost(const GrayImage& img) {
  const int w = img.width(), h = img.height();
  std::vector<double> mag(static_cast<size_t>(w) * h);

  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double gx, gy;
      if (w == 1)
        gx = 0.0;
      else if (x == 0)
        gx = img.get(1, y) - img.get(0, y);
      else if (x == w - 1)
        gx = img.get(w - 1, y) - img.get(w - 2, y);
      else
        gx = 0.5 * (img.get(x + 1, y) - img.get(x - 1, y));
      if (h == 1)
        gy = 0.0;
      else if (y == 0)
        gy = img.get(x, 1) - img.get(x, 0);
      else if (y == h - 1)
        gy = img.get(x, h - 1) - img.get(x, h - 2);
      else
        gy = 0.5 * (img.get(x, y + 1) - img.get(x, y - 1));
      mag[static_cast<size_t>(y) * w + x] = std::hypot(gx, gy);
    }

  std::vector<double> sorted = mag;
  std::sort(sorted.begin(), sorted.end());
  size_t q_idx = static_cast<size_t>(std::floor(0.95 * (sorted.size() - 1)));
  double q95 = sorted[q_idx];

  EdgeCostMap cost(w, h);
  if (q95 <= 0.0) return cost;  // flat image: cost stays zero
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      cost.set(x, y, std::min(1.0, mag[static_cast<size_t>(y) * w + x] / q95));
  return cost;
}

EdgeCostMap loadEdgeMap(const std::string& path) {
  GrayImage g = readGrayStrict(path);
  EdgeCostMap cost(g.width(), g.height());
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) cost.set(x, y, g.get(x, y));
  return cost;
}

void writeEdgeMap(const EdgeCostMap& cost, const std::string& path) {
  GrayImage g(cost.width(), cost.height());
  for (int y = 0; y < cost.height(); ++y)
    for (int x = 0; x < cost.width(); ++x) g.set(x, y, cost.get(x, y));
  writeGray(g, path);
}

}  // namespace sflow
