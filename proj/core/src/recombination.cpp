#include "sflow/recombination.hpp"

#include <cmath>

namespace sflow {

std::optional<double> bilinearSample(const DisparityMap& map, double x, double y) {
  if (!(x >= 0.0 && x <= map.width() - 1 && y >= 0.0 && y <= map.height() - 1))
    return std::nullopt;

  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  double fx = x - x0;
  double fy = y - y0;
  // Zero-weight neighbors do not participate, so integer coordinates
  // degenerate to plain lookup and the zero-flow warp stays an identity.
  int x1 = fx == 0.0 ? x0 : x0 + 1;
  int y1 = fy == 0.0 ? y0 : y0 + 1;

  if (!map.isValid(x0, y0) || !map.isValid(x1, y0) ||
      !map.isValid(x0, y1) || !map.isValid(x1, y1))
    return std::nullopt;
  double top = (1.0 - fx) * map.get(x0, y0) + fx * map.get(x1, y0);
  double bot = (1.0 - fx) * map.get(x0, y1) + fx * map.get(x1, y1);
  return (1.0 - fy) * top + fy * bot;
}

DisparityMap warpDisparity(const DisparityMap& d_next_frame, const FlowMap& flow) {
  requireSameShape(d_next_frame.width(), d_next_frame.height(),
                   flow.width(), flow.height(), "warpDisparity");
  DisparityMap out(d_next_frame.width(), d_next_frame.height());
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x) {
      if (!flow.isValid(x, y)) {
        out.setInvalid(x, y);
        continue;
      }
      auto s = bilinearSample(d_next_frame, x + flow.u(x, y), y + flow.v(x, y));
      if (s)
        out.set(x, y, *s);
      else
        out.setInvalid(x, y);
    }
  return out;
}

SceneFlowImage combine(const DisparityMap& d_t, const FlowMap& flow,
                       const DisparityMap& warped) {
  requireSameShape(d_t.width(), d_t.height(), flow.width(), flow.height(), "combine");
  requireSameShape(d_t.width(), d_t.height(), warped.width(), warped.height(), "combine");
  return SceneFlowImage{d_t, flow, warped};
}

double density(const SceneFlowImage& sfi) {
  size_t full = 0;
  size_t total = static_cast<size_t>(sfi.width()) * sfi.height();
  for (int y = 0; y < sfi.height(); ++y)
    for (int x = 0; x < sfi.width(); ++x)
      if (sfi.fullyValid(x, y)) ++full;
  return total == 0 ? 0.0 : static_cast<double>(full) / static_cast<double>(total);
}

}  // namespace sflow
