#ifndef SFLOW_RECOMBINATION_HPP
#define SFLOW_RECOMBINATION_HPP

#include <optional>

#include "sflow/image.hpp"

namespace sflow {

// Image-space scene flow: aligned d_t, (u, v), d_next channels with
// independent per-channel validity. The disparity change is derived as
// d_next - d_t wherever both disparities are valid; it is never stored.
struct SceneFlowImage {
  DisparityMap d_t;
  FlowMap flow;
  DisparityMap d_next;

  int width() const { return d_t.width(); }
  int height() const { return d_t.height(); }

  bool fullyValid(int x, int y) const {
    return d_t.isValid(x, y) && flow.isValid(x, y) && d_next.isValid(x, y);
  }
  std::optional<double> deltaD(int x, int y) const {
    if (d_t.isValid(x, y) && d_next.isValid(x, y))
      return d_next.get(x, y) - d_t.get(x, y);
    return std::nullopt;
  }
};

// Bilinear blend of the four integer-grid neighbors of (x, y). Returns
// nothing when (x, y) leaves [0, W-1] x [0, H-1] or any neighbor is invalid.
std::optional<double> bilinearSample(const DisparityMap& map, double x, double y);

// Backward warp of the next-frame disparity along the flow:
// out(x, y) = sample(d_next_frame, x + u, y + v).
DisparityMap warpDisparity(const DisparityMap& d_next_frame, const FlowMap& flow);

// Channel-wise assembly; each input keeps its own validity.
SceneFlowImage combine(const DisparityMap& d_t, const FlowMap& flow,
                       const DisparityMap& warped);

// Fraction of pixels where all four channels are valid.
double density(const SceneFlowImage& sfi);

}  // namespace sflow

#endif
