#ifndef SFLOW_SYNTHGEN_HPP
#define SFLOW_SYNTHGEN_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sflow/densify.hpp"
#include "sflow/edgecost.hpp"
#include "sflow/geometry.hpp"
#include "sflow/recombination.hpp"

namespace sflow {

// Piecewise-planar rigid scene with closed-form ground truth. Each region is
// a pixel-domain polygon carrying a disparity plane and a rigid motion.
struct RegionSpec {
  std::vector<std::array<double, 2>> polygon;
  PlaneModel plane;                     // disparity at time t
  double rotation[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  double translation[3] = {0, 0, 0};    // meters
};

struct SceneSpec {
  int width = 0, height = 0;
  CameraRig rig;
  std::vector<RegionSpec> regions;
  double occlusion_fraction = 0.0;  // extra d_{t+1} invalidation, applied by sparsify
  uint64_t seed = 0;

  // Index of the visible region at a point: the last polygon containing it.
  // Returns -1 if no region covers the point.
  int regionAt(double x, double y) const;
};

struct SynthBundle {
  DisparityMap d_t;
  FlowMap flow;
  DisparityMap d_next_frame;  // disparity with reference to time t+1
  SceneFlowImage gt;          // dense ground truth in the reference frame
  std::vector<uint8_t> occlusion;  // 1 where the flow target is not visible
  EdgeCostMap edges;          // 1 on region boundaries
  GrayImage texture;

  bool occluded(int x, int y) const {
    return occlusion[static_cast<size_t>(y) * gt.width() + x] != 0;
  }
};

SynthBundle render(const SceneSpec& spec);

// Invalidates an extra rho-fraction of the valid d_{t+1} pixels, chosen
// uniformly and deterministically from the seed. Ground truth is untouched.
void sparsify(SynthBundle& bundle, double rho, uint64_t seed);

SceneSpec parseSceneSpec(const std::string& text);
SceneSpec loadSceneSpec(const std::string& path);

// Writes the bundle via the standard rasters under the KITTI-style layout:
// disp_0/, disp_1/, flow/, image/, edges/, occ/ and gt/{disp_0,disp_1,flow}/.
void writeBundle(const SynthBundle& bundle, const std::string& out_dir,
                 const std::string& frame = "000000");

}  // namespace sflow

#endif
