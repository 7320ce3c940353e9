#ifndef SFLOW_VIZ_HPP
#define SFLOW_VIZ_HPP

#include <string>

#include "sflow/geometry.hpp"
#include "sflow/recombination.hpp"

namespace sflow {

// Optical-flow color wheel: hue = direction, saturation = magnitude capped at
// max_mag. Zero flow renders white, invalid pixels black. max_mag <= 0 means
// auto (99th-percentile magnitude).
ColorRaster flowToColor(const FlowMap& flow, double max_mag = 0.0);

// Monotone colormap over [min_valid, max_valid]; invalid pixels black.
ColorRaster disparityToColor(const DisparityMap& map);

// ASCII PLY of the time-t point cloud; vertex color blends green (slow) to
// red (fast) by |displacement|, normalized to the 99th-percentile speed.
// Pixels without motion channels come out gray.
void exportPointcloud(const SceneFlowImage& sfi, const CameraRig& rig,
                      const std::string& path);

}  // namespace sflow

#endif
