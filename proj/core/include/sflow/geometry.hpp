#ifndef SFLOW_GEOMETRY_HPP
#define SFLOW_GEOMETRY_HPP

#include "sflow/errors.hpp"

namespace sflow {

// Rectified stereo rig; extrinsics reduce to the horizontal baseline.
struct CameraRig {
  double fx = 0.0;  // focal length, pixels
  double fy = 0.0;
  double cx = 0.0;  // principal point, pixels
  double cy = 0.0;
  double baseline = 0.0;  // meters

  void validate() const {
    if (!(fx > 0.0 && fy > 0.0 && baseline > 0.0))
      throw ConfigError("camera rig requires fx > 0, fy > 0, baseline > 0");
  }
};

struct ScenePoint {
  double X = 0.0, Y = 0.0, Z = 0.0;  // meters, camera frame at time t
};

// World-space scene flow sample: 3D position at t plus 3D displacement to t+1.
struct SceneFlow3D {
  ScenePoint position;
  double dX = 0.0, dY = 0.0, dZ = 0.0;
};

// Image-space scene flow sample at a pixel.
struct PixelSceneFlow {
  double u = 0.0, v = 0.0;      // optical flow, pixels
  double d_t = 0.0;             // reference disparity, pixels
  double d_next = 0.0;          // warped next-frame disparity, pixels
};

double disparityToDepth(double d, const CameraRig& rig);
double depthToDisparity(double z, const CameraRig& rig);

ScenePoint pixelToPoint(double x, double y, double d, const CameraRig& rig);

// Projects a 3D point back to pixel coordinates (and disparity).
void pointToPixel(const ScenePoint& p, const CameraRig& rig,
                  double& x, double& y, double& d);

SceneFlow3D imageToWorld(double x, double y, const PixelSceneFlow& sf,
                         const CameraRig& rig);

// Inverse of imageToWorld; also recovers the pixel position.
void worldToImage(const SceneFlow3D& sf3d, const CameraRig& rig,
                  double& x, double& y, PixelSceneFlow& sf);

}  // namespace sflow

#endif
