#include "sflow/geometry.hpp"

namespace sflow {

double disparityToDepth(double d, const CameraRig& rig) {
  if (!(d > 0.0)) throw DomainError("disparityToDepth: d must be positive");
  return rig.fx * rig.baseline / d;
}

double depthToDisparity(double z, const CameraRig& rig) {
  if (!(z > 0.0)) throw DomainError("depthToDisparity: Z must be positive");
  return rig.fx * rig.baseline / z;
}

ScenePoint pixelToPoint(double x, double y, double d, const CameraRig& rig) {
  double Z = disparityToDepth(d, rig);
  ScenePoint p;
  p.X = (x - rig.cx) * Z / rig.fx;
  p.Y = (y - rig.cy) * Z / rig.fy;
  p.Z = Z;
  return p;
}

void pointToPixel(const ScenePoint& p, const CameraRig& rig,
                  double& x, double& y, double& d) {
  if (!(p.Z > 0.0)) throw DomainError("pointToPixel: Z must be positive");
  x = rig.fx * p.X / p.Z + rig.cx;
  y = rig.fy * p.Y / p.Z + rig.cy;
  d = rig.fx * rig.baseline / p.Z;
}

SceneFlow3D imageToWorld(double x, double y, const PixelSceneFlow& sf,
                         const CameraRig& rig) {
  ScenePoint p0 = pixelToPoint(x, y, sf.d_t, rig);
  ScenePoint p1 = pixelToPoint(x + sf.u, y + sf.v, sf.d_next, rig);
  SceneFlow3D out;
  out.position = p0;
  out.dX = p1.X - p0.X;
  out.dY = p1.Y - p0.Y;
  out.dZ = p1.Z - p0.Z;
  return out;
}

void worldToImage(const SceneFlow3D& sf3d, const CameraRig& rig,
                  double& x, double& y, PixelSceneFlow& sf) {
  ScenePoint p1{sf3d.position.X + sf3d.dX, sf3d.position.Y + sf3d.dY,
                sf3d.position.Z + sf3d.dZ};
  double x1, y1;
  pointToPixel(sf3d.position, rig, x, y, sf.d_t);
  pointToPixel(p1, rig, x1, y1, sf.d_next);
  sf.u = x1 - x;
  sf.v = y1 - y;
}

}  // namespace sflow
