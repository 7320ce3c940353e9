#ifndef SFLOW_DENSIFY_HPP
#define SFLOW_DENSIFY_HPP

#include <string>
#include <vector>

#include "sflow/edgecost.hpp"
#include "sflow/geodesic.hpp"
#include "sflow/geometry.hpp"
#include "sflow/recombination.hpp"

namespace sflow {

// A pixel with a complete valid scene-flow sample plus its 3D point pair.
struct Seed {
  int x = 0, y = 0;
  PixelSceneFlow sample;
  ScenePoint p0;  // 3D point at t
  ScenePoint p1;  // 3D point at t+1
};

// Local disparity plane d(x, y) = a*x + b*y + c over pixel coordinates.
struct PlaneModel {
  double a = 0.0, b = 0.0, c = 0.0;
  double evaluate(double x, double y) const { return a * x + b * y + c; }
};

// Local affine 3D motion P' = A * P + t.
struct AffineMotionModel {
  double A[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  double t[3] = {0, 0, 0};

  ScenePoint apply(const ScenePoint& p) const {
    ScenePoint q;
    q.X = A[0][0] * p.X + A[0][1] * p.Y + A[0][2] * p.Z + t[0];
    q.Y = A[1][0] * p.X + A[1][1] * p.Y + A[1][2] * p.Z + t[1];
    q.Z = A[2][0] * p.X + A[2][1] * p.Y + A[2][2] * p.Z + t[2];
    return q;
  }
};

enum class Variant { kKitti, kFull, kMotion, kDispAffine, kDispPlane };

Variant parseVariant(const std::string& name);
std::string variantName(Variant v);

struct DensifyParams {
  int k_geo = 25;          // geodesic neighbor count
  double alpha = 2.0;      // distance-to-weight decay, w = exp(-alpha * dist)
  double step_cost = 0.01; // base geodesic step cost
  double ridge = 1e-6;     // least-squares regularization
  Variant variant = Variant::kFull;
  bool exact_geodesic = false;  // per-target Dijkstra instead of the global pass

  void validate() const {
    if (k_geo < 4) throw ConfigError("k_geo must be >= 4");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (!(step_cost > 0.0)) throw ConfigError("step_cost must be positive");
    if (ridge < 0.0) throw ConfigError("ridge must be nonnegative");
  }
};

struct PlaneSample {
  double x = 0.0, y = 0.0;
  double value = 0.0;
  double weight = 1.0;
};

struct MotionSample {
  ScenePoint p0, p1;
  double weight = 1.0;
};

std::vector<Seed> collectSeeds(const SceneFlowImage& sfi, const CameraRig& rig);

// Weighted least-squares plane through (x, y) -> value. Falls back to the
// constant plane at the weighted mean for < 3 or collinear neighborhoods.
// The ridge acts on the (a, b) block only.
PlaneModel fitPlane(std::span<const PlaneSample> neighbors, double ridge);

// Weighted least squares for P' = A*P + t with the ridge pulling A toward
// the identity. Falls back to pure translation at the weighted mean
// displacement for < 4 neighbors or a numerically singular system.
AffineMotionModel fitAffine3d(std::span<const MotionSample> neighbors,
                              double ridge);

// KITTI-devkit-style channel-wise background fill. Disparity runs take the
// smaller bounding value, flow runs the bound nearer in x; rows without any
// valid pixel copy the nearest filled row (upper row on ties).
DisparityMap kittiFillDisparity(const DisparityMap& map);
FlowMap kittiFillFlow(const FlowMap& map);

// Fills the gaps of a sparse scene flow image; the output is fully dense.
SceneFlowImage densify(const SceneFlowImage& sfi, const EdgeCostMap& cost,
                       const CameraRig& rig, const DensifyParams& params);

}  // namespace sflow

#endif
