#include "sflow/densify.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <memory>

namespace sflow {

Variant parseVariant(const std::string& name) {
  if (name == "kitti") return Variant::kKitti;
  if (name == "full") return Variant::kFull;
  if (name == "motion") return Variant::kMotion;
  if (name == "disp_affine" || name == "disp-affine") return Variant::kDispAffine;
  if (name == "disp_plane" || name == "disp-plane") return Variant::kDispPlane;
  throw ConfigError("unknown variant: " + name);
}

std::string variantName(Variant v) {
  switch (v) {
    case Variant::kKitti: return "kitti";
    case Variant::kFull: return "full";
    case Variant::kMotion: return "motion";
    case Variant::kDispAffine: return "disp_affine";
    case Variant::kDispPlane: return "disp_plane";
  }
  return "?";
}

std::vector<Seed> collectSeeds(const SceneFlowImage& sfi, const CameraRig& rig) {
  std::vector<Seed> seeds;
  for (int y = 0; y < sfi.height(); ++y)
    for (int x = 0; x < sfi.width(); ++x) {
      if (!sfi.fullyValid(x, y)) continue;
      Seed s;
      s.x = x;
      s.y = y;
      s.sample.u = sfi.flow.u(x, y);
      s.sample.v = sfi.flow.v(x, y);
      s.sample.d_t = sfi.d_t.get(x, y);
      s.sample.d_next = sfi.d_next.get(x, y);
      if (!(s.sample.d_t > 0.0 && s.sample.d_next > 0.0)) continue;
      s.p0 = pixelToPoint(x, y, s.sample.d_t, rig);
      s.p1 = pixelToPoint(x + s.sample.u, y + s.sample.v, s.sample.d_next, rig);
      seeds.push_back(s);
    }
  return seeds;  // scan order == sorted by (y, x)
}

PlaneModel fitPlane(std::span<const PlaneSample> neighbors, double ridge) {
  if (neighbors.empty()) throw NoDataError("fitPlane: no neighbors");

  double wsum = 0.0, vmean = 0.0;
  for (const auto& s : neighbors) {
    wsum += s.weight;
    vmean += s.weight * s.value;
  }
  vmean = wsum > 0.0 ? vmean / wsum : 0.0;

  auto constant = [&] { return PlaneModel{0.0, 0.0, vmean}; };
  if (neighbors.size() < 3) return constant();

  // Collinearity test on the weighted (x, y) scatter.
  double mx = 0.0, my = 0.0;
  for (const auto& s : neighbors) {
    mx += s.weight * s.x;
    my += s.weight * s.y;
  }
  mx /= wsum;
  my /= wsum;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& s : neighbors) {
    sxx += s.weight * (s.x - mx) * (s.x - mx);
    sxy += s.weight * (s.x - mx) * (s.y - my);
    syy += s.weight * (s.y - my) * (s.y - my);
  }
  double tr = sxx + syy;
  double det = sxx * syy - sxy * sxy;
  // Smallest eigenvalue of the 2x2 scatter; near zero means collinear pixels.
  double lmin = 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
  if (lmin <= 1e-9 * (tr + 1.0)) return constant();

  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (const auto& s : neighbors) {
    Eigen::Vector3d phi(s.x, s.y, 1.0);
    m += s.weight * phi * phi.transpose();
    rhs += s.weight * s.value * phi;
  }
  m(0, 0) += ridge;
  m(1, 1) += ridge;

  Eigen::Vector3d beta = m.ldlt().solve(rhs);
  if (!beta.allFinite()) return constant();
  return PlaneModel{beta(0), beta(1), beta(2)};
}

AffineMotionModel fitAffine3d(std::span<const MotionSample> neighbors, double ridge) {
  if (neighbors.empty()) throw NoDataError("fitAffine3d: no neighbors");

  double wsum = 0.0;
  double tmean[3] = {0.0, 0.0, 0.0};
  for (const auto& s : neighbors) {
    wsum += s.weight;
    tmean[0] += s.weight * (s.p1.X - s.p0.X);
    tmean[1] += s.weight * (s.p1.Y - s.p0.Y);
    tmean[2] += s.weight * (s.p1.Z - s.p0.Z);
  }
  AffineMotionModel translation;
  if (wsum > 0.0)
    for (int i = 0; i < 3; ++i) translation.t[i] = tmean[i] / wsum;
  if (neighbors.size() < 4) return translation;

  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  Eigen::Matrix<double, 4, 3> rhs = Eigen::Matrix<double, 4, 3>::Zero();
  for (const auto& s : neighbors) {
    Eigen::Vector4d psi(s.p0.X, s.p0.Y, s.p0.Z, 1.0);
    m += s.weight * psi * psi.transpose();
    Eigen::Vector3d target(s.p1.X, s.p1.Y, s.p1.Z);
    rhs += s.weight * psi * target.transpose();
  }
  // Ridge pulls A toward the identity, which keeps rank-deficient (coplanar)
  // neighborhoods solvable and exact for in-plane predictions.
  for (int i = 0; i < 3; ++i) {
    m(i, i) += ridge;
    rhs(i, i) += ridge;
  }

  if (ridge <= 0.0) {
    Eigen::FullPivLU<Eigen::Matrix4d> lu(m);
    if (lu.rank() < 4) return translation;
  }
  Eigen::Matrix<double, 4, 3> sol = m.ldlt().solve(rhs);
  if (!sol.allFinite()) return translation;

  AffineMotionModel out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out.A[r][c] = sol(c, r);
    out.t[r] = sol(3, r);
  }
  return out;
}

namespace {

struct Run {
  int begin = 0, end = 0;  // [begin, end) of invalid pixels
  int left = -1, right = -1;  // bounding valid columns, -1 at the border
};

std::vector<Run> invalidRuns(const ScalarMap& map, int y) {
  std::vector<Run> runs;
  int x = 0;
  while (x < map.width()) {
    if (map.isValid(x, y)) {
      ++x;
      continue;
    }
    Run r;
    r.begin = x;
    while (x < map.width() && !map.isValid(x, y)) ++x;
    r.end = x;
    r.left = r.begin > 0 ? r.begin - 1 : -1;
    r.right = r.end < map.width() ? r.end : -1;
    runs.push_back(r);
  }
  return runs;
}

int nearestFilledRow(const std::vector<uint8_t>& has_data, int y) {
  for (int d = 1; d < static_cast<int>(has_data.size()); ++d) {
    if (y - d >= 0 && has_data[y - d]) return y - d;  // upper row wins ties
    if (y + d < static_cast<int>(has_data.size()) && has_data[y + d]) return y + d;
  }
  return -1;
}

}  // namespace

DisparityMap kittiFillDisparity(const DisparityMap& map) {
  if (map.validCount() == 0) throw NoDataError("kittiFillDisparity: fully invalid map");
  DisparityMap out = map;
  std::vector<uint8_t> has_data(map.height(), 0);

  for (int y = 0; y < map.height(); ++y) {
    bool any = false;
    for (int x = 0; x < map.width(); ++x)
      if (map.isValid(x, y)) any = true;
    has_data[y] = any;
    if (!any) continue;
    for (const Run& r : invalidRuns(map, y)) {
      double fill;
      if (r.left >= 0 && r.right >= 0)
        fill = std::min(map.get(r.left, y), map.get(r.right, y));  // background wins
      else if (r.left >= 0)
        fill = map.get(r.left, y);
      else
        fill = map.get(r.right, y);
      for (int x = r.begin; x < r.end; ++x) out.set(x, y, fill);
    }
  }

  for (int y = 0; y < map.height(); ++y) {
    if (has_data[y]) continue;
    int src = nearestFilledRow(has_data, y);
    for (int x = 0; x < map.width(); ++x) out.set(x, y, out.get(x, src));
  }
  return out;
}

FlowMap kittiFillFlow(const FlowMap& map) {
  if (map.validCount() == 0) throw NoDataError("kittiFillFlow: fully invalid map");
  FlowMap out = map;
  std::vector<uint8_t> has_data(map.height(), 0);

  // Runs are computed on a validity view of the flow.
  ScalarMap validity(map.width(), map.height());
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x)
      if (map.isValid(x, y)) validity.set(x, y, 1.0);

  for (int y = 0; y < map.height(); ++y) {
    bool any = false;
    for (int x = 0; x < map.width(); ++x)
      if (map.isValid(x, y)) any = true;
    has_data[y] = any;
    if (!any) continue;
    for (const Run& r : invalidRuns(validity, y)) {
      for (int x = r.begin; x < r.end; ++x) {
        int src;
        if (r.left >= 0 && r.right >= 0)
          src = (x - r.left <= r.right - x) ? r.left : r.right;  // nearer in x
        else
          src = r.left >= 0 ? r.left : r.right;
        out.set(x, y, map.u(src, y), map.v(src, y));
      }
    }
  }

  for (int y = 0; y < map.height(); ++y) {
    if (has_data[y]) continue;
    int src = nearestFilledRow(has_data, y);
    for (int x = 0; x < map.width(); ++x) out.set(x, y, out.u(x, src), out.v(x, src));
  }
  return out;
}

namespace {

// Uniform access to exact per-target and precomputed neighbor retrieval.
class NeighborProvider {
 public:
  NeighborProvider(const std::vector<Seed>& seeds, const EdgeCostMap& cost,
                   const DensifyParams& params)
      : seeds_(seeds), cost_(cost), params_(params) {
    coords_.reserve(seeds.size());
    for (const Seed& s : seeds) coords_.push_back({s.x, s.y});
    if (!params.exact_geodesic)
      field_ = std::make_unique<GeodesicField>(coords_, cost, params.k_geo,
                                               params.step_cost);
  }

  std::vector<SeedDistance> query(int x, int y) const {
    if (field_) {
      auto span = field_->neighbors(x, y);
      return {span.begin(), span.end()};
    }
    return geodesicNeighborsExact(coords_, cost_, x, y, params_.k_geo,
                                  params_.step_cost);
  }

 private:
  const std::vector<Seed>& seeds_;
  const EdgeCostMap& cost_;
  const DensifyParams& params_;
  std::vector<PixelCoord> coords_;
  std::unique_ptr<GeodesicField> field_;
};

constexpr double kMinDisparity = 1e-3;

}  // namespace

SceneFlowImage densify(const SceneFlowImage& sfi, const EdgeCostMap& cost,
                       const CameraRig& rig, const DensifyParams& params) {
  params.validate();

  if (params.variant == Variant::kKitti) {
    SceneFlowImage out;
    out.d_t = kittiFillDisparity(sfi.d_t);
    out.flow = kittiFillFlow(sfi.flow);
    out.d_next = kittiFillDisparity(sfi.d_next);
    return out;
  }

  requireSameShape(sfi.width(), sfi.height(), cost.width(), cost.height(), "densify");
  std::vector<Seed> seeds = collectSeeds(sfi, rig);
  if (seeds.empty()) throw NoDataError("densify: no seeds (no fully valid pixel)");

  NeighborProvider provider(seeds, cost, params);
  SceneFlowImage out = sfi;

  for (int y = 0; y < sfi.height(); ++y)
    for (int x = 0; x < sfi.width(); ++x) {
      bool gap = !sfi.d_next.isValid(x, y);  // d_next gaps drive the variants
      bool need_dt = !sfi.d_t.isValid(x, y);
      bool need_flow = !sfi.flow.isValid(x, y);
      bool replace_all = gap && params.variant == Variant::kFull;
      if (!gap && !need_dt && !need_flow) continue;

      std::vector<SeedDistance> nb = provider.query(x, y);
      std::vector<double> weights(nb.size());
      for (size_t i = 0; i < nb.size(); ++i)
        weights[i] = std::exp(-params.alpha * nb[i].distance);

      auto plane_on = [&](auto value_of) {
        std::vector<PlaneSample> samples(nb.size());
        for (size_t i = 0; i < nb.size(); ++i) {
          const Seed& s = seeds[nb[i].seed_index];
          samples[i] = {static_cast<double>(s.x), static_cast<double>(s.y),
                        value_of(s), weights[i]};
        }
        return fitPlane(samples, params.ridge);
      };

      // Reference disparity at this pixel, interpolated where needed.
      double d_t_here;
      if (replace_all || need_dt) {
        PlaneModel plane = plane_on([](const Seed& s) { return s.sample.d_t; });
        d_t_here = std::max(plane.evaluate(x, y), kMinDisparity);
        out.d_t.set(x, y, d_t_here);
      } else {
        d_t_here = sfi.d_t.get(x, y);
      }

      bool fill_flow = replace_all || need_flow;
      bool fill_dnext_affine =
          (gap || !sfi.d_next.isValid(x, y)) && params.variant != Variant::kDispPlane;

      if (fill_flow || fill_dnext_affine) {
        std::vector<MotionSample> motion(nb.size());
        for (size_t i = 0; i < nb.size(); ++i) {
          const Seed& s = seeds[nb[i].seed_index];
          motion[i] = {s.p0, s.p1, weights[i]};
        }
        AffineMotionModel model = fitAffine3d(motion, params.ridge);
        ScenePoint p = pixelToPoint(x, y, d_t_here, rig);
        ScenePoint q = model.apply(p);
        if (!(q.Z > 0.0)) q.Z = p.Z;  // degenerate fit; keep depth sane
        double qx = rig.fx * q.X / q.Z + rig.cx;
        double qy = rig.fy * q.Y / q.Z + rig.cy;
        if (fill_flow) out.flow.set(x, y, qx - x, qy - y);
        if (fill_dnext_affine)
          out.d_next.set(x, y, std::max(rig.fx * rig.baseline / q.Z, kMinDisparity));
      }

      if (gap && params.variant == Variant::kDispPlane) {
        PlaneModel plane = plane_on([](const Seed& s) { return s.sample.d_next; });
        out.d_next.set(x, y, std::max(plane.evaluate(x, y), kMinDisparity));
      }
    }

  return out;
}

}  // namespace sflow
