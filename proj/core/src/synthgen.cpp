#include "sflow/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "sflow/keyvalue.hpp"
#include "sflow/rasterio.hpp"

namespace sflow {

namespace {

bool pointInPolygon(const std::vector<std::array<double, 2>>& poly, double x, double y) {
  bool inside = false;
  size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    double xi = poly[i][0], yi = poly[i][1];
    double xj = poly[j][0], yj = poly[j][1];
    if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi)
      inside = !inside;
  }
  return inside;
}

struct Vec3 {
  double v[3];
};

Vec3 matVec(const double m[3][3], const Vec3& x) {
  Vec3 r;
  for (int i = 0; i < 3; ++i)
    r.v[i] = m[i][0] * x.v[0] + m[i][1] * x.v[1] + m[i][2] * x.v[2];
  return r;
}

Vec3 matTVec(const double m[3][3], const Vec3& x) {  // transpose multiply
  Vec3 r;
  for (int i = 0; i < 3; ++i)
    r.v[i] = m[0][i] * x.v[0] + m[1][i] * x.v[1] + m[2][i] * x.v[2];
  return r;
}

// A disparity plane d = a x + b y + c corresponds to the 3D plane
// n . P = rho with n = (a fx, b fy, a cx + b cy + c) and rho = fx * baseline.
void planeTo3d(const PlaneModel& p, const CameraRig& rig, Vec3& n, double& rho) {
  n.v[0] = p.a * rig.fx;
  n.v[1] = p.b * rig.fy;
  n.v[2] = p.a * rig.cx + p.b * rig.cy + p.c;
  rho = rig.fx * rig.baseline;
}

}  // namespace

int SceneSpec::regionAt(double x, double y) const {
  for (int i = static_cast<int>(regions.size()) - 1; i >= 0; --i)
    if (pointInPolygon(regions[i].polygon, x, y)) return i;
  return -1;
}

SynthBundle render(const SceneSpec& spec) {
  const int w = spec.width, h = spec.height;
  if (w <= 0 || h <= 0) throw ConfigError("scene spec: nonpositive image size");
  spec.rig.validate();
  if (spec.regions.empty()) throw ConfigError("scene spec: no regions");

  SynthBundle b{DisparityMap(w, h), FlowMap(w, h), DisparityMap(w, h),
                SceneFlowImage{DisparityMap(w, h), FlowMap(w, h), DisparityMap(w, h)},
                std::vector<uint8_t>(static_cast<size_t>(w) * h, 0),
                EdgeCostMap(w, h), GrayImage(w, h)};

  // Moved plane of each region, still as (n', rho') in 3D.
  std::vector<Vec3> normals(spec.regions.size());
  std::vector<double> offsets(spec.regions.size());
  for (size_t i = 0; i < spec.regions.size(); ++i) {
    Vec3 n;
    double rho;
    planeTo3d(spec.regions[i].plane, spec.rig, n, rho);
    Vec3 np = matVec(spec.regions[i].rotation, n);
    double rhop = rho + np.v[0] * spec.regions[i].translation[0] +
                  np.v[1] * spec.regions[i].translation[1] +
                  np.v[2] * spec.regions[i].translation[2];
    normals[i] = np;
    offsets[i] = rhop;
  }

  std::vector<int> label(static_cast<size_t>(w) * h, -1);

  // Reference frame: disparity, flow and gt channels are all closed-form.
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int r = spec.regionAt(x, y);
      if (r < 0) throw ConfigError("scene spec: regions do not cover pixel");
      label[static_cast<size_t>(y) * w + x] = r;

      const RegionSpec& region = spec.regions[r];
      double d = region.plane.evaluate(x, y);
      if (!(d > 0.0)) throw ConfigError("scene spec: plane yields nonpositive disparity");
      ScenePoint p = pixelToPoint(x, y, d, spec.rig);
      Vec3 moved = matVec(region.rotation, Vec3{{p.X, p.Y, p.Z}});
      for (int i = 0; i < 3; ++i) moved.v[i] += region.translation[i];
      if (!(moved.v[2] > 0.0)) throw ConfigError("scene spec: motion sends depth nonpositive");

      double x1 = spec.rig.fx * moved.v[0] / moved.v[2] + spec.rig.cx;
      double y1 = spec.rig.fy * moved.v[1] / moved.v[2] + spec.rig.cy;
      double d1 = spec.rig.fx * spec.rig.baseline / moved.v[2];

      b.d_t.set(x, y, d);
      b.flow.set(x, y, x1 - x, y1 - y);
      b.gt.d_t.set(x, y, d);
      b.gt.flow.set(x, y, x1 - x, y1 - y);
      b.gt.d_next.set(x, y, d1);
    }

  // Second frame: per pixel, intersect the ray with every moved plane, keep
  // candidates whose preimage projects back into the owning region, and let
  // the nearest surface win.
  std::vector<int> label2(static_cast<size_t>(w) * h, -1);
  for (int y2 = 0; y2 < h; ++y2)
    for (int x2 = 0; x2 < w; ++x2) {
      Vec3 dir{{(x2 - spec.rig.cx) / spec.rig.fx, (y2 - spec.rig.cy) / spec.rig.fy, 1.0}};
      double best_z = -1.0;
      int best_r = -1;
      double best_d = 0.0;
      for (size_t i = 0; i < spec.regions.size(); ++i) {
        double denom = normals[i].v[0] * dir.v[0] + normals[i].v[1] * dir.v[1] +
                       normals[i].v[2] * dir.v[2];
        if (denom == 0.0) continue;
        double z = offsets[i] / denom;
        if (!(z > 0.0)) continue;
        Vec3 pp{{dir.v[0] * z, dir.v[1] * z, z}};
        for (int c = 0; c < 3; ++c) pp.v[c] -= spec.regions[i].translation[c];
        Vec3 p = matTVec(spec.regions[i].rotation, pp);
        if (!(p.v[2] > 0.0)) continue;
        double px = spec.rig.fx * p.v[0] / p.v[2] + spec.rig.cx;
        double py = spec.rig.fy * p.v[1] / p.v[2] + spec.rig.cy;
        if (spec.regionAt(px, py) != static_cast<int>(i)) continue;
        if (best_r < 0 || z < best_z) {
          best_z = z;
          best_r = static_cast<int>(i);
          best_d = spec.rig.fx * spec.rig.baseline / z;
        }
      }
      if (best_r >= 0) {
        b.d_next_frame.set(x2, y2, best_d);
        label2[static_cast<size_t>(y2) * w + x2] = best_r;
      } else {
        b.d_next_frame.setInvalid(x2, y2);
      }
    }

  // Occlusion: the flow target must be covered by the same surface at all
  // grid neighbors the bilinear warp will touch.
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int r = label[static_cast<size_t>(y) * w + x];
      double tx = x + b.flow.u(x, y);
      double ty = y + b.flow.v(x, y);
      bool occ = false;
      if (!(tx >= 0.0 && tx <= w - 1 && ty >= 0.0 && ty <= h - 1)) {
        occ = true;
      } else {
        int x0 = static_cast<int>(std::floor(tx));
        int y0 = static_cast<int>(std::floor(ty));
        int x1 = (tx - x0) == 0.0 ? x0 : x0 + 1;
        int y1 = (ty - y0) == 0.0 ? y0 : y0 + 1;
        for (int ny : {y0, y1})
          for (int nx : {x0, x1})
            if (label2[static_cast<size_t>(ny) * w + nx] != r) occ = true;
      }
      if (occ) b.occlusion[static_cast<size_t>(y) * w + x] = 1;
    }

  // Boundary edge map: cost 1 where a 4-neighbor belongs to another region.
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int r = label[static_cast<size_t>(y) * w + x];
      bool boundary = false;
      if (x > 0 && label[static_cast<size_t>(y) * w + x - 1] != r) boundary = true;
      if (x < w - 1 && label[static_cast<size_t>(y) * w + x + 1] != r) boundary = true;
      if (y > 0 && label[static_cast<size_t>(y - 1) * w + x] != r) boundary = true;
      if (y < h - 1 && label[static_cast<size_t>(y + 1) * w + x] != r) boundary = true;
      b.edges.set(x, y, boundary ? 1.0 : 0.0);
    }

  // Deterministic per-region texture.
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int r = label[static_cast<size_t>(y) * w + x];
      double base = 0.25 + 0.5 * ((r * 2654435761u) % 1000) / 1000.0;
      double wave = 0.15 * std::sin(0.37 * x + 0.53 * y + r);
      b.texture.set(x, y, std::clamp(base + wave, 0.0, 1.0));
    }

  return b;
}

void sparsify(SynthBundle& bundle, double rho, uint64_t seed) {
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("sparsify: rho must be in [0, 1)");
  if (rho == 0.0) return;

  std::vector<std::pair<int, int>> valid;
  for (int y = 0; y < bundle.d_next_frame.height(); ++y)
    for (int x = 0; x < bundle.d_next_frame.width(); ++x)
      if (bundle.d_next_frame.isValid(x, y)) valid.emplace_back(x, y);

  std::mt19937_64 rng(seed);
  std::shuffle(valid.begin(), valid.end(), rng);
  size_t n = static_cast<size_t>(std::llround(rho * static_cast<double>(valid.size())));
  for (size_t i = 0; i < n && i < valid.size(); ++i)
    bundle.d_next_frame.setInvalid(valid[i].first, valid[i].second);
}

SceneSpec parseSceneSpec(const std::string& text) {
  KeyValueFile file = parseKeyValue(text);
  const KeyValueSection& g = file.global();

  SceneSpec spec;
  spec.width = g.getInt("width", 0);
  spec.height = g.getInt("height", 0);
  spec.rig.fx = g.requireDouble("fx");
  spec.rig.fy = g.requireDouble("fy");
  spec.rig.cx = g.requireDouble("cx");
  spec.rig.cy = g.requireDouble("cy");
  spec.rig.baseline = g.requireDouble("baseline");
  spec.occlusion_fraction = g.getDouble("occlusion_fraction", 0.0);
  spec.seed = static_cast<uint64_t>(g.getDouble("seed", 0.0));

  for (const KeyValueSection* sec : file.named("region")) {
    RegionSpec region;
    std::vector<double> poly = sec->getDoubles("polygon");
    if (poly.size() < 6 || poly.size() % 2 != 0)
      throw ConfigError("region polygon needs at least 3 x,y vertex pairs");
    for (size_t i = 0; i < poly.size(); i += 2)
      region.polygon.push_back({poly[i], poly[i + 1]});

    std::vector<double> plane = sec->getDoubles("plane");
    if (plane.size() != 3) throw ConfigError("region plane needs 3 coefficients");
    region.plane = {plane[0], plane[1], plane[2]};

    if (sec->get("rotation")) {
      std::vector<double> rot = sec->getDoubles("rotation");
      if (rot.size() != 9) throw ConfigError("region rotation needs 9 entries");
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) region.rotation[r][c] = rot[r * 3 + c];
    } else if (sec->get("axis_angle")) {
      std::vector<double> aa = sec->getDoubles("axis_angle");
      if (aa.size() != 4) throw ConfigError("axis_angle needs ax ay az theta");
      double norm = std::sqrt(aa[0] * aa[0] + aa[1] * aa[1] + aa[2] * aa[2]);
      if (norm == 0.0) throw ConfigError("axis_angle needs a nonzero axis");
      double kx = aa[0] / norm, ky = aa[1] / norm, kz = aa[2] / norm;
      double ct = std::cos(aa[3]), st = std::sin(aa[3]);
      double k[3] = {kx, ky, kz};
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
          double kk = k[r] * k[c] * (1.0 - ct);
          region.rotation[r][c] = kk + (r == c ? ct : 0.0);
        }
      region.rotation[0][1] -= st * kz;
      region.rotation[0][2] += st * ky;
      region.rotation[1][0] += st * kz;
      region.rotation[1][2] -= st * kx;
      region.rotation[2][0] -= st * ky;
      region.rotation[2][1] += st * kx;
    }

    if (sec->get("translation")) {
      std::vector<double> t = sec->getDoubles("translation");
      if (t.size() != 3) throw ConfigError("region translation needs 3 entries");
      for (int i = 0; i < 3; ++i) region.translation[i] = t[i];
    }
    spec.regions.push_back(std::move(region));
  }
  if (spec.regions.empty()) throw ConfigError("scene spec: no [region] blocks");
  return spec;
}

SceneSpec loadSceneSpec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scene spec: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parseSceneSpec(buf.str());
}

void writeBundle(const SynthBundle& bundle, const std::string& out_dir,
                 const std::string& frame) {
  namespace fs = std::filesystem;
  auto dir = [&](const std::string& sub) {
    fs::path p = fs::path(out_dir) / sub;
    fs::create_directories(p);
    return p;
  };

  writeDisparity(bundle.d_t, (dir("disp_0") / (frame + "_10.png")).string());
  writeDisparity(bundle.d_next_frame, (dir("disp_1") / (frame + "_11.png")).string());
  writeFlow(bundle.flow, (dir("flow") / (frame + "_10.png")).string());
  writeGray(bundle.texture, (dir("image") / (frame + "_10.png")).string());
  writeEdgeMap(bundle.edges, (dir("edges") / (frame + "_10.png")).string());

  writeDisparity(bundle.gt.d_t, (dir("gt/disp_0") / (frame + "_10.png")).string());
  writeDisparity(bundle.gt.d_next, (dir("gt/disp_1") / (frame + "_10.png")).string());
  writeFlow(bundle.gt.flow, (dir("gt/flow") / (frame + "_10.png")).string());

  ScalarMap occ(bundle.gt.width(), bundle.gt.height());
  for (int y = 0; y < occ.height(); ++y)
    for (int x = 0; x < occ.width(); ++x)
      occ.set(x, y, bundle.occluded(x, y) ? 1.0 : 0.0);
  writeMask(occ, (dir("occ") / (frame + "_10.png")).string());
}

}  // namespace sflow
