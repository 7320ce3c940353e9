#include "sflow/viz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "sflow/errors.hpp"

namespace sflow {

namespace {

double percentile99(std::vector<double>& values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  size_t idx = static_cast<size_t>(std::floor(0.99 * (values.size() - 1)));
  return values[idx];
}

void hsvToRgb(double h, double s, double v, uint8_t& r, uint8_t& g, uint8_t& b) {
  // h in [0, 1)
  double hf = h * 6.0;
  int i = static_cast<int>(std::floor(hf)) % 6;
  double f = hf - std::floor(hf);
  double p = v * (1.0 - s);
  double q = v * (1.0 - s * f);
  double t = v * (1.0 - s * (1.0 - f));
  double rr, gg, bb;
  switch (i) {
    case 0: rr = v; gg = t; bb = p; break;
    case 1: rr = q; gg = v; bb = p; break;
    case 2: rr = p; gg = v; bb = t; break;
    case 3: rr = p; gg = q; bb = v; break;
    case 4: rr = t; gg = p; bb = v; break;
    default: rr = v; gg = p; bb = q; break;
  }
  r = static_cast<uint8_t>(std::lround(rr * 255.0));
  g = static_cast<uint8_t>(std::lround(gg * 255.0));
  b = static_cast<uint8_t>(std::lround(bb * 255.0));
}

}  // namespace

ColorRaster flowToColor(const FlowMap& flow, double max_mag) {
  if (max_mag <= 0.0) {
    std::vector<double> mags;
    for (int y = 0; y < flow.height(); ++y)
      for (int x = 0; x < flow.width(); ++x)
        if (flow.isValid(x, y)) mags.push_back(std::hypot(flow.u(x, y), flow.v(x, y)));
    max_mag = percentile99(mags);
    if (max_mag <= 0.0) max_mag = 1.0;
  }

  ColorRaster out(flow.width(), flow.height());
  for (int y = 0; y < flow.height(); ++y)
    for (int x = 0; x < flow.width(); ++x) {
      if (!flow.isValid(x, y)) {
        out.set(x, y, 0, 0, 0);
        continue;
      }
      double u = flow.u(x, y), v = flow.v(x, y);
      double mag = std::hypot(u, v);
      double hue = std::atan2(v, u) / (2.0 * M_PI);
      if (hue < 0.0) hue += 1.0;
      double sat = std::min(1.0, mag / max_mag);
      uint8_t r, g, b;
      hsvToRgb(hue, sat, 1.0, r, g, b);
      out.set(x, y, r, g, b);
    }
  return out;
}

namespace {

// Monotone-luminance colormap control points (dark to bright).
const uint8_t kDispMap[5][3] = {
    {0, 0, 4}, {87, 16, 110}, {188, 55, 84}, {249, 142, 9}, {252, 255, 164}};

void colormap(double t, uint8_t& r, uint8_t& g, uint8_t& b) {
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  int i = std::min(static_cast<int>(std::floor(t)), 3);
  double f = t - i;
  r = static_cast<uint8_t>(std::lround(kDispMap[i][0] + f * (kDispMap[i + 1][0] - kDispMap[i][0])));
  g = static_cast<uint8_t>(std::lround(kDispMap[i][1] + f * (kDispMap[i + 1][1] - kDispMap[i][1])));
  b = static_cast<uint8_t>(std::lround(kDispMap[i][2] + f * (kDispMap[i + 1][2] - kDispMap[i][2])));
}

}  // namespace

ColorRaster disparityToColor(const DisparityMap& map) {
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x) {
      if (!map.isValid(x, y)) continue;
      double d = map.get(x, y);
      if (!any) {
        lo = hi = d;
        any = true;
      } else {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
    }
  if (!any) throw NoDataError("disparityToColor: fully invalid map");

  ColorRaster out(map.width(), map.height());
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x) {
      if (!map.isValid(x, y)) {
        out.set(x, y, 0, 0, 0);
        continue;
      }
      double t = hi > lo ? (map.get(x, y) - lo) / (hi - lo) : 0.0;
      uint8_t r, g, b;
      colormap(t, r, g, b);
      out.set(x, y, r, g, b);
    }
  return out;
}

void exportPointcloud(const SceneFlowImage& sfi, const CameraRig& rig,
                      const std::string& path) {
  struct Vertex {
    double x, y, z;
    uint8_t r, g, b;
  };
  std::vector<Vertex> vertices;
  std::vector<double> speeds;
  std::vector<int> speed_index;  // -1 = no motion channels

  for (int y = 0; y < sfi.height(); ++y)
    for (int x = 0; x < sfi.width(); ++x) {
      if (!sfi.d_t.isValid(x, y)) continue;
      ScenePoint p = pixelToPoint(x, y, sfi.d_t.get(x, y), rig);
      Vertex vert{p.X, p.Y, p.Z, 128, 128, 128};
      if (sfi.fullyValid(x, y)) {
        PixelSceneFlow sample{sfi.flow.u(x, y), sfi.flow.v(x, y),
                              sfi.d_t.get(x, y), sfi.d_next.get(x, y)};
        SceneFlow3D sf3d = imageToWorld(x, y, sample, rig);
        double speed = std::sqrt(sf3d.dX * sf3d.dX + sf3d.dY * sf3d.dY + sf3d.dZ * sf3d.dZ);
        speed_index.push_back(static_cast<int>(speeds.size()));
        speeds.push_back(speed);
      } else {
        speed_index.push_back(-1);
      }
      vertices.push_back(vert);
    }

  std::vector<double> sorted = speeds;
  double norm = percentile99(sorted);
  for (size_t i = 0; i < vertices.size(); ++i) {
    if (speed_index[i] < 0) continue;
    double ratio = norm > 0.0 ? std::min(1.0, speeds[speed_index[i]] / norm) : 0.0;
    vertices[i].r = static_cast<uint8_t>(std::lround(255.0 * ratio));
    vertices[i].g = static_cast<uint8_t>(std::lround(255.0 * (1.0 - ratio)));
    vertices[i].b = 0;
  }

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot open for writing: " + tmp);
    out << "ply\nformat ascii 1.0\n"
        << "element vertex " << vertices.size() << "\n"
        << "property float x\nproperty float y\nproperty float z\n"
        << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
        << "end_header\n";
    out.precision(9);
    for (const Vertex& v : vertices)
      out << v.x << " " << v.y << " " << v.z << " " << int(v.r) << " " << int(v.g)
          << " " << int(v.b) << "\n";
    if (!out) throw IoError("PLY write failed: " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp + " to " + path);
}

}  // namespace sflow
