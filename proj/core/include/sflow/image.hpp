#ifndef SFLOW_IMAGE_HPP
#define SFLOW_IMAGE_HPP

#include <cstdint>
#include <vector>

#include "sflow/errors.hpp"

namespace sflow {

// Raster convention for the whole toolkit: row-major storage, origin at the
// top-left corner, x growing rightward, y growing downward.

// Scalar raster with per-pixel validity. Invalid pixels carry no value.
class ScalarMap {
 public:
  ScalarMap() = default;
  ScalarMap(int width, int height)
      : width_(width), height_(height),
        values_(static_cast<size_t>(width) * height, 0.0),
        valid_(static_cast<size_t>(width) * height, 0) {
    if (width <= 0 || height <= 0) throw ShapeError("ScalarMap: nonpositive size");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  size_t size() const { return values_.size(); }

  bool inBounds(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }
  bool isValid(int x, int y) const { return valid_[idx(x, y)] != 0; }
  double get(int x, int y) const { return values_[idx(x, y)]; }
  void set(int x, int y, double v) {
    values_[idx(x, y)] = v;
    valid_[idx(x, y)] = 1;
  }
  void setInvalid(int x, int y) {
    values_[idx(x, y)] = 0.0;
    valid_[idx(x, y)] = 0;
  }

  size_t validCount() const {
    size_t n = 0;
    for (uint8_t v : valid_) n += v;
    return n;
  }

  size_t idx(int x, int y) const { return static_cast<size_t>(y) * width_ + x; }

 private:
  int width_ = 0, height_ = 0;
  std::vector<double> values_;
  std::vector<uint8_t> valid_;
};

// Per-pixel disparity in pixels; valid values are finite and in (0, width).
using DisparityMap = ScalarMap;

// Optical flow (u, v) in pixels with shared per-pixel validity.
class FlowMap {
 public:
  FlowMap() = default;
  FlowMap(int width, int height) : u_(width, height), v_(width, height) {}

  int width() const { return u_.width(); }
  int height() const { return u_.height(); }
  bool inBounds(int x, int y) const { return u_.inBounds(x, y); }
  bool isValid(int x, int y) const { return u_.isValid(x, y); }
  double u(int x, int y) const { return u_.get(x, y); }
  double v(int x, int y) const { return v_.get(x, y); }
  void set(int x, int y, double fu, double fv) {
    u_.set(x, y, fu);
    v_.set(x, y, fv);
  }
  void setInvalid(int x, int y) {
    u_.setInvalid(x, y);
    v_.setInvalid(x, y);
  }
  size_t validCount() const { return u_.validCount(); }

 private:
  ScalarMap u_, v_;
};

// Dense grayscale image, intensities in [0, 1].
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height)
      : width_(width), height_(height),
        values_(static_cast<size_t>(width) * height, 0.0) {
    if (width <= 0 || height <= 0) throw ShapeError("GrayImage: nonpositive size");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  double get(int x, int y) const { return values_[static_cast<size_t>(y) * width_ + x]; }
  void set(int x, int y, double v) { values_[static_cast<size_t>(y) * width_ + x] = v; }

 private:
  int width_ = 0, height_ = 0;
  std::vector<double> values_;
};

// Dense 8-bit RGB raster for visualizations.
class ColorRaster {
 public:
  ColorRaster() = default;
  ColorRaster(int width, int height)
      : width_(width), height_(height),
        rgb_(static_cast<size_t>(width) * height * 3, 0) {
    if (width <= 0 || height <= 0) throw ShapeError("ColorRaster: nonpositive size");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  void set(int x, int y, uint8_t r, uint8_t g, uint8_t b) {
    size_t i = (static_cast<size_t>(y) * width_ + x) * 3;
    rgb_[i] = r;
    rgb_[i + 1] = g;
    rgb_[i + 2] = b;
  }
  const uint8_t* pixel(int x, int y) const {
    return &rgb_[(static_cast<size_t>(y) * width_ + x) * 3];
  }
  const std::vector<uint8_t>& data() const { return rgb_; }

 private:
  int width_ = 0, height_ = 0;
  std::vector<uint8_t> rgb_;
};

inline void requireSameShape(int w1, int h1, int w2, int h2, const char* what) {
  if (w1 != w2 || h1 != h2)
    throw ShapeError(std::string(what) + ": dimension mismatch");
}

}  // namespace sflow

#endif
