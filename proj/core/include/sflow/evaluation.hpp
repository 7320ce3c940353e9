#ifndef SFLOW_EVALUATION_HPP
#define SFLOW_EVALUATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sflow/recombination.hpp"

namespace sflow {

// KITTI 2015 outlier criterion: err > abs_thresh AND err > rel_thresh * |gt|.
struct OutlierThresholds {
  double abs_thresh = 3.0;
  double rel_thresh = 0.05;
};

bool pixelOutlier(double err, double gt_mag, const OutlierThresholds& th = {});

enum class EvalMode { kSparse, kDense };

struct EvalReport {
  double d1 = 0.0, d2 = 0.0, fl = 0.0, sf = 0.0;  // outlier fractions
  double density = 0.0;
  uint64_t evaluated_pixels = 0;  // masked pixels

  // Raw counts, so reports aggregate without floating drift.
  uint64_t d1_outliers = 0, d1_pixels = 0;
  uint64_t d2_outliers = 0, d2_pixels = 0;
  uint64_t fl_outliers = 0, fl_pixels = 0;
  uint64_t sf_outliers = 0, sf_pixels = 0;

  // Alternate sparse-mode fractions with all masked pixels as denominator
  // (missing estimates count as outliers). Equal to the main fractions in
  // dense mode.
  double d1_all = 0.0, d2_all = 0.0, fl_all = 0.0, sf_all = 0.0;

  std::string formatText() const;
  std::string formatKeyValue() const;
};

struct GroundTruth {
  SceneFlowImage gt;
  // Evaluation mask; must be a subset of the validity of all gt channels.
  // Empty means "all fully valid gt pixels".
  std::vector<uint8_t> mask;

  bool masked(int x, int y) const {
    if (mask.empty()) return gt.fullyValid(x, y);
    return mask[static_cast<size_t>(y) * gt.width() + x] != 0;
  }
};

EvalReport evaluate(const SceneFlowImage& est, const GroundTruth& gt,
                    EvalMode mode, const OutlierThresholds& th = {});

// Pixel-count-weighted average; weights default to each report's mask size.
EvalReport aggregate(const std::vector<EvalReport>& reports);

}  // namespace sflow

#endif
