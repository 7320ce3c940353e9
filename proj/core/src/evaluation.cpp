#include "sflow/evaluation.hpp"

#include <cmath>
#include <sstream>

#include "sflow/errors.hpp"

namespace sflow {

bool pixelOutlier(double err, double gt_mag, const OutlierThresholds& th) {
  return err > th.abs_thresh && err > th.rel_thresh * gt_mag;
}

EvalReport evaluate(const SceneFlowImage& est, const GroundTruth& gt,
                    EvalMode mode, const OutlierThresholds& th) {
  requireSameShape(est.width(), est.height(), gt.gt.width(), gt.gt.height(),
                   "evaluate");

  EvalReport r;
  uint64_t masked = 0, valid_and_masked = 0;
  uint64_t d1_out_all = 0, d2_out_all = 0, fl_out_all = 0, sf_out_all = 0;

  for (int y = 0; y < est.height(); ++y)
    for (int x = 0; x < est.width(); ++x) {
      if (!gt.masked(x, y)) continue;
      ++masked;
      if (est.fullyValid(x, y)) ++valid_and_masked;

      bool d1_has = est.d_t.isValid(x, y);
      bool d2_has = est.d_next.isValid(x, y);
      bool fl_has = est.flow.isValid(x, y);
      bool sf_has = est.fullyValid(x, y);
      if (mode == EvalMode::kDense && !sf_has)
        throw DataError("evaluate: dense mode requires a fully dense estimate");

      bool d1_out = false, d2_out = false, fl_out = false;
      if (d1_has) {
        double err = std::abs(est.d_t.get(x, y) - gt.gt.d_t.get(x, y));
        d1_out = pixelOutlier(err, std::abs(gt.gt.d_t.get(x, y)), th);
        ++r.d1_pixels;
        if (d1_out) ++r.d1_outliers;
      }
      if (d2_has) {
        double err = std::abs(est.d_next.get(x, y) - gt.gt.d_next.get(x, y));
        d2_out = pixelOutlier(err, std::abs(gt.gt.d_next.get(x, y)), th);
        ++r.d2_pixels;
        if (d2_out) ++r.d2_outliers;
      }
      if (fl_has) {
        double du = est.flow.u(x, y) - gt.gt.flow.u(x, y);
        double dv = est.flow.v(x, y) - gt.gt.flow.v(x, y);
        double gu = gt.gt.flow.u(x, y), gv = gt.gt.flow.v(x, y);
        fl_out = pixelOutlier(std::hypot(du, dv), std::hypot(gu, gv), th);
        ++r.fl_pixels;
        if (fl_out) ++r.fl_outliers;
      }
      if (sf_has) {
        ++r.sf_pixels;
        if (d1_out || d2_out || fl_out) ++r.sf_outliers;
      }
      // All-masked denominators: a missing estimate counts as an outlier.
      if (!d1_has || d1_out) ++d1_out_all;
      if (!d2_has || d2_out) ++d2_out_all;
      if (!fl_has || fl_out) ++fl_out_all;
      if (!sf_has || d1_out || d2_out || fl_out) ++sf_out_all;
    }

  auto frac = [](uint64_t num, uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  r.evaluated_pixels = masked;
  r.d1 = frac(r.d1_outliers, r.d1_pixels);
  r.d2 = frac(r.d2_outliers, r.d2_pixels);
  r.fl = frac(r.fl_outliers, r.fl_pixels);
  r.sf = frac(r.sf_outliers, r.sf_pixels);
  r.d1_all = frac(d1_out_all, masked);
  r.d2_all = frac(d2_out_all, masked);
  r.fl_all = frac(fl_out_all, masked);
  r.sf_all = frac(sf_out_all, masked);
  r.density = mode == EvalMode::kDense ? 1.0 : frac(valid_and_masked, masked);
  return r;
}

EvalReport aggregate(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw NoDataError("aggregate: empty report list");

  EvalReport out;
  double wsum = 0.0;
  double d1 = 0, d2 = 0, fl = 0, sf = 0, density = 0;
  double d1a = 0, d2a = 0, fla = 0, sfa = 0;
  for (const EvalReport& r : reports) {
    double w = static_cast<double>(r.evaluated_pixels);
    wsum += w;
    d1 += w * r.d1;
    d2 += w * r.d2;
    fl += w * r.fl;
    sf += w * r.sf;
    density += w * r.density;
    d1a += w * r.d1_all;
    d2a += w * r.d2_all;
    fla += w * r.fl_all;
    sfa += w * r.sf_all;
    out.evaluated_pixels += r.evaluated_pixels;
    out.d1_outliers += r.d1_outliers;
    out.d1_pixels += r.d1_pixels;
    out.d2_outliers += r.d2_outliers;
    out.d2_pixels += r.d2_pixels;
    out.fl_outliers += r.fl_outliers;
    out.fl_pixels += r.fl_pixels;
    out.sf_outliers += r.sf_outliers;
    out.sf_pixels += r.sf_pixels;
  }
  if (wsum > 0.0) {
    out.d1 = d1 / wsum;
    out.d2 = d2 / wsum;
    out.fl = fl / wsum;
    out.sf = sf / wsum;
    out.density = density / wsum;
    out.d1_all = d1a / wsum;
    out.d2_all = d2a / wsum;
    out.fl_all = fla / wsum;
    out.sf_all = sfa / wsum;
  }
  return out;
}

std::string EvalReport::formatText() const {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << "metric     est-valid   all-masked\n";
  os << "D1       " << d1 * 100.0 << " %   " << d1_all * 100.0 << " %\n";
  os << "D2       " << d2 * 100.0 << " %   " << d2_all * 100.0 << " %\n";
  os << "Fl       " << fl * 100.0 << " %   " << fl_all * 100.0 << " %\n";
  os << "SF       " << sf * 100.0 << " %   " << sf_all * 100.0 << " %\n";
  os << "density  " << density * 100.0 << " %\n";
  os << "pixels   " << evaluated_pixels << "\n";
  return os.str();
}

std::string EvalReport::formatKeyValue() const {
  std::ostringstream os;
  os.precision(17);
  os << "d1 = " << d1 << "\n"
     << "d2 = " << d2 << "\n"
     << "fl = " << fl << "\n"
     << "sf = " << sf << "\n"
     << "d1_all = " << d1_all << "\n"
     << "d2_all = " << d2_all << "\n"
     << "fl_all = " << fl_all << "\n"
     << "sf_all = " << sf_all << "\n"
     << "density = " << density << "\n"
     << "evaluated_pixels = " << evaluated_pixels << "\n";
  return os.str();
}

}  // namespace sflow
