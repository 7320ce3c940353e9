// sflow: scene flow recombination, interpolation, evaluation and rendering
// over KITTI-style rasters.
//
// Subcommands: combine, densify, eval, synth, viz, pipeline.
// Exit codes: 0 success, 1 usage/config, 2 data/format, 3 numerical failure.

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "sflow/densify.hpp"
#include "sflow/edgecost.hpp"
#include "sflow/errors.hpp"
#include "sflow/evaluation.hpp"
#include "sflow/geometry.hpp"
#include "sflow/keyvalue.hpp"
#include "sflow/rasterio.hpp"
#include "sflow/recombination.hpp"
#include "sflow/synthgen.hpp"
#include "sflow/viz.hpp"

namespace fs = std::filesystem;
using namespace sflow;

namespace {

struct Options {
  // camera rig
  double fx = 0, fy = 0, cx = 0, cy = 0, baseline = 0;
  // inputs
  std::string disp0, disp1, flow, edges, image;
  std::string gt_disp0, gt_disp1, gt_flow, mask;
  std::string est_dir, gt_dir;  // directory mode for eval
  std::string spec;             // scene spec for synth / pipeline
  std::string sparse_dir, out;
  std::string frame = "000000";
  // densify params
  std::string variant = "full";
  int k_geo = 25;
  double alpha = 2.0;
  double step_cost = 0.01;
  double ridge = 1e-6;
  bool exact_geodesic = false;
  // evaluation
  std::string eval_mode = "sparse";
  double abs_thresh = 3.0;
  double rel_thresh = 0.05;
  // misc
  int jobs = 1;
  double max_mag = 0.0;  // viz flow normalization, 0 = auto
};

CameraRig rigFrom(const Options& o) {
  CameraRig rig{o.fx, o.fy, o.cx, o.cy, o.baseline};
  rig.validate();
  return rig;
}

DensifyParams densifyParamsFrom(const Options& o) {
  DensifyParams p;
  p.k_geo = o.k_geo;
  p.alpha = o.alpha;
  p.step_cost = o.step_cost;
  p.ridge = o.ridge;
  p.variant = parseVariant(o.variant);
  p.exact_geodesic = o.exact_geodesic;
  p.validate();
  return p;
}

void overlayConfig(Options& o, const KeyValueSection& cfg) {
  o.fx = cfg.getDouble("fx", o.fx);
  o.fy = cfg.getDouble("fy", o.fy);
  o.cx = cfg.getDouble("cx", o.cx);
  o.cy = cfg.getDouble("cy", o.cy);
  o.baseline = cfg.getDouble("baseline", o.baseline);
  auto str = [&](const char* key, std::string& dst) {
    if (auto v = cfg.get(key)) dst = *v;
  };
  str("disp_0", o.disp0);
  str("disp_1", o.disp1);
  str("flow", o.flow);
  str("edges", o.edges);
  str("image", o.image);
  str("gt_disp_0", o.gt_disp0);
  str("gt_disp_1", o.gt_disp1);
  str("gt_flow", o.gt_flow);
  str("mask", o.mask);
  str("est_dir", o.est_dir);
  str("gt_dir", o.gt_dir);
  str("spec", o.spec);
  str("sparse_dir", o.sparse_dir);
  str("out", o.out);
  str("frame", o.frame);
  str("variant", o.variant);
  str("eval_mode", o.eval_mode);
  o.k_geo = cfg.getInt("k_geo", o.k_geo);
  o.alpha = cfg.getDouble("alpha", o.alpha);
  o.step_cost = cfg.getDouble("step_cost", o.step_cost);
  o.ridge = cfg.getDouble("ridge", o.ridge);
  o.exact_geodesic = cfg.getInt("exact_geodesic", o.exact_geodesic ? 1 : 0) != 0;
  o.abs_thresh = cfg.getDouble("abs_thresh", o.abs_thresh);
  o.rel_thresh = cfg.getDouble("rel_thresh", o.rel_thresh);
  o.jobs = cfg.getInt("jobs", o.jobs);
}

void writeTextFile(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot open for writing: " + tmp);
    out << content;
    if (!out) throw IoError("write failed: " + path);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp + " to " + path);
}

void requireInput(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing input: ") + what);
  if (!fs::exists(path)) throw ConfigError(std::string(what) + " not found: " + path);
}

SceneFlowImage readSceneFlowDir(const std::string& dir) {
  SceneFlowImage sfi;
  sfi.d_t = readDisparity((fs::path(dir) / "d_t.png").string());
  sfi.flow = readFlow((fs::path(dir) / "flow.png").string());
  sfi.d_next = readDisparity((fs::path(dir) / "d_next.png").string());
  return sfi;
}

void writeSceneFlowDir(const SceneFlowImage& sfi, const std::string& dir) {
  fs::create_directories(dir);
  writeDisparity(sfi.d_t, (fs::path(dir) / "d_t.png").string());
  writeFlow(sfi.flow, (fs::path(dir) / "flow.png").string());
  writeDisparity(sfi.d_next, (fs::path(dir) / "d_next.png").string());
}

EdgeCostMap edgeMapFor(const Options& o, int width, int height) {
  if (!o.edges.empty()) {
    requireInput(o.edges, "edges");
    return loadEdgeMap(o.edges);
  }
  if (!o.image.empty()) {
    requireInput(o.image, "image");
    return gradientEdgeCost(readGray(o.image));
  }
  return EdgeCostMap(width, height);  // uniform zero cost
}

std::string densifyParamsSidecar(const DensifyParams& p) {
  std::ostringstream os;
  os << "variant = " << variantName(p.variant) << "\n"
     << "k_geo = " << p.k_geo << "\n"
     << "alpha = " << p.alpha << "\n"
     << "step_cost = " << p.step_cost << "\n"
     << "ridge = " << p.ridge << "\n"
     << "exact_geodesic = " << (p.exact_geodesic ? 1 : 0) << "\n";
  return os.str();
}

// ---------------------------------------------------------------- commands

int cmdSynth(const Options& o) {
  requireInput(o.spec, "spec");
  if (o.out.empty()) throw ConfigError("missing output directory (--out)");
  SceneSpec spec = loadSceneSpec(o.spec);
  SynthBundle bundle = render(spec);
  sparsify(bundle, spec.occlusion_fraction, spec.seed);
  writeBundle(bundle, o.out, o.frame);
  std::cout << "synth: wrote bundle to " << o.out << "\n";
  return 0;
}

int cmdCombine(const Options& o) {
  requireInput(o.disp0, "disp_0");
  requireInput(o.disp1, "disp_1");
  requireInput(o.flow, "flow");
  if (o.out.empty()) throw ConfigError("missing output directory (--out)");

  DisparityMap d_t = readDisparity(o.disp0);
  DisparityMap d1 = readDisparity(o.disp1);
  FlowMap flow = readFlow(o.flow);
  DisparityMap warped = warpDisparity(d1, flow);
  SceneFlowImage sfi = combine(d_t, flow, warped);

  writeSceneFlowDir(sfi, o.out);
  std::ostringstream os;
  os.precision(17);
  os << "density = " << density(sfi) << "\n";
  writeTextFile((fs::path(o.out) / "density.txt").string(), os.str());
  std::cout << "combine: density " << density(sfi) << "\n";
  return 0;
}

int cmdDensify(const Options& o) {
  if (o.sparse_dir.empty()) throw ConfigError("missing input: sparse_dir");
  if (o.out.empty()) throw ConfigError("missing output directory (--out)");
  SceneFlowImage sfi = readSceneFlowDir(o.sparse_dir);
  CameraRig rig = rigFrom(o);
  DensifyParams params = densifyParamsFrom(o);
  EdgeCostMap cost = edgeMapFor(o, sfi.width(), sfi.height());
  if (params.variant != Variant::kKitti)
    requireSameShape(sfi.width(), sfi.height(), cost.width(), cost.height(), "densify");

  SceneFlowImage dense = densify(sfi, cost, rig, params);
  writeSceneFlowDir(dense, o.out);
  writeTextFile((fs::path(o.out) / "params.txt").string(), densifyParamsSidecar(params));
  std::cout << "densify: variant " << variantName(params.variant) << ", density "
            << density(dense) << "\n";
  return 0;
}

GroundTruth loadGroundTruth(const std::string& gt_disp0, const std::string& gt_disp1,
                            const std::string& gt_flow, const std::string& mask_path) {
  GroundTruth gt;
  gt.gt.d_t = readDisparity(gt_disp0);
  gt.gt.d_next = readDisparity(gt_disp1);
  gt.gt.flow = readFlow(gt_flow);
  if (!mask_path.empty()) {
    ScalarMap m = readMask(mask_path);
    requireSameShape(m.width(), m.height(), gt.gt.width(), gt.gt.height(), "mask");
    gt.mask.assign(static_cast<size_t>(m.width()) * m.height(), 0);
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x)
        if (m.get(x, y) > 0.0 && gt.gt.fullyValid(x, y))
          gt.mask[static_cast<size_t>(y) * m.width() + x] = 1;
  }
  return gt;
}

std::vector<std::string> discoverFrames(const std::string& gt_dir) {
  std::vector<std::string> frames;
  fs::path disp0 = fs::path(gt_dir) / "disp_0";
  if (!fs::is_directory(disp0)) throw ConfigError("gt_dir has no disp_0/: " + gt_dir);
  for (const auto& entry : fs::directory_iterator(disp0)) {
    std::string name = entry.path().filename().string();
    if (name.size() > 7 && name.ends_with("_10.png"))
      frames.push_back(name.substr(0, name.size() - 7));
  }
  std::sort(frames.begin(), frames.end());
  if (frames.empty()) throw NoDataError("no *_10.png frames under " + disp0.string());
  return frames;
}

EvalReport evalOneKittiFrame(const Options& o, const std::string& frame,
                             EvalMode mode, const OutlierThresholds& th) {
  auto estp = [&](const char* sub) {
    return (fs::path(o.est_dir) / sub / (frame + "_10.png")).string();
  };
  auto gtp = [&](const char* sub) {
    return (fs::path(o.gt_dir) / sub / (frame + "_10.png")).string();
  };
  SceneFlowImage est;
  est.d_t = readDisparity(estp("disp_0"));
  est.d_next = readDisparity(estp("disp_1"));
  est.flow = readFlow(estp("flow"));
  GroundTruth gt = loadGroundTruth(gtp("disp_0"), gtp("disp_1"), gtp("flow"), "");
  return evaluate(est, gt, mode, th);
}

int cmdEval(const Options& o) {
  if (o.out.empty()) throw ConfigError("missing output directory (--out)");
  EvalMode mode = o.eval_mode == "dense" ? EvalMode::kDense
                : o.eval_mode == "sparse" ? EvalMode::kSparse
                : throw ConfigError("eval_mode must be sparse or dense");
  OutlierThresholds th{o.abs_thresh, o.rel_thresh};

  EvalReport report;
  if (!o.est_dir.empty() || !o.gt_dir.empty()) {
    // Directory mode over KITTI-layout trees.
    if (o.est_dir.empty() || o.gt_dir.empty())
      throw ConfigError("directory mode needs both est_dir and gt_dir");
    std::vector<std::string> frames = discoverFrames(o.gt_dir);
    std::vector<EvalReport> reports(frames.size());
    int jobs = std::max(1, o.jobs);
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (size_t i = next.fetch_add(1); i < frames.size(); i = next.fetch_add(1))
        reports[i] = evalOneKittiFrame(o, frames[i], mode, th);
    };
    std::vector<std::future<void>> pool;
    for (int j = 1; j < jobs; ++j) pool.push_back(std::async(std::launch::async, worker));
    worker();
    for (auto& f : pool) f.get();
    report = aggregate(reports);
  } else {
    requireInput(o.gt_disp0, "gt_disp_0");
    requireInput(o.gt_disp1, "gt_disp_1");
    requireInput(o.gt_flow, "gt_flow");
    if (o.sparse_dir.empty()) throw ConfigError("missing input: sparse_dir (estimate)");
    SceneFlowImage est = readSceneFlowDir(o.sparse_dir);
    GroundTruth gt = loadGroundTruth(o.gt_disp0, o.gt_disp1, o.gt_flow, o.mask);
    report = evaluate(est, gt, mode, th);
  }

  fs::create_directories(o.out);
  writeTextFile((fs::path(o.out) / "report.txt").string(), report.formatText());
  writeTextFile((fs::path(o.out) / "report.kv").string(), report.formatKeyValue());
  std::cout << report.formatText();
  return 0;
}

int cmdViz(const Options& o) {
  if (o.out.empty()) throw ConfigError("missing output directory (--out)");
  fs::create_directories(o.out);
  bool did = false;
  if (!o.flow.empty()) {
    requireInput(o.flow, "flow");
    FlowMap flow = readFlow(o.flow);
    writeColor(flowToColor(flow, o.max_mag), (fs::path(o.out) / "flow.png").string());
    did = true;
  }
  if (!o.disp0.empty()) {
    requireInput(o.disp0, "disp_0");
    DisparityMap d = readDisparity(o.disp0);
    writeColor(disparityToColor(d), (fs::path(o.out) / "disparity.png").string());
    did = true;
  }
  if (!o.sparse_dir.empty()) {
    SceneFlowImage sfi = readSceneFlowDir(o.sparse_dir);
    exportPointcloud(sfi, rigFrom(o), (fs::path(o.out) / "cloud.ply").string());
    did = true;
  }
  if (!did) throw ConfigError("viz: nothing to render (give flow, disp_0 or sparse_dir)");
  std::cout << "viz: wrote renderings to " << o.out << "\n";
  return 0;
}

int cmdPipeline(const Options& o) {
  requireInput(o.spec, "spec");
  if (o.out.empty()) throw ConfigError("missing output directory (--out)");
  SceneSpec spec = loadSceneSpec(o.spec);

  // synth
  SynthBundle bundle = render(spec);
  sparsify(bundle, spec.occlusion_fraction, spec.seed);
  fs::path synth_dir = fs::path(o.out) / "synth";
  writeBundle(bundle, synth_dir.string(), o.frame);

  // combine (round-trips through the on-disk rasters on purpose)
  DisparityMap d_t = readDisparity((synth_dir / "disp_0" / (o.frame + "_10.png")).string());
  DisparityMap d1 = readDisparity((synth_dir / "disp_1" / (o.frame + "_11.png")).string());
  FlowMap flow = readFlow((synth_dir / "flow" / (o.frame + "_10.png")).string());
  SceneFlowImage sparse = combine(d_t, flow, warpDisparity(d1, flow));
  fs::path sparse_dir = fs::path(o.out) / "sparse";
  writeSceneFlowDir(sparse, sparse_dir.string());
  {
    std::ostringstream os;
    os.precision(17);
    os << "density = " << density(sparse) << "\n";
    writeTextFile((sparse_dir / "density.txt").string(), os.str());
  }

  // densify
  Options od = o;
  od.fx = spec.rig.fx;
  od.fy = spec.rig.fy;
  od.cx = spec.rig.cx;
  od.cy = spec.rig.cy;
  od.baseline = spec.rig.baseline;
  DensifyParams params = densifyParamsFrom(od);
  EdgeCostMap cost = o.edges.empty()
      ? loadEdgeMap((synth_dir / "edges" / (o.frame + "_10.png")).string())
      : loadEdgeMap(o.edges);
  SceneFlowImage dense = densify(sparse, cost, spec.rig, params);
  fs::path dense_dir = fs::path(o.out) / "dense";
  writeSceneFlowDir(dense, dense_dir.string());
  writeTextFile((dense_dir / "params.txt").string(), densifyParamsSidecar(params));

  // eval against the synthetic ground truth
  GroundTruth gt = loadGroundTruth(
      (synth_dir / "gt" / "disp_0" / (o.frame + "_10.png")).string(),
      (synth_dir / "gt" / "disp_1" / (o.frame + "_10.png")).string(),
      (synth_dir / "gt" / "flow" / (o.frame + "_10.png")).string(), "");
  OutlierThresholds th{o.abs_thresh, o.rel_thresh};
  EvalReport sparse_report = evaluate(sparse, gt, EvalMode::kSparse, th);
  EvalReport dense_report = evaluate(dense, gt, EvalMode::kDense, th);
  writeTextFile((fs::path(o.out) / "report_sparse.kv").string(), sparse_report.formatKeyValue());
  writeTextFile((fs::path(o.out) / "report_dense.kv").string(), dense_report.formatKeyValue());
  writeTextFile((fs::path(o.out) / "report_sparse.txt").string(), sparse_report.formatText());
  writeTextFile((fs::path(o.out) / "report_dense.txt").string(), dense_report.formatText());

  std::cout << "pipeline: sparse density " << sparse_report.density << ", dense SF "
            << dense_report.sf << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scene flow recombination and interpolation toolkit"};
  app.require_subcommand(1);

  Options o;

  // Config file resolution: --config flag wins over SFLOW_CONFIG.
  std::string config_path;
  if (const char* env = std::getenv("SFLOW_CONFIG")) config_path = env;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  try {
    if (!config_path.empty()) overlayConfig(o, loadKeyValue(config_path).global());
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  auto addCommon = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value config file (flags win)");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--frame", o.frame, "frame name for KITTI-style layouts");
  };
  auto addRig = [&](CLI::App* cmd) {
    cmd->add_option("--fx", o.fx);
    cmd->add_option("--fy", o.fy);
    cmd->add_option("--cx", o.cx);
    cmd->add_option("--cy", o.cy);
    cmd->add_option("--baseline", o.baseline);
  };
  auto addDensifyParams = [&](CLI::App* cmd) {
    cmd->add_option("--variant", o.variant,
                    "kitti | full | motion | disp_affine | disp_plane");
    cmd->add_option("--k-geo", o.k_geo);
    cmd->add_option("--alpha", o.alpha);
    cmd->add_option("--step-cost", o.step_cost);
    cmd->add_option("--ridge", o.ridge);
    cmd->add_flag("--exact-geodesic", o.exact_geodesic);
    cmd->add_option("--edges", o.edges, "precomputed edge map (8-bit PNG)");
    cmd->add_option("--image", o.image, "grayscale image for the gradient edge detector");
  };

  CLI::App* synth = app.add_subcommand("synth", "render a synthetic scene bundle");
  synth->add_option("--spec", o.spec, "scene spec file");
  addCommon(synth);

  CLI::App* comb = app.add_subcommand("combine", "warp + combine into sparse scene flow");
  comb->add_option("--disp-0", o.disp0, "reference disparity (t)");
  comb->add_option("--disp-1", o.disp1, "next-frame disparity (t+1)");
  comb->add_option("--flow", o.flow, "optical flow t -> t+1");
  addCommon(comb);

  CLI::App* dens = app.add_subcommand("densify", "interpolate a sparse scene flow image");
  dens->add_option("--sparse-dir", o.sparse_dir, "directory with d_t/flow/d_next PNGs");
  addRig(dens);
  addDensifyParams(dens);
  addCommon(dens);

  CLI::App* eval = app.add_subcommand("eval", "KITTI-style outlier metrics");
  eval->add_option("--sparse-dir", o.sparse_dir, "estimate directory (d_t/flow/d_next)");
  eval->add_option("--gt-disp-0", o.gt_disp0);
  eval->add_option("--gt-disp-1", o.gt_disp1);
  eval->add_option("--gt-flow", o.gt_flow);
  eval->add_option("--mask", o.mask, "optional 8-bit evaluation mask");
  eval->add_option("--est-dir", o.est_dir, "directory mode: KITTI-layout estimates");
  eval->add_option("--gt-dir", o.gt_dir, "directory mode: KITTI-layout ground truth");
  eval->add_option("--mode", o.eval_mode, "sparse | dense");
  eval->add_option("--abs-thresh", o.abs_thresh);
  eval->add_option("--rel-thresh", o.rel_thresh);
  eval->add_option("--jobs", o.jobs, "frame-level parallelism");
  addCommon(eval);

  CLI::App* viz = app.add_subcommand("viz", "color renderings and point clouds");
  viz->add_option("--flow", o.flow, "flow PNG to color-code");
  viz->add_option("--disp-0", o.disp0, "disparity PNG to colormap");
  viz->add_option("--sparse-dir", o.sparse_dir, "scene flow directory for the PLY export");
  viz->add_option("--max-mag", o.max_mag, "flow normalization (0 = auto)");
  addRig(viz);
  addCommon(viz);

  CLI::App* pipe = app.add_subcommand("pipeline", "synth -> combine -> densify -> eval");
  pipe->add_option("--spec", o.spec, "scene spec file");
  addDensifyParams(pipe);
  pipe->add_option("--abs-thresh", o.abs_thresh);
  pipe->add_option("--rel-thresh", o.rel_thresh);
  addCommon(pipe);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) return cmdSynth(o);
    if (comb->parsed()) return cmdCombine(o);
    if (dens->parsed()) return cmdDensify(o);
    if (eval->parsed()) return cmdEval(o);
    if (viz->parsed()) return cmdViz(o);
    if (pipe->parsed()) return cmdPipeline(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
