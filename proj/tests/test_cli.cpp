#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "test_helpers.hpp"

namespace {

std::string g_sflow;

int run(const std::string& args) {
  std::string cmd = g_sflow + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void writeFile(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const char* kSpec = R"(
width = 32
height = 24
fx = 400
fy = 400
cx = 16
cy = 12
baseline = 0.5
occlusion_fraction = 0.2
seed = 7

[region]
polygon = -1 -1, 33 -1, 33 25, -1 25
plane = 0.02 0.01 15
translation = 0.02 0.01 0
)";

const std::string kRigFlags = "--fx 400 --fy 400 --cx 16 --cy 12 --baseline 0.5";

double kvValue(const std::string& path, const std::string& key) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string k = line.substr(0, eq);
    k.erase(k.find_last_not_of(' ') + 1);
    if (k == key) return std::stod(line.substr(eq + 1));
  }
  throw std::runtime_error("key not found: " + key + " in " + path);
}

}  // namespace

using sflow::testing::TempDir;
namespace fs = std::filesystem;

TEST_CASE("usage errors exit with code 1") {
  CHECK(run("") == 1);
  CHECK(run("--help") == 0);
  CHECK(run("frobnicate") == 1);
  CHECK(run("synth") == 1);  // missing --spec
  TempDir tmp;
  writeFile(tmp.file("scene.cfg"), kSpec);
  CHECK(run("synth --spec " + tmp.file("scene.cfg")) == 1);  // missing --out
}

TEST_CASE("synth, combine, densify, eval and viz chain together") {
  TempDir tmp;
  writeFile(tmp.file("scene.cfg"), kSpec);
  std::string bundle = tmp.file("bundle");

  REQUIRE(run("synth --spec " + tmp.file("scene.cfg") + " --out " + bundle) == 0);
  for (const char* rel : {"disp_0/000000_10.png", "disp_1/000000_11.png",
                          "flow/000000_10.png", "edges/000000_10.png",
                          "gt/disp_0/000000_10.png"})
    CHECK(fs::exists(fs::path(bundle) / rel));

  std::string sparse = tmp.file("sparse");
  REQUIRE(run("combine --disp-0 " + bundle + "/disp_0/000000_10.png --disp-1 " +
              bundle + "/disp_1/000000_11.png --flow " + bundle +
              "/flow/000000_10.png --out " + sparse) == 0);
  CHECK(fs::exists(sparse + "/d_t.png"));
  CHECK(fs::exists(sparse + "/density.txt"));
  double dens = kvValue(sparse + "/density.txt", "density");
  CHECK(dens > 0.2);
  CHECK(dens < 0.9);

  // config errors on a readable sparse input exit with code 1
  CHECK(run("densify --sparse-dir " + sparse + " " + kRigFlags +
            " --variant nonsense --out " + tmp.file("bad")) == 1);
  CHECK(run("densify --sparse-dir " + sparse +
            " --fx 0 --fy 0 --cx 0 --cy 0 --baseline 0 --out " + tmp.file("bad")) == 1);

  std::string dense = tmp.file("dense");
  REQUIRE(run("densify --sparse-dir " + sparse + " " + kRigFlags + " --edges " +
              bundle + "/edges/000000_10.png --out " + dense) == 0);
  CHECK(fs::exists(dense + "/params.txt"));
  CHECK(slurp(dense + "/params.txt").find("variant = full") != std::string::npos);

  std::string eval_out = tmp.file("eval");
  REQUIRE(run("eval --sparse-dir " + dense + " --gt-disp-0 " + bundle +
              "/gt/disp_0/000000_10.png --gt-disp-1 " + bundle +
              "/gt/disp_1/000000_10.png --gt-flow " + bundle +
              "/gt/flow/000000_10.png --mode dense --out " + eval_out) == 0);
  CHECK(kvValue(eval_out + "/report.kv", "sf") == doctest::Approx(0.0));
  CHECK(kvValue(eval_out + "/report.kv", "density") == doctest::Approx(1.0));

  // dense mode on the sparse estimate is a data error
  CHECK(run("eval --sparse-dir " + sparse + " --gt-disp-0 " + bundle +
            "/gt/disp_0/000000_10.png --gt-disp-1 " + bundle +
            "/gt/disp_1/000000_10.png --gt-flow " + bundle +
            "/gt/flow/000000_10.png --mode dense --out " + tmp.file("e2")) == 2);

  std::string viz_out = tmp.file("viz");
  REQUIRE(run("viz --flow " + bundle + "/flow/000000_10.png --disp-0 " + bundle +
              "/disp_0/000000_10.png --sparse-dir " + dense + " " + kRigFlags +
              " --out " + viz_out) == 0);
  CHECK(fs::exists(viz_out + "/flow.png"));
  CHECK(fs::exists(viz_out + "/disparity.png"));
  CHECK(fs::exists(viz_out + "/cloud.ply"));
}

TEST_CASE("directory-mode evaluation aggregates KITTI-layout trees") {
  TempDir tmp;
  writeFile(tmp.file("scene.cfg"), kSpec);
  std::string bundle = tmp.file("bundle");
  REQUIRE(run("synth --spec " + tmp.file("scene.cfg") + " --out " + bundle) == 0);
  // the ground-truth tree evaluated against itself is a perfect dense score
  std::string out = tmp.file("eval");
  REQUIRE(run("eval --est-dir " + bundle + "/gt --gt-dir " + bundle +
              "/gt --mode dense --jobs 2 --out " + out) == 0);
  CHECK(kvValue(out + "/report.kv", "sf") == doctest::Approx(0.0));
  CHECK(kvValue(out + "/report.kv", "evaluated_pixels") == doctest::Approx(32 * 24));
}

TEST_CASE("data errors exit with code 2, config errors with 1") {
  TempDir tmp;
  writeFile(tmp.file("junk.png"), "not a png at all");
  fs::create_directories(tmp.file("sparse"));
  writeFile(tmp.file("sparse/d_t.png"), "junk");
  CHECK(run("combine --disp-0 " + tmp.file("junk.png") + " --disp-1 " +
            tmp.file("junk.png") + " --flow " + tmp.file("junk.png") + " --out " +
            tmp.file("o")) == 2);
  CHECK(run("densify --sparse-dir " + tmp.file("sparse") + " " + kRigFlags +
            " --out " + tmp.file("o")) == 2);
  CHECK(run("densify --sparse-dir " + tmp.file("missing") + " " + kRigFlags +
            " --out " + tmp.file("o")) == 2);
}

TEST_CASE("config files feed defaults that flags override") {
  TempDir tmp;
  writeFile(tmp.file("scene.cfg"), kSpec);
  std::string bundle = tmp.file("bundle");
  REQUIRE(run("synth --spec " + tmp.file("scene.cfg") + " --out " + bundle) == 0);
  std::string sparse = tmp.file("sparse");
  REQUIRE(run("combine --disp-0 " + bundle + "/disp_0/000000_10.png --disp-1 " +
              bundle + "/disp_1/000000_11.png --flow " + bundle +
              "/flow/000000_10.png --out " + sparse) == 0);

  writeFile(tmp.file("tool.cfg"),
            "fx = 400\nfy = 400\ncx = 16\ncy = 12\nbaseline = 0.5\n"
            "variant = disp_plane\nk_geo = 12\n");
  std::string a = tmp.file("a");
  REQUIRE(run("densify --config " + tmp.file("tool.cfg") + " --sparse-dir " + sparse +
              " --out " + a) == 0);
  std::string params = slurp(a + "/params.txt");
  CHECK(params.find("variant = disp_plane") != std::string::npos);
  CHECK(params.find("k_geo = 12") != std::string::npos);

  std::string b = tmp.file("b");
  REQUIRE(run("densify --config " + tmp.file("tool.cfg") + " --sparse-dir " + sparse +
              " --variant motion --out " + b) == 0);
  CHECK(slurp(b + "/params.txt").find("variant = motion") != std::string::npos);
}

TEST_CASE("the pipeline runs end to end and is deterministic") {
  TempDir tmp;
  writeFile(tmp.file("scene.cfg"), kSpec);
  std::string a = tmp.file("a"), b = tmp.file("b");
  REQUIRE(run("pipeline --spec " + tmp.file("scene.cfg") + " --out " + a) == 0);
  REQUIRE(run("pipeline --spec " + tmp.file("scene.cfg") + " --out " + b) == 0);

  CHECK(kvValue(a + "/report_dense.kv", "sf") == doctest::Approx(0.0));
  CHECK(kvValue(a + "/report_dense.kv", "density") == doctest::Approx(1.0));
  double sparse_density = kvValue(a + "/report_sparse.kv", "density");
  CHECK(sparse_density > 0.2);
  CHECK(sparse_density < 0.9);

  for (const char* rel :
       {"report_sparse.kv", "report_dense.kv", "sparse/d_t.png", "sparse/flow.png",
        "sparse/d_next.png", "dense/d_t.png", "dense/flow.png", "dense/d_next.png",
        "synth/disp_1/000000_11.png"}) {
    CAPTURE(rel);
    std::string fa = slurp(a + "/" + rel), fb = slurp(b + "/" + rel);
    REQUIRE(!fa.empty());
    CHECK(fa == fb);
  }
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: test_cli <path-to-sflow> [doctest args]\n";
    return 1;
  }
  g_sflow = argv[1];
  doctest::Context ctx;
  ctx.applyCommandLine(argc - 1, argv + 1);
  return ctx.run();
}
