#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "dtinspect/bench.hpp"
#include "dtinspect/error.hpp"
#include "dtinspect/renderer.hpp"

namespace dtinspect {

namespace {

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

long PeakRssKb() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return usage.ru_maxrss;
}

Json StatsJson(const BenchStats &s) {
  return {{"phase", s.phase},    {"runs", s.seconds.size()}, {"mean_s", s.mean},
          {"std_s", s.stddev},   {"seconds", s.seconds}};
}

}  // namespace

BenchStats MakeStats(const std::string &phase, std::vector<double> seconds) {
  BenchStats s;
  s.phase = phase;
  s.seconds = std::move(seconds);
  if (s.seconds.empty()) return s;
  const double n = static_cast<double>(s.seconds.size());
  s.mean = std::accumulate(s.seconds.begin(), s.seconds.end(), 0.0) / n;
  double var = 0.0;
  for (double x : s.seconds) var += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(var / n);
  return s;
}

RenderBenchReport RunRenderBench(const std::function<TriangleMesh()> &load,
                                 const RigidTransform &pose, const CameraIntrinsics &k, int runs,
                                 const std::string &out_dir, int warmup) {
  if (runs < 1) throw ValidationError("bench: runs must be at least 1");
  if (warmup < 0) throw ValidationError("bench: warmup must be non-negative");
  k.Validate();
  std::string color_path, depth_path;
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
    color_path = (std::filesystem::path(out_dir) / "bench_rgb.png").string();
    depth_path = (std::filesystem::path(out_dir) / "bench_depth.png").string();
  }

  RenderBenchReport report;
  auto t0 = Clock::now();
  const TriangleMesh mesh = load();
  mesh.Validate();
  report.init = MakeStats("init", {Since(t0)});

  std::vector<double> render, write;
  for (int i = 0; i < warmup + runs; ++i) {
    t0 = Clock::now();
    const RgbdFrame frame = RenderRgbd(mesh, pose, k);
    const double r = Since(t0);
    double w = 0.0;
    if (!out_dir.empty()) {
      t0 = Clock::now();
      WriteFrame(frame, 0.1, color_path, depth_path);
      w = Since(t0);
    }
    if (i < warmup) continue;
    render.push_back(r);
    if (!out_dir.empty()) write.push_back(w);
  }
  report.render = MakeStats("render", std::move(render));
  report.write = MakeStats("write", std::move(write));
  report.peak_rss_kb = PeakRssKb();
  return report;
}

Json BenchReportJson(const RenderBenchReport &report) {
  Json j;
  j["phases"] = Json::array({StatsJson(report.init), StatsJson(report.render),
                             StatsJson(report.write)});
  j["peak_rss_kb"] = report.peak_rss_kb;
  return j;
}

}  // namespace dtinspect
