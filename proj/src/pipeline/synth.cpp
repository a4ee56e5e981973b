#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "dtinspect/error.hpp"
#include "dtinspect/pipeline.hpp"
#include "dtinspect/renderer.hpp"

namespace fs = std::filesystem;

namespace dtinspect {

namespace {

double Unit(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Eigen::Vector3d UnitSphere(std::mt19937_64 &rng) {
  const double z = 2.0 * Unit(rng) - 1.0;
  const double phi = 2.0 * std::numbers::pi * Unit(rng);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

TriangleMesh Recolor(const TriangleMesh &mesh, std::uint32_t group, double m) {
  TriangleMesh out = mesh;
  if (!out.HasColors()) {
    out.vertex_colors.assign(out.vertices.size(), Eigen::Vector3d::Constant(128.0 / 255.0));
  }
  // Give the component private vertices so neighbors keep their colors.
  std::map<std::uint32_t, std::uint32_t> copies;
  for (std::size_t t = 0; t < out.triangles.size(); ++t) {
    if (out.triangle_groups[t] != group) continue;
    for (auto &idx : out.triangles[t]) {
      auto [it, fresh] = copies.emplace(idx, static_cast<std::uint32_t>(out.vertices.size()));
      if (fresh) {
        out.vertices.push_back(out.vertices[idx]);
        const Eigen::Vector3d c = out.vertex_colors[idx];
        out.vertex_colors.push_back(c + m * (Eigen::Vector3d::Ones() - 2.0 * c));
        if (!out.vertex_normals.empty()) out.vertex_normals.push_back(out.vertex_normals[idx]);
      }
      idx = it->second;
    }
  }
  return out;
}

TriangleMesh Deform(const TriangleMesh &mesh, std::uint32_t group, double magnitude) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (mesh.triangle_groups[t] != group) continue;
    for (auto idx : mesh.triangles[t]) top = std::max(top, mesh.vertices[idx].z());
  }
  auto on_top = [&](std::uint32_t idx) { return mesh.vertices[idx].z() >= top - 1e-9; };
  // A top vertex is interior when every triangle touching it lies in the top face.
  std::vector<int> state(mesh.vertices.size(), 0);  // 0 untouched, 1 interior, -1 boundary
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto &tri = mesh.triangles[t];
    const bool flat = on_top(tri[0]) && on_top(tri[1]) && on_top(tri[2]) &&
                      mesh.triangle_groups[t] == group;
    for (auto idx : tri) {
      if (!flat) state[idx] = -1;
      else if (state[idx] == 0) state[idx] = 1;
    }
  }
  TriangleMesh out = mesh;
  std::size_t moved = 0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] == 1) {
      out.vertices[i].z() += magnitude;
      ++moved;
    }
  }
  if (moved == 0) {
    throw ValidationError("deformation: component '" + mesh.group_names[group] +
                          "' has no interior top-face vertices");
  }
  out.vertex_normals.clear();
  return out;
}

Image<float> AddNoise(DepthImage depth, double sigma, std::uint64_t seed, int frame) {
  if (sigma <= 0.0) return depth;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(frame), 0x6e6f6973u};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> noise(0.0, sigma);
  for (float &d : depth.data) {
    if (IsValidDepth(d)) d = static_cast<float>(std::max(1e-3, d + noise(rng)));
  }
  return depth;
}

}  // namespace

const char *ToString(SynthDefect d) {
  switch (d) {
    case SynthDefect::kExistence: return "existence";
    case SynthDefect::kDeformation: return "deformation";
    case SynthDefect::kColor: return "color";
  }
  return "?";
}

SynthDefect SynthDefectFromString(const std::string &s) {
  if (s == "existence") return SynthDefect::kExistence;
  if (s == "deformation") return SynthDefect::kDeformation;
  if (s == "color") return SynthDefect::kColor;
  throw ValidationError("unknown defect type '" + s + "' (existence, deformation, color)");
}

void SynthParams::Validate() const {
  if (!std::isfinite(magnitude) || magnitude < 0.0) {
    throw ValidationError("synth: magnitude must be non-negative");
  }
  if (defect == SynthDefect::kColor && magnitude > 1.0) {
    throw ValidationError("synth: color magnitude must be in [0, 1]");
  }
  if (defect == SynthDefect::kExistence && magnitude <= 0.0) {
    throw ValidationError("synth: magnitude must be positive");
  }
  if (frames < 1) throw ValidationError("synth: frames must be at least 1");
  if (!(noise_sigma_mm >= 0.0)) throw ValidationError("synth: noise sigma must be non-negative");
  if (!(depth_scale > 0.0)) throw ValidationError("synth: depth_scale must be positive");
  if (!(view_jitter_deg >= 0.0) || !(view_jitter_mm >= 0.0)) {
    throw ValidationError("synth: view jitter must be non-negative");
  }
  intrinsics.Validate();
  RequireValid(base_pose, "synth base pose");
}

BinaryMask RenderDifference(const TriangleMesh &reference, const TriangleMesh &defected,
                            const RigidTransform &pose, const CameraIntrinsics &k) {
  const RgbdFrame a = RenderRgbd(reference, pose, k);
  const RgbdFrame b = RenderRgbd(defected, pose, k);
  BinaryMask diff(k.width, k.height);
  for (std::size_t i = 0; i < diff.size(); ++i) {
    const float da = a.depth.data[i], db = b.depth.data[i];
    const bool va = IsValidDepth(da), vb = IsValidDepth(db);
    bool differs = va != vb;
    if (va && vb) differs = std::abs(da - db) > 1e-4f || !(a.color.data[i] == b.color.data[i]);
    diff.data[i] = differs;
  }
  return diff;
}

TriangleMesh ApplyDefect(const TriangleMesh &mesh, SynthDefect defect, const std::string &component,
                         double magnitude) {
  const std::uint32_t group = mesh.GroupIndex(component);
  if (!(magnitude >= 0.0)) throw ValidationError("synth: magnitude must be non-negative");
  if (defect == SynthDefect::kColor && magnitude > 1.0) {
    throw ValidationError("synth: color magnitude must be in [0, 1]");
  }
  switch (defect) {
    case SynthDefect::kExistence: return WithoutGroup(mesh, component);
    case SynthDefect::kColor: return magnitude == 0.0 ? mesh : Recolor(mesh, group, magnitude);
    case SynthDefect::kDeformation: return magnitude == 0.0 ? mesh : Deform(mesh, group, magnitude);
  }
  return mesh;
}

SceneDataset Synthesize(const TriangleMesh &mesh, const SynthParams &params, const std::string &root) {
  params.Validate();
  mesh.Validate();
  if (!mesh.HasGroups()) throw ValidationError("synth: mesh has no named sub-meshes");
  std::vector<std::string> components = params.components;
  if (components.empty()) {
    std::uint32_t largest = 0;
    for (std::uint32_t g = 0; g < mesh.group_names.size(); ++g) {
      if (mesh.GroupTriangleCount(g) > mesh.GroupTriangleCount(largest)) largest = g;
    }
    for (std::uint32_t g = 0; g < mesh.group_names.size(); ++g) {
      if (g != largest && mesh.GroupTriangleCount(g) > 0) components.push_back(mesh.group_names[g]);
    }
    if (components.empty()) throw ValidationError("synth: mesh has a single sub-mesh");
  }
  for (const auto &c : components) mesh.GroupIndex(c);

  const std::vector<DefectCategory> taxonomy = BuiltinTaxonomy();
  const DefectCategory *category = nullptr;
  for (const auto &c : taxonomy)
    if (c.name == ToString(params.defect)) category = &c;

  Scene scene;
  scene.id = params.scene_id;
  scene.defects.categories = taxonomy;
  const fs::path dir = fs::path(root) / scene.id;
  std::error_code ec;
  fs::create_directories(dir / "rgb", ec);
  fs::create_directories(dir / "depth", ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::mt19937_64 rng(params.seed);
  int next_annotation = 1;
  for (int f = 0; f < params.frames; ++f) {
    const std::string component = components[static_cast<std::size_t>(Unit(rng) * components.size())];
    const double spin = 2.0 * std::numbers::pi * Unit(rng);
    const Eigen::Vector3d axis = UnitSphere(rng);
    const double tilt = Unit(rng) * params.view_jitter_deg * std::numbers::pi / 180.0;
    const Eigen::Vector3d shift((2.0 * Unit(rng) - 1.0) * params.view_jitter_mm,
                                (2.0 * Unit(rng) - 1.0) * params.view_jitter_mm,
                                (2.0 * Unit(rng) - 1.0) * params.view_jitter_mm);
    RigidTransform pose;
    pose.rotation = params.base_pose.rotation * RotationFromVector(axis * tilt) *
                    RotationFromVector(Eigen::Vector3d::UnitZ() * spin);
    pose.translation = params.base_pose.translation + shift;

    const TriangleMesh defected = ApplyDefect(mesh, params.defect, component, params.magnitude);
    RgbdFrame real = RenderRgbd(defected, pose, params.intrinsics);
    const BinaryMask gt = RenderDifference(mesh, defected, pose, params.intrinsics);
    real.depth = AddNoise(std::move(real.depth), params.noise_sigma_mm, params.seed, f);
    WriteFrame(real, params.depth_scale, RgbPath(root, scene.id, f), DepthPath(root, scene.id, f));

    char name[32];
    std::snprintf(name, sizeof name, "rgb/%06d.png", f);
    scene.defects.images.push_back({f, name, params.intrinsics.width, params.intrinsics.height});
    scene.cameras[f] = {params.intrinsics, params.depth_scale};
    scene.poses[f] = {{1, pose}};
    if (CountSet(gt) > 0) {
      scene.defects.annotations.push_back(MakeAnnotation(next_annotation++, f, *category, gt));
    }
  }
  SceneDataset ds;
  ds.scenes.push_back(std::move(scene));
  WriteDataset(ds, root);
  return ds;
}

}  // namespace dtinspect
