#include <Eigen/Geometry>
#include <algorithm>
#include <random>

#include "dtinspect/error.hpp"
#include "dtinspect/registration.hpp"

namespace dtinspect {

PointCloud SampleMeshSurface(const TriangleMesh &mesh, std::size_t n, std::uint64_t seed) {
  if (mesh.empty()) throw ValidationError("sample_mesh_surface: empty mesh");
  if (n == 0) throw ValidationError("sample_mesh_surface: sample count must be at least 1");

  std::vector<double> cumulative(mesh.triangles.size());
  std::vector<Eigen::Vector3d> face_normals(mesh.triangles.size());
  double total = 0.0;
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const Triangle &t = mesh.triangles[i];
    const Eigen::Vector3d &a = mesh.vertices[t[0]];
    const Eigen::Vector3d cross = (mesh.vertices[t[1]] - a).cross(mesh.vertices[t[2]] - a);
    const double area = 0.5 * cross.norm();
    face_normals[i] = area > 0.0 ? Eigen::Vector3d(cross.normalized()) : Eigen::Vector3d::UnitZ();
    total += area;
    cumulative[i] = total;
  }
  if (!(total > 0.0)) throw ValidationError("sample_mesh_surface: mesh has zero area");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  PointCloud cloud;
  cloud.points.reserve(n);
  cloud.normals.reserve(n);
  if (mesh.HasColors()) cloud.colors.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double pick = uniform(rng) * total;
    std::size_t tri = std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin();
    tri = std::min(tri, cumulative.size() - 1);
    const double r1 = std::sqrt(uniform(rng));
    const double r2 = uniform(rng);
    const double wa = 1.0 - r1, wb = r1 * (1.0 - r2), wc = r1 * r2;
    const Triangle &t = mesh.triangles[tri];
    cloud.points.push_back(wa * mesh.vertices[t[0]] + wb * mesh.vertices[t[1]] +
                           wc * mesh.vertices[t[2]]);
    cloud.normals.push_back(face_normals[tri]);
    if (mesh.HasColors()) {
      cloud.colors.push_back(wa * mesh.vertex_colors[t[0]] + wb * mesh.vertex_colors[t[1]] +
                             wc * mesh.vertex_colors[t[2]]);
    }
  }
  return cloud;
}

}  // namespace dtinspect
