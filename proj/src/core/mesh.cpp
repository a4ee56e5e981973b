#include "dtinspect/mesh.hpp"

#include <Eigen/Geometry>
#include <cmath>

#include "dtinspect/error.hpp"

namespace dtinspect {

void TriangleMesh::Validate() const {
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    const Triangle &t = triangles[i];
    for (std::uint32_t idx : t) {
      if (idx >= n) {
        throw ValidationError("mesh: triangle " + std::to_string(i) + " references vertex " +
                              std::to_string(idx) + " but mesh has " + std::to_string(n));
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw ValidationError("mesh: triangle " + std::to_string(i) + " is degenerate");
    }
  }
  if (!vertex_colors.empty() && vertex_colors.size() != n) {
    throw ValidationError("mesh: vertex color count does not match vertex count");
  }
  if (!vertex_normals.empty()) {
    if (vertex_normals.size() != n) {
      throw ValidationError("mesh: vertex normal count does not match vertex count");
    }
    for (const auto &nrm : vertex_normals) {
      if (std::abs(nrm.norm() - 1.0) > 1e-4) {
        throw ValidationError("mesh: vertex normal is not unit length");
      }
    }
  }
  if (!triangle_groups.empty()) {
    if (triangle_groups.size() != triangles.size()) {
      throw ValidationError("mesh: group assignment count does not match triangle count");
    }
    for (std::uint32_t g : triangle_groups) {
      if (g >= group_names.size()) throw ValidationError("mesh: group index out of range");
    }
  }
}

std::uint32_t TriangleMesh::GroupIndex(const std::string &name) const {
  for (std::size_t i = 0; i < group_names.size(); ++i) {
    if (group_names[i] == name) return static_cast<std::uint32_t>(i);
  }
  throw ValidationError("mesh: unknown sub-mesh '" + name + "'");
}

std::size_t TriangleMesh::GroupTriangleCount(std::uint32_t group) const {
  std::size_t count = 0;
  for (std::uint32_t g : triangle_groups) count += (g == group);
  return count;
}

TriangleMesh WithoutGroup(const TriangleMesh &mesh, const std::string &group) {
  const std::uint32_t removed = mesh.GroupIndex(group);
  TriangleMesh out;
  out.vertices = mesh.vertices;
  out.vertex_colors = mesh.vertex_colors;
  out.vertex_normals = mesh.vertex_normals;
  out.group_names = mesh.group_names;
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    if (mesh.triangle_groups[i] == removed) continue;
    out.triangles.push_back(mesh.triangles[i]);
    out.triangle_groups.push_back(mesh.triangle_groups[i]);
  }
  return out;
}

std::vector<Eigen::Vector3d> ComputeVertexNormals(const TriangleMesh &mesh) {
  std::vector<Eigen::Vector3d> normals(mesh.vertices.size(), Eigen::Vector3d::Zero());
  for (const Triangle &t : mesh.triangles) {
    const Eigen::Vector3d &a = mesh.vertices[t[0]];
    const Eigen::Vector3d face = (mesh.vertices[t[1]] - a).cross(mesh.vertices[t[2]] - a);
    for (std::uint32_t idx : t) normals[idx] += face;
  }
  for (auto &n : normals) {
    const double len = n.norm();
    n = len > 0.0 ? Eigen::Vector3d(n / len) : Eigen::Vector3d::UnitZ();
  }
  return normals;
}

void AppendGroup(TriangleMesh &mesh, const TriangleMesh &other, const std::string &group) {
  const auto offset = static_cast<std::uint32_t>(mesh.vertices.size());
  const bool colors = mesh.HasColors() || mesh.empty();
  if (mesh.triangle_groups.empty() && !mesh.triangles.empty()) {
    mesh.group_names.push_back("default");
    mesh.triangle_groups.assign(mesh.triangles.size(), 0);
  }
  const auto group_id = static_cast<std::uint32_t>(mesh.group_names.size());
  mesh.group_names.push_back(group);

  mesh.vertices.insert(mesh.vertices.end(), other.vertices.begin(), other.vertices.end());
  if (colors && other.HasColors()) {
    mesh.vertex_colors.insert(mesh.vertex_colors.end(), other.vertex_colors.begin(),
                              other.vertex_colors.end());
  } else {
    mesh.vertex_colors.clear();
  }
  mesh.vertex_normals.clear();
  for (const Triangle &t : other.triangles) {
    mesh.triangles.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
    mesh.triangle_groups.push_back(group_id);
  }
}

}  // namespace dtinspect
