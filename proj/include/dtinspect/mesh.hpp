#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace dtinspect {

using Triangle = std::array<std::uint32_t, 3>;

/// CAD mesh in millimeters. Optional named groups partition the triangles
/// (OBJ `g`/`o` statements); they identify removable sub-assemblies.
struct TriangleMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<Triangle> triangles;
  std::vector<Eigen::Vector3d> vertex_colors;   // empty or per vertex, sRGB [0,1]
  std::vector<Eigen::Vector3d> vertex_normals;  // empty or per vertex, unit
  std::vector<std::string> group_names;
  std::vector<std::uint32_t> triangle_groups;   // empty or per triangle

  bool empty() const { return triangles.empty(); }
  bool HasColors() const { return !vertex_colors.empty(); }
  bool HasGroups() const { return !triangle_groups.empty(); }

  /// Throws ValidationError on out-of-range or degenerate indices, mismatched
  /// attribute counts, or non-unit normals.
  void Validate() const;

  /// Index of the named group; throws ValidationError if unknown.
  std::uint32_t GroupIndex(const std::string &name) const;
  std::size_t GroupTriangleCount(std::uint32_t group) const;
};

/// Copy without the triangles of `group`. Vertices are kept so vertex
/// indices stay stable.
TriangleMesh WithoutGroup(const TriangleMesh &mesh, const std::string &group);

/// Per-vertex normals as the area-weighted average of adjacent face normals.
std::vector<Eigen::Vector3d> ComputeVertexNormals(const TriangleMesh &mesh);

/// Appends `other` to `mesh`, creating a group named `group` for its triangles.
void AppendGroup(TriangleMesh &mesh, const TriangleMesh &other, const std::string &group);

TriangleMesh LoadMesh(const std::string &path);
/// OBJ for .obj, ASCII PLY for .ply.
void SaveMesh(const TriangleMesh &mesh, const std::string &path);

}  // namespace dtinspect
