#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dtinspect/error.hpp"
#include "dtinspect/mesh.hpp"

namespace dtinspect {

namespace {

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Resolves a 1-based (or negative, relative) OBJ index.
std::int64_t ResolveObjIndex(std::int64_t idx, std::size_t count, const std::string &path,
                             std::size_t line) {
  const std::int64_t resolved = idx > 0 ? idx - 1 : static_cast<std::int64_t>(count) + idx;
  if (idx == 0 || resolved < 0 || resolved >= static_cast<std::int64_t>(count)) {
    throw ValidationError(path + ":" + std::to_string(line) + ": index " +
                          std::to_string(idx) + " out of range");
  }
  return resolved;
}

void AddTriangle(TriangleMesh &mesh, std::uint32_t a, std::uint32_t b, std::uint32_t c,
                 std::uint32_t group) {
  if (a == b || b == c || a == c) return;  // dropped: degenerate
  mesh.triangles.push_back({a, b, c});
  mesh.triangle_groups.push_back(group);
}

TriangleMesh LoadObj(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh '" + path + "'");

  TriangleMesh mesh;
  std::vector<Eigen::Vector3d> colors;
  std::vector<bool> has_color;
  std::vector<Eigen::Vector3d> file_normals;
  std::vector<Eigen::Vector3d> vertex_normals;
  std::vector<bool> has_normal;
  std::uint32_t group = 0;
  bool group_declared = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) {
        throw ValidationError(path + ":" + std::to_string(line_no) + ": malformed vertex");
      }
      mesh.vertices.emplace_back(x, y, z);
      double r, g, b;
      if (ss >> r >> g >> b) {
        if (r > 1.0 || g > 1.0 || b > 1.0) {
          r /= 255.0;
          g /= 255.0;
          b /= 255.0;
        }
        colors.emplace_back(r, g, b);
        has_color.push_back(true);
      } else {
        colors.emplace_back(0.5, 0.5, 0.5);
        has_color.push_back(false);
      }
      vertex_normals.emplace_back(Eigen::Vector3d::Zero());
      has_normal.push_back(false);
    } else if (tag == "vn") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) {
        throw ValidationError(path + ":" + std::to_string(line_no) + ": malformed normal");
      }
      file_normals.emplace_back(Eigen::Vector3d(x, y, z).normalized());
    } else if (tag == "g" || tag == "o") {
      std::string name;
      std::getline(ss >> std::ws, name);
      if (name.empty()) name = "default";
      auto it = std::find(mesh.group_names.begin(), mesh.group_names.end(), name);
      if (it == mesh.group_names.end()) {
        // An unused implicit default group is replaced rather than kept empty.
        if (!group_declared && mesh.triangles.empty() && !mesh.group_names.empty()) {
          mesh.group_names.clear();
        }
        mesh.group_names.push_back(name);
        group = static_cast<std::uint32_t>(mesh.group_names.size() - 1);
      } else {
        group = static_cast<std::uint32_t>(it - mesh.group_names.begin());
      }
      group_declared = true;
    } else if (tag == "f") {
      if (mesh.group_names.empty()) mesh.group_names.push_back("default");
      std::vector<std::uint32_t> face;
      std::string token;
      while (ss >> token) {
        const auto slash = token.find('/');
        const std::int64_t vi = std::stoll(token.substr(0, slash));
        const auto v = static_cast<std::uint32_t>(
            ResolveObjIndex(vi, mesh.vertices.size(), path, line_no));
        face.push_back(v);
        if (slash != std::string::npos) {
          const auto slash2 = token.find('/', slash + 1);
          if (slash2 != std::string::npos && slash2 + 1 < token.size()) {
            const std::int64_t ni = std::stoll(token.substr(slash2 + 1));
            const auto n = ResolveObjIndex(ni, file_normals.size(), path, line_no);
            vertex_normals[v] = file_normals[static_cast<std::size_t>(n)];
            has_normal[v] = true;
          }
        }
      }
      if (face.size() < 3) {
        throw ValidationError(path + ":" + std::to_string(line_no) + ": face with fewer than 3 vertices");
      }
      for (std::size_t i = 1; i + 1 < face.size(); ++i) {
        AddTriangle(mesh, face[0], face[i], face[i + 1], group);
      }
    }
  }
  if (!has_color.empty() && std::all_of(has_color.begin(), has_color.end(), [](bool b) { return b; })) {
    mesh.vertex_colors = std::move(colors);
  }
  if (!has_normal.empty() && std::all_of(has_normal.begin(), has_normal.end(), [](bool b) { return b; })) {
    mesh.vertex_normals = std::move(vertex_normals);
  }
  if (mesh.group_names.size() <= 1) {
    // A single group carries no information.
    if (mesh.group_names.empty() || mesh.group_names[0] == "default") {
      mesh.group_names.clear();
      mesh.triangle_groups.clear();
    }
  }
  mesh.Validate();
  return mesh;
}

struct PlyProperty {
  std::string name;
  std::string type;
  bool is_list = false;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

TriangleMesh LoadPly(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) throw ValidationError(path + ": missing 'ply' magic");

  std::vector<PlyElement> elements;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt != "ascii") throw ValidationError(path + ": only ASCII PLY is supported");
    } else if (tag == "element") {
      PlyElement e;
      ss >> e.name >> e.count;
      elements.push_back(e);
    } else if (tag == "property") {
      if (elements.empty()) throw ValidationError(path + ": property before element");
      PlyProperty p;
      std::string type;
      ss >> type;
      if (type == "list") {
        std::string count_type, item_type;
        ss >> count_type >> item_type;
        p.is_list = true;
        p.type = item_type;
      } else {
        p.type = type;
      }
      ss >> p.name;
      elements.back().properties.push_back(p);
    } else if (tag == "end_header") {
      break;
    }
  }

  TriangleMesh mesh;
  bool colors = false;
  bool normals = false;
  for (const PlyElement &e : elements) {
    if (e.name == "vertex") {
      auto find = [&](const char *n) -> int {
        for (std::size_t i = 0; i < e.properties.size(); ++i) {
          if (e.properties[i].name == n) return static_cast<int>(i);
        }
        return -1;
      };
      const int ix = find("x"), iy = find("y"), iz = find("z");
      const int inx = find("nx"), iny = find("ny"), inz = find("nz");
      const int ir = find("red"), ig = find("green"), ib = find("blue");
      if (ix < 0 || iy < 0 || iz < 0) throw ValidationError(path + ": vertex lacks x/y/z");
      colors = ir >= 0 && ig >= 0 && ib >= 0;
      normals = inx >= 0 && iny >= 0 && inz >= 0;
      const bool uchar_color = colors && Lower(e.properties[ir].type).find("char") != std::string::npos;
      std::vector<double> values(e.properties.size());
      for (std::size_t i = 0; i < e.count; ++i) {
        if (!std::getline(in, line)) throw ValidationError(path + ": truncated vertex list");
        std::istringstream ss(line);
        for (double &v : values) {
          if (!(ss >> v)) throw ValidationError(path + ": malformed vertex " + std::to_string(i));
        }
        mesh.vertices.emplace_back(values[ix], values[iy], values[iz]);
        if (colors) {
          const double s = uchar_color ? 1.0 / 255.0 : 1.0;
          mesh.vertex_colors.emplace_back(values[ir] * s, values[ig] * s, values[ib] * s);
        }
        if (normals) {
          mesh.vertex_normals.push_back(
              Eigen::Vector3d(values[inx], values[iny], values[inz]).normalized());
        }
      }
    } else if (e.name == "face") {
      for (std::size_t i = 0; i < e.count; ++i) {
        if (!std::getline(in, line)) throw ValidationError(path + ": truncated face list");
        std::istringstream ss(line);
        std::size_t n = 0;
        ss >> n;
        std::vector<std::uint32_t> face(n);
        for (auto &idx : face) {
          std::int64_t v;
          if (!(ss >> v) || v < 0 || static_cast<std::size_t>(v) >= mesh.vertices.size()) {
            throw ValidationError(path + ": face " + std::to_string(i) + " has a bad index");
          }
          idx = static_cast<std::uint32_t>(v);
        }
        for (std::size_t k = 1; k + 1 < face.size(); ++k) {
          if (face[0] == face[k] || face[k] == face[k + 1] || face[0] == face[k + 1]) continue;
          mesh.triangles.push_back({face[0], face[k], face[k + 1]});
        }
      }
    } else {
      for (std::size_t i = 0; i < e.count; ++i) std::getline(in, line);
    }
  }
  mesh.Validate();
  return mesh;
}

void SaveObj(const TriangleMesh &mesh, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh '" + path + "'");
  out.precision(17);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const auto &v = mesh.vertices[i];
    out << "v " << v.x() << ' ' << v.y() << ' ' << v.z();
    if (mesh.HasColors()) {
      const auto &c = mesh.vertex_colors[i];
      out << ' ' << c.x() << ' ' << c.y() << ' ' << c.z();
    }
    out << '\n';
  }
  const bool normals = !mesh.vertex_normals.empty();
  for (const auto &n : mesh.vertex_normals) {
    out << "vn " << n.x() << ' ' << n.y() << ' ' << n.z() << '\n';
  }
  std::int64_t current = -1;
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    if (mesh.HasGroups() && mesh.triangle_groups[i] != current) {
      current = mesh.triangle_groups[i];
      out << "g " << mesh.group_names[static_cast<std::size_t>(current)] << '\n';
    }
    out << 'f';
    for (std::uint32_t idx : mesh.triangles[i]) {
      out << ' ' << idx + 1;
      if (normals) out << "//" << idx + 1;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing mesh '" + path + "'");
}

void SavePly(const TriangleMesh &mesh, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh '" + path + "'");
  out.precision(17);
  out << "ply\nformat ascii 1.0\nelement vertex " << mesh.vertices.size()
      << "\nproperty double x\nproperty double y\nproperty double z\n";
  if (!mesh.vertex_normals.empty()) {
    out << "property double nx\nproperty double ny\nproperty double nz\n";
  }
  if (mesh.HasColors()) {
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  }
  out << "element face " << mesh.triangles.size()
      << "\nproperty list uchar int vertex_indices\nend_header\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const auto &v = mesh.vertices[i];
    out << v.x() << ' ' << v.y() << ' ' << v.z();
    if (!mesh.vertex_normals.empty()) {
      const auto &n = mesh.vertex_normals[i];
      out << ' ' << n.x() << ' ' << n.y() << ' ' << n.z();
    }
    if (mesh.HasColors()) {
      for (int c = 0; c < 3; ++c) {
        out << ' ' << static_cast<int>(std::lround(std::clamp(mesh.vertex_colors[i][c], 0.0, 1.0) * 255.0));
      }
    }
    out << '\n';
  }
  for (const Triangle &t : mesh.triangles) {
    out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
  if (!out) throw IoError("failed writing mesh '" + path + "'");
}

}  // namespace

TriangleMesh LoadMesh(const std::string &path) {
  const std::string ext = Lower(std::filesystem::path(path).extension().string());
  if (ext == ".obj") return LoadObj(path);
  if (ext == ".ply") return LoadPly(path);
  throw ValidationError("unsupported mesh format '" + ext + "' (expected .obj or .ply)");
}

void SaveMesh(const TriangleMesh &mesh, const std::string &path) {
  const std::string ext = Lower(std::filesystem::path(path).extension().string());
  if (ext == ".obj") return SaveObj(mesh, path);
  if (ext == ".ply") return SavePly(mesh, path);
  throw ValidationError("unsupported mesh format '" + ext + "' (expected .obj or .ply)");
}

}  // namespace dtinspect
