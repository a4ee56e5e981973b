#include "dtinspect/renderer.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace dtinspect {

namespace {

// Coverage is decided on a fixed-point grid with 8 bits of sub-pixel
// precision so shared edges are evaluated exactly by both triangles.
constexpr int kSubpixelBits = 8;
constexpr std::int64_t kSubpixelScale = 1 << kSubpixelBits;
constexpr std::int64_t kHalfPixel = kSubpixelScale / 2;

struct ClipVertex {
  Eigen::Vector3d p;  // camera space, mm
  Eigen::Vector3d c;  // linear attribute (vertex color)
};

using ClipPolygon = std::vector<ClipVertex>;

// Half-space a.p + b >= 0 in camera space.
struct ClipPlane {
  Eigen::Vector3d normal;
  double offset;
  double Eval(const Eigen::Vector3d &p) const { return normal.dot(p) + offset; }
};

std::array<ClipPlane, 5> MakeClipPlanes(const CameraIntrinsics &k, double near) {
  // Guard band: one image size beyond every border keeps fixed-point
  // coordinates small while almost never clipping visible geometry.
  const double guard = std::max(k.width, k.height);
  const double u_min = -guard, u_max = k.width + guard;
  const double v_min = -guard, v_max = k.height + guard;
  return {{
      {{0.0, 0.0, 1.0}, -near},
      {{k.fx, 0.0, k.cx - u_min}, 0.0},   // u >= u_min
      {{-k.fx, 0.0, u_max - k.cx}, 0.0},  // u <= u_max
      {{0.0, k.fy, k.cy - v_min}, 0.0},
      {{0.0, -k.fy, v_max - k.cy}, 0.0},
  }};
}

void ClipAgainst(const ClipPlane &plane, const ClipPolygon &in, ClipPolygon &out) {
  out.clear();
  const std::size_t n = in.size();
  for (std::size_t i = 0; i < n; ++i) {
    const ClipVertex &a = in[i];
    const ClipVertex &b = in[(i + 1) % n];
    const double da = plane.Eval(a.p);
    const double db = plane.Eval(b.p);
    if (da >= 0.0) out.push_back(a);
    if ((da >= 0.0) != (db >= 0.0)) {
      const double t = da / (da - db);
      out.push_back({a.p + t * (b.p - a.p), a.c + t * (b.c - a.c)});
    }
  }
}

struct RasterVertex {
  double x, y;          // raster space: pixel (u, v) center at (u + 0.5, v + 0.5)
  std::int64_t fx, fy;  // fixed-point raster coordinates
  double inv_z;
  Eigen::Vector3d c_over_z;
};

// Pixel-center inclusion for points exactly on an edge (top-left rule).
inline bool IsTopLeft(std::int64_t dx, std::int64_t dy) { return dy < 0 || (dy == 0 && dx > 0); }

template <bool kWithColor>
class Rasterizer {
 public:
  Rasterizer(const CameraIntrinsics &k, DepthImage &depth, ColorImage *color)
      : k_(k), depth_(depth), color_(color) {}

  void Triangle(RasterVertex v0, RasterVertex v1, RasterVertex v2, bool flat_color,
                Rgb8 flat) {
    std::int64_t area = Edge(v0, v1, v2.fx, v2.fy);
    if (area == 0) return;
    if (area < 0) {
      std::swap(v1, v2);
      area = -area;
    }
    const std::int64_t min_x = std::min({v0.fx, v1.fx, v2.fx});
    const std::int64_t max_x = std::max({v0.fx, v1.fx, v2.fx});
    const std::int64_t min_y = std::min({v0.fy, v1.fy, v2.fy});
    const std::int64_t max_y = std::max({v0.fy, v1.fy, v2.fy});
    const int u0 = static_cast<int>(std::max<std::int64_t>(0, CeilDiv(min_x - kHalfPixel, kSubpixelScale)));
    const int u1 = static_cast<int>(std::min<std::int64_t>(k_.width - 1, FloorDiv(max_x - kHalfPixel, kSubpixelScale)));
    const int r0 = static_cast<int>(std::max<std::int64_t>(0, CeilDiv(min_y - kHalfPixel, kSubpixelScale)));
    const int r1 = static_cast<int>(std::min<std::int64_t>(k_.height - 1, FloorDiv(max_y - kHalfPixel, kSubpixelScale)));
    if (u0 > u1 || r0 > r1) return;

    // Affine interpolation of 1/z and c/z over raster space (unsnapped).
    const double ax = v1.x - v0.x, ay = v1.y - v0.y;
    const double bx = v2.x - v0.x, by = v2.y - v0.y;
    const double det = ax * by - ay * bx;
    if (det == 0.0) return;
    const double inv_det = 1.0 / det;
    auto gradient = [&](double f0, double f1, double f2, double &gx, double &gy) {
      const double d1 = f1 - f0, d2 = f2 - f0;
      gx = (d1 * by - d2 * ay) * inv_det;
      gy = (d2 * ax - d1 * bx) * inv_det;
    };
    double wx, wy;
    gradient(v0.inv_z, v1.inv_z, v2.inv_z, wx, wy);
    std::array<double, 3> cx{}, cy{};
    if constexpr (kWithColor) {
      if (!flat_color) {
        for (int ch = 0; ch < 3; ++ch) {
          gradient(v0.c_over_z[ch], v1.c_over_z[ch], v2.c_over_z[ch], cx[ch], cy[ch]);
        }
      }
    }
    const double z_lo = 1.0 / std::max({v0.inv_z, v1.inv_z, v2.inv_z});
    const double z_hi = 1.0 / std::min({v0.inv_z, v1.inv_z, v2.inv_z});

    const EdgeSetup e0 = Setup(v1, v2), e1 = Setup(v2, v0), e2 = Setup(v0, v1);
    const std::int64_t px0 = static_cast<std::int64_t>(u0) * kSubpixelScale + kHalfPixel;
    for (int v = r0; v <= r1; ++v) {
      const std::int64_t py = static_cast<std::int64_t>(v) * kSubpixelScale + kHalfPixel;
      std::int64_t w0 = e0.At(px0, py), w1 = e1.At(px0, py), w2 = e2.At(px0, py);
      const double sy = v + 0.5 - v0.y;
      float *zrow = &depth_.at(0, v);
      for (int u = u0; u <= u1; ++u, w0 += e0.step_x, w1 += e1.step_x, w2 += e2.step_x) {
        if ((w0 | w1 | w2) < 0) continue;
        const double sx = u + 0.5 - v0.x;
        const double inv_z = v0.inv_z + wx * sx + wy * sy;
        if (!(inv_z > 0.0)) continue;
        const double z = std::clamp(1.0 / inv_z, z_lo, z_hi);
        const auto zf = static_cast<float>(z);
        if (!(zf < zrow[u])) continue;
        zrow[u] = zf;
        if constexpr (kWithColor) {
          Rgb8 &out = color_->at(u, v);
          if (flat_color) {
            out = flat;
          } else {
            std::array<std::uint8_t, 3> rgb;
            for (int ch = 0; ch < 3; ++ch) {
              const double c = (v0.c_over_z[ch] + cx[ch] * sx + cy[ch] * sy) * z;
              rgb[ch] = static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
            }
            out = {rgb[0], rgb[1], rgb[2]};
          }
        }
      }
    }
  }

 private:
  struct EdgeSetup {
    std::int64_t ax, ay, dx, dy, bias, step_x;
    // Biased so that `>= 0` implements the top-left rule exactly.
    std::int64_t At(std::int64_t px, std::int64_t py) const {
      return dx * (py - ay) - dy * (px - ax) - bias;
    }
  };

  static EdgeSetup Setup(const RasterVertex &a, const RasterVertex &b) {
    EdgeSetup e;
    e.ax = a.fx;
    e.ay = a.fy;
    e.dx = b.fx - a.fx;
    e.dy = b.fy - a.fy;
    e.bias = IsTopLeft(e.dx, e.dy) ? 0 : 1;
    e.step_x = -e.dy * kSubpixelScale;
    return e;
  }

  static std::int64_t Edge(const RasterVertex &a, const RasterVertex &b, std::int64_t px,
                           std::int64_t py) {
    return (b.fx - a.fx) * (py - a.fy) - (b.fy - a.fy) * (px - a.fx);
  }

  static std::int64_t FloorDiv(std::int64_t a, std::int64_t b) {
    return a >= 0 ? a / b : -((-a + b - 1) / b);
  }
  static std::int64_t CeilDiv(std::int64_t a, std::int64_t b) { return -FloorDiv(-a, b); }

  const CameraIntrinsics &k_;
  DepthImage &depth_;
  ColorImage *color_;
};

RasterVertex ToRaster(const ClipVertex &cv, const CameraIntrinsics &k) {
  RasterVertex r;
  const double inv_z = 1.0 / cv.p.z();
  r.x = k.fx * cv.p.x() * inv_z + k.cx + 0.5;
  r.y = k.fy * cv.p.y() * inv_z + k.cy + 0.5;
  r.fx = std::llround(r.x * kSubpixelScale);
  r.fy = std::llround(r.y * kSubpixelScale);
  r.inv_z = inv_z;
  r.c_over_z = cv.c * inv_z;
  return r;
}

template <bool kWithColor>
void RenderImpl(const TriangleMesh &mesh, const RigidTransform &pose, const CameraIntrinsics &k,
                const RenderOptions &options, DepthImage &depth, ColorImage *color) {
  k.Validate();
  constexpr float kFar = std::numeric_limits<float>::infinity();
  depth = DepthImage(k.width, k.height, kFar);
  if constexpr (kWithColor) *color = ColorImage(k.width, k.height);

  std::vector<Eigen::Vector3d> cam(mesh.vertices.size());
  for (std::size_t i = 0; i < cam.size(); ++i) cam[i] = pose.Apply(mesh.vertices[i]);

  const bool flat = !mesh.HasColors();
  const auto planes = MakeClipPlanes(k, options.near_plane_mm);
  Rasterizer<kWithColor> raster(k, depth, color);
  ClipPolygon poly, scratch;

  for (const Triangle &t : mesh.triangles) {
    const Eigen::Vector3d &a = cam[t[0]], &b = cam[t[1]], &c = cam[t[2]];
    if (options.cull_back_faces && (b - a).cross(c - a).dot(a) >= 0.0) continue;

    bool inside_all = true;
    bool rejected = false;
    for (const ClipPlane &plane : planes) {
      const double da = plane.Eval(a), db = plane.Eval(b), dc = plane.Eval(c);
      if (da < 0.0 && db < 0.0 && dc < 0.0) {
        rejected = true;
        break;
      }
      if (da < 0.0 || db < 0.0 || dc < 0.0) inside_all = false;
    }
    if (rejected) continue;

    auto attr = [&](std::uint32_t idx) -> Eigen::Vector3d {
      if constexpr (kWithColor) {
        if (!flat) return mesh.vertex_colors[idx];
      }
      return Eigen::Vector3d::Zero();
    };
    poly.assign({{a, attr(t[0])}, {b, attr(t[1])}, {c, attr(t[2])}});
    if (!inside_all) {
      for (const ClipPlane &plane : planes) {
        ClipAgainst(plane, poly, scratch);
        poly.swap(scratch);
        if (poly.size() < 3) break;
      }
      if (poly.size() < 3) continue;
    }
    const RasterVertex r0 = ToRaster(poly[0], k);
    RasterVertex prev = ToRaster(poly[1], k);
    for (std::size_t i = 2; i < poly.size(); ++i) {
      const RasterVertex next = ToRaster(poly[i], k);
      raster.Triangle(r0, prev, next, flat, kUntexturedGray);
      prev = next;
    }
  }
  for (float &d : depth.data) {
    if (d == kFar) d = 0.0f;
  }
}

}  // namespace

void RgbdFrame::Validate() const {
  intrinsics.Validate();
  if (color.width != intrinsics.width || color.height != intrinsics.height ||
      depth.width != intrinsics.width || depth.height != intrinsics.height) {
    throw ValidationError("frame: color/depth dimensions do not match intrinsics " +
                          std::to_string(intrinsics.width) + "x" +
                          std::to_string(intrinsics.height));
  }
}

RgbdFrame RenderRgbd(const TriangleMesh &mesh, const RigidTransform &pose,
                     const CameraIntrinsics &k, const RenderOptions &options) {
  RgbdFrame frame;
  frame.intrinsics = k;
  RenderImpl<true>(mesh, pose, k, options, frame.depth, &frame.color);
  return frame;
}

DepthImage RenderDepthOnly(const TriangleMesh &mesh, const RigidTransform &pose,
                           const CameraIntrinsics &k, const RenderOptions &options) {
  DepthImage depth;
  RenderImpl<false>(mesh, pose, k, options, depth, nullptr);
  return depth;
}

}  // namespace dtinspect
