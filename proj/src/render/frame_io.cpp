#include <cmath>
#include <limits>
#include <string>

#include "dtinspect/png_io.hpp"
#include "dtinspect/renderer.hpp"

namespace dtinspect {

Image<std::uint16_t> QuantizeDepth(const DepthImage &depth, double depth_scale) {
  if (!(depth_scale > 0.0)) throw ValidationError("depth_scale must be positive");
  Image<std::uint16_t> out(depth.width, depth.height);
  const double limit = std::numeric_limits<std::uint16_t>::max();
  for (std::size_t i = 0; i < depth.data.size(); ++i) {
    const float d = depth.data[i];
    if (!IsValidDepth(d)) continue;
    const double q = std::round(d / depth_scale);
    if (q > limit) {
      throw ValidationError("depth " + std::to_string(d) + " mm exceeds the 16-bit range at scale " +
                            std::to_string(depth_scale) + " mm/unit");
    }
    // Depths below half a quantum would round to the invalid marker.
    out.data[i] = static_cast<std::uint16_t>(std::max(q, 1.0));
  }
  return out;
}

DepthImage DequantizeDepth(const Image<std::uint16_t> &stored, double depth_scale) {
  if (!(depth_scale > 0.0)) throw ValidationError("depth_scale must be positive");
  DepthImage out(stored.width, stored.height);
  for (std::size_t i = 0; i < stored.data.size(); ++i) {
    out.data[i] = static_cast<float>(stored.data[i] * depth_scale);
  }
  return out;
}

void WriteFrame(const RgbdFrame &frame, double depth_scale, const std::string &color_path,
                const std::string &depth_path) {
  frame.Validate();
  const auto stored = QuantizeDepth(frame.depth, depth_scale);
  WritePngRgb(frame.color, color_path);
  WritePngGray16(stored, depth_path);
}

DepthImage ReadDepthPng(const std::string &path, double depth_scale) {
  return DequantizeDepth(ReadPngGray16(path), depth_scale);
}

}  // namespace dtinspect
