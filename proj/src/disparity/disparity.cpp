#include "dtinspect/disparity.hpp"

#include <algorithm>
#include <cmath>

#include "dtinspect/png_io.hpp"
#include "dtinspect/simd/kernels.hpp"

namespace dtinspect {

const char *ToString(DisparityChannel c) {
  return c == DisparityChannel::kDepth ? "depth" : "color";
}

DisparityMap DepthDisparity(const DepthImage &render, const DepthImage &real) {
  RequireSameShape(render, real, "depth_disparity");
  DisparityMap map;
  map.channel = DisparityChannel::kDepth;
  map.values = Image<float>(render.width, render.height);
  map.valid = BinaryMask(render.width, render.height);
  simd::ActiveKernels().depth_abs_diff(render.data.data(), real.data.data(), map.values.data.data(),
                                       map.valid.data.data(), render.size());
  return map;
}

DisparityMap ColorDisparity(const ColorImage &render, const ColorImage &real,
                            const BinaryMask &footprint) {
  RequireSameShape(render, real, "color_disparity");
  RequireSameShape(render, footprint, "color_disparity footprint");
  DisparityMap map;
  map.channel = DisparityChannel::kColor;
  map.values = Image<float>(render.width, render.height);
  map.valid = BinaryMask(render.width, render.height);
  simd::ActiveKernels().delta_e76(reinterpret_cast<const std::uint8_t *>(render.data.data()),
                                  reinterpret_cast<const std::uint8_t *>(real.data.data()),
                                  footprint.data.data(), map.values.data.data(),
                                  map.valid.data.data(), render.size());
  return map;
}

BinaryMask DepthValidity(const DepthImage &depth) {
  BinaryMask mask(depth.width, depth.height);
  for (std::size_t i = 0; i < depth.size(); ++i) mask.data[i] = IsValidDepth(depth.data[i]) ? 1 : 0;
  return mask;
}

void WriteDisparityPng(const DisparityMap &map, double scale, const std::string &values_path,
                       const std::string &validity_path) {
  if (!(scale > 0.0)) throw ValidationError("disparity export: scale must be positive");
  Image<std::uint16_t> stored(map.width(), map.height());
  Image<std::uint8_t> valid(map.width(), map.height());
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    if (!map.valid.data[i]) continue;
    stored.data[i] = static_cast<std::uint16_t>(std::min(65535.0, std::round(map.values.data[i] / scale)));
    valid.data[i] = 255;
  }
  WritePngGray16(stored, values_path);
  WritePngGray8(valid, validity_path);
}

}  // namespace dtinspect
