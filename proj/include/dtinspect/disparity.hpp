#pragma once

#include <string>

#include "dtinspect/image.hpp"

namespace dtinspect {

enum class DisparityChannel { kDepth, kColor };

const char *ToString(DisparityChannel c);

/// Per-pixel deviation between the rendered twin and the captured frame:
/// millimeters for the depth channel, CIE76 delta E for the color channel.
struct DisparityMap {
  Image<float> values;
  BinaryMask valid;
  DisparityChannel channel = DisparityChannel::kDepth;

  int width() const { return values.width; }
  int height() const { return values.height; }
};

/// |render - real| per pixel; valid only where both depths are valid.
DisparityMap DepthDisparity(const DepthImage &render, const DepthImage &real);

/// CIE76 distance per pixel, restricted to `footprint` (normally the rendered
/// depth validity) so background never contributes.
DisparityMap ColorDisparity(const ColorImage &render, const ColorImage &real,
                            const BinaryMask &footprint);

/// Footprint mask of valid depth pixels.
BinaryMask DepthValidity(const DepthImage &depth);

/// 16-bit PNG export: stored = round(value / scale), clamped to 65535, plus
/// an 8-bit validity PNG (0/255). Depth maps typically use the depth_scale,
/// color maps 0.01 (delta E x 100).
void WriteDisparityPng(const DisparityMap &map, double scale, const std::string &values_path,
                       const std::string &validity_path);

}  // namespace dtinspect
