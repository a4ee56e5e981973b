#pragma once

#include <cstdint>
#include <string>

#include "dtinspect/image.hpp"

namespace dtinspect {

using Gray16Image = Image<std::uint16_t>;
using Gray8Image = Image<std::uint8_t>;

/// Any PNG color type is expanded to 8-bit RGB.
ColorImage ReadPngRgb(const std::string &path);
void WritePngRgb(const ColorImage &image, const std::string &path);

/// Single-channel 16-bit PNG. 8-bit gray inputs are widened.
Gray16Image ReadPngGray16(const std::string &path);
void WritePngGray16(const Gray16Image &image, const std::string &path);

void WritePngGray8(const Gray8Image &image, const std::string &path);
Gray8Image ReadPngGray8(const std::string &path);

}  // namespace dtinspect
