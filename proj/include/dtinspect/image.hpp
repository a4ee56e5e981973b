#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "dtinspect/error.hpp"

namespace dtinspect {

struct Rgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb8 &, const Rgb8 &) = default;
};

/// Dense row-major image. Pixel (x, y) lives at data[y * width + x].
template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Image() = default;
  Image(int w, int h, T fill = T{})
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {
    if (w < 0 || h < 0) throw ValidationError("negative image dimensions");
  }

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
  T &at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  const T &at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  bool Contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width && y < height;
  }
  template <typename U>
  bool SameShape(const Image<U> &o) const {
    return width == o.width && height == o.height;
  }

  friend bool operator==(const Image &, const Image &) = default;
};

/// Depth in millimeters; 0 or non-finite marks an invalid pixel.
using DepthImage = Image<float>;
using ColorImage = Image<Rgb8>;
/// One byte per pixel, 0 or 1.
using BinaryMask = Image<std::uint8_t>;

inline bool IsValidDepth(float d) { return std::isfinite(d) && d > 0.0f; }

template <typename A, typename B>
void RequireSameShape(const Image<A> &a, const Image<B> &b, const char *what) {
  if (!a.SameShape(b)) {
    throw ValidationError(std::string(what) + ": dimension mismatch (" +
                          std::to_string(a.width) + "x" + std::to_string(a.height) +
                          " vs " + std::to_string(b.width) + "x" +
                          std::to_string(b.height) + ")");
  }
}

}  // namespace dtinspect
