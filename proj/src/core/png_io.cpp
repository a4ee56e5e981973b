#include "dtinspect/png_io.hpp"

#include <png.h>

#include <bit>
#include <cstdio>
#include <memory>
#include <vector>

#include "dtinspect/error.hpp"

namespace dtinspect {

namespace {

struct FileCloser {
  void operator()(std::FILE *f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

constexpr bool LittleEndian() { return std::endian::native == std::endian::little; }

enum class Layout { kRgb8, kGray8, kGray16 };

struct Decoded {
  int width = 0;
  int height = 0;
  std::vector<png_byte> bytes;  // tightly packed rows
};

[[noreturn]] void PngErrorFn(png_structp png, png_const_charp msg) {
  auto *what = static_cast<std::string *>(png_get_error_ptr(png));
  if (what) *what = msg;
  png_longjmp(png, 1);
}

void PngWarningFn(png_structp, png_const_charp) {}

Decoded Decode(const std::string &path, Layout layout) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open PNG '" + path + "'");
  std::string message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, PngErrorFn, PngWarningFn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialisation failed");
  }
  Decoded out;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("cannot decode PNG '" + path + "': " + message);
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  switch (layout) {
    case Layout::kRgb8:
      if (bit_depth == 16) png_set_strip_16(png);
      if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
      }
      break;
    case Layout::kGray8:
    case Layout::kGray16:
      if (color_type & PNG_COLOR_MASK_COLOR) {
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);
      }
      if (layout == Layout::kGray8 && bit_depth == 16) png_set_strip_16(png);
      if (layout == Layout::kGray16 && bit_depth == 16 && LittleEndian()) png_set_swap(png);
      break;
  }
  png_read_update_info(png, info);
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  const std::size_t stride = png_get_rowbytes(png, info);
  out.bytes.resize(stride * out.height);
  rows.resize(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = out.bytes.data() + stride * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  const int out_depth = png_get_bit_depth(png, info);
  png_destroy_read_struct(&png, &info, nullptr);

  if (layout == Layout::kGray16 && out_depth == 8) {
    std::vector<png_byte> wide(out.bytes.size() * 2);
    auto *dst = reinterpret_cast<std::uint16_t *>(wide.data());
    for (std::size_t i = 0; i < out.bytes.size(); ++i) dst[i] = out.bytes[i];
    out.bytes = std::move(wide);
  }
  return out;
}

void Encode(const std::string &path, int width, int height, int color_type, int bit_depth,
            const png_byte *data, std::size_t stride, bool swap16) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot write PNG '" + path + "'");
  std::string message;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, PngErrorFn, PngWarningFn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialisation failed");
  }
  std::vector<png_bytep> rows(height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("cannot encode PNG '" + path + "': " + message);
  }
  png_init_io(png, file.get());
  // Fast deflate: frames are rewritten every cycle, size matters less.
  png_set_compression_level(png, 1);
  png_set_filter(png, 0, PNG_FILTER_SUB);
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (swap16) png_set_swap(png);
  for (int y = 0; y < height; ++y) rows[y] = const_cast<png_bytep>(data + stride * y);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) throw IoError("failed writing PNG '" + path + "'");
}

}  // namespace

ColorImage ReadPngRgb(const std::string &path) {
  Decoded d = Decode(path, Layout::kRgb8);
  ColorImage img(d.width, d.height);
  static_assert(sizeof(Rgb8) == 3);
  std::copy(d.bytes.begin(), d.bytes.end(), reinterpret_cast<png_byte *>(img.data.data()));
  return img;
}

void WritePngRgb(const ColorImage &image, const std::string &path) {
  Encode(path, image.width, image.height, PNG_COLOR_TYPE_RGB, 8,
         reinterpret_cast<const png_byte *>(image.data.data()),
         static_cast<std::size_t>(image.width) * 3, false);
}

Gray16Image ReadPngGray16(const std::string &path) {
  Decoded d = Decode(path, Layout::kGray16);
  Gray16Image img(d.width, d.height);
  std::copy(d.bytes.begin(), d.bytes.end(), reinterpret_cast<png_byte *>(img.data.data()));
  return img;
}

void WritePngGray16(const Gray16Image &image, const std::string &path) {
  Encode(path, image.width, image.height, PNG_COLOR_TYPE_GRAY, 16,
         reinterpret_cast<const png_byte *>(image.data.data()),
         static_cast<std::size_t>(image.width) * 2, LittleEndian());
}

void WritePngGray8(const Gray8Image &image, const std::string &path) {
  Encode(path, image.width, image.height, PNG_COLOR_TYPE_GRAY, 8, image.data.data(),
         static_cast<std::size_t>(image.width), false);
}

Gray8Image ReadPngGray8(const std::string &path) {
  Decoded d = Decode(path, Layout::kGray8);
  Gray8Image img(d.width, d.height);
  std::copy(d.bytes.begin(), d.bytes.end(), img.data.begin());
  return img;
}

}  // namespace dtinspect
