#include "r2l/common/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#ifdef R2L_HAVE_PNG
#include <png.h>
#endif

#include "r2l/common/error.hpp"

namespace r2l {

Image::Image(int width, int height, float fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw UsageError("image dimensions must be nonnegative");
  data_.assign(static_cast<std::size_t>(width) * height * 3, fill);
}

void Image::set(int row, int col, const std::array<float, 3>& rgb) {
  float* p = pixel(row, col);
  p[0] = rgb[0];
  p[1] = rgb[1];
  p[2] = rgb[2];
}

namespace {

std::uint8_t quantize(float v) {
  const float c = std::clamp(v, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

std::vector<std::uint8_t> quantized(const Image& image) {
  std::vector<std::uint8_t> out(image.data().size());
  std::transform(image.data().begin(), image.data().end(), out.begin(), quantize);
  return out;
}

}  // namespace

void write_ppm(const Image& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "P6\n" << image.width() << " " << image.height() << "\n255\n";
  const auto bytes = quantized(image);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Image read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P6") throw FormatError(path.string() + ": not a binary PPM");
  auto next_int = [&] {
    // skip whitespace and comments
    while (true) {
      in >> std::ws;
      if (in.peek() == '#') {
        std::string line;
        std::getline(in, line);
      } else {
        break;
      }
    }
    int v = -1;
    in >> v;
    if (!in) throw FormatError(path.string() + ": malformed PPM header");
    return v;
  };
  const int width = next_int();
  const int height = next_int();
  const int maxval = next_int();
  if (width <= 0 || height <= 0 || maxval != 255) throw FormatError(path.string() + ": unsupported PPM");
  in.get();
  Image image(width, height);
  std::vector<std::uint8_t> bytes(image.data().size());
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) throw FormatError(path.string() + ": truncated");
  std::transform(bytes.begin(), bytes.end(), image.data().begin(),
                 [](std::uint8_t b) { return static_cast<float>(b) / 255.0f; });
  return image;
}

bool png_available() {
#ifdef R2L_HAVE_PNG
  return true;
#else
  return false;
#endif
}

void write_png(const Image& image, const std::filesystem::path& path) {
#ifdef R2L_HAVE_PNG
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = PNG_FORMAT_RGB;
  const auto bytes = quantized(image);
  if (!png_image_write_to_file(&png, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    throw std::runtime_error("png write failed for " + path.string() + ": " + png.message);
  }
#else
  (void)image;
  (void)path;
  throw UsageError("built without PNG support");
#endif
}

}  // namespace r2l
