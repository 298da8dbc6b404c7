#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

namespace r2l {

/// Row-major RGB image with linear float channels, nominally in [0, 1].
class Image {
 public:
  Image() = default;
  Image(int width, int height, float fill = 0.0f);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  float* pixel(int row, int col) { return &data_[index(row, col)]; }
  const float* pixel(int row, int col) const { return &data_[index(row, col)]; }
  void set(int row, int col, const std::array<float, 3>& rgb);

  std::vector<float>& data() { return data_; }
  const std::vector<float>& data() const { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int row, int col) const {
    return (static_cast<std::size_t>(row) * width_ + col) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

/// Binary P6, 8-bit, values clamped to [0,1] and rounded (no gamma).
void write_ppm(const Image& image, const std::filesystem::path& path);
Image read_ppm(const std::filesystem::path& path);

/// True when the build has PNG support.
bool png_available();
void write_png(const Image& image, const std::filesystem::path& path);

}  // namespace r2l
