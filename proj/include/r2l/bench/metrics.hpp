#pragma once

#include <limits>

#include "r2l/common/image.hpp"

namespace r2l::bench {

/// Returned by psnr() for identical images.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

/// 10·log10(1/mse) with peak 1; +∞ when mse == 0.
double psnr_from_mse(double mse);

/// Mean squared error over all pixels and channels.
double mse(const Image& a, const Image& b);

/// PSNR over RGB jointly (not a per-channel average). Throws UsageError on shape mismatch.
double psnr(const Image& a, const Image& b);

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double data_range = 1.0;
};

/// Mean SSIM over all fully-contained Gaussian windows of the luma
/// (0.299 R + 0.587 G + 0.114 B) images. Throws UsageError when the image is
/// smaller than the window or the shapes differ.
double ssim(const Image& a, const Image& b, const SsimOptions& options = {});

}  // namespace r2l::bench
