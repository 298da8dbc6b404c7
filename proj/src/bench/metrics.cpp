#include "r2l/bench/metrics.hpp"

#include <cmath>
#include <vector>

#include "r2l/common/error.hpp"

namespace r2l::bench {

double psnr_from_mse(double mse) {
  if (mse <= 0.0) return kPsnrIdentical;
  return 10.0 * std::log10(1.0 / mse);
}

double mse(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw UsageError("image shapes differ");
  if (a.pixel_count() == 0) throw UsageError("empty image");
  double sum = 0.0;
  const auto& x = a.data();
  const auto& y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = static_cast<double>(x[i]) - static_cast<double>(y[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(x.size());
}

double psnr(const Image& a, const Image& b) { return psnr_from_mse(mse(a, b)); }

namespace {

std::vector<double> luma(const Image& img) {
  std::vector<double> out(img.pixel_count());
  const auto& d = img.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 0.299 * d[3 * i] + 0.587 * d[3 * i + 1] + 0.114 * d[3 * i + 2];
  }
  return out;
}

/// Separable Gaussian filter keeping only fully-contained windows.
std::vector<double> filter_valid(const std::vector<double>& src, int width, int height, const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int out_w = width - n + 1;
  const int out_h = height - n + 1;
  std::vector<double> tmp(static_cast<std::size_t>(height) * out_w);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < out_w; ++c) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[i] * src[static_cast<std::size_t>(r) * width + c + i];
      tmp[static_cast<std::size_t>(r) * out_w + c] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(out_h) * out_w);
  for (int r = 0; r < out_h; ++r) {
    for (int c = 0; c < out_w; ++c) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[i] * tmp[static_cast<std::size_t>(r + i) * out_w + c];
      out[static_cast<std::size_t>(r) * out_w + c] = s;
    }
  }
  return out;
}

}  // namespace

double ssim(const Image& a, const Image& b, const SsimOptions& o) {
  if (!a.same_shape(b)) throw UsageError("ssim: image shapes differ");
  if (o.window < 1 || o.window % 2 == 0) throw UsageError("ssim: window must be odd and positive");
  if (a.width() < o.window || a.height() < o.window) throw UsageError("ssim: image smaller than the window");

  std::vector<double> kernel(static_cast<std::size_t>(o.window));
  const int half = o.window / 2;
  double ksum = 0.0;
  for (int i = 0; i < o.window; ++i) {
    const double x = i - half;
    kernel[i] = std::exp(-x * x / (2.0 * o.sigma * o.sigma));
    ksum += kernel[i];
  }
  for (auto& v : kernel) v /= ksum;

  const auto x = luma(a);
  const auto y = luma(b);
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const int w = a.width();
  const int h = a.height();
  const auto mu_x = filter_valid(x, w, h, kernel);
  const auto mu_y = filter_valid(y, w, h, kernel);
  const auto e_xx = filter_valid(xx, w, h, kernel);
  const auto e_yy = filter_valid(yy, w, h, kernel);
  const auto e_xy = filter_valid(xy, w, h, kernel);

  const double c1 = (o.k1 * o.data_range) * (o.k1 * o.data_range);
  const double c2 = (o.k2 * o.data_range) * (o.k2 * o.data_range);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x[i];
    const double my = mu_y[i];
    const double vx = e_xx[i] - mx * mx;
    const double vy = e_yy[i] - my * my;
    const double cov = e_xy[i] - mx * my;
    total += ((2 * mx * my + c1) * (2 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(mu_x.size());
}

}  // namespace r2l::bench
