#include "r2l/teacher/quadrature.hpp"

#include <cmath>

#include "r2l/common/error.hpp"

namespace r2l::teacher {

void stratified_depths(double near, double far, SamplingMode mode, Rng* rng, std::span<double> out) {
  if (!(near < far)) throw UsageError("stratified_depths: near must be < far");
  if (out.empty()) throw UsageError("stratified_depths: need at least one sample");
  if (mode == SamplingMode::train && rng == nullptr) throw UsageError("stratified_depths: train mode needs an rng");
  const auto n = static_cast<double>(out.size());
  const double bin = (far - near) / n;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double u = mode == SamplingMode::test ? 0.5 : rng->uniform();
    out[i] = near + (static_cast<double>(i) + u) * bin;
  }
}

std::vector<double> stratified_depths(double near, double far, int n, SamplingMode mode, Rng* rng) {
  if (n < 1) throw UsageError("stratified_depths: need at least one sample");
  std::vector<double> out(static_cast<std::size_t>(n));
  stratified_depths(near, far, mode, rng, out);
  return out;
}

void interval_lengths(std::span<const double> depths, double far, std::span<double> out) {
  const std::size_t n = depths.size();
  for (std::size_t i = 0; i + 1 < n; ++i) out[i] = depths[i + 1] - depths[i];
  if (n > 0) out[n - 1] = far - depths[n - 1];
}

template <typename T>
CompositeResult<T> composite_ray(const QuadratureSamples<T>& samples, const std::array<T, 3>& background) {
  const std::size_t n = samples.size();
  if (samples.delta.size() != n || samples.color.size() != n) throw UsageError("composite_ray: ragged samples");
  CompositeResult<T> r;
  r.weights.resize(n);
  r.transmittance.resize(n);
  T trans = 1;
  T acc = 0;
  std::array<T, 3> rgb{0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const T alpha = T(1) - std::exp(-samples.sigma[i] * samples.delta[i]);
    const T w = trans * alpha;
    r.transmittance[i] = trans;
    r.weights[i] = w;
    for (int c = 0; c < 3; ++c) rgb[c] += w * samples.color[i][c];
    acc += w;
    trans *= T(1) - alpha;
  }
  for (int c = 0; c < 3; ++c) r.rgb[c] = rgb[c] + (T(1) - acc) * background[c];
  r.opacity = acc;
  return r;
}

template <typename T>
std::array<T, 3> composite_rgb(std::span<const T> sigma, std::span<const T> delta, std::span<const T> color_rows,
                               const std::array<T, 3>& background) {
  T trans = 1;
  T acc = 0;
  std::array<T, 3> rgb{0, 0, 0};
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    const T alpha = T(1) - std::exp(-sigma[i] * delta[i]);
    const T w = trans * alpha;
    rgb[0] += w * color_rows[3 * i + 0];
    rgb[1] += w * color_rows[3 * i + 1];
    rgb[2] += w * color_rows[3 * i + 2];
    acc += w;
    trans *= T(1) - alpha;
  }
  for (int c = 0; c < 3; ++c) rgb[c] += (T(1) - acc) * background[c];
  return rgb;
}

template <typename T>
SegmentComposite<T> composite_segment(const QuadratureSamples<T>& samples) {
  SegmentComposite<T> s;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const T alpha = T(1) - std::exp(-samples.sigma[i] * samples.delta[i]);
    const T w = s.transmittance * alpha;
    for (int c = 0; c < 3; ++c) s.rgb[c] += w * samples.color[i][c];
    s.transmittance *= T(1) - alpha;
  }
  return s;
}

template <typename T>
void composite_backward(std::span<const T> sigma, std::span<const T> delta, std::span<const T> color_rows,
                        const std::array<T, 3>& background, const std::array<T, 3>& grad_rgb,
                        std::span<T> grad_sigma, std::span<T> grad_color_rows) {
  const std::size_t n = sigma.size();
  // forward quantities
  thread_local std::vector<T> alpha, trans, excess;
  alpha.resize(n);
  trans.resize(n);
  excess.resize(n);
  T t = 1;
  for (std::size_t i = 0; i < n; ++i) {
    alpha[i] = T(1) - std::exp(-sigma[i] * delta[i]);
    trans[i] = t;
    t *= T(1) - alpha[i];
    // e_i = dL/dw_i = g · (c_i − background)
    excess[i] = grad_rgb[0] * (color_rows[3 * i] - background[0]) +
                grad_rgb[1] * (color_rows[3 * i + 1] - background[1]) +
                grad_rgb[2] * (color_rows[3 * i + 2] - background[2]);
  }
  // dL/dα_k = T_k (e_k − S_k), S_k = Σ_{i>k} e_i α_i Π_{k<j<i}(1 − α_j)
  T tail = 0;
  for (std::size_t k = n; k-- > 0;) {
    const T w = trans[k] * alpha[k];
    grad_color_rows[3 * k + 0] = w * grad_rgb[0];
    grad_color_rows[3 * k + 1] = w * grad_rgb[1];
    grad_color_rows[3 * k + 2] = w * grad_rgb[2];
    const T grad_alpha = trans[k] * (excess[k] - tail);
    // dα/dσ = δ·exp(−σδ) = δ(1 − α)
    grad_sigma[k] = grad_alpha * delta[k] * (T(1) - alpha[k]);
    tail = excess[k] * alpha[k] + (T(1) - alpha[k]) * tail;
  }
}

#define R2L_INSTANTIATE(T)                                                                                    \
  template CompositeResult<T> composite_ray<T>(const QuadratureSamples<T>&, const std::array<T, 3>&);         \
  template std::array<T, 3> composite_rgb<T>(std::span<const T>, std::span<const T>, std::span<const T>,       \
                                             const std::array<T, 3>&);                                        \
  template SegmentComposite<T> composite_segment<T>(const QuadratureSamples<T>&);                             \
  template void composite_backward<T>(std::span<const T>, std::span<const T>, std::span<const T>,              \
                                      const std::array<T, 3>&, const std::array<T, 3>&, std::span<T>,          \
                                      std::span<T>);

R2L_INSTANTIATE(float)
R2L_INSTANTIATE(double)
#undef R2L_INSTANTIATE

}  // namespace r2l::teacher
