#include "r2l/teacher/nerf_mlp.hpp"

#include "r2l/common/error.hpp"
#include "r2l/common/rng.hpp"

namespace r2l::teacher {

using tensor::Activation;
using tensor::DenseLayer;
using tensor::Index;
using tensor::Matrix;

void validate(const NerfConfig& c) {
  if (c.width < 1 || c.depth < 1 || c.view_width < 1) throw ConfigError("nerf: sizes must be positive");
  if (c.skip_layer <= 0 || c.skip_layer >= c.depth) throw ConfigError("nerf: skip layer must lie in (0, depth)");
  if (c.position.octaves < 0 || c.direction.octaves < 0) throw ConfigError("nerf: octaves must be ≥ 0");
}

template <typename T>
NerfMlp<T>::NerfMlp(const NerfConfig& config, std::uint64_t seed) : config_(config) {
  validate(config_);
  Rng rng(derive_seed(seed, 0x7EAC4E7));
  const Index w = config_.width;
  const auto pos = static_cast<Index>(config_.position_dim());
  const auto dir = static_cast<Index>(config_.direction_dim());
  for (int i = 0; i < config_.depth; ++i) {
    const Index in = i == 0 ? pos : (i == config_.skip_layer ? w + pos : w);
    layers_.emplace_back(in, w, Activation::relu);
    tensor::init_he(layers_.back(), rng);
  }
  layers_.emplace_back(w, 1, Activation::softplus);
  tensor::init_glorot(layers_.back(), rng);
  layers_.back().bias.setConstant(static_cast<T>(config_.density_bias_init));
  layers_.emplace_back(w, w, Activation::identity);
  tensor::init_glorot(layers_.back(), rng);
  layers_.emplace_back(w + dir, config_.view_width, Activation::relu);
  tensor::init_he(layers_.back(), rng);
  layers_.emplace_back(config_.view_width, 3, Activation::sigmoid);
  tensor::init_glorot(layers_.back(), rng);
}

namespace {
template <typename T>
Matrix<T> hconcat(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> out(a.rows(), a.cols() + b.cols());
  out.leftCols(a.cols()) = a;
  out.rightCols(b.cols()) = b;
  return out;
}
}  // namespace

template <typename T>
template <typename Step>
NerfOutput<T> NerfMlp<T>::run(const Matrix<T>& positions, const Matrix<T>& directions, Step&& step) const {
  if (positions.cols() != static_cast<Index>(config_.position_dim()) ||
      directions.cols() != static_cast<Index>(config_.direction_dim()) || positions.rows() != directions.rows()) {
    throw ConfigError("nerf forward: input encodings do not match the network");
  }
  Matrix<T> h = step(0, positions);
  for (int i = 1; i < config_.depth; ++i) {
    h = step(static_cast<std::size_t>(i), i == config_.skip_layer ? hconcat(h, positions) : std::move(h));
  }
  NerfOutput<T> out;
  out.sigma = step(density_index(), h);
  Matrix<T> feature = step(feature_index(), std::move(h));
  Matrix<T> view = step(view_index(), hconcat(feature, directions));
  out.rgb = step(rgb_index(), std::move(view));
  return out;
}

template <typename T>
NerfOutput<T> NerfMlp<T>::forward(const Matrix<T>& positions, const Matrix<T>& directions) const {
  return run(positions, directions,
             [&](std::size_t i, const Matrix<T>& x) { return tensor::forward_dense(layers_[i], x); });
}

template <typename T>
NerfOutput<T> NerfMlp<T>::forward(const Matrix<T>& positions, const Matrix<T>& directions,
                                  tensor::GradientTape<T>& tape) const {
  tape.begin_record(layers_.size());
  return run(positions, directions, [&](std::size_t i, Matrix<T> x) -> Matrix<T> {
    return tensor::forward_dense(layers_[i], std::move(x), tape.cache(i));
  });
}

template <typename T>
void NerfMlp<T>::backward(tensor::GradientTape<T>& tape, const Matrix<T>& grad_sigma,
                          const Matrix<T>& grad_rgb) const {
  tape.consume();
  const Index w = config_.width;
  auto back = [&](std::size_t i, const Matrix<T>& g, bool need = true) {
    return tensor::backward_dense(layers_[i], tape.cache(i), g, tape.grad(i), need);
  };
  Matrix<T> g_view = back(rgb_index(), grad_rgb);
  Matrix<T> g_concat = back(view_index(), g_view);
  Matrix<T> g_feature = g_concat.leftCols(w);
  Matrix<T> g_h = back(feature_index(), g_feature);
  g_h += back(density_index(), grad_sigma);
  for (int i = config_.depth - 1; i >= 0; --i) {
    const bool need = i > 0;
    Matrix<T> g_in = back(static_cast<std::size_t>(i), g_h, need);
    if (!need) break;
    g_h = i == config_.skip_layer ? Matrix<T>(g_in.leftCols(w)) : std::move(g_in);
  }
}

template <typename T>
template <typename U>
NerfMlp<U> NerfMlp<T>::cast() const {
  NerfMlp<U> out;
  out.config_ = config_;
  for (const auto& l : layers_) {
    DenseLayer<U> c;
    c.weight = l.weight.template cast<U>();
    c.bias = l.bias.template cast<U>();
    c.activation = l.activation;
    out.layers_.push_back(std::move(c));
  }
  return out;
}

template class NerfMlp<float>;
template class NerfMlp<double>;
template NerfMlp<double> NerfMlp<float>::cast<double>() const;
template NerfMlp<float> NerfMlp<double>::cast<float>() const;
template NerfMlp<float> NerfMlp<float>::cast<float>() const;
template NerfMlp<double> NerfMlp<double>::cast<double>() const;

}  // namespace r2l::teacher
