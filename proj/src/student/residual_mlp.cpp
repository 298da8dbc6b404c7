#include "r2l/student/residual_mlp.hpp"

#include <cmath>
#include <regex>

#include "r2l/common/error.hpp"

namespace r2l::student {

using tensor::Activation;
using tensor::DenseLayer;
using tensor::Index;
using tensor::Matrix;

void validate(const StudentConfig& c) {
  if (c.width < 1) throw ConfigError("student width must be ≥ 1");
  if (c.depth < 4) throw ConfigError("student depth must be ≥ 4");
  if (c.depth % 2 != 0) throw ConfigError("student depth must be even (D = 2 + 2B)");
}

StudentConfig custom_config(int width, int depth) {
  StudentConfig c{"W" + std::to_string(width) + "D" + std::to_string(depth), width, depth, true};
  validate(c);
  return c;
}

StudentConfig build_config(const std::string& name) {
  static const std::regex pattern("W([0-9]+)D([0-9]+)");
  std::smatch m;
  if (!std::regex_match(name, m, pattern)) throw ConfigError("unknown student configuration '" + name + "'");
  return custom_config(std::stoi(m[1].str()), std::stoi(m[2].str()));
}

template <typename T>
ResidualMlp<T>::ResidualMlp(const StudentConfig& config, std::size_t input_dim, std::uint64_t seed)
    : config_(config), input_dim_(input_dim) {
  validate(config_);
  if (input_dim == 0) throw ConfigError("student input dimension must be positive");
  Rng rng(seed);
  const Index w = config_.width;
  const int blocks = config_.blocks();
  layers_.emplace_back(static_cast<Index>(input_dim), w, Activation::relu);
  tensor::init_he(layers_.back(), rng);
  // With skips, the second layer of each block starts scaled down so the
  // residual stream variance stays O(1) across all blocks.
  const double second_gain = config_.residual ? 1.0 / std::sqrt(static_cast<double>(blocks)) : 1.0;
  for (int b = 0; b < blocks; ++b) {
    layers_.emplace_back(w, w, Activation::relu);
    tensor::init_he(layers_.back(), rng);
    layers_.emplace_back(w, w, Activation::relu);
    tensor::init_he(layers_.back(), rng, second_gain);
  }
  layers_.emplace_back(w, 3, Activation::sigmoid);
  tensor::init_he(layers_.back(), rng, 0.1);
}

template <typename T>
std::size_t ResidualMlp<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.parameter_count();
  return n;
}

template <typename T>
template <typename Step>
Matrix<T> ResidualMlp<T>::run(const Matrix<T>& encoded, Step&& step) const {
  if (encoded.cols() != static_cast<Index>(input_dim_)) {
    throw ConfigError("student forward: expected " + std::to_string(input_dim_) + " input columns, got " +
                      std::to_string(encoded.cols()));
  }
  Matrix<T> h = step(0, encoded);
  const auto blocks = static_cast<std::size_t>(config_.blocks());
  for (std::size_t b = 0; b < blocks; ++b) {
    const Matrix<T>& a = step(1 + 2 * b, h);
    const Matrix<T>& r = step(2 + 2 * b, a);
    if (config_.residual) {
      h += r;
    } else {
      h = r;
    }
  }
  return step(layers_.size() - 1, h);
}

template <typename T>
Matrix<T> ResidualMlp<T>::forward(const Matrix<T>& encoded) const {
  // Two scratch slots keep references returned by `step` alive across one block.
  Matrix<T> slots[2];
  int next = 0;
  return run(encoded, [&](std::size_t i, const Matrix<T>& x) -> const Matrix<T>& {
    Matrix<T>& slot = slots[next];
    next ^= 1;
    slot = tensor::forward_dense(layers_[i], x);
    return slot;
  });
}

template <typename T>
Matrix<T> ResidualMlp<T>::forward(const Matrix<T>& encoded, tensor::GradientTape<T>& tape) const {
  tape.begin_record(layers_.size());
  return run(encoded, [&](std::size_t i, const Matrix<T>& x) -> const Matrix<T>& {
    return tensor::forward_dense(layers_[i], x, tape.cache(i));
  });
}

template <typename T>
Matrix<T> ResidualMlp<T>::backward(tensor::GradientTape<T>& tape, const Matrix<T>& grad_rgb,
                                   bool need_input_grad) const {
  tape.consume();
  auto back = [&](std::size_t i, const Matrix<T>& g, bool need = true) {
    return tensor::backward_dense(layers_[i], tape.cache(i), g, tape.grad(i), need);
  };
  Matrix<T> g = back(layers_.size() - 1, grad_rgb);
  for (std::size_t b = static_cast<std::size_t>(config_.blocks()); b-- > 0;) {
    Matrix<T> g_a = back(2 + 2 * b, g);
    Matrix<T> g_in = back(1 + 2 * b, g_a);
    if (config_.residual) {
      g += g_in;
    } else {
      g = std::move(g_in);
    }
  }
  return back(0, g, need_input_grad);
}

template <typename T>
template <typename U>
ResidualMlp<U> ResidualMlp<T>::cast() const {
  ResidualMlp<U> out;
  out.config_ = config_;
  out.input_dim_ = input_dim_;
  for (const auto& l : layers_) {
    DenseLayer<U> c;
    c.weight = l.weight.template cast<U>();
    c.bias = l.bias.template cast<U>();
    c.activation = l.activation;
    out.layers_.push_back(std::move(c));
  }
  return out;
}

template <typename T>
Matrix<T> student_forward(const ResidualMlp<T>& model, const Matrix<T>& encoded, QueryCounter* counter) {
  Matrix<T> out = model.forward(encoded);
  if (counter) counter->queries += static_cast<std::uint64_t>(encoded.rows());
  return out;
}

template class ResidualMlp<float>;
template class ResidualMlp<double>;
template ResidualMlp<double> ResidualMlp<float>::cast<double>() const;
template ResidualMlp<float> ResidualMlp<double>::cast<float>() const;
template Matrix<float> student_forward<float>(const ResidualMlp<float>&, const Matrix<float>&, QueryCounter*);
template Matrix<double> student_forward<double>(const ResidualMlp<double>&, const Matrix<double>&, QueryCounter*);

}  // namespace r2l::student
