#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "r2l/student/ray_encoder.hpp"
#include "r2l/student/residual_mlp.hpp"
#include "r2l/teacher/nerf_mlp.hpp"
#include "r2l/tensor/dense.hpp"

namespace r2l::bench {

/// Counting rules applied by every count_* function.
struct FlopsConvention {
  static constexpr std::uint64_t kMacFlops = 2;         // multiply-accumulate
  static constexpr std::uint64_t kActivationFlops = 1;  // per unit, relu/sigmoid/softplus (identity: 0)
  static constexpr std::uint64_t kEncodingFlops = 2;    // per sin or cos output
  static constexpr std::uint64_t kPointFlops = 6;       // o + t·d per sample point
  static constexpr std::uint64_t kCompositeSampleFlops = 13;  // α, T, w and Σ w·c per sample
  static constexpr std::uint64_t kCompositeRayFlops = 7;      // (1 − Σw)·background
  static std::vector<std::string> describe();
};

struct FlopsGroup {
  std::string name;
  std::uint64_t flops = 0;
};

struct FlopsReport {
  std::string label;
  std::uint64_t queries_per_ray = 1;
  std::vector<FlopsGroup> breakdown;  // per ray
  std::uint64_t total = 0;            // per ray, = Σ breakdown
  std::string reference_label;
  std::uint64_t reference_total = 0;
  double ratio = 0.0;                 // reference_total / total, 0 when unset

  double megaflops() const { return static_cast<double>(total) * 1e-6; }
  void set_reference(const FlopsReport& reference);
};

/// 2·in·out + out, plus one FLOP per unit for non-identity activations.
std::uint64_t dense_flops(std::uint64_t in, std::uint64_t out, tensor::Activation activation);
/// Per-query cost of an arbitrary layer stack (no residual adds).
std::uint64_t layer_stack_flops(const std::vector<tensor::DenseLayer<float>>& layers);

/// Student: one query per ray. Encoding, network and residual adds are itemized.
FlopsReport count_flops(const student::StudentConfig& network, const student::RayEncoder& encoder);
/// Teacher: `queries_per_ray` network evaluations plus compositing.
FlopsReport count_flops(const teacher::NerfConfig& network, std::uint64_t queries_per_ray);

nlohmann::json to_json(const FlopsReport& report);

}  // namespace r2l::bench
