#include "r2l/bench/flops.hpp"

namespace r2l::bench {

using tensor::Activation;

std::vector<std::string> FlopsConvention::describe() {
  return {"dense layer: 2 FLOPs per multiply-accumulate + 1 per bias",
          "activation: 1 FLOP per unit (relu, sigmoid, softplus); identity free",
          "positional encoding: 2 FLOPs per sin/cos output; raw copies free",
          "sample point o + t*d: 6 FLOPs",
          "compositing: 13 FLOPs per sample + 7 per ray",
          "residual add: 1 FLOP per unit",
          "totals are per camera ray"};
}

void FlopsReport::set_reference(const FlopsReport& reference) {
  reference_label = reference.label;
  reference_total = reference.total;
  ratio = total == 0 ? 0.0 : static_cast<double>(reference_total) / static_cast<double>(total);
}

std::uint64_t dense_flops(std::uint64_t in, std::uint64_t out, Activation activation) {
  const std::uint64_t act = activation == Activation::identity ? 0 : FlopsConvention::kActivationFlops * out;
  return FlopsConvention::kMacFlops * in * out + out + act;
}

std::uint64_t layer_stack_flops(const std::vector<tensor::DenseLayer<float>>& layers) {
  std::uint64_t total = 0;
  for (const auto& l : layers) {
    total += dense_flops(static_cast<std::uint64_t>(l.in_dim()), static_cast<std::uint64_t>(l.out_dim()),
                         l.activation);
  }
  return total;
}

namespace {

std::uint64_t encoding_flops(const teacher::PositionalEncoding& pe, std::uint64_t scalars) {
  return FlopsConvention::kEncodingFlops * 2 * static_cast<std::uint64_t>(pe.octaves) * scalars;
}

void finish(FlopsReport& r) {
  r.total = 0;
  for (const auto& g : r.breakdown) r.total += g.flops;
}

}  // namespace

FlopsReport count_flops(const student::StudentConfig& net, const student::RayEncoder& encoder) {
  student::validate(net);
  student::validate(encoder);
  FlopsReport r;
  r.queries_per_ray = 1;
  const auto w = static_cast<std::uint64_t>(net.width);
  const auto blocks = static_cast<std::uint64_t>(net.blocks());
  const auto in = static_cast<std::uint64_t>(student::encoded_dim(encoder));
  std::uint64_t enc = 0;
  if (const auto* k = std::get_if<student::KPointEncoder>(&encoder)) {
    r.label = net.name + " K=" + std::to_string(k->points);
    enc = FlopsConvention::kPointFlops * static_cast<std::uint64_t>(k->points) +
          encoding_flops(k->encoding, 3 * static_cast<std::uint64_t>(k->points));
  } else {
    const auto& p = std::get<student::PluckerEncoder>(encoder);
    r.label = net.name + " plucker";
    enc = 9 + encoding_flops(p.encoding, 6);  // cross product: 6 mul + 3 sub
  }
  r.breakdown.push_back({"ray encoding", enc});
  r.breakdown.push_back({"input layer", dense_flops(in, w, Activation::relu)});
  r.breakdown.push_back({"residual blocks", blocks * 2 * dense_flops(w, w, Activation::relu)});
  r.breakdown.push_back({"residual adds", net.residual ? blocks * w : 0});
  r.breakdown.push_back({"output head", dense_flops(w, 3, Activation::sigmoid)});
  finish(r);
  return r;
}

FlopsReport count_flops(const teacher::NerfConfig& net, std::uint64_t queries) {
  teacher::validate(net);
  FlopsReport r;
  r.label = "NeRF W" + std::to_string(net.width) + "/D" + std::to_string(net.depth) + " N=" + std::to_string(queries);
  r.queries_per_ray = queries;
  const auto w = static_cast<std::uint64_t>(net.width);
  const auto pos = static_cast<std::uint64_t>(net.position_dim());
  const auto dir = static_cast<std::uint64_t>(net.direction_dim());
  const auto vw = static_cast<std::uint64_t>(net.view_width);
  std::uint64_t trunk = 0;
  for (int i = 0; i < net.depth; ++i) {
    const std::uint64_t in = i == 0 ? pos : (i == net.skip_layer ? w + pos : w);
    trunk += dense_flops(in, w, Activation::relu);
  }
  const std::uint64_t heads = dense_flops(w, 1, Activation::softplus) + dense_flops(w, w, Activation::identity) +
                              dense_flops(w + dir, vw, Activation::relu) + dense_flops(vw, 3, Activation::sigmoid);
  r.breakdown.push_back({"sample points", queries * FlopsConvention::kPointFlops});
  r.breakdown.push_back({"position encoding", queries * encoding_flops(net.position, 3)});
  r.breakdown.push_back({"direction encoding", encoding_flops(net.direction, 3)});
  r.breakdown.push_back({"trunk", queries * trunk});
  r.breakdown.push_back({"heads", queries * heads});
  r.breakdown.push_back({"compositing",
                         queries * FlopsConvention::kCompositeSampleFlops + FlopsConvention::kCompositeRayFlops});
  finish(r);
  return r;
}

nlohmann::json to_json(const FlopsReport& r) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : r.breakdown) groups.push_back({{"group", g.name}, {"flops", g.flops}});
  nlohmann::json j{{"label", r.label},
                   {"queries_per_ray", r.queries_per_ray},
                   {"flops_per_ray", r.total},
                   {"mflops_per_ray", r.megaflops()},
                   {"breakdown", groups},
                   {"convention", FlopsConvention::describe()}};
  if (r.reference_total > 0) {
    j["reference"] = {{"label", r.reference_label}, {"flops_per_ray", r.reference_total}, {"ratio", r.ratio}};
  }
  return j;
}

}  // namespace r2l::bench
