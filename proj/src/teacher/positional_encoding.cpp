#include "r2l/teacher/positional_encoding.hpp"

#include <cmath>
#include <numbers>

#include "r2l/common/error.hpp"

namespace r2l::teacher {

template <typename T>
void encode(const PositionalEncoding& pe, std::span<const double> v, std::span<T> out) {
  if (pe.octaves < 0) throw ConfigError("positional encoding needs L ≥ 0");
  if (out.size() != pe.output_dim(v.size())) throw UsageError("encode: output buffer has the wrong size");
  std::size_t at = 0;
  for (const double p : v) {
    if (pe.include_raw) out[at++] = static_cast<T>(p);
    if (pe.octaves == 0) continue;
    double s = std::sin(std::numbers::pi * p);
    double c = std::cos(std::numbers::pi * p);
    for (int k = 0; k < pe.octaves; ++k) {
      out[at++] = static_cast<T>(s);
      out[at++] = static_cast<T>(c);
      const double s2 = 2.0 * s * c;
      const double c2 = (c - s) * (c + s);
      s = s2;
      c = c2;
    }
  }
}

std::vector<double> encode(const PositionalEncoding& pe, std::span<const double> v) {
  std::vector<double> out(pe.output_dim(v.size()));
  encode<double>(pe, v, out);
  return out;
}

template void encode<float>(const PositionalEncoding&, std::span<const double>, std::span<float>);
template void encode<double>(const PositionalEncoding&, std::span<const double>, std::span<double>);

}  // namespace r2l::teacher
