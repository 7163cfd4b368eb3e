#include "scalpel/masf.hpp"

#include "scalpel/errors.hpp"
#include "scalpel/ops.hpp"

namespace scalpel {

std::vector<std::size_t> filter_lengths(std::size_t num_filters, std::size_t max_filter_length) {
  if (num_filters == 0 || max_filter_length == 0) throw ConfigError("MASF needs M >= 1 and R_max >= 1");
  std::vector<std::size_t> lengths;
  lengths.reserve(num_filters);
  for (std::size_t m = 1; m <= num_filters; ++m) {
    const std::size_t numerator = (num_filters + m) * max_filter_length;
    if (numerator % (2 * num_filters) != 0) {
      throw ConfigError("filter length (" + std::to_string(num_filters + m) + " * " +
                        std::to_string(max_filter_length) + ") / " + std::to_string(2 * num_filters) +
                        " is not an integer");
    }
    lengths.push_back(numerator / (2 * num_filters));
  }
  return lengths;
}

MasfParams MasfParams::init(const MasfConfig& config, std::size_t channels, std::size_t joints,
                            Initializer& init) {
  MasfParams p;
  p.config = config;
  for (std::size_t length : filter_lengths(config.num_filters, config.max_filter_length)) {
    p.filters.push_back(SpectralFilter::ones(length, joints));
  }
  const std::size_t M = config.num_filters;
  const std::size_t D = config.projection_dim;
  p.static_weights = init.zeros({M, channels});
  p.joint_projection = init.fan_in_uniform({joints, D}, joints);
  p.time_projection = init.fan_in_uniform({config.pool_length, D}, config.pool_length);
  p.mix_projection = init.fan_in_uniform({D * D, M}, D * D);
  return p;
}

void MasfParams::collect(ParamList& out, const std::string& prefix) const {
  for (std::size_t m = 0; m < filters.size(); ++m) {
    out.push_back({prefix + "filter." + std::to_string(m), filters[m].weights});
  }
  out.push_back({prefix + "static_weights", static_weights});
  out.push_back({prefix + "joint_projection", joint_projection});
  out.push_back({prefix + "time_projection", time_projection});
  out.push_back({prefix + "mix_projection", mix_projection});
}

std::vector<Tensor> apply_filter_bank(const Tensor& features, const MasfParams& params) {
  if (features.rank() != 3) throw ShapeError("MASF expects C x T x V features");
  const ComplexSpectrum spectrum = rfft(features, 1);
  const std::size_t S = spectrum.bins();
  std::vector<Tensor> out;
  out.reserve(params.filters.size());
  for (const SpectralFilter& filter : params.filters) {
    if (filter.joints() != features.dim(2)) {
      throw ShapeError("filter joint count " + std::to_string(filter.joints()) + " does not match features");
    }
    const Tensor response = nni_interpolate(filter, S);
    out.push_back(irfft(spectrum.with_packed(mul(spectrum.packed, response))));
  }
  return out;
}

Tensor dynamic_weights(const Tensor& features, const MasfParams& params) {
  const std::size_t C = features.dim(0);
  const std::size_t D = params.config.projection_dim;
  const Tensor pooled = adaptive_avg_pool(features, 1, params.config.pool_length);  // C x Td x V
  const Tensor by_joint = matmul(pooled, params.joint_projection);                   // C x Td x D
  const Tensor by_time = matmul(transpose(params.time_projection), by_joint);         // C x D x D
  const Tensor mixed = matmul(reshape(by_time, {C, D * D}), params.mix_projection);   // C x M
  return transpose(mixed);
}

Tensor fuse(const std::vector<Tensor>& filtered, const Tensor& features, const Tensor& static_weights,
            const Tensor& dynamic_weights) {
  const std::size_t M = filtered.size();
  if (M == 0) throw ShapeError("fuse needs at least one filtered feature");
  const std::size_t C = features.dim(0);
  const Shape expected{M, C};
  if (static_weights.shape() != expected || dynamic_weights.shape() != expected) {
    throw ShapeError("fusion weights must be " + shape_str(expected));
  }
  const Tensor static_soft = softmax(static_weights, 0);
  const Tensor dynamic_soft = softmax(dynamic_weights, 0);
  Tensor static_sum;
  Tensor dynamic_sum;
  for (std::size_t m = 0; m < M; ++m) {
    if (filtered[m].shape() != features.shape()) throw ShapeError("filtered feature shape mismatch");
    const Tensor ws = reshape(slice(static_soft, 0, m, 1), {C, 1, 1});
    const Tensor wd = reshape(slice(dynamic_soft, 0, m, 1), {C, 1, 1});
    const Tensor s = mul(ws, filtered[m]);
    const Tensor d = mul(wd, filtered[m]);
    static_sum = static_sum.defined() ? add(static_sum, s) : s;
    dynamic_sum = dynamic_sum.defined() ? add(dynamic_sum, d) : d;
  }
  const Tensor branches = mul_scalar(add(static_sum, dynamic_sum), 0.5);
  return add(mul_scalar(branches, 0.5), mul_scalar(features, 0.5));
}

Tensor masf_forward(const Tensor& features, const MasfParams& params) {
  const auto filtered = apply_filter_bank(features, params);
  return fuse(filtered, features, params.static_weights, dynamic_weights(features, params));
}

}  // namespace scalpel
