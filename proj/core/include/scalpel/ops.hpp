#pragma once

#include <cstddef>
#include <vector>

#include "scalpel/tensor.hpp"

// Differentiable tensor operations. Binary elementwise ops broadcast numpy
// style: shapes are aligned from the trailing axis and extents of 1 stretch.

namespace scalpel {

/// Floor used by `log` and every loss path that takes a logarithm.
inline constexpr double kLogFloor = 1e-12;

Shape broadcast_shape(const Shape& a, const Shape& b);

// Elementwise binary.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
/// IEEE semantics for zero divisors.
Tensor div(const Tensor& a, const Tensor& b);

Tensor add_scalar(const Tensor& a, double s);
Tensor mul_scalar(const Tensor& a, double s);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator+(const Tensor& a, double s) { return add_scalar(a, s); }
inline Tensor operator+(double s, const Tensor& a) { return add_scalar(a, s); }
inline Tensor operator-(const Tensor& a, double s) { return add_scalar(a, -s); }
inline Tensor operator*(const Tensor& a, double s) { return mul_scalar(a, s); }
inline Tensor operator*(double s, const Tensor& a) { return mul_scalar(a, s); }
Tensor operator-(const Tensor& a);
Tensor operator-(double s, const Tensor& a);

// Elementwise unary.
Tensor exp(const Tensor& x);
/// log(max(x, kLogFloor)); zero gradient where the floor is active.
Tensor log(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor sigmoid(const Tensor& x);
/// log(sigmoid(x)) without the cancellation of composing the two.
Tensor log_sigmoid(const Tensor& x);
Tensor relu(const Tensor& x);
/// Exact (erf) GeLU.
Tensor gelu(const Tensor& x);
/// Gradient sign(x), with 0 at x == 0.
Tensor abs(const Tensor& x);
Tensor sqrt(const Tensor& x);
Tensor square(const Tensor& x);
/// min(x, hi); gradient is zero where truncated.
Tensor clamp_max(const Tensor& x, double hi);
/// max(x, lo); gradient is zero where clamped.
Tensor clamp_min(const Tensor& x, double lo);

// Reductions.
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor sum(const Tensor& x, std::size_t axis, bool keepdim = false);
Tensor mean(const Tensor& x, std::size_t axis, bool keepdim = false);

// Shape manipulation.
Tensor reshape(const Tensor& x, Shape shape);
Tensor permute(const Tensor& x, const std::vector<std::size_t>& axes);
/// Swaps the last two axes.
Tensor transpose(const Tensor& x);
Tensor slice(const Tensor& x, std::size_t axis, std::size_t start, std::size_t length);
Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);
/// y[t] = x[t - offset] along `axis`, zero where the source falls outside.
Tensor time_shift(const Tensor& x, std::size_t axis, long offset);

/// Batched matrix product over the last two axes; leading axes broadcast.
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor softmax(const Tensor& x, std::size_t axis);
Tensor log_softmax(const Tensor& x, std::size_t axis);

/// Dense constant linear map applied along one axis:
/// y[..., i, ...] = sum_j map[i * cols + j] * x[..., j, ...].
/// `x.dim(axis)` must equal `cols`; the axis becomes `rows` long.
Tensor linear_map(const Tensor& x, std::size_t axis, const std::vector<double>& map,
                  std::size_t rows, std::size_t cols);

/// Point-wise (1x1) convolution: weight is Cout x Cin, x is Cin x ...;
/// the leading axis is mixed and the rest are treated as positions.
Tensor pointwise(const Tensor& weight, const Tensor& x);

/// Maximum |a - b| over all elements (no graph).
double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace scalpel
