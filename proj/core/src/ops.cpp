#include "scalpel/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "scalpel/errors.hpp"

namespace scalpel {

namespace {

using detail::make_result;
using detail::Node;

std::vector<std::size_t> contiguous_strides(const Shape& shape) {
  std::vector<std::size_t> strides(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) strides[i - 1] = strides[i] * shape[i];
  return strides;
}

// Strides of `operand` expressed against the axes of `out` (0 on broadcast axes).
std::vector<std::size_t> broadcast_strides(const Shape& operand, const Shape& out) {
  std::vector<std::size_t> result(out.size(), 0);
  const auto own = contiguous_strides(operand);
  const std::size_t offset = out.size() - operand.size();
  for (std::size_t i = 0; i < operand.size(); ++i) {
    if (operand[i] != 1) result[offset + i] = own[i];
  }
  return result;
}

template <class F>
void for_each_broadcast(const Shape& out, const std::vector<std::size_t>& sa,
                        const std::vector<std::size_t>& sb, F&& f) {
  const std::size_t n = shape_numel(out);
  const std::size_t rank = out.size();
  std::vector<std::size_t> idx(rank, 0);
  std::size_t oa = 0;
  std::size_t ob = 0;
  for (std::size_t i = 0; i < n; ++i) {
    f(i, oa, ob);
    for (std::size_t ax = rank; ax-- > 0;) {
      ++idx[ax];
      oa += sa[ax];
      ob += sb[ax];
      if (idx[ax] < out[ax]) break;
      oa -= sa[ax] * out[ax];
      ob -= sb[ax] * out[ax];
      idx[ax] = 0;
    }
  }
}

struct AxisSplit {
  std::size_t outer = 1;
  std::size_t length = 1;
  std::size_t inner = 1;
};

AxisSplit split_at(const Shape& shape, std::size_t axis) {
  if (axis >= shape.size()) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for " + shape_str(shape));
  }
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.length = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

// Elementwise binary op with partial derivatives da(a, b), db(a, b).
template <class Fwd, class Da, class Db>
Tensor binary_op(const Tensor& a, const Tensor& b, Fwd fwd, Da da, Db db) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  const auto& av = a.values();
  const auto& bv = b.values();
  if (sa == sb) {
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(av[i], bv[i]);
    return make_result(sa, std::move(out), {a, b}, [da, db](Node& self) {
      Node& pa = *self.parents[0];
      Node& pb = *self.parents[1];
      const auto& g = self.grad;
      if (pa.requires_grad) {
        auto& ga = pa.grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * da(pa.data[i], pb.data[i]);
      }
      if (pb.requires_grad) {
        auto& gb = pb.grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * db(pa.data[i], pb.data[i]);
      }
    });
  }
  Shape out_shape = broadcast_shape(sa, sb);
  auto stride_a = broadcast_strides(sa, out_shape);
  auto stride_b = broadcast_strides(sb, out_shape);
  std::vector<double> out(shape_numel(out_shape));
  for_each_broadcast(out_shape, stride_a, stride_b, [&](std::size_t i, std::size_t ia, std::size_t ib) {
    out[i] = fwd(av[ia], bv[ib]);
  });
  return make_result(out_shape, std::move(out), {a, b},
                     [da, db, out_shape, stride_a, stride_b](Node& self) {
                       Node& pa = *self.parents[0];
                       Node& pb = *self.parents[1];
                       const auto& g = self.grad;
                       double* ga = pa.requires_grad ? pa.grad_buffer().data() : nullptr;
                       double* gb = pb.requires_grad ? pb.grad_buffer().data() : nullptr;
                       for_each_broadcast(out_shape, stride_a, stride_b,
                                          [&](std::size_t i, std::size_t ia, std::size_t ib) {
                                            const double x = pa.data[ia];
                                            const double y = pb.data[ib];
                                            if (ga) ga[ia] += g[i] * da(x, y);
                                            if (gb) gb[ib] += g[i] * db(x, y);
                                          });
                     });
}

// Elementwise unary op; `deriv(x, y)` receives the input and the output.
template <class Fwd, class Deriv>
Tensor unary_op(const Tensor& x, Fwd fwd, Deriv deriv) {
  const auto& xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = fwd(xv[i]);
  return make_result(x.shape(), std::move(out), {x}, [deriv](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& gp = p.grad_buffer();
    for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += self.grad[i] * deriv(p.data[i], self.data[i]);
  });
}

// unary_op for functions with kinks: `branch(x)` names the smooth piece x
// lies on and is recorded when a BranchTrace is active.
template <class Fwd, class Deriv, class Branch>
Tensor piecewise_op(const Tensor& x, Fwd fwd, Deriv deriv, Branch branch) {
  if (detail::BranchTrace::active()) {
    for (double v : x.values()) branch(v);
  }
  return unary_op(x, fwd, deriv);
}

}  // namespace

Shape broadcast_shape(const Shape& a, const Shape& b) {
  const std::size_t rank = std::max(a.size(), b.size());
  Shape out(rank, 1);
  for (std::size_t i = 0; i < rank; ++i) {
    const std::size_t ea = i < rank - a.size() ? 1 : a[i - (rank - a.size())];
    const std::size_t eb = i < rank - b.size() ? 1 : b[i - (rank - b.size())];
    if (ea != eb && ea != 1 && eb != 1) {
      throw ShapeError("cannot broadcast " + shape_str(a) + " with " + shape_str(b));
    }
    out[i] = std::max(ea, eb);
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
      [](double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
      [](double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, [](double x, double y) { return x * y; }, [](double, double y) { return y; },
      [](double x, double) { return x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, [](double x, double y) { return x / y; }, [](double, double y) { return 1.0 / y; },
      [](double x, double y) { return -x / (y * y); });
}

Tensor add_scalar(const Tensor& a, double s) {
  return unary_op(a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor mul_scalar(const Tensor& a, double s) {
  return unary_op(a, [s](double x) { return x * s; }, [s](double, double) { return s; });
}

Tensor operator-(const Tensor& a) { return mul_scalar(a, -1.0); }

Tensor operator-(double s, const Tensor& a) {
  return unary_op(a, [s](double x) { return s - x; }, [](double, double) { return -1.0; });
}

Tensor exp(const Tensor& x) {
  return unary_op(x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& x) {
  return piecewise_op(
      x, [](double v) { return std::log(std::max(v, kLogFloor)); },
      [](double v, double) { return v > kLogFloor ? 1.0 / v : 0.0; },
      [](double v) { detail::BranchTrace::record(v > kLogFloor); });
}

Tensor tanh(const Tensor& x) {
  return unary_op(x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& x) {
  return unary_op(
      x,
      [](double v) {
        if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor log_sigmoid(const Tensor& x) {
  return unary_op(
      x, [](double v) { return std::min(v, 0.0) - std::log1p(std::exp(-std::abs(v))); },
      [](double v, double) {
        if (v >= 0) return std::exp(-v) / (1.0 + std::exp(-v));
        return 1.0 / (1.0 + std::exp(v));
      });
}

Tensor relu(const Tensor& x) {
  return piecewise_op(
      x, [](double v) { return v > 0 ? v : 0.0; }, [](double v, double) { return v > 0 ? 1.0 : 0.0; },
      [](double v) { detail::BranchTrace::record(v > 0); });
}

Tensor gelu(const Tensor& x) {
  constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return unary_op(
      x, [](double v) { return 0.5 * v * (1.0 + std::erf(v * inv_sqrt2)); },
      [inv_sqrt_2pi](double v, double) {
        return 0.5 * (1.0 + std::erf(v * inv_sqrt2)) + v * inv_sqrt_2pi * std::exp(-0.5 * v * v);
      });
}

Tensor abs(const Tensor& x) {
  return piecewise_op(
      x, [](double v) { return std::abs(v); },
      [](double v, double) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); },
      [](double v) {
        detail::BranchTrace::record(v > 0);
        detail::BranchTrace::record(v < 0);
      });
}

Tensor sqrt(const Tensor& x) {
  return unary_op(
      x, [](double v) { return std::sqrt(v); }, [](double, double y) { return y > 0 ? 0.5 / y : 0.0; });
}

Tensor square(const Tensor& x) {
  return unary_op(x, [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; });
}

Tensor clamp_max(const Tensor& x, double hi) {
  return piecewise_op(
      x, [hi](double v) { return std::min(v, hi); }, [hi](double v, double) { return v < hi ? 1.0 : 0.0; },
      [hi](double v) { detail::BranchTrace::record(v < hi); });
}

Tensor clamp_min(const Tensor& x, double lo) {
  return piecewise_op(
      x, [lo](double v) { return std::max(v, lo); }, [lo](double v, double) { return v > lo ? 1.0 : 0.0; },
      [lo](double v) { detail::BranchTrace::record(v > lo); });
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.values()) total += v;
  return make_result({1}, {total}, {x}, [](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& gp = p.grad_buffer();
    const double g = self.grad[0];
    for (double& v : gp) v += g;
  });
}

Tensor mean(const Tensor& x) { return mul_scalar(sum(x), 1.0 / static_cast<double>(x.numel())); }

Tensor sum(const Tensor& x, std::size_t axis, bool keepdim) {
  const AxisSplit s = split_at(x.shape(), axis);
  const auto& xv = x.values();
  std::vector<double> out(s.outer * s.inner, 0.0);
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t k = 0; k < s.length; ++k) {
      const double* src = xv.data() + (o * s.length + k) * s.inner;
      double* dst = out.data() + o * s.inner;
      for (std::size_t i = 0; i < s.inner; ++i) dst[i] += src[i];
    }
  }
  Shape shape = x.shape();
  if (keepdim) {
    shape[axis] = 1;
  } else {
    shape.erase(shape.begin() + static_cast<long>(axis));
    if (shape.empty()) shape.push_back(1);
  }
  return make_result(shape, std::move(out), {x}, [s](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& gp = p.grad_buffer();
    for (std::size_t o = 0; o < s.outer; ++o) {
      const double* g = self.grad.data() + o * s.inner;
      for (std::size_t k = 0; k < s.length; ++k) {
        double* dst = gp.data() + (o * s.length + k) * s.inner;
        for (std::size_t i = 0; i < s.inner; ++i) dst[i] += g[i];
      }
    }
  });
}

Tensor mean(const Tensor& x, std::size_t axis, bool keepdim) {
  return mul_scalar(sum(x, axis, keepdim), 1.0 / static_cast<double>(x.dim(axis)));
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw ShapeError("cannot reshape " + shape_str(x.shape()) + " to " + shape_str(shape));
  }
  return make_result(std::move(shape), x.values(), {x}, [](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& gp = p.grad_buffer();
    for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += self.grad[i];
  });
}

Tensor permute(const Tensor& x, const std::vector<std::size_t>& axes) {
  const Shape& in = x.shape();
  if (axes.size() != in.size()) throw ShapeError("permute: axis list does not match rank");
  std::vector<bool> seen(in.size(), false);
  for (std::size_t a : axes) {
    if (a >= in.size() || seen[a]) throw ShapeError("permute: invalid axis list");
    seen[a] = true;
  }
  const auto in_strides = contiguous_strides(in);
  Shape out_shape(in.size());
  std::vector<std::size_t> gather(in.size());
  for (std::size_t i = 0; i < axes.size(); ++i) {
    out_shape[i] = in[axes[i]];
    gather[i] = in_strides[axes[i]];
  }
  const std::vector<std::size_t> unused(in.size(), 0);
  const auto& xv = x.values();
  std::vector<double> out(xv.size());
  for_each_broadcast(out_shape, gather, unused,
                     [&](std::size_t i, std::size_t src, std::size_t) { out[i] = xv[src]; });
  return make_result(out_shape, std::move(out), {x}, [out_shape, gather, unused](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& gp = p.grad_buffer();
    for_each_broadcast(out_shape, gather, unused,
                       [&](std::size_t i, std::size_t src, std::size_t) { gp[src] += self.grad[i]; });
  });
}

Tensor transpose(const Tensor& x) {
  const std::size_t r = x.rank();
  if (r < 2) throw ShapeError("transpose needs rank >= 2");
  std::vector<std::size_t> axes(r);
  for (std::size_t i = 0; i < r; ++i) axes[i] = i;
  std::swap(axes[r - 1], axes[r - 2]);
  return permute(x, axes);
}

Tensor slice(const Tensor& x, std::size_t axis, std::size_t start, std::size_t length) {
  const AxisSplit s = split_at(x.shape(), axis);
  if (length == 0 || start + length > s.length) {
    throw ShapeError("slice [" + std::to_string(start) + ", " + std::to_string(start + length) +
                     ") out of range for axis of length " + std::to_string(s.length));
  }
  const auto& xv = x.values();
  std::vector<double> out(s.outer * length * s.inner);
  for (std::size_t o = 0; o < s.outer; ++o) {
    std::copy_n(xv.data() + (o * s.length + start) * s.inner, length * s.inner,
                out.data() + o * length * s.inner);
  }
  Shape shape = x.shape();
  shape[axis] = length;
  return make_result(shape, std::move(out), {x}, [s, start, length](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& gp = p.grad_buffer();
    for (std::size_t o = 0; o < s.outer; ++o) {
      const double* g = self.grad.data() + o * length * s.inner;
      double* dst = gp.data() + (o * s.length + start) * s.inner;
      for (std::size_t i = 0; i < length * s.inner; ++i) dst[i] += g[i];
    }
  });
}

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat of zero tensors");
  Shape shape = parts.front().shape();
  if (axis >= shape.size()) throw ShapeError("concat axis out of range");
  std::size_t total = 0;
  for (const Tensor& p : parts) {
    Shape other = p.shape();
    if (other.size() != shape.size()) throw ShapeError("concat rank mismatch");
    total += other[axis];
    other[axis] = shape[axis];
    if (other != shape) throw ShapeError("concat extents differ off the concat axis");
  }
  const AxisSplit s0 = split_at(shape, axis);
  shape[axis] = total;
  std::vector<std::size_t> lengths;
  for (const Tensor& p : parts) lengths.push_back(p.dim(axis));
  std::vector<double> out(s0.outer * total * s0.inner);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& pv = parts[k].values();
    const std::size_t len = lengths[k];
    for (std::size_t o = 0; o < s0.outer; ++o) {
      std::copy_n(pv.data() + o * len * s0.inner, len * s0.inner,
                  out.data() + (o * total + offset) * s0.inner);
    }
    offset += len;
  }
  const std::size_t outer = s0.outer;
  const std::size_t inner = s0.inner;
  return make_result(shape, std::move(out), parts, [lengths, outer, inner, total](Node& self) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < self.parents.size(); ++k) {
      Node& p = *self.parents[k];
      const std::size_t len = lengths[k];
      if (p.requires_grad) {
        auto& gp = p.grad_buffer();
        for (std::size_t o = 0; o < outer; ++o) {
          const double* g = self.grad.data() + (o * total + off) * inner;
          double* dst = gp.data() + o * len * inner;
          for (std::size_t i = 0; i < len * inner; ++i) dst[i] += g[i];
        }
      }
      off += len;
    }
  });
}

Tensor time_shift(const Tensor& x, std::size_t axis, long offset) {
  const AxisSplit s = split_at(x.shape(), axis);
  const auto& xv = x.values();
  std::vector<double> out(xv.size(), 0.0);
  const long len = static_cast<long>(s.length);
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (long t = 0; t < len; ++t) {
      const long src = t - offset;
      if (src < 0 || src >= len) continue;
      std::copy_n(xv.data() + (o * s.length + static_cast<std::size_t>(src)) * s.inner, s.inner,
                  out.data() + (o * s.length + static_cast<std::size_t>(t)) * s.inner);
    }
  }
  return make_result(x.shape(), std::move(out), {x}, [s, offset, len](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& gp = p.grad_buffer();
    for (std::size_t o = 0; o < s.outer; ++o) {
      for (long t = 0; t < len; ++t) {
        const long src = t - offset;
        if (src < 0 || src >= len) continue;
        const double* g = self.grad.data() + (o * s.length + static_cast<std::size_t>(t)) * s.inner;
        double* dst = gp.data() + (o * s.length + static_cast<std::size_t>(src)) * s.inner;
        for (std::size_t i = 0; i < s.inner; ++i) dst[i] += g[i];
      }
    }
  });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.size() < 2 || sb.size() < 2) throw ShapeError("matmul operands need rank >= 2");
  const std::size_t m = sa[sa.size() - 2];
  const std::size_t k = sa.back();
  const std::size_t n = sb.back();
  if (sb[sb.size() - 2] != k) {
    throw ShapeError("matmul inner extents differ: " + shape_str(sa) + " x " + shape_str(sb));
  }
  const Shape batch_a(sa.begin(), sa.end() - 2);
  const Shape batch_b(sb.begin(), sb.end() - 2);
  Shape batch = broadcast_shape(batch_a, batch_b);
  // Strides in units of whole matrices.
  auto stride_a = broadcast_strides(batch_a, batch);
  auto stride_b = broadcast_strides(batch_b, batch);
  std::vector<std::size_t> offsets_a;
  std::vector<std::size_t> offsets_b;
  if (batch.empty()) {
    offsets_a.push_back(0);
    offsets_b.push_back(0);
  } else {
    for_each_broadcast(batch, stride_a, stride_b, [&](std::size_t, std::size_t ia, std::size_t ib) {
      offsets_a.push_back(ia * m * k);
      offsets_b.push_back(ib * k * n);
    });
  }
  const std::size_t batches = offsets_a.size();
  const auto& av = a.values();
  const auto& bv = b.values();
  std::vector<double> out(batches * m * n, 0.0);
  for (std::size_t q = 0; q < batches; ++q) {
    const double* A = av.data() + offsets_a[q];
    const double* B = bv.data() + offsets_b[q];
    double* C = out.data() + q * m * n;
    for (std::size_t i = 0; i < m; ++i) {
      double* crow = C + i * n;
      for (std::size_t p = 0; p < k; ++p) {
        const double aval = A[i * k + p];
        if (aval == 0.0) continue;
        const double* brow = B + p * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] += aval * brow[j];
      }
    }
  }
  Shape out_shape = batch;
  out_shape.push_back(m);
  out_shape.push_back(n);
  return make_result(out_shape, std::move(out), {a, b},
                     [offsets_a, offsets_b, m, k, n](Node& self) {
                       Node& pa = *self.parents[0];
                       Node& pb = *self.parents[1];
                       double* ga = pa.requires_grad ? pa.grad_buffer().data() : nullptr;
                       double* gb = pb.requires_grad ? pb.grad_buffer().data() : nullptr;
                       for (std::size_t q = 0; q < offsets_a.size(); ++q) {
                         const double* A = pa.data.data() + offsets_a[q];
                         const double* B = pb.data.data() + offsets_b[q];
                         const double* G = self.grad.data() + q * m * n;
                         if (ga) {
                           double* dA = ga + offsets_a[q];
                           for (std::size_t i = 0; i < m; ++i) {
                             for (std::size_t p = 0; p < k; ++p) {
                               const double* brow = B + p * n;
                               const double* grow = G + i * n;
                               double acc = 0.0;
                               for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
                               dA[i * k + p] += acc;
                             }
                           }
                         }
                         if (gb) {
                           double* dB = gb + offsets_b[q];
                           for (std::size_t i = 0; i < m; ++i) {
                             const double* grow = G + i * n;
                             for (std::size_t p = 0; p < k; ++p) {
                               const double aval = A[i * k + p];
                               if (aval == 0.0) continue;
                               double* drow = dB + p * n;
                               for (std::size_t j = 0; j < n; ++j) drow[j] += aval * grow[j];
                             }
                           }
                         }
                       }
                     });
}

Tensor softmax(const Tensor& x, std::size_t axis) {
  const AxisSplit s = split_at(x.shape(), axis);
  const auto& xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t i = 0; i < s.inner; ++i) {
      const std::size_t base = o * s.length * s.inner + i;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < s.length; ++k) mx = std::max(mx, xv[base + k * s.inner]);
      double total = 0.0;
      for (std::size_t k = 0; k < s.length; ++k) {
        const double e = std::exp(xv[base + k * s.inner] - mx);
        out[base + k * s.inner] = e;
        total += e;
      }
      for (std::size_t k = 0; k < s.length; ++k) out[base + k * s.inner] /= total;
    }
  }
  return make_result(x.shape(), std::move(out), {x}, [s](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& gp = p.grad_buffer();
    for (std::size_t o = 0; o < s.outer; ++o) {
      for (std::size_t i = 0; i < s.inner; ++i) {
        const std::size_t base = o * s.length * s.inner + i;
        double dot = 0.0;
        for (std::size_t k = 0; k < s.length; ++k) {
          dot += self.grad[base + k * s.inner] * self.data[base + k * s.inner];
        }
        for (std::size_t k = 0; k < s.length; ++k) {
          const std::size_t idx = base + k * s.inner;
          gp[idx] += self.data[idx] * (self.grad[idx] - dot);
        }
      }
    }
  });
}

Tensor log_softmax(const Tensor& x, std::size_t axis) {
  const AxisSplit s = split_at(x.shape(), axis);
  const auto& xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t i = 0; i < s.inner; ++i) {
      const std::size_t base = o * s.length * s.inner + i;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < s.length; ++k) mx = std::max(mx, xv[base + k * s.inner]);
      double total = 0.0;
      for (std::size_t k = 0; k < s.length; ++k) total += std::exp(xv[base + k * s.inner] - mx);
      const double lse = mx + std::log(total);
      for (std::size_t k = 0; k < s.length; ++k) out[base + k * s.inner] = xv[base + k * s.inner] - lse;
    }
  }
  return make_result(x.shape(), std::move(out), {x}, [s](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& gp = p.grad_buffer();
    for (std::size_t o = 0; o < s.outer; ++o) {
      for (std::size_t i = 0; i < s.inner; ++i) {
        const std::size_t base = o * s.length * s.inner + i;
        double gsum = 0.0;
        for (std::size_t k = 0; k < s.length; ++k) gsum += self.grad[base + k * s.inner];
        for (std::size_t k = 0; k < s.length; ++k) {
          const std::size_t idx = base + k * s.inner;
          gp[idx] += self.grad[idx] - std::exp(self.data[idx]) * gsum;
        }
      }
    }
  });
}

Tensor linear_map(const Tensor& x, std::size_t axis, const std::vector<double>& map, std::size_t rows,
                  std::size_t cols) {
  const AxisSplit s = split_at(x.shape(), axis);
  if (s.length != cols) {
    throw ShapeError("linear_map expects axis length " + std::to_string(cols) + ", got " +
                     std::to_string(s.length));
  }
  if (map.size() != rows * cols || rows == 0) throw ShapeError("linear_map matrix has wrong size");
  const auto& xv = x.values();
  std::vector<double> out(s.outer * rows * s.inner, 0.0);
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t r = 0; r < rows; ++r) {
      double* dst = out.data() + (o * rows + r) * s.inner;
      for (std::size_t c = 0; c < cols; ++c) {
        const double w = map[r * cols + c];
        if (w == 0.0) continue;
        const double* src = xv.data() + (o * cols + c) * s.inner;
        for (std::size_t i = 0; i < s.inner; ++i) dst[i] += w * src[i];
      }
    }
  }
  Shape shape = x.shape();
  shape[axis] = rows;
  return make_result(shape, std::move(out), {x}, [s, map, rows, cols](Node& self) {
    Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& gp = p.grad_buffer();
    for (std::size_t o = 0; o < s.outer; ++o) {
      for (std::size_t r = 0; r < rows; ++r) {
        const double* g = self.grad.data() + (o * rows + r) * s.inner;
        for (std::size_t c = 0; c < cols; ++c) {
          const double w = map[r * cols + c];
          if (w == 0.0) continue;
          double* dst = gp.data() + (o * cols + c) * s.inner;
          for (std::size_t i = 0; i < s.inner; ++i) dst[i] += w * g[i];
        }
      }
    }
  });
}

Tensor pointwise(const Tensor& weight, const Tensor& x) {
  if (weight.rank() != 2) throw ShapeError("pointwise weight must be Cout x Cin");
  const Shape& xs = x.shape();
  if (xs.empty() || xs[0] != weight.dim(1)) {
    throw ShapeError("pointwise: weight " + shape_str(weight.shape()) + " vs input " + shape_str(xs));
  }
  const std::size_t positions = x.numel() / xs[0];
  Tensor y = matmul(weight, reshape(x, {xs[0], positions}));
  Shape out = xs;
  out[0] = weight.dim(0);
  return reshape(y, out);
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("max_abs_diff shapes differ: " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
  double m = 0.0;
  const auto& av = a.values();
  const auto& bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) m = std::max(m, std::abs(av[i] - bv[i]));
  return m;
}

}  // namespace scalpel
