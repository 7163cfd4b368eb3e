#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace scalpel {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> data;
  // Empty until something is accumulated.
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this->grad, accumulates into parents' grad buffers.
  std::function<void(Node&)> backward_fn;

  bool is_leaf() const { return !backward_fn; }
  std::vector<double>& grad_buffer();
};

}  // namespace detail

/// Dense row-major f64 array with optional reverse-mode gradient tracking.
///
/// A Tensor is a handle: copies share the same underlying node, the way an
/// expression handle does in a dynamic-graph autodiff engine. Operations
/// producing a Tensor from inputs that require grad record a backward
/// closure; `backward()` on a scalar result walks the graph once.
class Tensor {
 public:
  Tensor();
  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor ones(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor from_vector(std::vector<double> values, bool requires_grad = false);

  bool defined() const { return static_cast<bool>(node_); }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const double> data() const;
  /// Write access to the payload. Intended for leaves (optimizer updates,
  /// finite-difference probes); mutating an interior node invalidates its graph.
  std::span<double> mutable_data();
  const std::vector<double>& values() const&;
  /// Copy for temporaries, so `for (double v : f(x).values())` is safe.
  std::vector<double> values() &&;

  double item() const;
  double at(std::initializer_list<std::size_t> index) const;

  bool requires_grad() const;
  void set_requires_grad(bool flag);
  bool has_grad() const;
  /// Gradient buffer; zeros of the right size if nothing was accumulated.
  std::vector<double> grad() const;
  void zero_grad();

  /// Accumulates d(this)/d(leaf) into every reachable leaf that requires grad.
  /// Throws ContractError unless this is a single-element tensor.
  void backward() const;

  /// Same values, no history, never accumulates gradient.
  Tensor detach() const;
  Tensor clone() const;

  std::shared_ptr<detail::Node> node() const { return node_; }
  static Tensor from_node(std::shared_ptr<detail::Node> node);

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node);
  std::shared_ptr<detail::Node> node_;
};

/// True while graph recording is enabled on this thread.
bool grad_enabled();

/// Disables graph recording on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

namespace detail {

/// Hash of the branch decisions taken by piecewise-smooth ops (relu, abs,
/// clamps, the log floor, amplitude on the real axis). While an instance is
/// alive on a thread those ops fold every decision into it; two evaluations
/// with equal hashes ran through the same smooth piece.
class BranchTrace {
 public:
  BranchTrace();
  ~BranchTrace();
  BranchTrace(const BranchTrace&) = delete;
  BranchTrace& operator=(const BranchTrace&) = delete;

  std::uint64_t hash() const { return hash_; }

  static bool active();
  /// No-op unless a trace is active on this thread.
  static void record(bool branch);

 private:
  std::uint64_t hash_;
  BranchTrace* previous_;
};

/// Builds the result of an op. `backward` is attached only when grad mode is
/// on and at least one parent requires grad.
Tensor make_result(Shape shape, std::vector<double> data,
                   std::vector<Tensor> parents,
                   std::function<void(Node&)> backward);

}  // namespace detail

}  // namespace scalpel
