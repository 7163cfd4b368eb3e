#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "scalpel/errors.hpp"
#include "scalpel/grad_check.hpp"
#include "scalpel/ops.hpp"
#include "support/random.hpp"

using namespace scalpel;
using testing_support::normal_tensor;

namespace {

constexpr double kTol = 1e-6;

void expect_grad_ok(const std::string& name, const std::function<Tensor()>& f, std::vector<NamedTensor> params) {
  const GradCheckReport r = grad_check(name, f, std::move(params));
  EXPECT_TRUE(r.passed(kTol)) << name << " max rel error " << r.max_rel_error << " skipped "
                              << r.coordinates_skipped;
}

}  // namespace

TEST(Broadcast, ShapesAlignFromTrailingAxis) {
  EXPECT_EQ(broadcast_shape({3, 1, 4}, {5, 1}), (Shape{3, 5, 4}));
  EXPECT_EQ(broadcast_shape({}, {2, 2}), (Shape{2, 2}));
  EXPECT_THROW(broadcast_shape({3}, {4}), ShapeError);
}

TEST(Broadcast, AddMatchesManualLoop) {
  const Tensor a({2, 3}, {1, 2, 3, 4, 5, 6});
  const Tensor b({3}, {10, 20, 30});
  const Tensor c = a + b;
  EXPECT_EQ(c.shape(), (Shape{2, 3}));
  EXPECT_EQ(c.values(), (std::vector<double>{11, 22, 33, 14, 25, 36}));
}

TEST(Autodiff, BroadcastGradientSumsOverStretchedAxes) {
  Tensor a = Tensor::ones({2, 3}, true);
  Tensor b = Tensor::ones({3}, true);
  sum(a * b).backward();
  EXPECT_EQ(b.grad(), (std::vector<double>{2, 2, 2}));
  EXPECT_EQ(a.grad(), (std::vector<double>(6, 1.0)));
}

TEST(Autodiff, GradientsAccumulateAcrossBackwardCalls) {
  Tensor x = Tensor::scalar(3.0, true);
  (x * x).backward();
  (x * x).backward();
  EXPECT_DOUBLE_EQ(x.grad()[0], 12.0);
  x.zero_grad();
  EXPECT_DOUBLE_EQ(x.grad()[0], 0.0);
}

TEST(Autodiff, ReusedNodeGetsBothContributions) {
  Tensor x = Tensor::scalar(2.0, true);
  const Tensor y = x * x;
  (y + y * x).backward();  // d/dx (x^2 + x^3) = 2x + 3x^2
  EXPECT_DOUBLE_EQ(x.grad()[0], 16.0);
}

TEST(Autodiff, BackwardRequiresScalar) {
  Tensor x = Tensor::ones({2}, true);
  EXPECT_THROW((x * 2.0).backward(), ContractError);
}

TEST(Autodiff, NoGradGuardSkipsGraph) {
  Tensor x = Tensor::ones({2}, true);
  Tensor y;
  {
    NoGradGuard guard;
    EXPECT_FALSE(grad_enabled());
    y = x * 3.0;
  }
  EXPECT_TRUE(grad_enabled());
  EXPECT_FALSE(y.requires_grad());
}

TEST(Autodiff, DetachCutsHistory) {
  Tensor x = Tensor::scalar(2.0, true);
  const Tensor y = (x * x).detach();
  EXPECT_FALSE(y.requires_grad());
  EXPECT_DOUBLE_EQ(y.item(), 4.0);
}

TEST(Ops, ElementwiseGradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(1);
  Tensor x = normal_tensor(rng, {3, 4}, 1.0, true);
  Tensor y = normal_tensor(rng, {4}, 1.0, true);
  Tensor pos(x.shape(), x.values(), true);
  for (double& v : pos.mutable_data()) v = std::abs(v) + 0.5;
  expect_grad_ok("mul_add", [&] { return sum((x * y + x) * 0.5); }, {{"x", x}, {"y", y}});
  expect_grad_ok("div", [&] { return sum(x / (pos + 1.0)); }, {{"x", x}, {"pos", pos}});
  expect_grad_ok("exp_tanh", [&] { return sum(exp(tanh(x))); }, {{"x", x}});
  expect_grad_ok("sigmoid_gelu", [&] { return sum(sigmoid(x) * gelu(x)); }, {{"x", x}});
  expect_grad_ok("log_sqrt", [&] { return sum(log(pos) + sqrt(pos)); }, {{"pos", pos}});
  expect_grad_ok("log_sigmoid", [&] { return sum(log_sigmoid(x * 10.0)); }, {{"x", x}});
  expect_grad_ok("relu_abs", [&] { return sum(relu(x) + abs(x) * y); }, {{"x", x}, {"y", y}});
}

TEST(Ops, LogSigmoidStaysFiniteWhenSaturated) {
  const Tensor x({2}, {-800.0, 800.0});
  const Tensor y = log_sigmoid(x);
  EXPECT_DOUBLE_EQ(y.values()[0], -800.0);
  EXPECT_DOUBLE_EQ(y.values()[1], 0.0);
}

TEST(Ops, ReductionAndShapeGradients) {
  std::mt19937_64 rng(2);
  Tensor x = normal_tensor(rng, {2, 3, 4}, 1.0, true);
  Tensor w = normal_tensor(rng, {2, 4, 3}, 1.0, true);
  Tensor probe = normal_tensor(rng, {3, 2, 4});
  expect_grad_ok("sum_axis", [&] { return sum(square(sum(x, 1, true))); }, {{"x", x}});
  expect_grad_ok("mean_axis", [&] { return sum(square(mean(x, 2))); }, {{"x", x}});
  expect_grad_ok("permute", [&] { return sum(permute(x, {1, 0, 2}) * probe); }, {{"x", x}});
  expect_grad_ok("slice_concat",
                 [&] { return sum(square(concat({slice(x, 1, 1, 2), slice(x, 1, 0, 1)}, 1))); }, {{"x", x}});
  expect_grad_ok("matmul", [&] { return sum(square(matmul(x, w))); }, {{"x", x}, {"w", w}});
  expect_grad_ok("softmax", [&] { return sum(softmax(x, 1) * permute(probe, {1, 0, 2})); }, {{"x", x}});
  expect_grad_ok("log_softmax", [&] { return sum(log_softmax(x, 2) * permute(probe, {1, 0, 2})); }, {{"x", x}});
  expect_grad_ok("time_shift", [&] { return sum(square(time_shift(x, 1, 2) + time_shift(x, 1, -1))); },
                 {{"x", x}});
}

TEST(Ops, MatmulBroadcastsLeadingAxes) {
  const Tensor a({2, 1, 2}, {1, 2, 3, 4});
  const Tensor b({2, 1}, {1, 1});
  const Tensor c = matmul(a, b);
  EXPECT_EQ(c.shape(), (Shape{2, 1, 1}));
  EXPECT_EQ(c.values(), (std::vector<double>{3, 7}));
  EXPECT_THROW(matmul(Tensor::ones({2, 3}), Tensor::ones({2, 3})), ShapeError);
}

TEST(Ops, SoftmaxRowsSumToOne) {
  std::mt19937_64 rng(3);
  const Tensor x = normal_tensor(rng, {5, 7}, 30.0);
  const Tensor s = softmax(x, 0);
  for (std::size_t t = 0; t < 7; ++t) {
    double total = 0.0;
    for (std::size_t q = 0; q < 5; ++q) total += s.at({q, t});
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Ops, LogFloorHasZeroGradient) {
  Tensor x({2}, {0.0, 1.0}, true);
  sum(log(x)).backward();
  EXPECT_DOUBLE_EQ(log(x).values()[0], std::log(kLogFloor));
  EXPECT_DOUBLE_EQ(x.grad()[0], 0.0);
  EXPECT_DOUBLE_EQ(x.grad()[1], 1.0);
}

TEST(Ops, TimeShiftZeroFills) {
  const Tensor x({1, 4}, {1, 2, 3, 4});
  EXPECT_EQ(time_shift(x, 1, 1).values(), (std::vector<double>{0, 1, 2, 3}));
  EXPECT_EQ(time_shift(x, 1, -2).values(), (std::vector<double>{3, 4, 0, 0}));
}

TEST(Ops, PointwiseMixesLeadingAxis) {
  const Tensor w({1, 2}, {1, -1});
  const Tensor x({2, 3}, {1, 2, 3, 10, 20, 30});
  EXPECT_EQ(pointwise(w, x).values(), (std::vector<double>{-9, -18, -27}));
}

TEST(Ops, ReshapeRejectsWrongCount) { EXPECT_THROW(reshape(Tensor::ones({2, 3}), {4}), ShapeError); }
