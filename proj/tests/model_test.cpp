#include "advtrain/model.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "advtrain/rng.hpp"
#include "support/oracles.hpp"

using advtrain::Batch;
using advtrain::Model;
using advtrain::Tensor;

namespace {

Batch batch_of(Tensor x, std::vector<int> y) {
  Batch b;
  b.x = std::move(x);
  b.y = std::move(y);
  return b;
}

TEST(Model, ZeroWeightsGiveZeroLogits) {
  Model m = Model::mlp_classifier(3, 4, {5}, 1);
  for (Tensor& p : m.mutable_params())
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = 0.0;
  Batch b = batch_of(Tensor({2, 3}, {0.1, 0.5, 0.9, 0.3, 0.2, 0.8}), {0, 1});
  Tensor logits = forward(m, b);
  for (std::size_t i = 0; i < logits.size(); ++i)
    EXPECT_DOUBLE_EQ(logits[i], 0.0);
}

TEST(Model, IdentityDenseIsIdentityMap) {
  // Single dense layer, identity weights, zero bias: logits == input.
  Model m = Model::mlp_classifier(3, 3, {}, 1);
  m.mutable_params()[0] = Tensor::identity(3);
  Batch b = batch_of(Tensor({2, 3}, {0.6, 0.1, 0.3, 0.9, 0.2, 0.7}), {0, 1});
  Tensor logits = forward(m, b);
  EXPECT_EQ(logits, b.x);
}

TEST(Model, FixedSeedForwardMatchesHandEvaluation) {
  Model m = Model::mlp_classifier(2, 2, {3}, 42);
  Tensor x({1, 2}, {0.25, 0.75});
  Tensor logits = m.forward(x);

  // Straight-line recomputation with naive loops.
  const Tensor& w1 = m.params()[0];
  const Tensor& b1 = m.params()[1];
  const Tensor& w2 = m.params()[2];
  const Tensor& b2 = m.params()[3];
  double h[3];
  for (int j = 0; j < 3; ++j) {
    double s = b1[j];
    for (int k = 0; k < 2; ++k) s += x[k] * w1(k, j);
    h[j] = s > 0 ? s : 0.0;
  }
  for (int j = 0; j < 2; ++j) {
    double s = b2[j];
    for (int k = 0; k < 3; ++k) s += h[k] * w2(k, j);
    EXPECT_NEAR(logits[j], s, 1e-15);
  }
}

TEST(Model, ForwardIsPure) {
  Model m = Model::mlp_classifier(4, 3, {8}, 9);
  Tensor x({3, 4});
  advtrain::Rng rng(2);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(0, 1);
  EXPECT_EQ(m.forward(x), m.forward(x));
}

TEST(Model, ShapeMismatchIsDimensionError) {
  Model m = Model::mlp_classifier(4, 2, {8}, 9);
  EXPECT_THROW(m.forward(Tensor({1, 3})), advtrain::DimensionError);
}

TEST(Loss, UniformBinaryIsLn2) {
  Tensor logits({1, 2}, {0.0, 0.0});
  std::vector<int> y{0};
  EXPECT_DOUBLE_EQ(advtrain::cross_entropy(logits, y), std::log(2.0));
}

TEST(Loss, UniformLogitsGiveLnC) {
  for (std::size_t c : {2u, 3u, 5u, 10u}) {
    Tensor logits({1, c});
    std::vector<int> y{0};
    EXPECT_DOUBLE_EQ(advtrain::cross_entropy(logits, y),
                     std::log(static_cast<double>(c)));
  }
}

TEST(Loss, ClosedFormSoftplus) {
  // logits (3, -1), y = 0: loss = softplus(-4) = log(1 + e^-4).
  Tensor logits({1, 2}, {3.0, -1.0});
  std::vector<int> y{0};
  EXPECT_NEAR(advtrain::cross_entropy(logits, y), std::log1p(std::exp(-4.0)),
              1e-15);
  EXPECT_NEAR(advtrain::cross_entropy(logits, y), 0.01815, 5e-6);
}

TEST(Loss, LabelOutOfRangeIsContractError) {
  Tensor logits({1, 2}, {0.0, 0.0});
  std::vector<int> bad{2};
  EXPECT_THROW(advtrain::cross_entropy(logits, bad), advtrain::ContractError);
  std::vector<int> negative{-1};
  EXPECT_THROW(advtrain::cross_entropy(logits, negative),
               advtrain::ContractError);
}

TEST(Loss, NonnegativeAndShiftInvariant) {
  advtrain::Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor logits({4, 5});
    for (std::size_t i = 0; i < logits.size(); ++i)
      logits[i] = rng.uniform(-30, 30);
    std::vector<int> y{0, 4, 2, 1};
    const double base = advtrain::cross_entropy(logits, y);
    EXPECT_GE(base, 0.0);
    Tensor shifted = logits;
    const double c = rng.uniform(-100, 100);
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += c;
    EXPECT_NEAR(advtrain::cross_entropy(shifted, y), base, 1e-10);
  }
}

TEST(Loss, StableUnderHugeLogits) {
  Tensor logits({1, 2}, {1e4, -1e4});
  std::vector<int> y{1};
  const double l = advtrain::cross_entropy(logits, y);
  EXPECT_TRUE(std::isfinite(l));
  EXPECT_NEAR(l, 2e4, 1.0);
}

TEST(Loss, InputGradientMatchesFiniteDifferences) {
  Model m = Model::mlp_classifier(3, 2, {6}, 4);
  Tensor x({2, 3}, {0.2, 0.8, 0.5, 0.9, 0.1, 0.4});
  std::vector<int> y{0, 1};
  Model::Traced tr = m.trace(x, true, false);
  advtrain::Gradients g =
      tr.tape.backward(tr.tape.softmax_cross_entropy(tr.logits, y));
  Tensor numeric = oracles::finite_difference(
      [&](const Tensor& t) { return advtrain::cross_entropy(m.forward(t), y); },
      x);
  EXPECT_LT(oracles::max_relative_error(g.wrt(tr.input), numeric, 1e-4), 1e-4);
}

TEST(Embed, TwoLayerMlpEmbedIsReluOfFirstDense) {
  Model m = Model::mlp_classifier(3, 2, {5}, 8);
  Batch b = batch_of(Tensor({2, 3}, {0.2, 0.4, 0.6, 0.5, 0.1, 0.9}), {0, 1});
  Tensor emb = embed(m, b);
  ASSERT_EQ(emb.shape(), (advtrain::Shape{2, 5}));

  const Tensor& w1 = m.params()[0];
  const Tensor& b1 = m.params()[1];
  Tensor expect = advtrain::matmul(b.x, w1);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      double v = expect(i, j) + b1[j];
      EXPECT_DOUBLE_EQ(emb(i, j), v > 0 ? v : 0.0);
    }
}

TEST(Embed, RowCountEqualsBatchSize) {
  Model m = Model::mlp_classifier(4, 3, {6, 5}, 8);
  Batch b;
  b.x = Tensor({7, 4});
  b.y.assign(7, 0);
  EXPECT_EQ(embed(m, b).dim(0), 7u);
}

TEST(Embed, ComposedWithHeadReproducesForward) {
  Model m = Model::mlp_classifier(5, 3, {8, 6}, 12);
  Batch b;
  advtrain::Rng rng(3);
  b.x = Tensor({4, 5});
  for (std::size_t i = 0; i < b.x.size(); ++i) b.x[i] = rng.uniform(0, 1);
  b.y.assign(4, 0);

  Tensor emb = embed(m, b);
  const Tensor& w = m.params()[m.params().size() - 2];
  const Tensor& bias = m.params().back();
  Tensor logits = advtrain::matmul(emb, w);
  for (std::size_t i = 0; i < logits.dim(0); ++i)
    for (std::size_t j = 0; j < logits.dim(1); ++j) logits(i, j) += bias[j];
  EXPECT_LE(max_abs_diff(logits, forward(m, b)), 1e-12);
}

TEST(Embed, SingleLayerModelIsArchitectureError) {
  Model m = Model::mlp_classifier(3, 2, {}, 1);  // lone dense layer
  Batch b = batch_of(Tensor({1, 3}), {0});
  EXPECT_THROW(embed(m, b), advtrain::ArchitectureError);
}

TEST(Model, ConvForwardFiniteAndShaped) {
  const advtrain::ImageGeom geom{1, 6, 6};
  Model m = Model::conv_classifier(geom, 4, {3, 5}, 11);
  Tensor x({2, geom.pixels()});
  advtrain::Rng rng(6);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(0, 1);
  Tensor logits = m.forward(x);
  ASSERT_EQ(logits.shape(), (advtrain::Shape{2, 4}));
  EXPECT_TRUE(logits.all_finite());
  // embed of the conv net = flattened second relu map.
  Batch b;
  b.x = x;
  b.y = {0, 1};
  EXPECT_EQ(embed(m, b).dim(1), 5 * 6 * 6);
}

TEST(Model, ParamsStableOrder) {
  Model m = Model::mlp_classifier(3, 2, {4}, 5);
  ASSERT_EQ(m.params().size(), 4u);  // W1 b1 W2 b2
  EXPECT_EQ(m.params()[0].shape(), (advtrain::Shape{3, 4}));
  EXPECT_EQ(m.params()[1].shape(), (advtrain::Shape{4}));
  EXPECT_EQ(m.params()[2].shape(), (advtrain::Shape{4, 2}));
  EXPECT_EQ(m.params()[3].shape(), (advtrain::Shape{2}));
}

}  // namespace
