#include "advtrain/tensor.hpp"

#include <gtest/gtest.h>

#include "advtrain/rng.hpp"
#include "support/oracles.hpp"

using advtrain::Tensor;

namespace {

Tensor random_tensor(advtrain::Shape shape, std::uint64_t seed, double lo = -1,
                     double hi = 1) {
  advtrain::Rng rng(seed);
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

TEST(Tensor, ShapeDataInvariant) {
  EXPECT_THROW(Tensor({2, 3}, {1.0, 2.0}), advtrain::DimensionError);
  Tensor t({2, 3});
  EXPECT_EQ(t.size(), 6u);
}

TEST(Tensor, MatmulIdentity) {
  Tensor a({2, 2}, {1, 2, 3, 4});
  Tensor out = matmul(Tensor::identity(2), a);
  EXPECT_EQ(out, a);
}

TEST(Tensor, MatmulHandArithmetic) {
  Tensor a({1, 2}, {1, 2});
  Tensor b({2, 1}, {3, 4});
  Tensor out = matmul(a, b);
  ASSERT_EQ(out.shape(), (advtrain::Shape{1, 1}));
  EXPECT_DOUBLE_EQ(out[0], 11.0);
}

TEST(Tensor, MatmulMatchesNaiveOracle) {
  Tensor a = random_tensor({5, 7}, 11);
  Tensor b = random_tensor({7, 3}, 12);
  Tensor got = matmul(a, b);
  Tensor want = oracles::naive_matmul(a, b);
  EXPECT_LE(max_abs_diff(got, want), 1e-12);
}

TEST(Tensor, MatmulShapeMismatchNamesBothShapes) {
  Tensor a({2, 3});
  Tensor b({4, 2});
  try {
    matmul(a, b);
    FAIL() << "expected DimensionError";
  } catch (const advtrain::DimensionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2x3]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("[4x2]"), std::string::npos) << msg;
  }
}

TEST(Tensor, SignZeroIsZero) {
  Tensor t({3}, {-2.5, 0.0, 7.0});
  Tensor s = sign(t);
  EXPECT_DOUBLE_EQ(s[0], -1.0);
  EXPECT_DOUBLE_EQ(s[1], 0.0);
  EXPECT_DOUBLE_EQ(s[2], 1.0);
}

TEST(Tensor, SumIsSequentialLeftToRight) {
  // Catches any change away from ordered accumulation.
  Tensor t({3}, {1e16, 1.0, -1e16});
  EXPECT_DOUBLE_EQ(sum(t), 0.0);  // (1e16 + 1) rounds to 1e16
}

TEST(Tensor, ClampAndFiniteness) {
  Tensor t({4}, {-0.5, 0.25, 0.75, 1.5});
  Tensor c = clamp(t, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(c[0], 0.0);
  EXPECT_DOUBLE_EQ(c[3], 1.0);
  EXPECT_TRUE(c.all_finite());
}

TEST(Tensor, DeterministicAcrossRuns) {
  Tensor a = random_tensor({6, 6}, 99);
  Tensor b = random_tensor({6, 6}, 100);
  Tensor first = matmul(a, b);
  Tensor second = matmul(a, b);
  EXPECT_EQ(first, second);  // bitwise
}

TEST(Rng, SeedDerivationMatchesReferenceHash) {
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 0xDEADBEEFull}) {
    const std::uint64_t expect = oracles::reference_splitmix64(
        oracles::reference_splitmix64(seed) ^ 7ull);
    EXPECT_EQ(advtrain::derive_seed(seed, 7), expect);
  }
}

TEST(Rng, UniformBoundsAndDeterminism) {
  advtrain::Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) {
    const double va = a.uniform(-0.25, 0.25);
    EXPECT_EQ(va, b.uniform(-0.25, 0.25));
    EXPECT_GE(va, -0.25);
    EXPECT_LT(va, 0.25);
  }
}

TEST(Rng, DegenerateUniformIsExactlyLowerBound) {
  advtrain::Rng rng(5);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(rng.uniform(-0.0, 0.0), 0.0);
}

}  // namespace
