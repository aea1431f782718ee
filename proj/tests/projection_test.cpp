#include "advtrain/projection.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "advtrain/linalg.hpp"
#include "advtrain/train.hpp"
#include "advtrain/rng.hpp"
#include "support/oracles.hpp"

using advtrain::jacobi_eigen;
using advtrain::lda_reduce;
using advtrain::pca_reduce;
using advtrain::SymEigen;
using advtrain::Tensor;

namespace {

Tensor random_symmetric(std::size_t n, std::uint64_t seed) {
  advtrain::Rng rng(seed);
  Tensor a({n, n});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = rng.uniform(-2, 2);
      a(i, j) = v;
      a(j, i) = v;
    }
  return a;
}

TEST(Jacobi, MatchesDenseOracleUpTo16x16) {
  for (std::size_t n : {2u, 3u, 5u, 9u, 16u}) {
    Tensor a = random_symmetric(n, 100 + n);
    SymEigen got = jacobi_eigen(a);
    oracles::EigenPairs want = oracles::eigen_sym_oracle(a);
    for (std::size_t j = 0; j < n; ++j) {
      EXPECT_NEAR(got.values[j], want.values[j], 1e-10);
      // Eigenvectors match up to sign.
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        dot += got.vectors(i, j) * want.vectors(i, j);
      EXPECT_NEAR(std::fabs(dot), 1.0, 1e-8);
    }
  }
}

TEST(Jacobi, ReconstructsMatrix) {
  Tensor a = random_symmetric(8, 55);
  SymEigen e = jacobi_eigen(a);
  // A == V diag(lambda) V^T.
  Tensor lambda({8, 8});
  for (std::size_t i = 0; i < 8; ++i) lambda(i, i) = e.values[i];
  Tensor rebuilt = advtrain::matmul(advtrain::matmul(e.vectors, lambda),
                                    advtrain::transpose(e.vectors));
  EXPECT_LE(max_abs_diff(rebuilt, a), 1e-10);
}

TEST(Cholesky, FactorizesAndSolves) {
  Tensor a = random_symmetric(6, 77);
  // Make it positive definite.
  for (std::size_t i = 0; i < 6; ++i) a(i, i) += 6.0;
  Tensor l = advtrain::cholesky(a);
  Tensor rebuilt = advtrain::matmul(l, advtrain::transpose(l));
  EXPECT_LE(max_abs_diff(rebuilt, a), 1e-10);

  Tensor b({6, 2});
  advtrain::Rng rng(78);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = rng.uniform(-1, 1);
  Tensor y = advtrain::solve_lower(l, b);
  EXPECT_LE(max_abs_diff(advtrain::matmul(l, y), b), 1e-10);
  Tensor z = advtrain::solve_lower_transpose(l, b);
  EXPECT_LE(max_abs_diff(advtrain::matmul(advtrain::transpose(l), z), b),
            1e-10);
}

// Synthetic embedding clouds for LDA checks.
struct Cloud {
  Tensor x;
  std::vector<int> y;
};

Cloud two_gaussian_cloud(std::size_t n_per, std::size_t dim, double separation,
                         std::uint64_t seed) {
  advtrain::Rng rng(seed);
  Cloud c;
  c.x = Tensor({2 * n_per, dim});
  c.y.resize(2 * n_per);
  for (std::size_t i = 0; i < 2 * n_per; ++i) {
    const int label = static_cast<int>(i % 2);
    c.y[i] = label;
    for (std::size_t j = 0; j < dim; ++j) {
      double mean = (j == 0) ? (label == 0 ? 0.0 : separation) : 0.0;
      c.x(i, j) = rng.normal(mean, 1.0);
    }
  }
  return c;
}

TEST(Lda, BinaryGivesOneColumn) {
  Cloud c = two_gaussian_cloud(30, 5, 2.0, 1);
  advtrain::LdaResult r = lda_reduce(c.x, c.y, 2);
  EXPECT_EQ(r.lda_matrix.shape(), (advtrain::Shape{5, 1}));
  EXPECT_EQ(r.projected.shape(), (advtrain::Shape{60, 1}));
}

TEST(Lda, DirectionMatchesClosedFormFisher) {
  // Spherical unit covariance, means (0,0,..) and (3,0,..): the Fisher
  // direction Sigma_w^-1 (mu1 - mu0) is parallel to e1. Require < 5 degrees.
  Cloud c = two_gaussian_cloud(1000, 4, 3.0, 21);
  advtrain::LdaResult r = lda_reduce(c.x, c.y, 2);
  double norm = 0.0;
  for (std::size_t i = 0; i < 4; ++i) norm += r.lda_matrix(i, 0) * r.lda_matrix(i, 0);
  const double cosine = std::fabs(r.lda_matrix(0, 0)) / std::sqrt(norm);
  const double angle_deg = std::acos(std::min(1.0, cosine)) * 180.0 / M_PI;
  EXPECT_LT(angle_deg, 5.0);
}

TEST(Lda, DegenerateIdenticalClassesRegularizedNotCrashing) {
  // Both classes drawn from the same distribution: between-class scatter ~ 0,
  // the ridge keeps the solve well-posed and the Fisher ratio tiny.
  Cloud c = two_gaussian_cloud(200, 4, 0.0, 31);
  advtrain::LdaResult r = lda_reduce(c.x, c.y, 2);
  EXPECT_TRUE(r.projected.all_finite());
  EXPECT_LT(r.fisher_ratios[0], 0.05);
}

TEST(Lda, ConstantDataDoesNotCrash) {
  Tensor x({10, 3});
  std::vector<int> y{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  advtrain::LdaResult r = lda_reduce(x, y, 2);
  EXPECT_TRUE(r.projected.all_finite());
}

TEST(Lda, MissingClassIsContractError) {
  Cloud c = two_gaussian_cloud(20, 4, 2.0, 41);
  EXPECT_THROW(lda_reduce(c.x, c.y, 3), advtrain::ContractError);
}

TEST(Lda, FisherRatioDominatesRandomDirections) {
  Cloud c = two_gaussian_cloud(400, 6, 2.5, 51);
  advtrain::LdaResult r = lda_reduce(c.x, c.y, 2);

  // Fisher ratio of a direction: w^T Sb w / w^T (Sw + ridge) w, recomputed
  // here from scratch.
  auto fisher = [&](const std::vector<double>& w) {
    std::size_t n = c.x.dim(0), d = c.x.dim(1);
    double mean0[8] = {0}, mean1[8] = {0}, mean[8] = {0};
    std::size_t c0 = 0, c1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        mean[j] += c.x(i, j);
        if (c.y[i] == 0) mean0[j] += c.x(i, j);
        else mean1[j] += c.x(i, j);
      }
      (c.y[i] == 0 ? c0 : c1)++;
    }
    for (std::size_t j = 0; j < d; ++j) {
      mean0[j] /= c0;
      mean1[j] /= c1;
      mean[j] /= n;
    }
    double sb = 0.0, sw = 0.0;
    double p0 = 0.0, p1 = 0.0, pm = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      p0 += w[j] * mean0[j];
      p1 += w[j] * mean1[j];
      pm += w[j] * mean[j];
    }
    sb = c0 * (p0 - pm) * (p0 - pm) + c1 * (p1 - pm) * (p1 - pm);
    for (std::size_t i = 0; i < n; ++i) {
      double proj = 0.0;
      for (std::size_t j = 0; j < d; ++j) proj += w[j] * c.x(i, j);
      const double mu = c.y[i] == 0 ? p0 : p1;
      sw += (proj - mu) * (proj - mu);
    }
    return sb / (sw + 1e-12);
  };

  std::vector<double> lda_dir(6);
  for (std::size_t j = 0; j < 6; ++j) lda_dir[j] = r.lda_matrix(j, 0);
  const double lda_ratio = fisher(lda_dir);

  advtrain::Rng rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> w(6);
    double norm = 0.0;
    for (double& v : w) {
      v = rng.normal();
      norm += v * v;
    }
    for (double& v : w) v /= std::sqrt(norm);
    EXPECT_GE(lda_ratio + 1e-9, fisher(w));
  }
}

TEST(Pca, RankOneStructureRecovered) {
  advtrain::Rng rng(61);
  Tensor x({300, 3});
  for (std::size_t i = 0; i < 300; ++i) {
    const double t = rng.uniform(-3, 3);
    x(i, 0) = t + rng.normal(0.0, 1e-3);
    x(i, 1) = rng.normal(0.0, 1e-3);
    x(i, 2) = rng.normal(0.0, 1e-3);
  }
  advtrain::PcaResult r = pca_reduce(x);
  EXPECT_GT(std::fabs(r.pca_matrix(0, 0)), 0.999);  // first axis ~ e1
  EXPECT_GT(r.eigenvalues[0], 1.0);
  EXPECT_LT(r.eigenvalues[1], 1e-4);
}

TEST(Pca, OrthonormalityAndVarianceMatchOracle) {
  advtrain::Rng rng(71);
  Tensor x({200, 5});
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1, 1);
  advtrain::PcaResult r = pca_reduce(x);

  // Orthonormal within 1e-8.
  Tensor gram = advtrain::matmul(advtrain::transpose(r.pca_matrix), r.pca_matrix);
  EXPECT_LE(max_abs_diff(gram, Tensor::identity(2)), 1e-8);

  // Projected coordinate variances equal the top-2 covariance eigenvalues
  // from the independent dense oracle.
  Tensor centered = x;
  for (std::size_t j = 0; j < 5; ++j) {
    double mu = 0.0;
    for (std::size_t i = 0; i < 200; ++i) mu += x(i, j);
    mu /= 200.0;
    for (std::size_t i = 0; i < 200; ++i) centered(i, j) -= mu;
  }
  Tensor cov = advtrain::scale(
      advtrain::matmul(advtrain::transpose(centered), centered), 1.0 / 199.0);
  oracles::EigenPairs want = oracles::eigen_sym_oracle(cov);

  for (int k = 0; k < 2; ++k) {
    double var = 0.0;
    for (std::size_t i = 0; i < 200; ++i)
      var += r.points(i, k) * r.points(i, k);
    var /= 199.0;
    EXPECT_NEAR(var, want.values[k], 1e-8);
    EXPECT_NEAR(r.eigenvalues[k], want.values[k], 1e-8);
  }
  EXPECT_GE(r.eigenvalues[0], r.eigenvalues[1]);
}

TEST(Pca, WidthOnePaddedWithZeroVarianceAxis) {
  Tensor x({5, 1}, {1.0, 2.0, 3.0, 4.0, 5.0});
  advtrain::PcaResult r = pca_reduce(x);
  ASSERT_EQ(r.points.shape(), (advtrain::Shape{5, 2}));
  for (std::size_t i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(r.points(i, 1), 0.0);
  Tensor gram = advtrain::matmul(advtrain::transpose(r.pca_matrix), r.pca_matrix);
  EXPECT_LE(max_abs_diff(gram, Tensor::identity(2)), 1e-8);
}

TEST(Pca, ResidualOptimalAgainstRandomProjections) {
  advtrain::Rng rng(81);
  Tensor x({150, 4});
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.normal(0.0, 1.0);
  // Stretch two directions so the spectrum is non-flat.
  for (std::size_t i = 0; i < 150; ++i) {
    x(i, 0) *= 3.0;
    x(i, 1) *= 2.0;
  }
  advtrain::PcaResult r = pca_reduce(x);

  Tensor centered = x;
  for (std::size_t j = 0; j < 4; ++j) {
    double mu = 0.0;
    for (std::size_t i = 0; i < 150; ++i) mu += x(i, j);
    mu /= 150.0;
    for (std::size_t i = 0; i < 150; ++i) centered(i, j) -= mu;
  }

  auto residual = [&](const Tensor& basis) {
    // || X - X B B^T ||_F^2 for an orthonormal [4 x 2] basis.
    Tensor proj = advtrain::matmul(centered, basis);
    Tensor back = advtrain::matmul(proj, advtrain::transpose(basis));
    double s = 0.0;
    for (std::size_t i = 0; i < centered.size(); ++i) {
      const double dv = centered[i] - back[i];
      s += dv * dv;
    }
    return s;
  };

  const double pca_residual = residual(r.pca_matrix);
  for (int trial = 0; trial < 100; ++trial) {
    // Random orthonormal pair via Gram-Schmidt.
    Tensor basis({4, 2});
    double a[4], b[4];
    double na = 0.0;
    for (int j = 0; j < 4; ++j) {
      a[j] = rng.normal();
      na += a[j] * a[j];
    }
    for (int j = 0; j < 4; ++j) a[j] /= std::sqrt(na);
    double dot = 0.0, nb = 0.0;
    for (int j = 0; j < 4; ++j) b[j] = rng.normal();
    for (int j = 0; j < 4; ++j) dot += a[j] * b[j];
    for (int j = 0; j < 4; ++j) b[j] -= dot * a[j];
    for (int j = 0; j < 4; ++j) nb += b[j] * b[j];
    for (int j = 0; j < 4; ++j) b[j] /= std::sqrt(nb);
    for (int j = 0; j < 4; ++j) {
      basis(j, 0) = a[j];
      basis(j, 1) = b[j];
    }
    EXPECT_LE(pca_residual, residual(basis) + 1e-9);
  }
}

TEST(ProjectEmbedding, EndToEndShapeDeterminismAndCsv) {
  advtrain::GaussianPair g = advtrain::gaussian2(60, 60, 2.0, 0.3, 6, 91);
  advtrain::Model m = advtrain::Model::mlp_classifier(6, 2, {16, 8}, 93);
  advtrain::Projection2D p1 = advtrain::project_embedding(m, g.test);
  advtrain::Projection2D p2 = advtrain::project_embedding(m, g.test);
  ASSERT_EQ(p1.labels.size(), g.test.size());
  ASSERT_EQ(p1.points.shape(), (advtrain::Shape{g.test.size(), 2}));
  EXPECT_EQ(p1.points, p2.points);  // deterministic

  std::ostringstream csv;
  advtrain::write_projection_csv(p1, csv);
  const std::string text = csv.str();
  EXPECT_EQ(text.rfind("x,y,label,split\n", 0), 0u);
  std::size_t lines = 0;
  for (char ch : text)
    if (ch == '\n') ++lines;
  EXPECT_EQ(lines, g.test.size() + 1);
  EXPECT_NE(text.find(",test\n"), std::string::npos);
}

TEST(ProjectEmbedding, WellSeparatedClassesBeatWithinRadius) {
  // Train briefly so the embedding organizes, then require the 2D class
  // centroids to separate by > 3x the mean within-class radius.
  advtrain::GaussianPair g = advtrain::gaussian2(150, 150, 2.5, 0.15, 6, 95);
  advtrain::TrainConfig cfg;
  cfg.epochs = 10;
  cfg.batch_size = 32;
  cfg.schedule = advtrain::ScheduleSpec::constant(0.05);
  cfg.eval_attack.epsilon = 0.02;
  cfg.eval_attack.steps = 2;
  advtrain::TrainReport r = advtrain::pretrain(
      advtrain::Model::mlp_classifier(6, 2, {16, 8}, 97), g.train, g.test, cfg);

  advtrain::Projection2D p = advtrain::project_embedding(r.model, g.test);
  double cx[2] = {0, 0}, cy[2] = {0, 0};
  std::size_t count[2] = {0, 0};
  for (std::size_t i = 0; i < p.labels.size(); ++i) {
    cx[p.labels[i]] += p.points(i, 0);
    cy[p.labels[i]] += p.points(i, 1);
    ++count[p.labels[i]];
  }
  for (int k = 0; k < 2; ++k) {
    cx[k] /= count[k];
    cy[k] /= count[k];
  }
  double radius = 0.0;
  for (std::size_t i = 0; i < p.labels.size(); ++i) {
    const int k = p.labels[i];
    radius += std::hypot(p.points(i, 0) - cx[k], p.points(i, 1) - cy[k]);
  }
  radius /= static_cast<double>(p.labels.size());
  const double separation = std::hypot(cx[0] - cx[1], cy[0] - cy[1]);
  EXPECT_GT(separation, 3.0 * radius);
}

}  // namespace
