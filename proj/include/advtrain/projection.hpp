#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "advtrain/dataset.hpp"
#include "advtrain/linalg.hpp"
#include "advtrain/metrics.hpp"
#include "advtrain/model.hpp"
#include "advtrain/tensor.hpp"

namespace advtrain {

namespace detail {

// Flips each column so its largest-magnitude entry is positive; makes
// eigenvector output reproducible across runs.
inline void fix_column_signs(Tensor& m) {
  const std::size_t rows = m.dim(0), cols = m.dim(1);
  for (std::size_t j = 0; j < cols; ++j) {
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      const double mag = std::fabs(m(i, j));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (m(arg, j) < 0.0)
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = -m(i, j);
  }
}

}  // namespace detail

struct LdaResult {
  Tensor projected;                 // [n x (c-1)]
  Tensor lda_matrix;                // [h x (c-1)]
  std::vector<double> fisher_ratios;  // generalized eigenvalues, descending
};

// Supervised reduction to c-1 dimensions: top generalized eigenvectors of
// (S_between, S_within + lambda I), solved by whitening with the Cholesky
// factor of the ridged within-class scatter.
inline LdaResult lda_reduce(const Tensor& embeddings, std::span<const int> labels,
                            std::size_t num_classes) {
  if (embeddings.rank() != 2 || embeddings.dim(0) != labels.size())
    throw DimensionError("lda_reduce: embeddings " +
                         shape_str(embeddings.shape()) + " vs " +
                         std::to_string(labels.size()) + " labels");
  const std::size_t n = embeddings.dim(0), h = embeddings.dim(1);
  const std::size_t c = num_classes;
  if (c < 2) throw ContractError("lda_reduce: need at least 2 classes");
  if (n <= c) throw ContractError("lda_reduce: need n > c samples");
  if (h < c - 1)
    throw ContractError("lda_reduce: embedding dim " + std::to_string(h) +
                        " < c-1 = " + std::to_string(c - 1));

  std::vector<std::size_t> counts(c, 0);
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= c)
      throw ContractError("lda_reduce: label out of range");
    ++counts[static_cast<std::size_t>(y)];
  }
  for (std::size_t k = 0; k < c; ++k)
    if (counts[k] == 0)
      throw ContractError("lda_reduce: class " + std::to_string(k) +
                          " has no samples");

  // Class means and global mean.
  Tensor means({c, h});
  Tensor global({h});
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(labels[i]);
    for (std::size_t j = 0; j < h; ++j) {
      means(k, j) += embeddings(i, j);
      global[j] += embeddings(i, j);
    }
  }
  for (std::size_t k = 0; k < c; ++k)
    for (std::size_t j = 0; j < h; ++j)
      means(k, j) /= static_cast<double>(counts[k]);
  for (std::size_t j = 0; j < h; ++j) global[j] /= static_cast<double>(n);

  // Scatter matrices.
  Tensor sw({h, h});
  Tensor sb({h, h});
  std::vector<double> centered(h);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(labels[i]);
    for (std::size_t j = 0; j < h; ++j)
      centered[j] = embeddings(i, j) - means(k, j);
    for (std::size_t a = 0; a < h; ++a) {
      if (centered[a] == 0.0) continue;
      for (std::size_t b = 0; b < h; ++b) sw(a, b) += centered[a] * centered[b];
    }
  }
  for (std::size_t k = 0; k < c; ++k) {
    for (std::size_t j = 0; j < h; ++j) centered[j] = means(k, j) - global[j];
    const double w = static_cast<double>(counts[k]);
    for (std::size_t a = 0; a < h; ++a)
      for (std::size_t b = 0; b < h; ++b)
        sb(a, b) += w * centered[a] * centered[b];
  }

  // Ridge keeps the within-class scatter invertible for degenerate data.
  double trace = 0.0;
  for (std::size_t j = 0; j < h; ++j) trace += sw(j, j);
  double lambda = 1e-6 * trace / static_cast<double>(h);
  if (lambda == 0.0) lambda = 1e-12;
  for (std::size_t j = 0; j < h; ++j) sw(j, j) += lambda;

  // Whiten: M = L^-1 Sb L^-T, symmetric; eigenvectors map back via L^-T.
  Tensor l = cholesky(sw);
  Tensor b1 = solve_lower(l, sb);                      // L^-1 Sb
  Tensor msym = solve_lower(l, transpose(b1));         // L^-1 (L^-1 Sb)^T
  // Symmetrize against roundoff.
  Tensor mt = transpose(msym);
  for (std::size_t i = 0; i < msym.size(); ++i)
    msym[i] = 0.5 * (msym[i] + mt[i]);

  SymEigen eig = jacobi_eigen(msym);

  Tensor top({h, c - 1});
  for (std::size_t j = 0; j + 1 < c; ++j)
    for (std::size_t i = 0; i < h; ++i) top(i, j) = eig.vectors(i, j);
  Tensor directions = solve_lower_transpose(l, top);   // L^-T u
  detail::fix_column_signs(directions);

  LdaResult res;
  res.lda_matrix = std::move(directions);
  res.projected = matmul(embeddings, res.lda_matrix);
  res.fisher_ratios.assign(eig.values.begin(), eig.values.begin() + (c - 1));
  return res;
}

struct PcaResult {
  Tensor points;       // [n x 2], mean-centered projection
  Tensor pca_matrix;   // [max(d,2) x 2], orthonormal columns
  std::vector<double> eigenvalues;  // top-2 sample-covariance eigenvalues
  Tensor mean;         // feature mean used for centering
};

// Unsupervised reduction to 2 dimensions: projection onto the top-2
// eigenvectors of the sample covariance (1/(n-1) normalization). Inputs of
// width 1 are padded with a zero-variance axis rather than rejected.
inline PcaResult pca_reduce(const Tensor& features) {
  if (features.rank() != 2) throw DimensionError("pca_reduce: expected [n x d]");
  const std::size_t n = features.dim(0);
  if (n < 2) throw ContractError("pca_reduce: need n >= 2 samples");

  Tensor padded = features;
  if (features.dim(1) < 2) {
    padded = Tensor({n, 2});
    for (std::size_t i = 0; i < n; ++i) padded(i, 0) = features(i, 0);
  }
  const std::size_t d = padded.dim(1);

  Tensor mean_vec({d});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean_vec[j] += padded(i, j);
  for (std::size_t j = 0; j < d; ++j) mean_vec[j] /= static_cast<double>(n);

  Tensor centered = padded;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) centered(i, j) -= mean_vec[j];

  Tensor cov = scale(matmul(transpose(centered), centered),
                     1.0 / static_cast<double>(n - 1));
  SymEigen eig = jacobi_eigen(cov);

  Tensor proj({d, 2});
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < d; ++i) proj(i, j) = eig.vectors(i, j);
  detail::fix_column_signs(proj);

  PcaResult res;
  res.pca_matrix = std::move(proj);
  res.points = matmul(centered, res.pca_matrix);
  res.eigenvalues = {eig.values[0], eig.values[1]};
  res.mean = std::move(mean_vec);
  return res;
}

// LDA -> PCA embedding-space map: per-sample 2D coordinates plus labels.
struct Projection2D {
  Tensor lda_matrix;   // [h x (c-1)]
  Tensor pca_matrix;   // [(c-1) x 2] (or padded width), orthonormal
  Tensor points;       // [n x 2]
  std::vector<int> labels;
  Split split = Split::Test;
  std::vector<double> fisher_ratios;
  std::vector<double> pca_eigenvalues;
};

inline Projection2D project_embedding(const Model& model, const Dataset& data) {
  Tensor emb = embed(model, full_batch(data));
  LdaResult lda = lda_reduce(emb, data.y, data.num_classes);
  PcaResult pca = pca_reduce(lda.projected);
  Projection2D out;
  out.lda_matrix = std::move(lda.lda_matrix);
  out.pca_matrix = std::move(pca.pca_matrix);
  out.points = std::move(pca.points);
  out.labels = data.y;
  out.split = data.split;
  out.fisher_ratios = std::move(lda.fisher_ratios);
  out.pca_eigenvalues = std::move(pca.eigenvalues);
  return out;
}

// CSV schema: x, y, label, split. One row per sample.
inline void write_projection_csv(const Projection2D& p, std::ostream& out) {
  out << "x,y,label,split\n";
  const char* split = split_name(p.split);
  for (std::size_t i = 0; i < p.labels.size(); ++i) {
    out << detail::fmt_double(p.points(i, 0)) << ','
        << detail::fmt_double(p.points(i, 1)) << ',' << p.labels[i] << ','
        << split << '\n';
  }
}

}  // namespace advtrain
