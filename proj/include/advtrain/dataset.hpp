#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "advtrain/model.hpp"
#include "advtrain/rng.hpp"
#include "advtrain/tensor.hpp"

namespace advtrain {

enum class Split : std::uint8_t { Train, Test };

inline const char* split_name(Split s) {
  return s == Split::Train ? "train" : "test";
}

// Labeled samples with features in [0, 1]. The affine map used to bring raw
// values into [0, 1] is kept so perturbation budgets stay interpretable in
// the original units.
struct Dataset {
  Tensor x;             // [n x d]
  std::vector<int> y;   // labels in [0, c)
  std::size_t num_classes = 0;
  Split split = Split::Train;
  double map_lo = 0.0;  // original-unit value mapped to 0
  double map_hi = 1.0;  // original-unit value mapped to 1

  std::size_t size() const { return y.size(); }
  std::size_t dim() const { return x.rank() == 2 ? x.dim(1) : 0; }

  void validate() const {
    if (y.empty() || x.rank() != 2 || x.dim(0) != y.size())
      throw ContractError("dataset: inconsistent or empty data");
    for (int label : y)
      if (label < 0 || static_cast<std::size_t>(label) >= num_classes)
        throw ContractError("dataset: label out of range");
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] < 0.0 || x[i] > 1.0)
        throw ContractError("dataset: feature outside [0, 1]");
  }
};

struct GaussianPair {
  Dataset train;
  Dataset test;
};

// Two spherical Gaussian classes at -mu*e1 and +mu*e1 with stddev sigma,
// mapped into [0, 1] by a fixed +-4 sigma envelope shared by both splits.
// The rare sample beyond the envelope is clipped.
inline GaussianPair gaussian2(std::size_t n_train_per_class,
                              std::size_t n_test_per_class, double mu,
                              double sigma, std::size_t dim,
                              std::uint64_t seed) {
  if (mu <= 0 || sigma <= 0)
    throw ContractError("gaussian2: mu and sigma must be > 0");
  if (dim < 1) throw ContractError("gaussian2: dim must be >= 1");

  const double lo = -(mu + 4.0 * sigma);
  const double hi = mu + 4.0 * sigma;
  const double inv_span = 1.0 / (hi - lo);

  auto make_split = [&](std::size_t n_per_class, Split split,
                        std::uint64_t split_seed) {
    Dataset ds;
    ds.num_classes = 2;
    ds.split = split;
    ds.map_lo = lo;
    ds.map_hi = hi;
    const std::size_t n = 2 * n_per_class;
    ds.x = Tensor({n, dim});
    ds.y.resize(n);
    Rng rng(split_seed);
    for (std::size_t i = 0; i < n; ++i) {
      const int label = static_cast<int>(i % 2);
      const double center = label == 0 ? -mu : mu;
      ds.y[i] = label;
      for (std::size_t j = 0; j < dim; ++j) {
        const double raw = rng.normal(j == 0 ? center : 0.0, sigma);
        const double unit = (raw - lo) * inv_span;
        ds.x[i * dim + j] = std::max(0.0, std::min(1.0, unit));
      }
    }
    return ds;
  };

  GaussianPair pair;
  pair.train = make_split(n_train_per_class, Split::Train,
                          derive_seed(seed, 0x747261696eULL));
  pair.test = make_split(n_test_per_class, Split::Test,
                         derive_seed(seed, 0x74657374ULL));
  return pair;
}

// Reassigns a random fraction of labels to a uniformly drawn other class.
// Used to make desk-scale training splits hard enough that fitting them
// robustly forces memorization. Deterministic in (seed); test splits are
// normally left untouched.
inline void flip_labels(Dataset& ds, double fraction, std::uint64_t seed) {
  if (fraction < 0.0 || fraction > 1.0)
    throw ContractError("flip_labels: fraction must be in [0, 1]");
  if (fraction == 0.0 || ds.num_classes < 2) return;
  std::vector<std::size_t> idx = shuffled_indices(
      ds.size(), derive_seed(seed, 0x666c6970ULL));
  const std::size_t n_flip =
      static_cast<std::size_t>(fraction * static_cast<double>(ds.size()));
  Rng rng(derive_seed(seed, 0x6c626c73ULL));
  for (std::size_t i = 0; i < n_flip; ++i) {
    int& label = ds.y[idx[i]];
    const int offset =
        1 + static_cast<int>(rng.below(ds.num_classes - 1));
    label = (label + offset) % static_cast<int>(ds.num_classes);
  }
}

// Maps a [0,1]-unit value back to the dataset's original units.
inline double to_original_units(const Dataset& ds, double unit_value) {
  return ds.map_lo + unit_value * (ds.map_hi - ds.map_lo);
}

// Converts an epsilon expressed in [0,1] units into original units.
inline double eps_in_original_units(const Dataset& ds, double eps_unit) {
  return eps_unit * (ds.map_hi - ds.map_lo);
}

// Index partition for one epoch: covers every sample exactly once, last batch
// may be short. Order is a pure function of (seed, epoch).
inline std::vector<std::vector<std::size_t>> batch_indices(
    std::size_t n, std::size_t batch_size, std::uint64_t seed, int epoch,
    bool shuffle) {
  if (batch_size < 1) throw ContractError("batches: batch_size must be >= 1");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  if (shuffle) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);
  }
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    out.emplace_back(order.begin() + start, order.begin() + end);
  }
  return out;
}

inline Batch gather(const Dataset& ds, std::span<const std::size_t> idx) {
  const std::size_t d = ds.dim();
  Batch b;
  b.x = Tensor({idx.size(), d});
  b.y.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const std::size_t src = idx[i];
    for (std::size_t j = 0; j < d; ++j) b.x[i * d + j] = ds.x[src * d + j];
    b.y[i] = ds.y[src];
  }
  return b;
}

inline Batch full_batch(const Dataset& ds) {
  Batch b;
  b.x = ds.x;
  b.y = ds.y;
  return b;
}

}  // namespace advtrain
