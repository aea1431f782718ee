#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advtrain/autodiff.hpp"
#include "advtrain/rng.hpp"
#include "advtrain/tensor.hpp"

namespace advtrain {

enum class LayerKind : std::uint8_t { Dense, Conv3x3, Relu, Flatten };

struct LayerDesc {
  LayerKind kind;
  std::size_t in = 0;   // dense: input width; conv: input channels
  std::size_t out = 0;  // dense: output width; conv: output channels
};

// Structural description of a model; enough to rebuild it from a checkpoint.
struct ModelDesc {
  std::vector<LayerDesc> layers;
  std::size_t input_dim = 0;
  std::size_t num_classes = 0;
  ImageGeom geom;  // meaningful only when a conv layer is present
};

struct Batch {
  Tensor x;               // [b x d], entries in the clamp range
  std::vector<int> y;     // labels in [0, c)
  std::size_t size() const { return y.size(); }
};

// Ordered layer stack over flat [b x d] activations. Parameters are stored in
// a stable order (per parametric layer: weights, then bias) so checkpoints
// stay compatible.
class Model {
 public:
  static Model mlp_classifier(std::size_t input_dim, std::size_t num_classes,
                              std::vector<std::size_t> hidden, std::uint64_t seed) {
    ModelDesc d;
    d.input_dim = input_dim;
    d.num_classes = num_classes;
    std::size_t prev = input_dim;
    for (std::size_t h : hidden) {
      d.layers.push_back({LayerKind::Dense, prev, h});
      d.layers.push_back({LayerKind::Relu});
      prev = h;
    }
    d.layers.push_back({LayerKind::Dense, prev, num_classes});
    return Model(std::move(d), seed);
  }

  // Reference MLP: d -> 128 -> 64 -> c.
  static Model mlp_classifier(std::size_t input_dim, std::size_t num_classes,
                              std::uint64_t seed) {
    return mlp_classifier(input_dim, num_classes, {128, 64}, seed);
  }

  static Model conv_classifier(const ImageGeom& geom, std::size_t num_classes,
                               std::vector<std::size_t> channels,
                               std::uint64_t seed) {
    ModelDesc d;
    d.input_dim = geom.pixels();
    d.num_classes = num_classes;
    d.geom = geom;
    std::size_t prev = geom.channels;
    for (std::size_t ch : channels) {
      d.layers.push_back({LayerKind::Conv3x3, prev, ch});
      d.layers.push_back({LayerKind::Relu});
      prev = ch;
    }
    d.layers.push_back({LayerKind::Flatten});
    d.layers.push_back(
        {LayerKind::Dense, prev * geom.height * geom.width, num_classes});
    return Model(std::move(d), seed);
  }

  // Reference conv net: two 3x3 convs + relu + flatten + dense.
  static Model conv_classifier(const ImageGeom& geom, std::size_t num_classes,
                               std::uint64_t seed) {
    return conv_classifier(geom, num_classes, {8, 16}, seed);
  }

  // Rebuild from an explicit description and parameter payload (checkpoints).
  static Model from_description(ModelDesc desc, std::vector<Tensor> params) {
    Model m(std::move(desc), /*seed=*/0);
    if (params.size() != m.params_.size()) {
      throw DimensionError("parameter payload has " +
                           std::to_string(params.size()) + " tensors, model needs " +
                           std::to_string(m.params_.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (params[i].shape() != m.params_[i].shape()) {
        throw DimensionError("parameter " + std::to_string(i) + " shape " +
                             shape_str(params[i].shape()) + " != expected " +
                             shape_str(m.params_[i].shape()));
      }
    }
    m.params_ = std::move(params);
    return m;
  }

  const ModelDesc& describe() const { return desc_; }
  std::size_t input_dim() const { return desc_.input_dim; }
  std::size_t num_classes() const { return desc_.num_classes; }
  const std::vector<Tensor>& params() const { return params_; }
  std::vector<Tensor>& mutable_params() { return params_; }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const Tensor& p : params_) n += p.size();
    return n;
  }

  struct Traced {
    Tape tape;
    Var input;
    Var logits;
    std::vector<Var> param_vars;  // parallel to params(); invalid for non-grad
  };

  // Builds the forward graph for a batch of inputs. Gradient flags select
  // which leaves the later backward pass will differentiate.
  Traced trace(const Tensor& x, bool input_grad, bool param_grad) const {
    if (x.rank() != 2 || x.dim(1) != desc_.input_dim) {
      throw DimensionError("forward: input " + shape_str(x.shape()) +
                           " does not match model input dim " +
                           std::to_string(desc_.input_dim));
    }
    Traced tr;
    tr.input = tr.tape.leaf(x, input_grad);
    tr.param_vars.reserve(params_.size());
    for (const Tensor& p : params_) {
      tr.param_vars.push_back(tr.tape.leaf(p, param_grad));
    }
    Var cur = tr.input;
    std::size_t pi = 0;
    ImageGeom geom = desc_.geom;
    for (const LayerDesc& layer : desc_.layers) {
      switch (layer.kind) {
        case LayerKind::Dense: {
          Var w = tr.param_vars[pi++];
          Var b = tr.param_vars[pi++];
          cur = tr.tape.add_row_broadcast(tr.tape.matmul(cur, w), b);
          break;
        }
        case LayerKind::Conv3x3: {
          Var w = tr.param_vars[pi++];
          Var b = tr.param_vars[pi++];
          cur = tr.tape.conv2d_3x3(cur, w, b, geom);
          geom.channels = layer.out;
          break;
        }
        case LayerKind::Relu:
          cur = tr.tape.relu(cur);
          break;
        case LayerKind::Flatten:
          // Activations are already flat [b x d]; marks the conv->dense seam.
          break;
      }
    }
    tr.logits = cur;
    return tr;
  }

  Tensor forward(const Tensor& x) const {
    Traced tr = trace(x, false, false);
    return tr.tape.value(tr.logits);
  }

 private:
  Model(ModelDesc desc, std::uint64_t seed) : desc_(std::move(desc)) {
    validate_architecture();
    init_params(seed);
  }

  void validate_architecture() const {
    std::size_t width = desc_.input_dim;
    ImageGeom geom = desc_.geom;
    bool spatial = false;
    for (const LayerDesc& layer : desc_.layers) {
      switch (layer.kind) {
        case LayerKind::Dense:
          if (layer.in != width) {
            throw ArchitectureError("dense layer expects width " +
                                    std::to_string(layer.in) + ", got " +
                                    std::to_string(width));
          }
          width = layer.out;
          spatial = false;
          break;
        case LayerKind::Conv3x3:
          if (geom.pixels() == 0 || layer.in != geom.channels ||
              width != geom.pixels()) {
            throw ArchitectureError("conv layer geometry mismatch");
          }
          geom.channels = layer.out;
          width = geom.pixels();
          spatial = true;
          break;
        case LayerKind::Relu:
        case LayerKind::Flatten:
          break;
      }
    }
    (void)spatial;
    if (width != desc_.num_classes) {
      throw ArchitectureError("output width " + std::to_string(width) +
                              " != num_classes " +
                              std::to_string(desc_.num_classes));
    }
  }

  // He-uniform weights, zero biases.
  void init_params(std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x6d6f64656cULL));  // distinct stream per model
    for (const LayerDesc& layer : desc_.layers) {
      if (layer.kind == LayerKind::Dense) {
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.in));
        Tensor w({layer.in, layer.out});
        for (std::size_t i = 0; i < w.size(); ++i)
          w[i] = rng.uniform(-limit, limit);
        params_.push_back(std::move(w));
        params_.push_back(Tensor({layer.out}));
      } else if (layer.kind == LayerKind::Conv3x3) {
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.in * 9));
        Tensor w({layer.out, layer.in, 3, 3});
        for (std::size_t i = 0; i < w.size(); ++i)
          w[i] = rng.uniform(-limit, limit);
        params_.push_back(std::move(w));
        params_.push_back(Tensor({layer.out}));
      }
    }
  }

  ModelDesc desc_;
  std::vector<Tensor> params_;
};

// -- Plain (untraced) loss helpers --------------------------------------------

namespace detail {
// Shared softmax-CE forward so traced and untraced losses agree bit-for-bit.
inline double softmax_ce_row(const Tensor& logits, std::size_t i, int y) {
  const std::size_t c = logits.dim(1);
  if (y < 0 || static_cast<std::size_t>(y) >= c) {
    throw ContractError("label " + std::to_string(y) + " out of range [0, " +
                        std::to_string(c) + ")");
  }
  double m = logits(i, 0);
  for (std::size_t j = 1; j < c; ++j) m = std::max(m, logits(i, j));
  double s = 0.0;
  for (std::size_t j = 0; j < c; ++j) s += std::exp(logits(i, j) - m);
  return m + std::log(s) - logits(i, static_cast<std::size_t>(y));
}
}  // namespace detail

// Mean softmax cross-entropy of a logits batch.
inline double cross_entropy(const Tensor& logits, std::span<const int> y) {
  if (logits.rank() != 2 || logits.dim(0) != y.size()) {
    throw DimensionError("cross_entropy: logits " + shape_str(logits.shape()) +
                         " vs " + std::to_string(y.size()) + " labels");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    total += detail::softmax_ce_row(logits, i, y[i]);
  return total / static_cast<double>(y.size());
}

inline std::vector<double> per_sample_cross_entropy(const Tensor& logits,
                                                    std::span<const int> y) {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    out[i] = detail::softmax_ce_row(logits, i, y[i]);
  return out;
}

inline int argmax_row(const Tensor& logits, std::size_t i) {
  int best = 0;
  double bv = logits(i, 0);
  for (std::size_t j = 1; j < logits.dim(1); ++j) {
    if (logits(i, j) > bv) {
      bv = logits(i, j);
      best = static_cast<int>(j);
    }
  }
  return best;
}

// -- Spec-level operations -----------------------------------------------------

inline Tensor forward(const Model& model, const Batch& batch) {
  return model.forward(batch.x);
}

inline double loss(const Model& model, const Batch& batch) {
  return cross_entropy(model.forward(batch.x), batch.y);
}

// Activations of the layer feeding the final classifier head.
inline Tensor embed(const Model& model, const Batch& batch) {
  const auto& layers = model.describe().layers;
  if (layers.size() < 2) {
    throw ArchitectureError(
        "embed requires at least two layers; this model has " +
        std::to_string(layers.size()));
  }
  // Drop the final dense head, keep everything before it.
  ModelDesc trunk = model.describe();
  if (trunk.layers.back().kind != LayerKind::Dense) {
    throw ArchitectureError("embed expects a dense classifier head");
  }
  trunk.layers.pop_back();
  std::size_t width = trunk.input_dim;
  ImageGeom geom = trunk.geom;
  for (const LayerDesc& l : trunk.layers) {
    if (l.kind == LayerKind::Dense) width = l.out;
    if (l.kind == LayerKind::Conv3x3) {
      geom.channels = l.out;
      width = geom.pixels();
    }
  }
  trunk.num_classes = width;
  std::vector<Tensor> trunk_params(model.params().begin(),
                                   model.params().end() - 2);
  Model sub = Model::from_description(std::move(trunk), std::move(trunk_params));
  return sub.forward(batch.x);
}

}  // namespace advtrain
