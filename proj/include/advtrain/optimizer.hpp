#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "advtrain/tensor.hpp"

namespace advtrain {

struct OptimizerConfig {
  enum class Kind : std::uint8_t { Sgd, Adam };

  Kind kind = Kind::Sgd;
  // sgd
  double momentum = 0.9;
  double weight_decay = 5e-4;
  // adam
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  static OptimizerConfig sgd(double momentum = 0.9, double weight_decay = 5e-4) {
    OptimizerConfig c;
    c.kind = Kind::Sgd;
    c.momentum = momentum;
    c.weight_decay = weight_decay;
    return c;
  }

  static OptimizerConfig adam(double beta1 = 0.9, double beta2 = 0.999,
                              double eps = 1e-8) {
    OptimizerConfig c;
    c.kind = Kind::Adam;
    c.beta1 = beta1;
    c.beta2 = beta2;
    c.adam_eps = eps;
    return c;
  }

  void validate() const {
    if (kind == Kind::Sgd) {
      if (momentum < 0 || momentum >= 1)
        throw ConfigError("optimizer: momentum must be in [0, 1)");
      if (weight_decay < 0)
        throw ConfigError("optimizer: weight_decay must be >= 0");
    } else {
      if (beta1 <= 0 || beta1 >= 1 || beta2 <= 0 || beta2 >= 1)
        throw ConfigError("optimizer: betas must be in (0, 1)");
      if (adam_eps <= 0) throw ConfigError("optimizer: eps must be > 0");
    }
  }
};

// Stateful parameter updater. SGD keeps one velocity buffer per parameter,
// Adam keeps first/second moments plus the step counter for bias correction.
class Optimizer {
 public:
  Optimizer(OptimizerConfig cfg, const std::vector<Tensor>& params)
      : cfg_(cfg) {
    cfg_.validate();
    if (cfg_.kind == OptimizerConfig::Kind::Sgd) {
      for (const Tensor& p : params) velocity_.emplace_back(p.shape());
    } else {
      for (const Tensor& p : params) {
        m_.emplace_back(p.shape());
        v_.emplace_back(p.shape());
      }
    }
  }

  const OptimizerConfig& config() const { return cfg_; }
  std::int64_t step_count() const { return step_; }

  void step(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
            double lr) {
    if (params.size() != grads.size() ||
        params.size() != buffer_count()) {
      throw DimensionError("optimizer: got " + std::to_string(grads.size()) +
                           " gradients for " + std::to_string(params.size()) +
                           " parameters");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!params[i].same_shape(grads[i])) {
        throw DimensionError("optimizer: gradient " + shape_str(grads[i].shape()) +
                             " vs parameter " + shape_str(params[i].shape()));
      }
    }
    ++step_;
    if (cfg_.kind == OptimizerConfig::Kind::Sgd) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = params[i];
        Tensor& vel = velocity_[i];
        const Tensor& g = grads[i];
        for (std::size_t j = 0; j < p.size(); ++j) {
          vel[j] = cfg_.momentum * vel[j] + g[j] + cfg_.weight_decay * p[j];
          p[j] -= lr * vel[j];
        }
      }
    } else {
      const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
      const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
      for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = params[i];
        Tensor& m = m_[i];
        Tensor& v = v_[i];
        const Tensor& g = grads[i];
        for (std::size_t j = 0; j < p.size(); ++j) {
          m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g[j];
          v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
          const double mhat = m[j] / bc1;
          const double vhat = v[j] / bc2;
          p[j] -= lr * mhat / (std::sqrt(vhat) + cfg_.adam_eps);
        }
      }
    }
  }

  // Checkpoint access.
  struct Snapshot {
    OptimizerConfig cfg;
    std::int64_t step = 0;
    std::vector<Tensor> buffers;  // sgd: velocity; adam: m then v
  };

  Snapshot snapshot() const {
    Snapshot s;
    s.cfg = cfg_;
    s.step = step_;
    if (cfg_.kind == OptimizerConfig::Kind::Sgd) {
      s.buffers = velocity_;
    } else {
      s.buffers = m_;
      s.buffers.insert(s.buffers.end(), v_.begin(), v_.end());
    }
    return s;
  }

  static Optimizer restore(const Snapshot& s, const std::vector<Tensor>& params) {
    Optimizer o(s.cfg, params);
    o.step_ = s.step;
    if (s.cfg.kind == OptimizerConfig::Kind::Sgd) {
      if (s.buffers.size() != o.velocity_.size())
        throw FormatError("optimizer snapshot buffer count mismatch");
      o.velocity_ = s.buffers;
    } else {
      if (s.buffers.size() != o.m_.size() + o.v_.size())
        throw FormatError("optimizer snapshot buffer count mismatch");
      const std::size_t half = s.buffers.size() / 2;
      o.m_.assign(s.buffers.begin(), s.buffers.begin() + half);
      o.v_.assign(s.buffers.begin() + half, s.buffers.end());
    }
    return o;
  }

 private:
  std::size_t buffer_count() const {
    return cfg_.kind == OptimizerConfig::Kind::Sgd ? velocity_.size()
                                                   : m_.size();
  }

  OptimizerConfig cfg_;
  std::vector<Tensor> velocity_;
  std::vector<Tensor> m_, v_;
  std::int64_t step_ = 0;
};

}  // namespace advtrain
