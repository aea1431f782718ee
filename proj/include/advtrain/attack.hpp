#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "advtrain/model.hpp"
#include "advtrain/rng.hpp"
#include "advtrain/tensor.hpp"

namespace advtrain {

enum class AttackInit : std::uint8_t { Zero, RandomUniform };

// l-infinity adversary description: the ball S of Eq-style min-max training.
struct AttackConfig {
  double epsilon = 8.0 / 255.0;
  double alpha = 0.0;  // 0 selects the default step size 2.5 * epsilon / steps
  int steps = 20;
  AttackInit init = AttackInit::Zero;
  double clamp_lo = 0.0;
  double clamp_hi = 1.0;
  std::uint64_t seed = 0;

  double step_size() const {
    if (alpha > 0.0) return alpha;
    return steps > 0 ? 2.5 * epsilon / static_cast<double>(steps) : epsilon;
  }

  void validate() const {
    if (epsilon < 0) throw ConfigError("attack: epsilon must be >= 0");
    if (alpha < 0) throw ConfigError("attack: alpha must be >= 0");
    if (steps < 1) throw ConfigError("attack: steps must be >= 1");
    if (!(clamp_lo < clamp_hi))
      throw ConfigError("attack: clamp range is empty");
  }
};

struct AttackResult {
  Tensor x_adv;                // same shape as the input batch
  Tensor delta;                // x_adv - x
  std::vector<double> losses;  // per-sample loss at x_adv
};

// Elementwise clip of `candidate` into the epsilon ball around `origin`,
// intersected with the clamp range.
inline Tensor project_linf(const Tensor& candidate, const Tensor& origin,
                           const AttackConfig& cfg) {
  detail::require_same_shape(candidate, origin, "project_linf");
  Tensor out = candidate;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double lo = std::max(origin[i] - cfg.epsilon, cfg.clamp_lo);
    const double hi = std::min(origin[i] + cfg.epsilon, cfg.clamp_hi);
    out[i] = std::max(lo, std::min(hi, out[i]));
  }
  return out;
}

namespace detail {

// One gradient-of-loss-wrt-input evaluation at x.
inline Tensor input_gradient(const Model& model, const Tensor& x,
                             std::span<const int> y) {
  Model::Traced tr = model.trace(x, /*input_grad=*/true, /*param_grad=*/false);
  Var loss = tr.tape.softmax_cross_entropy(tr.logits, y);
  Gradients g = tr.tape.backward(loss);
  return g.wrt(tr.input);
}

inline AttackResult finish_attack(const Model& model, const Batch& batch,
                                  Tensor x_adv) {
  AttackResult res;
  res.delta = sub(x_adv, batch.x);
  res.losses = per_sample_cross_entropy(model.forward(x_adv), batch.y);
  res.x_adv = std::move(x_adv);
  return res;
}

}  // namespace detail

// Fast gradient sign method: the single-iteration special case of PGD with a
// full-epsilon step.
inline AttackResult fgsm(const Model& model, const Batch& batch,
                         const AttackConfig& cfg) {
  cfg.validate();
  Tensor g = detail::input_gradient(model, batch.x, batch.y);
  Tensor x_adv = batch.x;
  for (std::size_t i = 0; i < x_adv.size(); ++i)
    x_adv[i] += cfg.epsilon * sign_of(g[i]);
  return detail::finish_attack(model, batch, project_linf(x_adv, batch.x, cfg));
}

// Projected gradient descent: k signed ascent steps of size alpha, each
// projected back into the epsilon ball (gradients recomputed at the current
// iterate). Init is either the clean point or uniform noise in the ball.
inline AttackResult pgd(const Model& model, const Batch& batch,
                        const AttackConfig& cfg) {
  cfg.validate();
  const double alpha = cfg.step_size();
  Tensor x = batch.x;
  if (cfg.init == AttackInit::RandomUniform) {
    const std::size_t d = x.dim(1);
    for (std::size_t r = 0; r < x.dim(0); ++r) {
      // Per-row streams keyed by (seed, row) so row order never matters.
      Rng rng(derive_seed(cfg.seed, r));
      for (std::size_t j = 0; j < d; ++j)
        x[r * d + j] += rng.uniform(-cfg.epsilon, cfg.epsilon);
    }
    x = project_linf(x, batch.x, cfg);
  }
  for (int t = 0; t < cfg.steps; ++t) {
    Tensor g = detail::input_gradient(model, x, batch.y);
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] += alpha * sign_of(g[i]);
    x = project_linf(x, batch.x, cfg);
  }
  return detail::finish_attack(model, batch, std::move(x));
}

}  // namespace advtrain
