#pragma once

#include <chrono>
#include <optional>
#include <utility>
#include <vector>

#include "advtrain/attack.hpp"
#include "advtrain/dataset.hpp"
#include "advtrain/eval.hpp"
#include "advtrain/metrics.hpp"
#include "advtrain/model.hpp"
#include "advtrain/optimizer.hpp"
#include "advtrain/schedule.hpp"

namespace advtrain {

struct TrainConfig {
  int epochs = 1;
  int batch_size = 128;
  ScheduleSpec schedule = ScheduleSpec::constant(0.1);
  OptimizerConfig optimizer = OptimizerConfig::sgd();
  std::optional<AttackConfig> attack;  // absent = natural training
  AttackConfig eval_attack;            // per-epoch robustness metrics
  std::uint64_t seed = 0;
  bool shuffle = true;
  // Fraction of each batch left clean during adversarial training. Default 0:
  // pure adversarial batches.
  double clean_fraction = 0.0;

  void validate() const {
    if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (clean_fraction < 0 || clean_fraction > 1)
      throw ConfigError("train: clean_fraction must be in [0, 1]");
    schedule.validate();
    optimizer.validate();
    if (attack) attack->validate();
    eval_attack.validate();
  }
};

struct TrainReport {
  Model model;
  std::vector<MetricsRow> metrics;
  std::optional<Optimizer::Snapshot> optimizer;
  // Wall-clock split: attack generation + gradient steps vs the per-epoch
  // metric evaluation. The training share is what fine-tuning is meant to cut.
  double train_seconds = 0.0;
  double eval_seconds = 0.0;
};

namespace detail {

// Shared epoch loop behind pretrain / adversarial_train / adversarial_finetune.
// When cfg.attack is set, every batch is replaced by its PGD counterpart
// against the current parameters before the gradient step.
inline TrainReport train_loop(Model model, const Dataset& train,
                              const Dataset& test, const TrainConfig& cfg) {
  if (train.size() == 0 || test.size() == 0)
    throw ContractError("train: empty dataset");
  TrainReport report{std::move(model), {}};
  Model& m = report.model;
  Optimizer opt(cfg.optimizer, m.params());

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto train_t0 = std::chrono::steady_clock::now();
    const double lr = lr_at(cfg.schedule, epoch);
    const auto partition =
        batch_indices(train.size(), static_cast<std::size_t>(cfg.batch_size),
                      cfg.seed, epoch, cfg.shuffle);
    double loss_sum = 0.0;
    std::uint32_t batch_index = 0;
    for (const auto& idx : partition) {
      Batch batch = gather(train, idx);
      if (cfg.attack) {
        AttackConfig acfg = *cfg.attack;
        acfg.seed = derive_seed(cfg.attack->seed,
                                static_cast<std::uint64_t>(epoch), batch_index);
        AttackResult adv = pgd(m, batch, acfg);
        const std::size_t keep_clean = static_cast<std::size_t>(
            cfg.clean_fraction * static_cast<double>(batch.size()));
        const std::size_t d = batch.x.dim(1);
        for (std::size_t r = keep_clean; r < batch.size(); ++r)
          for (std::size_t j = 0; j < d; ++j)
            batch.x[r * d + j] = adv.x_adv[r * d + j];
      }
      Model::Traced tr = m.trace(batch.x, false, true);
      Var loss_var = tr.tape.softmax_cross_entropy(tr.logits, batch.y);
      loss_sum += tr.tape.value(loss_var)[0] * static_cast<double>(batch.size());
      Gradients grads = tr.tape.backward(loss_var);
      std::vector<Tensor> g;
      g.reserve(tr.param_vars.size());
      for (Var pv : tr.param_vars) g.push_back(grads.wrt(pv));
      opt.step(m.mutable_params(), g, lr);
      ++batch_index;
    }

    const auto eval_t0 = std::chrono::steady_clock::now();
    report.train_seconds +=
        std::chrono::duration<double>(eval_t0 - train_t0).count();
    MetricsRow row;
    row.epoch = epoch;
    row.lr = lr;
    row.train_loss = loss_sum / static_cast<double>(train.size());
    EvalResult on_train = evaluate(m, train, cfg.eval_attack);
    EvalResult on_test = evaluate(m, test, cfg.eval_attack);
    row.clean_train_acc = on_train.clean_acc;
    row.clean_test_acc = on_test.clean_acc;
    row.robust_train_acc = *on_train.robust_acc;
    row.robust_test_acc = *on_test.robust_acc;
    row.adv_test_loss = *on_test.robust_loss;
    report.eval_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - eval_t0)
            .count();
    report.metrics.push_back(row);
  }
  report.optimizer = opt.snapshot();
  return report;
}

}  // namespace detail

// Step 1 of the fine-tuning recipe, and the baseline for everything else:
// ordinary ERM on natural samples. Robust metrics are still tracked per epoch
// (under cfg.eval_attack) so overfitting-gap curves can be drawn.
inline TrainReport pretrain(Model model, const Dataset& train,
                            const Dataset& test, const TrainConfig& cfg) {
  if (cfg.attack)
    throw ContractError("pretrain: cfg.attack must be absent");
  cfg.validate();
  return detail::train_loop(std::move(model), train, test, cfg);
}

// Min-max training: the inner maximization attacks each batch on the fly, the
// outer step descends on the attacked loss.
inline TrainReport adversarial_train(Model model, const Dataset& train,
                                     const Dataset& test,
                                     const TrainConfig& cfg) {
  if (!cfg.attack)
    throw ContractError("adversarial_train: cfg.attack must be present");
  cfg.validate();
  return detail::train_loop(std::move(model), train, test, cfg);
}

struct FinetuneOptions {
  int epochs = 10;
  int batch_size = 128;
  OptimizerConfig optimizer = OptimizerConfig::adam();
  std::optional<AttackConfig> eval_attack;  // default: PGD-20 at the attack eps
  std::uint64_t seed = 0;
  bool shuffle = true;
};

// Step 2: short adversarial fine-tune of an existing model, by default with
// Adam under the slow-start fast-decay schedule. The input model is accepted
// as-is; nothing is assumed about how it was produced.
inline TrainReport adversarial_finetune(Model pretrained, const Dataset& train,
                                        const Dataset& test,
                                        const AttackConfig& attack,
                                        const ScheduleSpec& schedule,
                                        const FinetuneOptions& options = {}) {
  if (options.epochs == 0) {
    return TrainReport{std::move(pretrained), {}};
  }
  const std::optional<int> horizon = schedule_horizon(schedule);
  if (horizon && *horizon < options.epochs) {
    throw ConfigError("adversarial_finetune: schedule horizon " +
                      std::to_string(*horizon) + " shorter than " +
                      std::to_string(options.epochs) + " epochs");
  }
  TrainConfig cfg;
  cfg.epochs = options.epochs;
  cfg.batch_size = options.batch_size;
  cfg.schedule = schedule;
  cfg.optimizer = options.optimizer;
  cfg.attack = attack;
  if (options.eval_attack) {
    cfg.eval_attack = *options.eval_attack;
  } else {
    cfg.eval_attack = attack;
    cfg.eval_attack.steps = 20;
    cfg.eval_attack.alpha = 0.0;
    cfg.eval_attack.init = AttackInit::Zero;
  }
  cfg.seed = options.seed;
  cfg.shuffle = options.shuffle;
  return adversarial_train(std::move(pretrained), train, test, cfg);
}

}  // namespace advtrain
