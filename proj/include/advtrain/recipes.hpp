#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "advtrain/config.hpp"

namespace advtrain {

// Canned desk-scale experiment configs. The two-Gaussian task is sized into
// the sample-complexity-limited regime: 250 training samples in 150
// dimensions cannot pin down the robust decision rule, so PGD training fits
// perturbation-sensitive directions of the training split and the robust
// train/test curves diverge the way the full-scale CIFAR runs do.

namespace recipes {

inline DatasetSpec desk_dataset() {
  DatasetSpec d;
  d.kind = DatasetSpec::Kind::Gaussian2;
  d.train_per_class = 125;  // 250 train + 9750 test = 10k samples
  d.test_per_class = 4875;
  d.mu = 1.25;
  d.sigma = 1.0;
  d.dim = 150;
  return d;
}

// eps 0.01 in [0,1] units = 0.105 in original units (envelope half-width
// 5.25), about a tenth of the within-class sigma per coordinate.
inline AttackConfig desk_train_attack() {
  AttackConfig a;
  a.epsilon = 0.01;
  a.steps = 7;
  a.init = AttackInit::RandomUniform;
  return a;
}

inline AttackConfig desk_eval_attack() {
  AttackConfig a;
  a.epsilon = 0.01;
  a.steps = 20;
  a.init = AttackInit::Zero;
  return a;
}

inline PhaseConfig natural_pretrain_phase(int epochs = 40) {
  PhaseConfig p;
  p.kind = PhaseKind::Pretrain;
  p.from.kind = PhaseSource::Kind::Fresh;
  p.epochs = epochs;
  p.batch_size = 128;
  p.optimizer = OptimizerConfig::adam();
  p.schedule = ScheduleSpec::step(1e-3, 10, 0.5);
  p.eval_attack = desk_eval_attack();
  return p;
}

inline PhaseConfig scratch_adv_train_phase(int epochs = 60) {
  PhaseConfig p;
  p.kind = PhaseKind::AdvTrain;
  p.from.kind = PhaseSource::Kind::Fresh;
  p.epochs = epochs;
  p.batch_size = 128;
  p.optimizer = OptimizerConfig::adam();
  // Desk analog of the paper's drops at 0.3/0.6/0.8 of the horizon.
  p.schedule = ScheduleSpec::multistep(1e-3, {epochs * 3 / 10, epochs * 6 / 10,
                                              epochs * 8 / 10}, 0.2);
  p.attack = desk_train_attack();
  p.eval_attack = desk_eval_attack();
  return p;
}

inline PhaseConfig ssfd_finetune_phase(int epochs = 10) {
  PhaseConfig p;
  p.kind = PhaseKind::AdvFinetune;
  p.from.kind = PhaseSource::Kind::Previous;
  p.epochs = epochs;
  p.batch_size = 128;
  p.optimizer = OptimizerConfig::adam();
  p.schedule = ScheduleSpec::ssfd(2e-3, 3, 0.04, 0.3, epochs);
  p.attack = desk_train_attack();
  p.eval_attack = desk_eval_attack();
  return p;
}

inline PhaseConfig evaluate_phase(PhaseSource from) {
  PhaseConfig p;
  p.kind = PhaseKind::Evaluate;
  p.from = from;
  p.attack = desk_eval_attack();
  return p;
}

// Fig.1 analog: scratch PGD AT long enough to overfit, gap curve in metrics.
inline ExperimentConfig overfit_curve() {
  ExperimentConfig cfg;
  cfg.seed = 1;
  cfg.output_dir = "runs/overfit-curve";
  cfg.dataset = desk_dataset();
  cfg.model.arch = ModelSpecCfg::Arch::Mlp;
  cfg.phases.push_back(scratch_adv_train_phase(60));
  return cfg;
}

// Fig.6 analog: one fixed pretrained model, adversarial fine-tune under
// step-LR(i, 0.5) for increasing plateau lengths.
inline ExperimentConfig plateau_sweep() {
  ExperimentConfig cfg;
  cfg.seed = 1;
  cfg.output_dir = "runs/plateau-sweep";
  cfg.dataset = desk_dataset();
  cfg.model.arch = ModelSpecCfg::Arch::Mlp;
  cfg.phases.push_back(natural_pretrain_phase());
  for (int plateau : {1, 2, 4, 8, 16, 32}) {
    PhaseConfig p;
    p.kind = PhaseKind::AdvFinetune;
    p.from.kind = PhaseSource::Kind::Phase;
    p.from.phase_index = 0;
    p.epochs = 32;
    p.batch_size = 128;
    p.optimizer = OptimizerConfig::adam();
    p.schedule = ScheduleSpec::step(1e-3, plateau, 0.5);
    p.attack = desk_train_attack();
    p.eval_attack = desk_eval_attack();
    cfg.phases.push_back(p);
  }
  return cfg;
}

// Table 1 analog: natural pretrain + 10-epoch SSFD fine-tune vs scratch AT.
inline ExperimentConfig aft_vs_scratch() {
  ExperimentConfig cfg;
  cfg.seed = 1;
  cfg.output_dir = "runs/aft-vs-scratch";
  cfg.dataset = desk_dataset();
  cfg.model.arch = ModelSpecCfg::Arch::Mlp;
  cfg.phases.push_back(natural_pretrain_phase());      // 0
  cfg.phases.push_back(ssfd_finetune_phase());         // 1 (from previous)
  cfg.phases.push_back(evaluate_phase(
      PhaseSource{PhaseSource::Kind::Phase, 1, {}}));  // 2
  cfg.phases.push_back(scratch_adv_train_phase(60));   // 3 (fresh)
  cfg.phases.push_back(evaluate_phase(
      PhaseSource{PhaseSource::Kind::Phase, 3, {}}));  // 4
  return cfg;
}

// Fig.3 analog: LDA -> PCA map of the penultimate embedding, test split.
inline ExperimentConfig embedding_map() {
  ExperimentConfig cfg;
  cfg.seed = 1;
  cfg.output_dir = "runs/embedding-map";
  cfg.dataset = desk_dataset();
  cfg.model.arch = ModelSpecCfg::Arch::Mlp;
  cfg.phases.push_back(natural_pretrain_phase(20));
  PhaseConfig proj;
  proj.kind = PhaseKind::ProjectEmbedding;
  proj.from.kind = PhaseSource::Kind::Previous;
  proj.split = Split::Test;
  cfg.phases.push_back(proj);
  return cfg;
}

// Minutes-not-hours demo of the two-step pipeline.
inline ExperimentConfig aft_demo() {
  ExperimentConfig cfg;
  cfg.seed = 1;
  cfg.output_dir = "runs/aft-demo";
  DatasetSpec d = desk_dataset();
  d.train_per_class = 200;
  d.test_per_class = 200;
  cfg.dataset = d;
  cfg.model.arch = ModelSpecCfg::Arch::Mlp;
  cfg.phases.push_back(natural_pretrain_phase(5));
  PhaseConfig ft = ssfd_finetune_phase(5);
  ft.schedule = ScheduleSpec::ssfd(2e-3, 2, 0.04, 0.3, 5);
  cfg.phases.push_back(ft);
  cfg.phases.push_back(
      evaluate_phase(PhaseSource{PhaseSource::Kind::Previous, 0, {}}));
  return cfg;
}

}  // namespace recipes

inline const std::map<std::string, std::function<ExperimentConfig()>>&
recipe_registry() {
  static const std::map<std::string, std::function<ExperimentConfig()>> reg = {
      {"overfit-curve", recipes::overfit_curve},
      {"plateau-sweep", recipes::plateau_sweep},
      {"aft-vs-scratch", recipes::aft_vs_scratch},
      {"embedding-map", recipes::embedding_map},
      {"aft-demo", recipes::aft_demo},
  };
  return reg;
}

}  // namespace advtrain
