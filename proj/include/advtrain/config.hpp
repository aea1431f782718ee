#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "advtrain/attack.hpp"
#include "advtrain/dataset.hpp"
#include "advtrain/idx.hpp"
#include "advtrain/model.hpp"
#include "advtrain/optimizer.hpp"
#include "advtrain/schedule.hpp"
#include "advtrain/train.hpp"

namespace advtrain {

using Json = nlohmann::ordered_json;

namespace cfg_detail {

inline const Json& require(const Json& obj, const std::string& key,
                           const std::string& where) {
  if (!obj.contains(key))
    throw ConfigError(where + ": missing field '" + key + "'");
  return obj.at(key);
}

template <typename T>
T get_or(const Json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return obj.at(key).get<T>();
}

inline void reject_unknown(const Json& obj, const std::string& where,
                           std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok)
      throw ConfigError(where + ": unknown field '" + it.key() + "'");
  }
}

}  // namespace cfg_detail

// ---- dataset -----------------------------------------------------------------

struct DatasetSpec {
  enum class Kind { Gaussian2, Idx } kind = Kind::Gaussian2;
  // gaussian2
  std::size_t train_per_class = 1000;
  std::size_t test_per_class = 1000;
  double mu = 1.0;
  double sigma = 1.0;
  std::size_t dim = 20;
  // Fraction of training labels reassigned to another class; the desk-scale
  // stand-in for a task whose sample complexity the training split cannot
  // meet. Test labels are never flipped.
  double train_label_flip = 0.0;
  std::optional<std::uint64_t> seed;  // default: experiment seed
  // idx
  std::string train_images, train_labels, test_images, test_labels;
};

inline DatasetSpec dataset_from_json(const Json& j) {
  using cfg_detail::get_or;
  using cfg_detail::require;
  DatasetSpec d;
  const std::string kind = require(j, "kind", "dataset").get<std::string>();
  if (kind == "gaussian2") {
    d.kind = DatasetSpec::Kind::Gaussian2;
    cfg_detail::reject_unknown(j, "dataset",
                               {"kind", "train_per_class", "test_per_class",
                                "mu", "sigma", "dim", "train_label_flip",
                                "seed"});
    d.train_per_class = get_or<std::size_t>(j, "train_per_class", 1000);
    d.test_per_class = get_or<std::size_t>(j, "test_per_class", 1000);
    d.mu = get_or<double>(j, "mu", 1.0);
    d.sigma = get_or<double>(j, "sigma", 1.0);
    d.dim = get_or<std::size_t>(j, "dim", 20);
    d.train_label_flip = get_or<double>(j, "train_label_flip", 0.0);
    if (d.train_label_flip < 0 || d.train_label_flip > 1)
      throw ConfigError("dataset.train_label_flip: must be in [0, 1]");
    if (j.contains("seed")) d.seed = j.at("seed").get<std::uint64_t>();
  } else if (kind == "idx") {
    d.kind = DatasetSpec::Kind::Idx;
    cfg_detail::reject_unknown(j, "dataset",
                               {"kind", "train_images", "train_labels",
                                "test_images", "test_labels"});
    d.train_images = require(j, "train_images", "dataset").get<std::string>();
    d.train_labels = require(j, "train_labels", "dataset").get<std::string>();
    d.test_images = require(j, "test_images", "dataset").get<std::string>();
    d.test_labels = require(j, "test_labels", "dataset").get<std::string>();
  } else {
    throw ConfigError("dataset.kind: expected 'gaussian2' or 'idx', got '" +
                      kind + "'");
  }
  return d;
}

inline Json dataset_to_json(const DatasetSpec& d) {
  Json j;
  if (d.kind == DatasetSpec::Kind::Gaussian2) {
    j["kind"] = "gaussian2";
    j["train_per_class"] = d.train_per_class;
    j["test_per_class"] = d.test_per_class;
    j["mu"] = d.mu;
    j["sigma"] = d.sigma;
    j["dim"] = d.dim;
    j["train_label_flip"] = d.train_label_flip;
    if (d.seed) j["seed"] = *d.seed;
  } else {
    j["kind"] = "idx";
    j["train_images"] = d.train_images;
    j["train_labels"] = d.train_labels;
    j["test_images"] = d.test_images;
    j["test_labels"] = d.test_labels;
  }
  return j;
}

struct DatasetPair {
  Dataset train;
  Dataset test;
};

inline DatasetPair realize_dataset(const DatasetSpec& spec,
                                   std::uint64_t experiment_seed) {
  if (spec.kind == DatasetSpec::Kind::Gaussian2) {
    const std::uint64_t seed = spec.seed.value_or(experiment_seed);
    GaussianPair g = gaussian2(spec.train_per_class, spec.test_per_class,
                               spec.mu, spec.sigma, spec.dim, seed);
    flip_labels(g.train, spec.train_label_flip, seed);
    return {std::move(g.train), std::move(g.test)};
  }
  DatasetPair p;
  p.train = load_idx(spec.train_images, spec.train_labels, Split::Train);
  p.test = load_idx(spec.test_images, spec.test_labels, Split::Test);
  p.test.split = Split::Test;
  // Class count must cover both splits.
  const std::size_t c = std::max(p.train.num_classes, p.test.num_classes);
  p.train.num_classes = c;
  p.test.num_classes = c;
  return p;
}

// ---- model ---------------------------------------------------------------------

struct ModelSpecCfg {
  enum class Arch { Mlp, Conv } arch = Arch::Mlp;
  std::vector<std::size_t> hidden = {128, 64};   // mlp
  std::vector<std::size_t> channels = {8, 16};   // conv
  std::optional<ImageGeom> image;                // conv; inferred for idx data
  std::optional<std::uint64_t> seed;             // default: experiment seed
};

inline ModelSpecCfg model_from_json(const Json& j) {
  using cfg_detail::get_or;
  ModelSpecCfg m;
  const std::string arch =
      cfg_detail::require(j, "arch", "model").get<std::string>();
  cfg_detail::reject_unknown(j, "model",
                             {"arch", "hidden", "channels", "image", "seed"});
  if (arch == "mlp") {
    m.arch = ModelSpecCfg::Arch::Mlp;
    m.hidden = get_or<std::vector<std::size_t>>(j, "hidden", {128, 64});
  } else if (arch == "conv") {
    m.arch = ModelSpecCfg::Arch::Conv;
    m.channels = get_or<std::vector<std::size_t>>(j, "channels", {8, 16});
    if (j.contains("image")) {
      const Json& g = j.at("image");
      ImageGeom geom;
      geom.channels = get_or<std::size_t>(g, "channels", 1);
      geom.height = cfg_detail::require(g, "height", "model.image").get<std::size_t>();
      geom.width = cfg_detail::require(g, "width", "model.image").get<std::size_t>();
      m.image = geom;
    }
  } else {
    throw ConfigError("model.arch: expected 'mlp' or 'conv', got '" + arch + "'");
  }
  if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
  return m;
}

inline Json model_to_json(const ModelSpecCfg& m) {
  Json j;
  if (m.arch == ModelSpecCfg::Arch::Mlp) {
    j["arch"] = "mlp";
    j["hidden"] = m.hidden;
  } else {
    j["arch"] = "conv";
    j["channels"] = m.channels;
    if (m.image) {
      j["image"] = Json{{"channels", m.image->channels},
                        {"height", m.image->height},
                        {"width", m.image->width}};
    }
  }
  if (m.seed) j["seed"] = *m.seed;
  return j;
}

inline Model realize_model(const ModelSpecCfg& spec, const Dataset& train,
                           std::uint64_t experiment_seed) {
  const std::uint64_t seed = spec.seed.value_or(experiment_seed);
  if (spec.arch == ModelSpecCfg::Arch::Mlp) {
    return Model::mlp_classifier(train.dim(), train.num_classes, spec.hidden,
                                 seed);
  }
  ImageGeom geom;
  if (spec.image) {
    geom = *spec.image;
  } else {
    // Square single-channel fallback when the dataset does not say.
    const std::size_t side =
        static_cast<std::size_t>(std::llround(std::sqrt(double(train.dim()))));
    if (side * side != train.dim())
      throw ConfigError("model.image: required for non-square conv input");
    geom = ImageGeom{1, side, side};
  }
  if (geom.pixels() != train.dim())
    throw ConfigError("model.image: geometry does not match dataset dim " +
                      std::to_string(train.dim()));
  return Model::conv_classifier(geom, train.num_classes, spec.channels, seed);
}

// ---- attack / schedule / optimizer -----------------------------------------------

inline AttackConfig attack_from_json(const Json& j, const std::string& where) {
  using cfg_detail::get_or;
  cfg_detail::reject_unknown(
      j, where, {"epsilon", "alpha", "steps", "init", "clamp", "seed"});
  AttackConfig a;
  a.epsilon = cfg_detail::require(j, "epsilon", where).get<double>();
  a.alpha = get_or<double>(j, "alpha", 0.0);
  a.steps = get_or<int>(j, "steps", 20);
  const std::string init = get_or<std::string>(j, "init", "zero");
  if (init == "zero") {
    a.init = AttackInit::Zero;
  } else if (init == "random") {
    a.init = AttackInit::RandomUniform;
  } else {
    throw ConfigError(where + ".init: expected 'zero' or 'random', got '" +
                      init + "'");
  }
  if (j.contains("clamp")) {
    const auto clamp = j.at("clamp").get<std::vector<double>>();
    if (clamp.size() != 2)
      throw ConfigError(where + ".clamp: expected [lo, hi]");
    a.clamp_lo = clamp[0];
    a.clamp_hi = clamp[1];
  }
  a.seed = get_or<std::uint64_t>(j, "seed", 0);
  a.validate();
  return a;
}

inline Json attack_to_json(const AttackConfig& a) {
  Json j;
  j["epsilon"] = a.epsilon;
  j["alpha"] = a.alpha;
  j["steps"] = a.steps;
  j["init"] = a.init == AttackInit::Zero ? "zero" : "random";
  j["clamp"] = Json::array({a.clamp_lo, a.clamp_hi});
  j["seed"] = a.seed;
  return j;
}

inline ScheduleSpec schedule_from_json(const Json& j, const std::string& where) {
  using cfg_detail::get_or;
  const std::string kind = cfg_detail::require(j, "kind", where).get<std::string>();
  ScheduleSpec s;
  if (kind == "constant") {
    cfg_detail::reject_unknown(j, where, {"kind", "base_lr"});
    s = ScheduleSpec::constant(cfg_detail::require(j, "base_lr", where).get<double>());
  } else if (kind == "step") {
    cfg_detail::reject_unknown(j, where, {"kind", "base_lr", "plateau", "gamma"});
    s = ScheduleSpec::step(cfg_detail::require(j, "base_lr", where).get<double>(),
                           cfg_detail::require(j, "plateau", where).get<int>(),
                           cfg_detail::require(j, "gamma", where).get<double>());
  } else if (kind == "multistep") {
    cfg_detail::reject_unknown(j, where, {"kind", "base_lr", "milestones", "gamma"});
    s = ScheduleSpec::multistep(
        cfg_detail::require(j, "base_lr", where).get<double>(),
        cfg_detail::require(j, "milestones", where).get<std::vector<int>>(),
        cfg_detail::require(j, "gamma", where).get<double>());
  } else if (kind == "ssfd") {
    cfg_detail::reject_unknown(j, where,
                               {"kind", "peak_lr", "warmup_epochs",
                                "start_fraction", "decay", "total_epochs"});
    ScheduleSpec base = ScheduleSpec::ssfd_default();
    s = ScheduleSpec::ssfd(get_or<double>(j, "peak_lr", base.peak_lr),
                           get_or<int>(j, "warmup_epochs", base.warmup_epochs),
                           get_or<double>(j, "start_fraction", base.start_fraction),
                           get_or<double>(j, "decay", base.decay),
                           get_or<int>(j, "total_epochs", base.total_epochs));
  } else {
    throw ConfigError(where + ".kind: unknown schedule kind '" + kind + "'");
  }
  s.validate();
  return s;
}

inline Json schedule_to_json(const ScheduleSpec& s) {
  Json j;
  switch (s.kind) {
    case ScheduleSpec::Kind::Constant:
      j["kind"] = "constant";
      j["base_lr"] = s.base_lr;
      break;
    case ScheduleSpec::Kind::Step:
      j["kind"] = "step";
      j["base_lr"] = s.base_lr;
      j["plateau"] = s.plateau;
      j["gamma"] = s.gamma;
      break;
    case ScheduleSpec::Kind::Multistep:
      j["kind"] = "multistep";
      j["base_lr"] = s.base_lr;
      j["milestones"] = s.milestones;
      j["gamma"] = s.gamma;
      break;
    case ScheduleSpec::Kind::Ssfd:
      j["kind"] = "ssfd";
      j["peak_lr"] = s.peak_lr;
      j["warmup_epochs"] = s.warmup_epochs;
      j["start_fraction"] = s.start_fraction;
      j["decay"] = s.decay;
      j["total_epochs"] = s.total_epochs;
      break;
  }
  return j;
}

inline OptimizerConfig optimizer_from_json(const Json& j,
                                           const std::string& where) {
  using cfg_detail::get_or;
  const std::string kind = cfg_detail::require(j, "kind", where).get<std::string>();
  if (kind == "sgd") {
    cfg_detail::reject_unknown(j, where, {"kind", "momentum", "weight_decay"});
    return OptimizerConfig::sgd(get_or<double>(j, "momentum", 0.9),
                                get_or<double>(j, "weight_decay", 5e-4));
  }
  if (kind == "adam") {
    cfg_detail::reject_unknown(j, where, {"kind", "beta1", "beta2", "eps"});
    return OptimizerConfig::adam(get_or<double>(j, "beta1", 0.9),
                                 get_or<double>(j, "beta2", 0.999),
                                 get_or<double>(j, "eps", 1e-8));
  }
  throw ConfigError(where + ".kind: expected 'sgd' or 'adam', got '" + kind + "'");
}

inline Json optimizer_to_json(const OptimizerConfig& o) {
  Json j;
  if (o.kind == OptimizerConfig::Kind::Sgd) {
    j["kind"] = "sgd";
    j["momentum"] = o.momentum;
    j["weight_decay"] = o.weight_decay;
  } else {
    j["kind"] = "adam";
    j["beta1"] = o.beta1;
    j["beta2"] = o.beta2;
    j["eps"] = o.adam_eps;
  }
  return j;
}

// ---- phases -----------------------------------------------------------------------

enum class PhaseKind { Pretrain, AdvTrain, AdvFinetune, Evaluate, ProjectEmbedding };

inline const char* phase_kind_name(PhaseKind k) {
  switch (k) {
    case PhaseKind::Pretrain: return "pretrain";
    case PhaseKind::AdvTrain: return "adv-train";
    case PhaseKind::AdvFinetune: return "adv-finetune";
    case PhaseKind::Evaluate: return "evaluate";
    case PhaseKind::ProjectEmbedding: return "project-embedding";
  }
  return "?";
}

// Where a phase gets its starting model.
struct PhaseSource {
  enum class Kind { Fresh, Previous, Phase, File } kind = Kind::Previous;
  std::size_t phase_index = 0;  // Kind::Phase
  std::string path;             // Kind::File
};

struct PhaseConfig {
  PhaseKind kind = PhaseKind::Pretrain;
  PhaseSource from;
  // training phases
  int epochs = 1;
  int batch_size = 128;
  OptimizerConfig optimizer = OptimizerConfig::sgd();
  ScheduleSpec schedule = ScheduleSpec::constant(0.1);
  std::optional<AttackConfig> attack;
  AttackConfig eval_attack;
  std::optional<std::uint64_t> seed;  // default: experiment seed
  bool shuffle = true;
  double clean_fraction = 0.0;
  // project-embedding
  Split split = Split::Test;
};

// Paper-style default evaluation adversary: PGD-20 at eps 8/255, zero init.
inline AttackConfig default_eval_attack() {
  AttackConfig a;
  a.epsilon = 8.0 / 255.0;
  a.steps = 20;
  a.init = AttackInit::Zero;
  return a;
}

inline PhaseConfig phase_from_json(const Json& j, std::size_t index) {
  using cfg_detail::get_or;
  const std::string where = "phases[" + std::to_string(index) + "]";
  const std::string kind = cfg_detail::require(j, "kind", where).get<std::string>();
  cfg_detail::reject_unknown(
      j, where,
      {"kind", "from", "epochs", "batch_size", "optimizer", "schedule",
       "attack", "eval_attack", "seed", "shuffle", "clean_fraction", "split"});

  PhaseConfig p;
  if (kind == "pretrain") {
    p.kind = PhaseKind::Pretrain;
  } else if (kind == "adv-train") {
    p.kind = PhaseKind::AdvTrain;
  } else if (kind == "adv-finetune") {
    p.kind = PhaseKind::AdvFinetune;
  } else if (kind == "evaluate") {
    p.kind = PhaseKind::Evaluate;
  } else if (kind == "project-embedding") {
    p.kind = PhaseKind::ProjectEmbedding;
  } else {
    throw ConfigError(where + ".kind: unknown phase kind '" + kind + "'");
  }

  // Model source defaults: training-from-scratch phases start fresh, the rest
  // continue from the previous phase.
  const bool fresh_default =
      p.kind == PhaseKind::Pretrain || p.kind == PhaseKind::AdvTrain;
  p.from.kind = fresh_default ? PhaseSource::Kind::Fresh
                              : PhaseSource::Kind::Previous;
  if (j.contains("from")) {
    const std::string from = j.at("from").get<std::string>();
    if (from == "fresh") {
      p.from.kind = PhaseSource::Kind::Fresh;
    } else if (from == "previous") {
      p.from.kind = PhaseSource::Kind::Previous;
    } else if (from.rfind("phase:", 0) == 0) {
      p.from.kind = PhaseSource::Kind::Phase;
      p.from.phase_index = std::stoul(from.substr(6));
    } else {
      p.from.kind = PhaseSource::Kind::File;
      p.from.path = from;
    }
  }

  if (p.kind == PhaseKind::AdvFinetune) {
    p.epochs = get_or<int>(j, "epochs", 10);
    p.optimizer = OptimizerConfig::adam();
    p.schedule = ScheduleSpec::ssfd_default();
  } else {
    p.epochs = get_or<int>(j, "epochs", 1);
  }
  p.batch_size = get_or<int>(j, "batch_size", 128);
  if (j.contains("optimizer"))
    p.optimizer = optimizer_from_json(j.at("optimizer"), where + ".optimizer");
  if (j.contains("schedule"))
    p.schedule = schedule_from_json(j.at("schedule"), where + ".schedule");
  if (j.contains("attack"))
    p.attack = attack_from_json(j.at("attack"), where + ".attack");
  if (j.contains("eval_attack")) {
    p.eval_attack = attack_from_json(j.at("eval_attack"), where + ".eval_attack");
  } else if (p.attack) {
    p.eval_attack = *p.attack;
    p.eval_attack.steps = 20;
    p.eval_attack.alpha = 0.0;
    p.eval_attack.init = AttackInit::Zero;
  } else {
    p.eval_attack = default_eval_attack();
  }
  if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
  p.shuffle = get_or<bool>(j, "shuffle", true);
  p.clean_fraction = get_or<double>(j, "clean_fraction", 0.0);
  const std::string split = get_or<std::string>(j, "split", "test");
  if (split == "train") {
    p.split = Split::Train;
  } else if (split == "test") {
    p.split = Split::Test;
  } else {
    throw ConfigError(where + ".split: expected 'train' or 'test'");
  }
  return p;
}

inline Json phase_to_json(const PhaseConfig& p) {
  Json j;
  j["kind"] = phase_kind_name(p.kind);
  switch (p.from.kind) {
    case PhaseSource::Kind::Fresh: j["from"] = "fresh"; break;
    case PhaseSource::Kind::Previous: j["from"] = "previous"; break;
    case PhaseSource::Kind::Phase:
      j["from"] = "phase:" + std::to_string(p.from.phase_index);
      break;
    case PhaseSource::Kind::File: j["from"] = p.from.path; break;
  }
  if (p.kind == PhaseKind::Pretrain || p.kind == PhaseKind::AdvTrain ||
      p.kind == PhaseKind::AdvFinetune) {
    j["epochs"] = p.epochs;
    j["batch_size"] = p.batch_size;
    j["optimizer"] = optimizer_to_json(p.optimizer);
    j["schedule"] = schedule_to_json(p.schedule);
    if (p.attack) j["attack"] = attack_to_json(*p.attack);
    j["eval_attack"] = attack_to_json(p.eval_attack);
    if (p.seed) j["seed"] = *p.seed;
    j["shuffle"] = p.shuffle;
    j["clean_fraction"] = p.clean_fraction;
  } else if (p.kind == PhaseKind::Evaluate) {
    if (p.attack) j["attack"] = attack_to_json(*p.attack);
    if (p.seed) j["seed"] = *p.seed;
  } else {
    j["split"] = split_name(p.split);
  }
  return j;
}

// ---- experiment --------------------------------------------------------------------

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "runs/experiment";
  DatasetSpec dataset;
  ModelSpecCfg model;
  std::vector<PhaseConfig> phases;
};

inline void validate_config(const ExperimentConfig& cfg) {
  for (std::size_t i = 0; i < cfg.phases.size(); ++i) {
    const PhaseConfig& p = cfg.phases[i];
    const std::string where = "phases[" + std::to_string(i) + "]";
    if (p.from.kind == PhaseSource::Kind::Previous && i == 0) {
      throw ConfigError(where + ".from: no previous phase to continue from");
    }
    if (p.from.kind == PhaseSource::Kind::Phase && p.from.phase_index >= i) {
      throw ConfigError(where + ".from: phase:" +
                        std::to_string(p.from.phase_index) +
                        " is not an earlier phase");
    }
    if (p.kind == PhaseKind::Pretrain && p.attack) {
      throw ConfigError(where + ".attack: pretrain takes no attack");
    }
    if ((p.kind == PhaseKind::AdvTrain || p.kind == PhaseKind::AdvFinetune) &&
        !p.attack) {
      throw ConfigError(where + ".attack: required for " +
                        std::string(phase_kind_name(p.kind)));
    }
    if (p.kind == PhaseKind::Pretrain || p.kind == PhaseKind::AdvTrain ||
        p.kind == PhaseKind::AdvFinetune) {
      if (p.epochs < 1) throw ConfigError(where + ".epochs: must be >= 1");
      if (p.batch_size < 1)
        throw ConfigError(where + ".batch_size: must be >= 1");
      p.schedule.validate();
      p.optimizer.validate();
      const std::optional<int> horizon = schedule_horizon(p.schedule);
      if (horizon && *horizon < p.epochs) {
        throw ConfigError(where + ".schedule: horizon " +
                          std::to_string(*horizon) + " shorter than " +
                          std::to_string(p.epochs) + " epochs");
      }
    }
  }
}

inline ExperimentConfig config_from_json(const Json& j) {
  using cfg_detail::get_or;
  cfg_detail::reject_unknown(
      j, "config", {"seed", "output_dir", "dataset", "model", "phases"});
  ExperimentConfig cfg;
  cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
  cfg.output_dir = get_or<std::string>(j, "output_dir", "runs/experiment");
  cfg.dataset = dataset_from_json(cfg_detail::require(j, "dataset", "config"));
  cfg.model = model_from_json(cfg_detail::require(j, "model", "config"));
  const Json& phases = cfg_detail::require(j, "phases", "config");
  if (!phases.is_array()) throw ConfigError("phases: expected an array");
  for (std::size_t i = 0; i < phases.size(); ++i)
    cfg.phases.push_back(phase_from_json(phases[i], i));
  validate_config(cfg);
  return cfg;
}

inline Json config_to_json(const ExperimentConfig& cfg) {
  Json j;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["dataset"] = dataset_to_json(cfg.dataset);
  j["model"] = model_to_json(cfg.model);
  j["phases"] = Json::array();
  for (const PhaseConfig& p : cfg.phases) j["phases"].push_back(phase_to_json(p));
  return j;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace advtrain
