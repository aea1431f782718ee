#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "advtrain/checkpoint.hpp"
#include "advtrain/config.hpp"
#include "advtrain/eval.hpp"
#include "advtrain/metrics.hpp"
#include "advtrain/projection.hpp"
#include "advtrain/train.hpp"

namespace advtrain {

// Root for relative output dirs; lets CI redirect artifacts wholesale.
constexpr const char* kOutputRootEnv = "ADVTRAIN_OUT_ROOT";

struct PhaseOutcome {
  std::string name;
  std::optional<double> clean_acc;
  std::optional<double> robust_acc;
  double seconds = 0.0;
};

struct RunResult {
  std::filesystem::path output_dir;
  std::vector<PhaseOutcome> phases;
};

namespace run_detail {

inline std::uint64_t file_fnv(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return ckpt_detail::fnv1a(bytes.data(), bytes.size());
}

inline std::filesystem::path resolve_output_dir(
    const ExperimentConfig& cfg, const std::filesystem::path& override_dir) {
  if (!override_dir.empty()) return override_dir;
  std::filesystem::path dir = cfg.output_dir;
  if (dir.is_relative()) {
    if (const char* root = std::getenv(kOutputRootEnv)) {
      return std::filesystem::path(root) / dir;
    }
  }
  return dir;
}

inline std::string phase_dir_name(std::size_t index, PhaseKind kind) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02zu", index);
  std::string name = std::string("phase_") + buf + "_" + phase_kind_name(kind);
  for (char& c : name)
    if (c == '-') c = '_';
  return name;
}

}  // namespace run_detail

// Executes the configured phases in order, writing metrics.csv per training
// phase, checkpoint.ckpt per phase, projection.csv / eval.json where relevant,
// and a run manifest. Prints a summary table shaped Clean | PGD | Time.
inline RunResult run_experiment(const ExperimentConfig& cfg,
                                const std::filesystem::path& out_override = {},
                                std::ostream& log = std::cout) {
  namespace fs = std::filesystem;
  validate_config(cfg);

  const fs::path out_dir = run_detail::resolve_output_dir(cfg, out_override);
  fs::create_directories(out_dir);

  DatasetPair data = realize_dataset(cfg.dataset, cfg.seed);
  data.train.validate();
  data.test.validate();

  const Json canonical = config_to_json(cfg);
  const std::string canonical_text = canonical.dump(2);
  const std::uint64_t config_hash = ckpt_detail::fnv1a(
      reinterpret_cast<const std::uint8_t*>(canonical_text.data()),
      canonical_text.size());

  std::vector<Model> phase_models;
  std::vector<PhaseOutcome> outcomes;
  std::vector<Json> artifacts;

  auto record_artifact = [&](const fs::path& p) {
    artifacts.push_back(Json{{"path", fs::relative(p, out_dir).string()},
                             {"fnv64", run_detail::file_fnv(p)}});
  };

  for (std::size_t i = 0; i < cfg.phases.size(); ++i) {
    const PhaseConfig& phase = cfg.phases[i];
    const std::uint64_t phase_seed = phase.seed.value_or(cfg.seed);
    const fs::path phase_dir =
        out_dir / run_detail::phase_dir_name(i, phase.kind);
    fs::create_directories(phase_dir);

    // Starting model.
    Model model = [&]() -> Model {
      switch (phase.from.kind) {
        case PhaseSource::Kind::Fresh:
          return realize_model(cfg.model, data.train, cfg.seed);
        case PhaseSource::Kind::Previous:
          return phase_models[i - 1];
        case PhaseSource::Kind::Phase:
          return phase_models[phase.from.phase_index];
        case PhaseSource::Kind::File:
          return load_checkpoint(phase.from.path).model;
      }
      throw ConfigError("unreachable phase source");
    }();
    if (model.input_dim() != data.train.dim()) {
      throw ConfigError("phases[" + std::to_string(i) +
                        "]: model input dim " + std::to_string(model.input_dim()) +
                        " does not match dataset dim " +
                        std::to_string(data.train.dim()));
    }

    PhaseOutcome outcome;
    outcome.name = phase_kind_name(phase.kind);
    const auto t0 = std::chrono::steady_clock::now();
    std::optional<Optimizer::Snapshot> opt_state;

    switch (phase.kind) {
      case PhaseKind::Pretrain:
      case PhaseKind::AdvTrain:
      case PhaseKind::AdvFinetune: {
        TrainConfig tc;
        tc.epochs = phase.epochs;
        tc.batch_size = phase.batch_size;
        tc.schedule = phase.schedule;
        tc.optimizer = phase.optimizer;
        tc.attack = phase.attack;
        tc.eval_attack = phase.eval_attack;
        tc.seed = phase_seed;
        tc.shuffle = phase.shuffle;
        tc.clean_fraction = phase.clean_fraction;
        TrainReport report =
            phase.kind == PhaseKind::Pretrain
                ? pretrain(std::move(model), data.train, data.test, tc)
                : adversarial_train(std::move(model), data.train, data.test, tc);
        model = std::move(report.model);
        opt_state = std::move(report.optimizer);
        std::ofstream csv(phase_dir / "metrics.csv", std::ios::binary);
        write_metrics_csv(report.metrics, csv);
        csv.close();
        record_artifact(phase_dir / "metrics.csv");
        if (!report.metrics.empty()) {
          const MetricsRow& last = report.metrics.back();
          outcome.clean_acc = last.clean_test_acc;
          outcome.robust_acc = last.robust_test_acc;
        }
        break;
      }
      case PhaseKind::Evaluate: {
        EvalResult res = evaluate(model, data.test, phase.attack);
        outcome.clean_acc = res.clean_acc;
        outcome.robust_acc = res.robust_acc;
        Json ej;
        ej["clean_acc"] = res.clean_acc;
        ej["clean_loss"] = res.clean_loss;
        if (res.robust_acc) {
          ej["robust_acc"] = *res.robust_acc;
          ej["robust_loss"] = *res.robust_loss;
          ej["attack"] = attack_to_json(*phase.attack);
        }
        std::ofstream ef(phase_dir / "eval.json", std::ios::binary);
        ef << ej.dump(2) << '\n';
        ef.close();
        record_artifact(phase_dir / "eval.json");
        break;
      }
      case PhaseKind::ProjectEmbedding: {
        const Dataset& ds =
            phase.split == Split::Train ? data.train : data.test;
        Projection2D proj = project_embedding(model, ds);
        std::ofstream pf(phase_dir / "projection.csv", std::ios::binary);
        write_projection_csv(proj, pf);
        pf.close();
        record_artifact(phase_dir / "projection.csv");
        break;
      }
    }

    const auto t1 = std::chrono::steady_clock::now();
    outcome.seconds = std::chrono::duration<double>(t1 - t0).count();

    // Every phase checkpoints the model state it ends with.
    Checkpoint ck;
    ck.model = model;
    ck.optimizer = opt_state;
    ck.rng_seed = phase_seed;
    ck.note = std::string("produced by phase ") + std::to_string(i) + " (" +
              phase_kind_name(phase.kind) + ")";
    save_checkpoint(ck, phase_dir / "checkpoint.ckpt");
    record_artifact(phase_dir / "checkpoint.ckpt");

    outcomes.push_back(outcome);
    phase_models.push_back(std::move(model));
  }

  // Manifest: enough to audit a run and compare reruns.
  Json manifest;
  manifest["config"] = canonical;
  manifest["config_hash"] = config_hash;
  manifest["seed"] = cfg.seed;
  manifest["artifacts"] = artifacts;
  Json summary = Json::array();
  for (const PhaseOutcome& o : outcomes) {
    Json row;
    row["phase"] = o.name;
    row["clean"] = o.clean_acc ? Json(*o.clean_acc) : Json(nullptr);
    row["pgd"] = o.robust_acc ? Json(*o.robust_acc) : Json(nullptr);
    row["seconds"] = o.seconds;
    summary.push_back(row);
  }
  manifest["summary"] = summary;
  {
    std::ofstream mf(out_dir / "manifest.json", std::ios::binary);
    mf << manifest.dump(2) << '\n';
  }

  // Summary table, Table-1 shaped.
  log << "\nPhase              | Clean  | PGD    | Time (s)\n";
  log << "-------------------+--------+--------+---------\n";
  char line[128];
  for (const PhaseOutcome& o : outcomes) {
    auto cell = [](const std::optional<double>& v) {
      char b[16];
      if (v) {
        std::snprintf(b, sizeof(b), "%6.2f", *v * 100.0);
      } else {
        std::snprintf(b, sizeof(b), "%6s", "-");
      }
      return std::string(b);
    };
    std::snprintf(line, sizeof(line), "%-18s | %s | %s | %8.2f\n",
                  o.name.c_str(), cell(o.clean_acc).c_str(),
                  cell(o.robust_acc).c_str(), o.seconds);
    log << line;
  }
  log.flush();

  RunResult result;
  result.output_dir = out_dir;
  result.phases = std::move(outcomes);
  return result;
}

inline RunResult run_config_file(const std::filesystem::path& config_path,
                                 const std::filesystem::path& out_override = {},
                                 std::ostream& log = std::cout) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError(config_path.string() + ": cannot open config");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return run_experiment(parse_config_text(text), out_override, log);
}

}  // namespace advtrain
