// Experiment runner CLI: run experiment configs, evaluate checkpoints under a
// PGD adversary, project embeddings to 2D, and emit the canned recipes.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "advtrain/checkpoint.hpp"
#include "advtrain/config.hpp"
#include "advtrain/eval.hpp"
#include "advtrain/projection.hpp"
#include "advtrain/recipes.hpp"
#include "advtrain/runner.hpp"

namespace {

advtrain::DatasetPair load_dataset_spec(const std::string& path,
                                        std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw advtrain::ConfigError(path + ": cannot open dataset spec");
  advtrain::Json j = advtrain::Json::parse(in, nullptr, true, true);
  return advtrain::realize_dataset(advtrain::dataset_from_json(j), seed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial training and fine-tuning experiment runner"};
  app.require_subcommand(1);

  // run
  std::string run_config;
  std::string run_out;
  CLI::App* run = app.add_subcommand("run", "Execute an experiment config");
  run->add_option("config", run_config, "Path to the experiment JSON")
      ->required();
  run->add_option("--out", run_out, "Output directory (overrides config)");

  // eval
  std::string eval_ckpt, eval_dataset;
  double eval_eps = 8.0 / 255.0;
  int eval_steps = 20;
  std::uint64_t eval_seed = 0;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Evaluate a checkpoint (clean + PGD)");
  eval_cmd->add_option("checkpoint", eval_ckpt, "Checkpoint file")->required();
  eval_cmd->add_option("--dataset", eval_dataset, "Dataset spec JSON file")
      ->required();
  eval_cmd->add_option("--eps", eval_eps, "l-inf radius in [0,1] units");
  eval_cmd->add_option("--steps", eval_steps, "PGD iterations");
  eval_cmd->add_option("--seed", eval_seed, "Dataset seed");

  // project
  std::string proj_ckpt, proj_dataset, proj_out = "projection.csv";
  std::string proj_split = "test";
  std::uint64_t proj_seed = 0;
  CLI::App* project =
      app.add_subcommand("project", "LDA->PCA 2D embedding projection");
  project->add_option("checkpoint", proj_ckpt, "Checkpoint file")->required();
  project->add_option("dataset", proj_dataset, "Dataset spec JSON file")
      ->required();
  project->add_option("--out", proj_out, "Output CSV path");
  project->add_option("--split", proj_split, "train or test")
      ->check(CLI::IsMember({"train", "test"}));
  project->add_option("--seed", proj_seed, "Dataset seed");

  // recipe
  std::string recipe_name, recipe_out;
  CLI::App* recipe =
      app.add_subcommand("recipe", "Write a canned experiment config");
  recipe->add_option("name", recipe_name, "Recipe name")->required();
  recipe->add_option("-o,--out", recipe_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      advtrain::run_config_file(run_config, run_out);
      return 0;
    }

    if (*eval_cmd) {
      advtrain::Checkpoint ck = advtrain::load_checkpoint(eval_ckpt);
      advtrain::DatasetPair data = load_dataset_spec(eval_dataset, eval_seed);
      advtrain::AttackConfig attack;
      attack.epsilon = eval_eps;
      attack.steps = eval_steps;
      attack.init = advtrain::AttackInit::Zero;
      advtrain::EvalResult res =
          advtrain::evaluate(ck.model, data.test, attack);
      std::printf("clean_acc   %.4f\n", res.clean_acc);
      std::printf("robust_acc  %.4f  (PGD-%d, eps=%g)\n", *res.robust_acc,
                  eval_steps, eval_eps);
      return 0;
    }

    if (*project) {
      advtrain::Checkpoint ck = advtrain::load_checkpoint(proj_ckpt);
      advtrain::DatasetPair data = load_dataset_spec(proj_dataset, proj_seed);
      const advtrain::Dataset& ds =
          proj_split == "train" ? data.train : data.test;
      advtrain::Projection2D proj2d = advtrain::project_embedding(ck.model, ds);
      std::ofstream out(proj_out, std::ios::binary);
      if (!out) throw advtrain::ConfigError(proj_out + ": cannot open output");
      advtrain::write_projection_csv(proj2d, out);
      std::printf("wrote %zu points to %s\n", proj2d.labels.size(),
                  proj_out.c_str());
      return 0;
    }

    if (*recipe) {
      const auto& reg = advtrain::recipe_registry();
      auto it = reg.find(recipe_name);
      if (it == reg.end()) {
        std::cerr << "unknown recipe '" << recipe_name << "'; available:";
        for (const auto& [name, _] : reg) std::cerr << ' ' << name;
        std::cerr << '\n';
        return 1;
      }
      const std::string text =
          advtrain::config_to_json(it->second()).dump(2) + "\n";
      if (recipe_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(recipe_out, std::ios::binary);
        out << text;
        if (!out) {
          std::cerr << recipe_out << ": write failed\n";
          return 1;
        }
      }
      return 0;
    }
  } catch (const advtrain::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
