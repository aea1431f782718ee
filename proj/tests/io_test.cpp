#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "advtrain/checkpoint.hpp"
#include "advtrain/config.hpp"
#include "advtrain/recipes.hpp"
#include "advtrain/runner.hpp"

namespace fs = std::filesystem;

using advtrain::Checkpoint;
using advtrain::ExperimentConfig;
using advtrain::Json;
using advtrain::Model;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "advtrain_io_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Checkpoint, RoundTripEvaluatesIdentically) {
  advtrain::GaussianPair g = advtrain::gaussian2(40, 40, 1.0, 0.6, 5, 7);
  Model m = Model::mlp_classifier(5, 2, {12, 6}, 11);

  const fs::path path = fresh_dir("ckpt") / "model.ckpt";
  Checkpoint out;
  out.model = m;
  out.rng_seed = 42;
  out.note = "pretrained externally";
  advtrain::save_checkpoint(out, path);

  Checkpoint in = advtrain::load_checkpoint(path);
  EXPECT_EQ(in.note, "pretrained externally");
  EXPECT_EQ(in.rng_seed, 42u);

  // 0-ulp identical logits on the full test set.
  advtrain::Tensor a = m.forward(g.test.x);
  advtrain::Tensor b = in.model.forward(g.test.x);
  EXPECT_EQ(a, b);  // bitwise
}

TEST(Checkpoint, OptimizerStateRoundTrips) {
  Model m = Model::mlp_classifier(3, 2, {4}, 13);
  advtrain::Optimizer opt(advtrain::OptimizerConfig::adam(), m.params());
  std::vector<advtrain::Tensor> grads;
  for (const auto& p : m.params()) grads.push_back(advtrain::Tensor(p.shape()));
  grads[0][0] = 0.5;
  opt.step(m.mutable_params(), grads, 1e-3);

  const fs::path path = fresh_dir("ckpt_opt") / "model.ckpt";
  Checkpoint out;
  out.model = m;
  out.optimizer = opt.snapshot();
  advtrain::save_checkpoint(out, path);

  Checkpoint in = advtrain::load_checkpoint(path);
  ASSERT_TRUE(in.optimizer.has_value());
  EXPECT_EQ(in.optimizer->step, 1);
  ASSERT_EQ(in.optimizer->buffers.size(), opt.snapshot().buffers.size());
  for (std::size_t i = 0; i < in.optimizer->buffers.size(); ++i)
    EXPECT_EQ(in.optimizer->buffers[i], opt.snapshot().buffers[i]);
}

TEST(Checkpoint, CorruptedByteRejectedByChecksum) {
  Model m = Model::mlp_classifier(3, 2, {4}, 17);
  const fs::path path = fresh_dir("ckpt_bad") / "model.ckpt";
  Checkpoint out;
  out.model = m;
  advtrain::save_checkpoint(out, path);

  std::string bytes = slurp(path);
  bytes[bytes.size() / 2] ^= 0x40;  // flip one payload bit
  std::ofstream(path, std::ios::binary).write(bytes.data(), bytes.size());

  try {
    advtrain::load_checkpoint(path);
    FAIL() << "expected FormatError";
  } catch (const advtrain::FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("checksum"), std::string::npos);
  }
}

TEST(Checkpoint, TruncationRejected) {
  Model m = Model::mlp_classifier(3, 2, {4}, 19);
  const fs::path path = fresh_dir("ckpt_trunc") / "model.ckpt";
  Checkpoint out;
  out.model = m;
  advtrain::save_checkpoint(out, path);
  fs::resize_file(path, fs::file_size(path) / 2);
  EXPECT_THROW(advtrain::load_checkpoint(path), advtrain::FormatError);
}

TEST(Config, ParseSerializeParseIsFixedPoint) {
  for (const auto& [name, factory] : advtrain::recipe_registry()) {
    ExperimentConfig cfg = factory();
    const std::string once = advtrain::config_to_json(cfg).dump(2);
    ExperimentConfig reparsed = advtrain::parse_config_text(once);
    const std::string twice = advtrain::config_to_json(reparsed).dump(2);
    EXPECT_EQ(once, twice) << "recipe " << name;
  }
}

TEST(Config, DiagnosticsNameTheField) {
  const char* missing_dataset = R"({"model": {"arch": "mlp"}, "phases": []})";
  try {
    advtrain::parse_config_text(missing_dataset);
    FAIL() << "expected ConfigError";
  } catch (const advtrain::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("dataset"), std::string::npos);
  }

  const char* bad_phase = R"({
    "dataset": {"kind": "gaussian2"},
    "model": {"arch": "mlp"},
    "phases": [{"kind": "adv-finetune"}]
  })";
  try {
    advtrain::parse_config_text(bad_phase);
    FAIL() << "expected ConfigError";
  } catch (const advtrain::ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("phases[0]"), std::string::npos) << msg;
  }

  const char* unknown_field = R"({
    "dataset": {"kind": "gaussian2", "mystery": 3},
    "model": {"arch": "mlp"},
    "phases": []
  })";
  try {
    advtrain::parse_config_text(unknown_field);
    FAIL() << "expected ConfigError";
  } catch (const advtrain::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("mystery"), std::string::npos);
  }
}

TEST(Config, FinetuneFirstPhaseNeedsSource) {
  const char* text = R"({
    "dataset": {"kind": "gaussian2"},
    "model": {"arch": "mlp"},
    "phases": [
      {"kind": "adv-finetune",
       "attack": {"epsilon": 0.05, "steps": 3}}
    ]
  })";
  EXPECT_THROW(advtrain::parse_config_text(text), advtrain::ConfigError);
}

ExperimentConfig tiny_demo(const std::string& outdir) {
  ExperimentConfig cfg = advtrain::recipes::aft_demo();
  // Shrink for test speed.
  cfg.dataset.train_per_class = 40;
  cfg.dataset.test_per_class = 40;
  cfg.dataset.dim = 6;
  for (advtrain::PhaseConfig& p : cfg.phases) {
    if (p.kind == advtrain::PhaseKind::Pretrain) p.epochs = 2;
    if (p.kind == advtrain::PhaseKind::AdvFinetune) {
      p.epochs = 2;
      p.schedule = advtrain::ScheduleSpec::ssfd(1e-3, 1, 0.04, 0.3, 2);
      p.attack->steps = 3;
      p.eval_attack.steps = 3;
    }
    if (p.attack) p.eval_attack.steps = 3;
    p.eval_attack.steps = 3;
  }
  cfg.output_dir = outdir;
  return cfg;
}

TEST(Runner, EmptyPhaseListProducesOnlyManifest) {
  ExperimentConfig cfg = tiny_demo("ignored");
  cfg.phases.clear();
  const fs::path out = fresh_dir("empty_run");
  advtrain::run_experiment(cfg, out, std::cout);
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  std::size_t entries = 0;
  for (const auto& e : fs::directory_iterator(out)) {
    (void)e;
    ++entries;
  }
  EXPECT_EQ(entries, 1u);
}

TEST(Runner, AftDemoEmitsThreeCheckpointsAndTwoMetricsFiles) {
  ExperimentConfig cfg = tiny_demo("ignored");
  const fs::path out = fresh_dir("demo_run");
  std::ostringstream log;
  advtrain::run_experiment(cfg, out, log);

  std::size_t checkpoints = 0, metrics = 0;
  for (const auto& e : fs::recursive_directory_iterator(out)) {
    if (e.path().filename() == "checkpoint.ckpt") ++checkpoints;
    if (e.path().filename() == "metrics.csv") ++metrics;
  }
  EXPECT_EQ(checkpoints, 3u);
  EXPECT_EQ(metrics, 2u);
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_TRUE(fs::exists(out / "phase_02_evaluate" / "eval.json"));
  // Summary table shaped Clean | PGD | Time.
  EXPECT_NE(log.str().find("Clean"), std::string::npos);
  EXPECT_NE(log.str().find("PGD"), std::string::npos);
  EXPECT_NE(log.str().find("Time"), std::string::npos);
}

TEST(Runner, RepeatRunsAreByteIdentical) {
  ExperimentConfig cfg = tiny_demo("ignored");
  const fs::path out1 = fresh_dir("rep_a");
  const fs::path out2 = fresh_dir("rep_b");
  std::ostringstream sink;
  advtrain::run_experiment(cfg, out1, sink);
  advtrain::run_experiment(cfg, out2, sink);
  for (const char* rel :
       {"phase_00_pretrain/metrics.csv", "phase_01_adv_finetune/metrics.csv",
        "phase_00_pretrain/checkpoint.ckpt"}) {
    EXPECT_EQ(slurp(out1 / rel), slurp(out2 / rel)) << rel;
  }
}

TEST(Runner, CheckpointHandoffMatchesSingleRun) {
  // pretrain+finetune in one run == pretrain run, then finetune run that
  // loads the pretrain checkpoint from disk.
  ExperimentConfig joint = tiny_demo("ignored");
  joint.phases.pop_back();  // drop evaluate; keep pretrain + finetune
  const fs::path out_joint = fresh_dir("joint");
  std::ostringstream sink;
  advtrain::run_experiment(joint, out_joint, sink);

  ExperimentConfig first = joint;
  first.phases = {joint.phases[0]};
  const fs::path out_first = fresh_dir("split_a");
  advtrain::run_experiment(first, out_first, sink);

  ExperimentConfig second = joint;
  second.phases = {joint.phases[1]};
  second.phases[0].from.kind = advtrain::PhaseSource::Kind::File;
  second.phases[0].from.path =
      (out_first / "phase_00_pretrain" / "checkpoint.ckpt").string();
  const fs::path out_second = fresh_dir("split_b");
  advtrain::run_experiment(second, out_second, sink);

  EXPECT_EQ(slurp(out_joint / "phase_01_adv_finetune" / "metrics.csv"),
            slurp(out_second / "phase_00_adv_finetune" / "metrics.csv"));
}

TEST(Runner, MissingCheckpointIsError) {
  ExperimentConfig cfg = tiny_demo("ignored");
  cfg.phases[1].from.kind = advtrain::PhaseSource::Kind::File;
  cfg.phases[1].from.path = "/nonexistent/model.ckpt";
  const fs::path out = fresh_dir("missing_ckpt");
  EXPECT_THROW(advtrain::run_experiment(cfg, out, std::cout),
               advtrain::FormatError);
}

TEST(Runner, ManifestRecordsConfigHashAndArtifacts) {
  ExperimentConfig cfg = tiny_demo("ignored");
  const fs::path out = fresh_dir("manifest");
  std::ostringstream sink;
  advtrain::run_experiment(cfg, out, sink);
  Json manifest = Json::parse(slurp(out / "manifest.json"));
  EXPECT_TRUE(manifest.contains("config_hash"));
  EXPECT_TRUE(manifest.contains("artifacts"));
  EXPECT_GE(manifest["artifacts"].size(), 5u);
  for (const auto& a : manifest["artifacts"]) {
    EXPECT_TRUE(a.contains("path"));
    EXPECT_TRUE(a.contains("fnv64"));
  }
}

TEST(Recipes, AllParseValidateAndExposeExpectedPhases) {
  const auto& reg = advtrain::recipe_registry();
  ASSERT_EQ(reg.size(), 5u);
  for (const char* name : {"overfit-curve", "plateau-sweep", "aft-vs-scratch",
                           "embedding-map", "aft-demo"}) {
    ASSERT_TRUE(reg.count(name)) << name;
    ExperimentConfig cfg = reg.at(name)();
    advtrain::validate_config(cfg);  // throws on inconsistency
  }
  // plateau-sweep covers step-LR(i, 0.5) for i in {1,2,4,8,16,32}.
  ExperimentConfig sweep = reg.at("plateau-sweep")();
  std::vector<int> plateaus;
  for (const auto& p : sweep.phases)
    if (p.kind == advtrain::PhaseKind::AdvFinetune)
      plateaus.push_back(p.schedule.plateau);
  EXPECT_EQ(plateaus, (std::vector<int>{1, 2, 4, 8, 16, 32}));
}

}  // namespace
