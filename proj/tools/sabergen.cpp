// sabergen: simulate, ingest, serialize, train, predict, eval, report, replay.
//
// Exit codes: 0 ok, 1 replay mismatch, 2 config error, 3 data error,
// 4 internal error.

#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sabergen/linalg.hpp"
#include "sabergen/manifest.hpp"
#include "sabergen/pipeline.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

enum Exit : int { kOk = 0, kMismatch = 1, kConfig = 2, kData = 3, kInternal = 4 };

// Options shared by the pipeline subcommands; only flags actually given end
// up in the override document.
struct Flags {
  std::string config;
  json overrides = json::object();
  std::vector<std::function<void()>> collect;

  template <class T>
  void bind(CLI::App* app, const std::string& flag, const std::string& section, const std::string& key,
            const std::string& help) {
    auto holder = std::make_shared<T>();
    auto* opt = app->add_option(flag, *holder, help);
    collect.push_back([this, opt, holder, section, key] {
      if (opt->count() > 0) overrides[section][key] = *holder;
    });
  }
};

void add_config(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "Run-config document (TOML, or JSON by extension)");
}

void add_path(CLI::App* app, Flags& f, const std::string& flag, const std::string& key, const std::string& help,
              bool required) {
  f.bind<std::string>(app, flag, "io", key, help);
  if (required) app->get_option(flag)->required();
}

int run_stage(const std::string& stage, const Flags& f) {
  const json doc = f.config.empty() ? json::object() : sabergen::load_config_document(f.config);
  const auto cfg = sabergen::pipeline::resolve(stage, doc, f.overrides);
  sabergen::pipeline::run(cfg, &std::cerr);
  const fs::path out = cfg.at("io").at("out").get<std::string>();
  std::cerr << stage << ": wrote " << sabergen::pipeline::manifest_path(stage, out).string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale baseball world model: pitch events to tokens, a small decoder-only "
               "transformer, constrained decoding, and an evaluation report."};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Upper bound on BLAS worker threads")->check(CLI::PositiveNumber);

  std::map<std::string, Flags> flags;

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic corpus (train.jsonl, eval.jsonl, statcast.csv)");
  add_config(sim, flags["simulate"]);
  add_path(sim, flags["simulate"], "--out", "out", "Output directory", true);
  flags["simulate"].bind<std::uint64_t>(sim, "--seed", "simulator", "seed", "Simulator seed");
  flags["simulate"].bind<int>(sim, "--games", "simulator", "games", "Number of games");

  auto* ing = app.add_subcommand("ingest", "Parse a Statcast-style CSV into train/eval game files");
  add_config(ing, flags["ingest"]);
  add_path(ing, flags["ingest"], "--csv", "csv", "Input CSV", true);
  add_path(ing, flags["ingest"], "--out", "out", "Output directory", true);

  auto* ser = app.add_subcommand("serialize", "Serialize train/eval game files to token files and vocab.txt");
  add_config(ser, flags["serialize"]);
  add_path(ser, flags["serialize"], "--games", "games", "Directory holding train.jsonl and eval.jsonl", true);
  add_path(ser, flags["serialize"], "--out", "out", "Output directory", true);

  auto* tr = app.add_subcommand("train", "Train the world model on a serialized corpus");
  add_config(tr, flags["train"]);
  add_path(tr, flags["train"], "--corpus", "corpus", "Directory holding train.tok and vocab.txt", true);
  add_path(tr, flags["train"], "--out", "out", "Output directory (model.ckpt, loss.tsv)", true);
  flags["train"].bind<int>(tr, "--steps", "train", "steps", "Optimizer steps");
  flags["train"].bind<int>(tr, "--batch-size", "train", "batch_size", "Sequences per step");
  flags["train"].bind<double>(tr, "--lr", "train", "learning_rate", "Peak learning rate");
  flags["train"].bind<std::uint64_t>(tr, "--seed", "train", "seed", "Initialization and shuffling seed");
  flags["train"].bind<int>(tr, "--checkpoint-interval", "train", "checkpoint_interval",
                           "Write a checkpoint every N steps (0 = only the final model)");
  flags["train"].bind<int>(tr, "--context-length", "model", "context_length", "Context length T");
  flags["train"].bind<int>(tr, "--layers", "model", "layers", "Transformer blocks");
  flags["train"].bind<int>(tr, "--dim", "model", "model_dim", "Model width");
  flags["train"].bind<int>(tr, "--heads", "model", "heads", "Attention heads");
  flags["train"].bind<std::string>(tr, "--positions", "model", "positions", "learned | rotary");

  auto* pr = app.add_subcommand("predict", "Constrained-decoding predictions for one task, written as a dump");
  add_config(pr, flags["predict"]);
  add_path(pr, flags["predict"], "--model", "model", "Checkpoint", true);
  add_path(pr, flags["predict"], "--games", "games", "Game file, or a directory holding eval.jsonl", true);
  add_path(pr, flags["predict"], "--out", "out", "Prediction dump (TSV)", true);
  flags["predict"].bind<std::string>(pr, "--task", "predict", "task",
                                     "pitch_type_binary | pitch_type_multi | swing");
  flags["predict"].bind<int>(pr, "--max-games", "predict", "max_games", "Use only the first N games (0 = all)");

  auto* ev = app.add_subcommand("eval", "Evaluate prediction dumps and write a report directory");
  add_config(ev, flags["eval"]);
  std::vector<std::string> dumps;
  ev->add_option("--dump", dumps, "Prediction dump; repeat for several tasks")->required();
  add_path(ev, flags["eval"], "--out", "out", "Report directory", true);
  flags["eval"].bind<std::string>(ev, "--task", "eval", "task", "Require every dump to hold this task");

  auto* rep = app.add_subcommand("report", "Render a report directory as plain text");
  add_config(rep, flags["report"]);
  add_path(rep, flags["report"], "--in", "in", "Report directory written by eval", true);
  add_path(rep, flags["report"], "--out", "out", "Text file to write", true);

  auto* rp = app.add_subcommand("replay", "Re-run a stage from its manifest and compare outputs");
  std::string manifest_file, replay_out;
  rp->add_option("--manifest", manifest_file, "Manifest written by an earlier run")->required();
  rp->add_option("--out", replay_out, "Write outputs here instead of the recorded location");

  CLI11_PARSE(app, argc, argv);
  sabergen::linalg::set_threads(threads);

  std::string stage = "sabergen";
  try {
    if (rp->parsed()) {
      stage = "replay";
      const auto recorded = sabergen::read_manifest(manifest_file);
      const auto r = sabergen::pipeline::replay(recorded, replay_out, &std::cerr);
      for (const auto& name : r.mismatched) std::cout << "differs: " << name << '\n';
      std::cout << (r.mismatched.empty() ? "identical" : "mismatch") << ": " << r.manifest.outputs.size()
                << " outputs\n";
      return r.mismatched.empty() ? kOk : kMismatch;
    }
    for (auto* sub : app.get_subcommands()) {
      stage = sub->get_name();
      auto& f = flags[stage];
      for (const auto& c : f.collect) c();
      if (stage == "eval") f.overrides["io"]["dumps"] = dumps;
      return run_stage(stage, f);
    }
  } catch (const sabergen::ConfigError& e) {
    std::cerr << stage << ": config error: " << e.what() << '\n';
    return kConfig;
  } catch (const sabergen::DataError& e) {
    std::cerr << stage << ": data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << stage << ": internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
