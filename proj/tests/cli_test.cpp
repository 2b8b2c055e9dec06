#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "sabergen/manifest.hpp"
#include "sabergen/pipeline.hpp"

namespace sabergen {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("sabergen_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int sh(const std::string& args, std::string* out = nullptr, const fs::path& dir = fs::temp_directory_path()) {
  const auto log = dir / "cli_stdout.txt";
  const std::string cmd = std::string(SABERGEN_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (out) *out = read_file_bytes(log);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const std::string kFixture = std::string(SABERGEN_CONFIG_DIR) + "/fixture.toml";

TEST(CliTest, TrainOnMissingCorpusIsConfigErrorWithoutCheckpoint) {
  const auto d = scratch("missing");
  std::string out;
  EXPECT_EQ(sh("train --corpus " + (d / "nope").string() + " --out " + (d / "model").string(), &out), 2);
  EXPECT_NE(out.find("train"), std::string::npos);
  EXPECT_NE(out.find("nope"), std::string::npos);
  EXPECT_FALSE(fs::exists(d / "model"));
}

TEST(CliTest, EmptyDumpIsDataError) {
  const auto d = scratch("empty");
  { std::ofstream(d / "empty.tsv"); }
  EXPECT_EQ(sh("eval --dump " + (d / "empty.tsv").string() + " --out " + (d / "r").string()), 3);
  // header only: no records
  {
    std::ofstream os(d / "header.tsv");
    os << kDumpHeader << '\n';
  }
  EXPECT_EQ(sh("eval --dump " + (d / "header.tsv").string() + " --out " + (d / "r").string()), 3);
}

TEST(CliTest, ConfigErrors) {
  const auto d = scratch("config");
  {
    std::ofstream os(d / "typo.toml");
    os << "[train]\nstepz = 3\n";
  }
  {
    std::ofstream os(d / "broken.toml");
    os << "[train\nsteps = 3\n";
  }
  std::string out;
  EXPECT_EQ(sh("simulate --config " + (d / "typo.toml").string() + " --out " + (d / "s").string(), &out), 2);
  EXPECT_NE(out.find("stepz"), std::string::npos);
  EXPECT_EQ(sh("simulate --config " + (d / "broken.toml").string() + " --out " + (d / "s").string(), &out), 2);
  EXPECT_NE(out.find("broken.toml"), std::string::npos);
  EXPECT_EQ(sh("simulate --config " + (d / "absent.toml").string() + " --out " + (d / "s").string()), 2);
  EXPECT_EQ(sh("simulate --games -1 --out " + (d / "s").string()), 2);
}

TEST(CliTest, HelpDocumentsEveryFlag) {
  std::string out;
  ASSERT_EQ(sh("train --help", &out), 0);
  for (const char* flag : {"--config", "--corpus", "--out", "--steps", "--batch-size", "--lr", "--seed",
                           "--checkpoint-interval", "--context-length", "--layers", "--dim", "--heads",
                           "--positions"}) {
    EXPECT_NE(out.find(flag), std::string::npos) << flag;
  }
  ASSERT_EQ(sh("--help", &out), 0);
  for (const auto& stage : pipeline::stage_names()) EXPECT_NE(out.find(stage), std::string::npos) << stage;
  EXPECT_NE(out.find("replay"), std::string::npos);
  EXPECT_NE(out.find("--threads"), std::string::npos);
}

// Each stage consumes the previous stage's output unmodified, writes one
// manifest, and replays to identical outputs.
TEST(CliTest, FixturePipelineComposesAndReplays) {
  const auto d = scratch("pipeline");
  const auto p = [&](const char* s) { return (d / s).string(); };
  const std::string c = " --config " + kFixture;
  ASSERT_EQ(sh("simulate" + c + " --out " + p("sim")), 0);
  ASSERT_EQ(sh("serialize --games " + p("sim") + " --out " + p("corpus")), 0);
  ASSERT_EQ(sh("train" + c + " --steps 4 --corpus " + p("corpus") + " --out " + p("model")), 0);
  ASSERT_EQ(sh("predict" + c + " --model " + p("model/model.ckpt") + " --games " + p("sim") +
               " --task swing --out " + p("swing.tsv")),
            0);
  ASSERT_EQ(sh("predict" + c + " --model " + p("model/model.ckpt") + " --games " + p("sim") +
               " --task pitch_type_binary --out " + p("binary.tsv")),
            0);
  ASSERT_EQ(sh("eval --dump " + p("swing.tsv") + " --dump " + p("binary.tsv") + " --out " + p("report")), 0);
  ASSERT_EQ(sh("report --in " + p("report") + " --out " + p("report.txt")), 0);
  ASSERT_EQ(sh("ingest --csv " + p("sim/statcast.csv") + " --out " + p("ingested")), 0);

  EXPECT_TRUE(fs::exists(d / "report/metrics.swing.tsv"));
  EXPECT_TRUE(fs::exists(d / "report/metrics.pitch_type_binary.tsv"));
  EXPECT_TRUE(fs::exists(d / "report/confusion.svg"));
  // the CSV carries everything but the game id and venue
  const auto simulated = read_games_jsonl(d / "sim/train.jsonl");
  auto ingested = read_games_jsonl(d / "ingested/train.jsonl");
  ASSERT_EQ(simulated.size(), ingested.size());
  for (std::size_t i = 0; i < simulated.size(); ++i) {
    ingested[i].context.game_id = simulated[i].context.game_id;
    ingested[i].context.venue = simulated[i].context.venue;
    EXPECT_TRUE(ingested[i] == simulated[i]) << i;
  }

  const std::vector<fs::path> manifests = {d / "sim/manifest.json",    d / "corpus/manifest.json",
                                           d / "model/manifest.json",  d / "swing.tsv.manifest.json",
                                           d / "report/manifest.json", d / "report.txt.manifest.json"};
  for (const auto& m : manifests) {
    ASSERT_TRUE(fs::exists(m)) << m;
    const auto rec = read_manifest(m);
    EXPECT_FALSE(rec.outputs.empty()) << m;
    std::string out;
    EXPECT_EQ(sh("replay --manifest " + m.string() + " --out " + (d / ("replay_" + rec.subcommand)).string(), &out),
              0)
        << out;
    EXPECT_NE(out.find("identical"), std::string::npos) << out;
  }
  const auto train = read_manifest(d / "model/manifest.json");
  EXPECT_EQ(train.config["train"]["steps"], 4);
  EXPECT_EQ(train.extra["loss_curve"].size(), 4u);
  EXPECT_EQ(train.extra["vocab_sha256"], sha256_file(d / "corpus/vocab.txt"));
}

TEST(CliTest, ReplayDetectsChangedOutputs) {
  const auto d = scratch("tamper");
  ASSERT_EQ(sh("simulate --config " + kFixture + " --out " + (d / "sim").string()), 0);
  auto m = read_manifest(d / "sim/manifest.json");
  m.outputs["train.jsonl"] = std::string(64, '0');
  write_manifest(d / "tampered.json", m);
  std::string out;
  EXPECT_EQ(sh("replay --manifest " + (d / "tampered.json").string() + " --out " + (d / "again").string(), &out), 1);
  EXPECT_NE(out.find("differs: train.jsonl"), std::string::npos);
}

TEST(ManifestTest, Sha256KnownAnswer) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ManifestTest, TomlAndJsonDocumentsAgree) {
  const auto d = scratch("docs");
  {
    std::ofstream os(d / "a.toml");
    os << "[train]\nsteps = 5\nlearning_rate = 0.002\ncosine_decay = true\n[predict]\ntask = \"swing\"\n";
  }
  {
    std::ofstream os(d / "a.json");
    os << R"({"train": {"steps": 5, "learning_rate": 0.002, "cosine_decay": true}, "predict": {"task": "swing"}})";
  }
  EXPECT_EQ(load_config_document(d / "a.toml"), load_config_document(d / "a.json"));
}

TEST(ManifestTest, FlagsOverrideDocument) {
  const nlohmann::json doc = {{"train", {{"steps", 5}, {"seed", 9}}}};
  const nlohmann::json flags = {{"train", {{"steps", 7}}}, {"io", {{"corpus", "c"}, {"out", "o"}}}};
  const auto cfg = pipeline::resolve("train", doc, flags);
  EXPECT_EQ(cfg["train"]["steps"], 7);
  EXPECT_EQ(cfg["train"]["seed"], 9);
  EXPECT_EQ(cfg["train"]["batch_size"], TrainConfig{}.batch_size);
  EXPECT_EQ(cfg["model"]["layers"], ModelConfig{}.layers);
  EXPECT_THROW(pipeline::resolve("train", {{"bogus", {}}}, {}), ConfigError);
  EXPECT_THROW(pipeline::resolve("nope", {}, {}), ConfigError);
}

}  // namespace
}  // namespace sabergen
