#pragma once

// Pipeline stages behind the command-line tool. Each stage takes a fully
// resolved config (document sections plus an "io" section of paths), writes
// its outputs and exactly one manifest, and returns that manifest.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sabergen/codec.hpp"
#include "sabergen/errors.hpp"
#include "sabergen/evaluation.hpp"
#include "sabergen/game_io.hpp"
#include "sabergen/ingestion.hpp"
#include "sabergen/manifest.hpp"
#include "sabergen/predictor.hpp"
#include "sabergen/simulator.hpp"
#include "sabergen/training.hpp"

namespace sabergen::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

inline const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names = {"simulate", "ingest",  "serialize", "train",
                                                 "predict",  "eval",    "report"};
  return names;
}

namespace detail {

inline void check_keys(const json& section, std::initializer_list<std::string_view> allowed,
                       const std::string& where) {
  if (!section.is_object()) throw ConfigError(where + ": expected a table");
  for (const auto& [key, value] : section.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

inline json section(const json& doc, const std::string& name) {
  return doc.contains(name) ? doc.at(name) : json::object();
}

inline std::string path_of(const json& cfg, const std::string& key) {
  const auto& io = cfg.at("io");
  if (!io.contains(key) || !io.at(key).is_string() || io.at(key).get<std::string>().empty()) {
    throw ConfigError(cfg.at("subcommand").get<std::string>() + ": missing path '" + key + "'");
  }
  return io.at(key).get<std::string>();
}

inline void require_file(const fs::path& p, const std::string& stage) {
  if (!fs::is_regular_file(p)) throw ConfigError(stage + ": input not found: " + p.string());
}

inline void make_dir(const fs::path& p, const std::string& stage) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw IoError(stage + ": cannot create " + p.string());
}

inline bool is_dir_output(const std::string& stage) { return stage != "predict" && stage != "report"; }

}  // namespace detail

inline fs::path manifest_path(const std::string& stage, const fs::path& out) {
  return detail::is_dir_output(stage) ? out / "manifest.json" : fs::path(out.string() + ".manifest.json");
}

inline std::map<std::string, std::string> output_hashes(const std::string& stage, const fs::path& out) {
  if (!detail::is_dir_output(stage)) {
    if (!fs::is_regular_file(out)) return {};
    return {{"output", sha256_file(out)}};
  }
  auto h = hash_tree(out);
  h.erase("manifest.json");
  return h;
}

// Merges document sections with flag overrides (same shape as the document)
// and normalizes every section through its typed form, so the result lists
// every effective value.
inline json resolve(const std::string& stage, const json& doc, const json& overrides) {
  if (std::find(stage_names().begin(), stage_names().end(), stage) == stage_names().end()) {
    throw ConfigError("unknown subcommand '" + stage + "'");
  }
  detail::check_keys(doc, {"simulator", "split", "model", "train", "predict", "eval"}, "config");
  json merged = doc;
  merged.merge_patch(overrides);
  // every section is checked, whichever stage reads it
  const auto sim_doc = detail::section(merged, "simulator");
  detail::check_keys(sim_doc, {"games", "seed", "innings", "postseason_fraction", "snap_locations", "start_date",
                               "home_team", "away_team", "venue", "pitchers", "batters", "physics", "outcomes"},
                     "simulator");
  const auto split_doc = detail::section(merged, "split");
  detail::check_keys(split_doc, {"train_from", "train_to", "eval_from", "eval_to"}, "split");
  const auto model_doc = detail::section(merged, "model");
  detail::check_keys(model_doc,
                     {"context_length", "layers", "model_dim", "heads", "mlp_ratio", "dropout", "positions"}, "model");
  const auto train_doc = detail::section(merged, "train");
  detail::check_keys(train_doc, {"batch_size", "steps", "learning_rate", "beta1", "beta2", "epsilon", "weight_decay",
                                 "grad_clip", "warmup_steps", "cosine_decay", "min_lr_fraction", "seed",
                                 "checkpoint_interval"},
                     "train");
  const auto predict_doc = detail::section(merged, "predict");
  detail::check_keys(predict_doc, {"task", "max_games"}, "predict");
  const auto eval_doc = detail::section(merged, "eval");
  detail::check_keys(eval_doc, {"task"}, "eval");

  json cfg = {{"subcommand", stage}, {"io", detail::section(merged, "io")}};
  try {
    if (stage == "simulate") {
      // the default two-pitcher corpus, patched by whatever the document sets
      json sim = simulator_config_to_json(default_simulator_config());
      sim.merge_patch(sim_doc);
      cfg["simulator"] = simulator_config_to_json(simulator_config_from_json(sim));
    } else if (stage == "ingest") {
      cfg["split"] = split_doc;
    } else if (stage == "train") {
      json mj = model_doc.get<ModelConfig>();
      mj.erase("vocab_size");  // taken from the corpus
      cfg["model"] = mj;
      json tj = train_doc.get<TrainConfig>();
      tj.erase("checkpoint_dir");
      cfg["train"] = tj;
    } else if (stage == "predict") {
      const auto task = predict_doc.value("task", std::string("pitch_type_multi"));
      task_from_name(task);
      const int max_games = predict_doc.value("max_games", 0);
      if (max_games < 0) throw ConfigError("predict: max_games must be >= 0");
      cfg["predict"] = {{"task", task}, {"max_games", max_games}};
    } else if (stage == "eval") {
      if (eval_doc.contains("task")) task_from_name(eval_doc["task"].get<std::string>());
      cfg["eval"] = {{"task", eval_doc.value("task", std::string{})}};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(stage + ": " + e.what());
  }
  return cfg;
}

namespace detail {

inline RunManifest begin(const json& cfg) {
  RunManifest m;
  m.subcommand = cfg.at("subcommand").get<std::string>();
  m.config = cfg;
  m.started = utc_timestamp();
  return m;
}

inline RunManifest finish(RunManifest m, const fs::path& out) {
  m.outputs = output_hashes(m.subcommand, out);
  m.finished = utc_timestamp();
  write_manifest(manifest_path(m.subcommand, out), m);
  return m;
}

inline fs::path games_file(const fs::path& p, const std::string& which) {
  return fs::is_directory(p) ? p / (which + ".jsonl") : p;
}

inline RunManifest run_simulate(const json& cfg) {
  auto m = begin(cfg);
  const fs::path out = path_of(cfg, "out");
  const auto sim = simulator_config_from_json(cfg.at("simulator"));
  m.seeds["simulator"] = sim.seed;
  const auto games = simulate(sim);
  const auto parts = split(games);
  make_dir(out, "simulate");
  write_games_jsonl(out / "train.jsonl", parts.train);
  write_games_jsonl(out / "eval.jsonl", parts.eval);
  write_statcast_csv(out / "statcast.csv", games);
  m.extra = {{"games", games.size()}, {"train_games", parts.train.size()}, {"eval_games", parts.eval.size()}};
  return finish(std::move(m), out);
}

inline RunManifest run_ingest(const json& cfg) {
  auto m = begin(cfg);
  const fs::path csv = path_of(cfg, "csv");
  const fs::path out = path_of(cfg, "out");
  require_file(csv, "ingest");
  m.inputs[csv.string()] = sha256_file(csv);
  const auto& s = cfg.at("split");
  auto opt = [&](const char* k) -> std::optional<std::string> {
    if (!s.contains(k)) return std::nullopt;
    return s.at(k).get<std::string>();
  };
  SplitSpec spec{{opt("train_from"), opt("train_to")}, {opt("eval_from"), opt("eval_to")}};
  const auto result = ingest_csv(csv);
  const auto parts = split(result.games, spec);
  make_dir(out, "ingest");
  write_games_jsonl(out / "train.jsonl", parts.train);
  write_games_jsonl(out / "eval.jsonl", parts.eval);
  {
    std::ofstream os(out / "ingest_report.json");
    os << json(result.report).dump(2) << '\n';
  }
  m.extra = {{"report", result.report}, {"train_games", parts.train.size()}, {"eval_games", parts.eval.size()}};
  return finish(std::move(m), out);
}

inline RunManifest run_serialize(const json& cfg) {
  auto m = begin(cfg);
  const fs::path in = path_of(cfg, "games");
  const fs::path out = path_of(cfg, "out");
  const auto q = default_quantization();
  const auto vocab = build_vocab(q);
  std::vector<std::pair<std::string, std::vector<TokenSequence>>> files;
  for (const std::string which : {"train", "eval"}) {
    const auto path = in / (which + ".jsonl");
    require_file(path, "serialize");
    m.inputs[path.string()] = sha256_file(path);
    std::vector<TokenSequence> seqs;
    for (const auto& g : read_games_jsonl(path)) {
      try {
        seqs.push_back(serialize(g, vocab, q));
      } catch (const DataError& e) {
        throw DataError("serialize: " + path.string() + ": game " + g.context.game_id + ": " + e.what());
      }
    }
    files.emplace_back(which, std::move(seqs));
  }
  make_dir(out, "serialize");
  std::size_t tokens = 0;
  for (const auto& [which, seqs] : files) {
    write_token_file(out / (which + ".tok"), seqs);
    for (const auto& s : seqs) tokens += s.tokens.size();
  }
  write_vocab_file(out / "vocab.txt", vocab);
  m.extra = {{"vocab_size", vocab.size()}, {"tokens", tokens}};
  return finish(std::move(m), out);
}

inline RunManifest run_train(const json& cfg, std::ostream* log) {
  auto m = begin(cfg);
  const fs::path corpus = path_of(cfg, "corpus");
  const fs::path out = path_of(cfg, "out");
  const auto tok_path = corpus / "train.tok";
  const auto vocab_path = corpus / "vocab.txt";
  require_file(tok_path, "train");
  require_file(vocab_path, "train");
  const auto vocab = read_vocab_file(vocab_path);
  auto model = cfg.at("model").get<ModelConfig>();
  model.vocab_size = static_cast<int>(vocab.size());
  model.validate();
  auto tc = cfg.at("train").get<TrainConfig>();
  tc.checkpoint_dir = tc.checkpoint_interval > 0 ? out / "checkpoints" : fs::path{};
  tc.validate();
  const auto seqs = read_token_file(tok_path);
  const auto examples = make_examples(std::span<const std::vector<TokenId>>(seqs),
                                      static_cast<std::size_t>(model.context_length));
  if (examples.empty()) throw ConfigError("train: corpus " + tok_path.string() + " is empty");
  m.inputs[tok_path.string()] = sha256_file(tok_path);
  m.inputs[vocab_path.string()] = sha256_file(vocab_path);
  m.seeds["train"] = tc.seed;
  make_dir(out, "train");
  if (!tc.checkpoint_dir.empty()) make_dir(tc.checkpoint_dir, "train");
  const auto result = train<float>(examples, model, tc, [&](const StepStats& s) {
    if (log && (s.step % 50 == 0 || s.step + 1 == tc.steps)) {
      *log << "step " << s.step << " loss " << std::fixed << std::setprecision(4) << s.loss << " lr "
           << std::scientific << std::setprecision(2) << s.learning_rate << std::defaultfloat << '\n';
    }
  });
  save_checkpoint(out / "model.ckpt", result.params);
  {
    std::ofstream os(out / "loss.tsv");
    os << "step\tloss\n";
    char buf[64];
    for (std::size_t i = 0; i < result.loss_curve.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu\t%.6f\n", i, result.loss_curve[i]);
      os << buf;
    }
  }
  m.extra = {{"vocab_sha256", m.inputs[vocab_path.string()]},
             {"corpus_sha256", m.inputs[tok_path.string()]},
             {"examples", examples.size()},
             {"final_loss", result.loss_curve.empty() ? 0.0 : result.loss_curve.back()},
             {"loss_curve", result.loss_curve}};
  return finish(std::move(m), out);
}

inline RunManifest run_predict(const json& cfg) {
  auto m = begin(cfg);
  const fs::path model_path = path_of(cfg, "model");
  const fs::path games_path = games_file(path_of(cfg, "games"), "eval");
  const fs::path out = path_of(cfg, "out");
  require_file(model_path, "predict");
  require_file(games_path, "predict");
  m.inputs[model_path.string()] = sha256_file(model_path);
  m.inputs[games_path.string()] = sha256_file(games_path);
  const auto q = default_quantization();
  const auto vocab = build_vocab(q);
  const auto params = load_checkpoint<float>(model_path);
  if (params.config.vocab_size != static_cast<int>(vocab.size())) {
    throw ConfigError("predict: checkpoint vocabulary size " + std::to_string(params.config.vocab_size) +
                      " does not match " + std::to_string(vocab.size()));
  }
  auto games = read_games_jsonl(games_path);
  const int max_games = cfg.at("predict").at("max_games").get<int>();
  if (max_games > 0 && games.size() > static_cast<std::size_t>(max_games)) {
    games.resize(static_cast<std::size_t>(max_games));
  }
  const auto task = task_from_name(cfg.at("predict").at("task").get<std::string>());
  const auto instances = build_instances(games, task, vocab, q, params.config.context_length);
  const auto answers = answer_set(task, vocab);
  const auto preds = predict_batch(params, std::span<const PredictionInstance>(instances), answers);
  std::vector<PredictionRecord> records;
  records.reserve(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) records.push_back(make_record(instances[i], preds[i], answers));
  if (out.has_parent_path()) make_dir(out.parent_path(), "predict");
  write_dump(out, records);
  m.extra = {{"instances", records.size()}, {"games", games.size()}};
  return finish(std::move(m), out);
}

inline RunManifest run_eval(const json& cfg) {
  auto m = begin(cfg);
  const fs::path out = path_of(cfg, "out");
  const auto& dumps = cfg.at("io").at("dumps");
  if (!dumps.is_array() || dumps.empty()) throw ConfigError("eval: no dump given");
  const auto want = cfg.at("eval").at("task").get<std::string>();
  std::vector<TaskReport> reports;
  for (const auto& d : dumps) {
    const fs::path p = d.get<std::string>();
    require_file(p, "eval");
    m.inputs[p.string()] = sha256_file(p);
    const auto records = read_dump(p);
    if (records.empty()) throw DataError("eval: dump " + p.string() + " has no records");
    auto report = evaluate(records);
    if (!want.empty() && task_name(report.task) != want) {
      throw DataError("eval: dump " + p.string() + " holds task " + std::string(task_name(report.task)) +
                      ", expected " + want);
    }
    reports.push_back(std::move(report));
  }
  emit_report(reports, out);
  return finish(std::move(m), out);
}

// Plain-text digest of a report directory.
inline RunManifest run_report(const json& cfg) {
  auto m = begin(cfg);
  const fs::path in = path_of(cfg, "in");
  const fs::path out = path_of(cfg, "out");
  require_file(in / "summary.tsv", "report");
  std::ostringstream text;
  std::vector<fs::path> metric_files;
  for (const auto& e : fs::directory_iterator(in)) {
    const auto name = e.path().filename().string();
    if (name.starts_with("metrics.") && name.ends_with(".tsv")) metric_files.push_back(e.path());
  }
  std::sort(metric_files.begin(), metric_files.end());
  auto rows = [](const fs::path& p) {
    std::ifstream is(p);
    std::vector<std::vector<std::string>> r;
    for (std::string line; std::getline(is, line);) {
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> cells;
      std::stringstream ss(line);
      for (std::string c; std::getline(ss, c, '\t');) cells.push_back(c);
      r.push_back(std::move(cells));
    }
    return r;
  };
  for (const auto& f : metric_files) {
    m.inputs[f.string()] = sha256_file(f);
    const auto name = f.filename().string();
    text << name.substr(8, name.size() - 12) << '\n';
    for (const auto& r : rows(f)) {
      if (r.size() < 3 || r[0] == "metric") continue;
      if (r[0] == "instances" || r[0] == "accuracy" || r[0] == "macro_f1" || r[0].ends_with("_accuracy")) {
        text << "  " << std::left << std::setw(14) << r[0] << r[2] << '\n';
      }
    }
  }
  m.inputs[(in / "summary.tsv").string()] = sha256_file(in / "summary.tsv");
  text << "\nreference figures (not comparable at desk scale)\n";
  for (const auto& r : rows(in / "summary.tsv")) {
    if (r.size() < 4 || r[0] == "item") continue;
    text << "  " << std::left << std::setw(30) << r[0] << std::setw(32) << r[1] << std::setw(10) << r[2] << r[3]
         << '\n';
  }
  if (out.has_parent_path()) make_dir(out.parent_path(), "report");
  {
    std::ofstream os(out);
    if (!os) throw IoError("report: cannot write " + out.string());
    os << text.str();
  }
  return finish(std::move(m), out);
}

}  // namespace detail

inline RunManifest run(const json& cfg, std::ostream* log = nullptr) {
  const auto stage = cfg.at("subcommand").get<std::string>();
  if (stage == "simulate") return detail::run_simulate(cfg);
  if (stage == "ingest") return detail::run_ingest(cfg);
  if (stage == "serialize") return detail::run_serialize(cfg);
  if (stage == "train") return detail::run_train(cfg, log);
  if (stage == "predict") return detail::run_predict(cfg);
  if (stage == "eval") return detail::run_eval(cfg);
  if (stage == "report") return detail::run_report(cfg);
  throw ConfigError("unknown subcommand '" + stage + "'");
}

struct ReplayResult {
  RunManifest manifest;
  std::vector<std::string> mismatched;  // outputs whose hashes differ or are missing
};

// Re-runs a stage from its manifest, writing to `out` (or the recorded
// output when empty), and compares output hashes with the recorded ones.
inline ReplayResult replay(const RunManifest& recorded, const fs::path& out, std::ostream* log = nullptr) {
  json cfg = recorded.config;
  if (!out.empty()) cfg["io"]["out"] = out.string();
  ReplayResult r{run(cfg, log), {}};
  for (const auto& [name, hash] : recorded.outputs) {
    const auto it = r.manifest.outputs.find(name);
    if (it == r.manifest.outputs.end() || it->second != hash) r.mismatched.push_back(name);
  }
  for (const auto& [name, hash] : r.manifest.outputs) {
    if (!recorded.outputs.contains(name)) r.mismatched.push_back(name);
  }
  return r;
}

}  // namespace sabergen::pipeline
