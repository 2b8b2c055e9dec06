#pragma once

// Pitch-type and swing prediction as masked next-token decoding.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sabergen/codec.hpp"
#include "sabergen/errors.hpp"
#include "sabergen/event_model.hpp"
#include "sabergen/world_model.hpp"

namespace sabergen {

enum class PredictionTask : std::uint8_t { PitchTypeBinary, PitchTypeMulti, SwingDecision };

inline constexpr std::array<std::string_view, 3> kTaskNames = {"pitch_type_binary",
                                                               "pitch_type_multi", "swing"};

inline std::string_view task_name(PredictionTask t) {
  return kTaskNames[static_cast<std::size_t>(t)];
}

inline PredictionTask task_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kTaskNames.size(); ++i) {
    if (kTaskNames[i] == name) return static_cast<PredictionTask>(i);
  }
  throw ConfigError("unknown task '" + std::string(name) +
                    "' (expected pitch_type_binary, pitch_type_multi or swing)");
}

inline bool is_pitch_type_task(PredictionTask t) { return t != PredictionTask::SwingDecision; }

inline constexpr std::string_view kFastballLabel = "FB";
inline constexpr std::string_view kNonFastballLabel = "NF";
inline constexpr std::string_view kSwingLabel = "swing";
inline constexpr std::string_view kTakeLabel = "take";

// Admissible answer tokens and the label each one votes for. Several tokens
// may share a label (the binary task pools the pitch-type tokens).
struct AnswerSet {
  std::vector<std::string> labels;
  std::vector<TokenId> tokens;
  std::vector<std::size_t> label_of;  // parallel to tokens

  void validate(std::size_t vocab_size) const {
    if (tokens.empty() || labels.empty()) throw ConfigError("answer set is empty");
    if (label_of.size() != tokens.size()) throw ConfigError("answer set is malformed");
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i] >= vocab_size || tokens[i] == Vocabulary::special(Special::Unk)) {
        throw ConfigError("answer token outside the vocabulary");
      }
      if (label_of[i] >= labels.size()) throw ConfigError("answer set is malformed");
    }
  }
};

inline std::string gold_pitch_label(PredictionTask task, PitchType t) {
  if (task == PredictionTask::PitchTypeBinary) {
    return std::string(is_fastball(t) ? kFastballLabel : kNonFastballLabel);
  }
  return std::string(pitch_code(t));
}

inline AnswerSet answer_set(PredictionTask task, const Vocabulary& vocab) {
  AnswerSet a;
  switch (task) {
    case PredictionTask::PitchTypeMulti:
      for (std::size_t i = 0; i < kPitchTypeCount; ++i) {
        a.labels.emplace_back(kPitchCodes[i]);
        a.tokens.push_back(vocab.pitch_type(kAllPitchTypes[i]));
        a.label_of.push_back(i);
      }
      break;
    case PredictionTask::PitchTypeBinary:
      a.labels = {std::string(kFastballLabel), std::string(kNonFastballLabel)};
      for (auto t : kAllPitchTypes) {
        a.tokens.push_back(vocab.pitch_type(t));
        a.label_of.push_back(is_fastball(t) ? 0 : 1);
      }
      break;
    case PredictionTask::SwingDecision:
      a.labels = {std::string(kSwingLabel), std::string(kTakeLabel)};
      a.tokens = {vocab.swing(true), vocab.swing(false)};
      a.label_of = {0, 1};
      break;
  }
  a.validate(vocab.size());
  return a;
}

struct PredictionInstance {
  std::string game_id;
  int pa_id = 0;
  int pitch_number = 0;
  PredictionTask task = PredictionTask::PitchTypeMulti;
  std::vector<TokenId> context;
  std::string gold;
  std::int64_t pitcher_id = 0;
  int balls = 0;
  int strikes = 0;
  std::optional<bool> in_zone;       // swing task
  std::optional<int> arsenal_size;   // pitch-type tasks
};

// Distinct pitch types each pitcher throws at least `min_count` times.
inline std::map<std::int64_t, int> arsenal_sizes(std::span<const GameRecord> games,
                                                 int min_count = 5) {
  std::map<std::int64_t, std::array<int, kPitchTypeCount>> counts;
  for (const auto& g : games) {
    for (const auto& pa : g.plate_appearances) {
      auto& c = counts.try_emplace(pa.pitcher_id).first->second;
      for (const auto& p : pa.pitches) ++c[static_cast<std::size_t>(p.pitch_type)];
    }
  }
  std::map<std::int64_t, int> out;
  for (const auto& [id, c] : counts) {
    out[id] = static_cast<int>(std::count_if(c.begin(), c.end(), [&](int n) { return n >= min_count; }));
  }
  return out;
}

// Context for an answer at `cut`: the last `context_length` tokens before
// it. When the current plate appearance alone is longer than that, its
// header is kept and the oldest pitches of the plate appearance are dropped.
inline std::vector<TokenId> truncate_context(std::span<const TokenId> tokens, std::size_t cut,
                                             std::size_t pa_start, std::size_t context_length) {
  if (cut <= context_length) return {tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(cut)};
  if (cut - pa_start <= context_length) {
    return {tokens.begin() + static_cast<std::ptrdiff_t>(cut - context_length),
            tokens.begin() + static_cast<std::ptrdiff_t>(cut)};
  }
  const std::size_t header = kTokensPerPlateAppearance - 2;
  if (context_length <= header) {
    throw ConfigError("context_length too short to hold a plate appearance header");
  }
  std::vector<TokenId> out(tokens.begin() + static_cast<std::ptrdiff_t>(pa_start),
                           tokens.begin() + static_cast<std::ptrdiff_t>(pa_start + header));
  out.insert(out.end(), tokens.begin() + static_cast<std::ptrdiff_t>(cut - (context_length - header)),
             tokens.begin() + static_cast<std::ptrdiff_t>(cut));
  return out;
}

// One instance per pitch. Pitch-type contexts stop right after the target's
// pitch-type tag; swing contexts stop right after its swing tag.
inline std::vector<PredictionInstance> build_instances(std::span<const GameRecord> games,
                                                       PredictionTask task,
                                                       const Vocabulary& vocab,
                                                       const QuantizationSpec& qspec,
                                                       int context_length) {
  const auto arsenal = arsenal_sizes(games);
  std::vector<PredictionInstance> out;
  for (const auto& g : games) {
    const auto ann = serialize_annotated(g, vocab, qspec);
    for (const auto& a : ann.anchors) {
      const auto& pa = g.plate_appearances[a.pa_index];
      const auto& p = pa.pitches[a.pitch_index];
      PredictionInstance inst;
      inst.game_id = g.context.game_id;
      inst.pa_id = pa.pa_id;
      inst.pitch_number = p.pitch_number;
      inst.task = task;
      inst.pitcher_id = pa.pitcher_id;
      inst.balls = p.balls;
      inst.strikes = p.strikes;
      const std::size_t cut = is_pitch_type_task(task) ? a.pitch_type_value : a.swing_value;
      inst.context = truncate_context(ann.sequence.tokens, cut, a.pa_start,
                                      static_cast<std::size_t>(context_length));
      if (is_pitch_type_task(task)) {
        inst.gold = gold_pitch_label(task, p.pitch_type);
        inst.arsenal_size = arsenal.at(pa.pitcher_id);
      } else {
        inst.gold = std::string(p.swing ? kSwingLabel : kTakeLabel);
        inst.in_zone = in_zone(p);
      }
      out.push_back(std::move(inst));
    }
  }
  return out;
}

struct Prediction {
  std::size_t label = 0;             // index into AnswerSet::labels
  std::vector<double> probabilities;  // per label, sums to 1
};

// Masked softmax over the admissible tokens, pooled per label. The argmax
// scans labels in order of their lowest token id, so ties go to the label
// holding the lowest id.
template <class T>
Prediction decode(std::span<const T> logits, const AnswerSet& answers) {
  answers.validate(logits.size());
  double mx = -std::numeric_limits<double>::infinity();
  for (TokenId t : answers.tokens) mx = std::max(mx, static_cast<double>(logits[t]));
  std::vector<double> e(answers.tokens.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = std::exp(static_cast<double>(logits[answers.tokens[i]]) - mx);
    sum += e[i];
  }
  Prediction pred;
  pred.probabilities.assign(answers.labels.size(), 0.0);
  std::vector<TokenId> min_token(answers.labels.size(), std::numeric_limits<TokenId>::max());
  for (std::size_t i = 0; i < e.size(); ++i) {
    pred.probabilities[answers.label_of[i]] += e[i] / sum;
    min_token[answers.label_of[i]] = std::min(min_token[answers.label_of[i]], answers.tokens[i]);
  }
  std::vector<std::size_t> order(answers.labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return min_token[a] < min_token[b]; });
  pred.label = order.front();
  for (std::size_t l : order) {
    if (pred.probabilities[l] > pred.probabilities[pred.label]) pred.label = l;
  }
  return pred;
}

// Logits at the answer position of one context.
template <class T>
std::vector<T> answer_logits(const ModelParams<T>& params, std::span<const TokenId> context) {
  if (context.empty()) throw DataError("predict: empty context");
  TokenBatch b{1, static_cast<int>(context.size()), {context.begin(), context.end()}};
  const std::size_t row = context.size() - 1;
  Activations<T> acts;
  forward_into(params, b, acts, std::span<const std::size_t>(&row, 1));
  return std::move(acts.logits);
}

template <class T>
Prediction predict(const ModelParams<T>& params, const PredictionInstance& inst,
                   const AnswerSet& answers) {
  const auto logits = answer_logits(params, inst.context);
  return decode<T>(logits, answers);
}

// Order-preserving; each instance is decoded independently so results match
// predict() exactly.
template <class T>
std::vector<Prediction> predict_batch(const ModelParams<T>& params,
                                      std::span<const PredictionInstance> instances,
                                      const AnswerSet& answers) {
  answers.validate(static_cast<std::size_t>(params.config.vocab_size));
  std::vector<Prediction> out;
  out.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    try {
      out.push_back(predict(params, instances[i], answers));
    } catch (const DataError& e) {
      throw DataError("instance " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Prediction dump

struct PredictionRecord {
  std::string game_id;
  int pa_id = 0;
  int pitch_number = 0;
  PredictionTask task = PredictionTask::PitchTypeMulti;
  std::int64_t pitcher_id = 0;
  std::optional<bool> in_zone;
  std::optional<int> arsenal_size;
  std::string gold;
  std::string predicted;
  std::vector<std::pair<std::string, double>> probabilities;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

inline PredictionRecord make_record(const PredictionInstance& inst, const Prediction& pred,
                                    const AnswerSet& answers) {
  PredictionRecord r;
  r.game_id = inst.game_id;
  r.pa_id = inst.pa_id;
  r.pitch_number = inst.pitch_number;
  r.task = inst.task;
  r.pitcher_id = inst.pitcher_id;
  r.in_zone = inst.in_zone;
  r.arsenal_size = inst.arsenal_size;
  r.gold = inst.gold;
  r.predicted = answers.labels[pred.label];
  for (std::size_t i = 0; i < answers.labels.size(); ++i) {
    r.probabilities.emplace_back(answers.labels[i], pred.probabilities[i]);
  }
  return r;
}

inline constexpr std::string_view kDumpHeader =
    "game_id\tpa_id\tpitch_number\ttask\tpitcher_id\tin_zone\tarsenal_size\tgold\tpredicted\tprobs";

inline void write_dump(std::ostream& os, std::span<const PredictionRecord> records) {
  os << kDumpHeader << '\n';
  char buf[64];
  for (const auto& r : records) {
    os << r.game_id << '\t' << r.pa_id << '\t' << r.pitch_number << '\t' << task_name(r.task)
       << '\t' << r.pitcher_id << '\t' << (r.in_zone ? (*r.in_zone ? "1" : "0") : "") << '\t'
       << (r.arsenal_size ? std::to_string(*r.arsenal_size) : "") << '\t' << r.gold << '\t'
       << r.predicted << '\t';
    for (std::size_t i = 0; i < r.probabilities.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", r.probabilities[i].second);
      os << (i ? ";" : "") << r.probabilities[i].first << '=' << buf;
    }
    os << '\n';
  }
}

inline void write_dump(const std::filesystem::path& path, std::span<const PredictionRecord> records) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write prediction dump " + path.string());
  write_dump(os, records);
  if (!os) throw IoError("failed writing prediction dump " + path.string());
}

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line, char sep = '\t') {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

template <class N>
N parse_number(const std::string& s, const std::string& what) {
  std::istringstream is(s);
  N v{};
  if (!(is >> v) || !is.eof()) throw DataError("prediction dump: bad " + what + " '" + s + "'");
  return v;
}

}  // namespace detail

inline std::vector<PredictionRecord> read_dump(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kDumpHeader) {
    throw DataError("prediction dump: missing or unexpected header");
  }
  std::vector<PredictionRecord> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = detail::split_tabs(line);
    const std::string where = " on line " + std::to_string(lineno);
    if (f.size() != 10) throw DataError("prediction dump: expected 10 columns" + where);
    PredictionRecord r;
    try {
      r.game_id = f[0];
      r.pa_id = detail::parse_number<int>(f[1], "pa_id");
      r.pitch_number = detail::parse_number<int>(f[2], "pitch_number");
      try {
        r.task = task_from_name(f[3]);
      } catch (const ConfigError& e) {
        throw DataError(e.what());
      }
      r.pitcher_id = detail::parse_number<std::int64_t>(f[4], "pitcher_id");
      if (f[5] == "1" || f[5] == "0") {
        r.in_zone = f[5] == "1";
      } else if (!f[5].empty()) {
        throw DataError("prediction dump: bad in_zone '" + f[5] + "'");
      }
      if (!f[6].empty()) r.arsenal_size = detail::parse_number<int>(f[6], "arsenal_size");
      r.gold = f[7];
      r.predicted = f[8];
      for (const auto& kv : detail::split_tabs(f[9], ';')) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw DataError("prediction dump: bad probability '" + kv + "'");
        r.probabilities.emplace_back(kv.substr(0, eq),
                                     detail::parse_number<double>(kv.substr(eq + 1), "probability"));
      }
    } catch (const DataError& e) {
      throw DataError(std::string(e.what()) + where);
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<PredictionRecord> read_dump(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open prediction dump " + path.string());
  return read_dump(is);
}

}  // namespace sabergen
