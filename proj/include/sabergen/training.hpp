#pragma once

// Next-token training loop, Adam, and the checkpoint container.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "sabergen/codec.hpp"
#include "sabergen/errors.hpp"
#include "sabergen/world_model.hpp"

namespace sabergen {

struct TrainConfig {
  int batch_size = 16;
  int steps = 2000;
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.95;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
  double grad_clip = 1.0;
  int warmup_steps = 100;
  bool cosine_decay = false;
  double min_lr_fraction = 0.1;
  std::uint64_t seed = 1;
  int checkpoint_interval = 0;  // 0 disables periodic checkpoints
  std::filesystem::path checkpoint_dir;

  void validate() const {
    if (batch_size < 1) throw ConfigError("train: batch_size must be positive");
    if (steps < 1) throw ConfigError("train: steps must be positive");
    if (!(learning_rate > 0)) throw ConfigError("train: learning_rate must be positive");
    if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) {
      throw ConfigError("train: Adam betas must be in [0, 1)");
    }
    if (!(epsilon > 0)) throw ConfigError("train: epsilon must be positive");
    if (!(weight_decay >= 0)) throw ConfigError("train: weight_decay must be non-negative");
    if (!(grad_clip > 0)) throw ConfigError("train: grad_clip must be positive");
    if (warmup_steps < 0) throw ConfigError("train: warmup_steps must be non-negative");
    if (!(min_lr_fraction >= 0 && min_lr_fraction <= 1)) {
      throw ConfigError("train: min_lr_fraction must be in [0, 1]");
    }
    if (checkpoint_interval < 0) throw ConfigError("train: checkpoint_interval must be non-negative");
  }
};

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"batch_size", c.batch_size},
       {"steps", c.steps},
       {"learning_rate", c.learning_rate},
       {"beta1", c.beta1},
       {"beta2", c.beta2},
       {"epsilon", c.epsilon},
       {"weight_decay", c.weight_decay},
       {"grad_clip", c.grad_clip},
       {"warmup_steps", c.warmup_steps},
       {"cosine_decay", c.cosine_decay},
       {"min_lr_fraction", c.min_lr_fraction},
       {"seed", c.seed},
       {"checkpoint_interval", c.checkpoint_interval},
       {"checkpoint_dir", c.checkpoint_dir.string()}};
}

inline void from_json(const nlohmann::json& j, TrainConfig& c) {
  c.batch_size = j.value("batch_size", c.batch_size);
  c.steps = j.value("steps", c.steps);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.grad_clip = j.value("grad_clip", c.grad_clip);
  c.warmup_steps = j.value("warmup_steps", c.warmup_steps);
  c.cosine_decay = j.value("cosine_decay", c.cosine_decay);
  c.min_lr_fraction = j.value("min_lr_fraction", c.min_lr_fraction);
  c.seed = j.value("seed", c.seed);
  c.checkpoint_interval = j.value("checkpoint_interval", c.checkpoint_interval);
  c.checkpoint_dir = j.value("checkpoint_dir", c.checkpoint_dir.string());
}

inline double learning_rate_at(const TrainConfig& c, int step) {
  if (c.warmup_steps > 0 && step < c.warmup_steps) {
    return c.learning_rate * static_cast<double>(step + 1) / c.warmup_steps;
  }
  if (!c.cosine_decay) return c.learning_rate;
  const double span = std::max(1, c.steps - c.warmup_steps);
  const double progress = std::min(1.0, (step - c.warmup_steps) / span);
  const double floor = c.learning_rate * c.min_lr_fraction;
  return floor + (c.learning_rate - floor) * 0.5 * (1.0 + std::cos(3.141592653589793 * progress));
}

// ---------------------------------------------------------------------------
// Examples

// One training window: inputs[i] predicts targets[i]. A target of PAD is
// excluded from the loss.
struct TrainingExample {
  std::vector<TokenId> inputs;
  std::vector<TokenId> targets;
};

// Splits each sequence into disjoint windows of `context_length` inputs.
// Targets run one token ahead and cross window boundaries; the final input
// token of a sequence gets a PAD target.
inline std::vector<TrainingExample> make_examples(std::span<const std::vector<TokenId>> sequences,
                                                  int context_length) {
  std::vector<TrainingExample> out;
  const auto pad = static_cast<TokenId>(Special::Pad);
  for (const auto& t : sequences) {
    for (const auto& w : window(t, static_cast<std::size_t>(context_length))) {
      TrainingExample ex;
      ex.inputs = w.tokens;
      ex.targets.resize(w.tokens.size());
      bool any = false;
      for (std::size_t i = 0; i < w.tokens.size(); ++i) {
        const std::size_t next = w.offset + i + 1;
        ex.targets[i] = next < t.size() ? t[next] : pad;
        any = any || ex.targets[i] != pad;
      }
      if (any) out.push_back(std::move(ex));
    }
  }
  return out;
}

inline std::vector<TrainingExample> make_examples(std::span<const TokenSequence> sequences,
                                                  int context_length) {
  std::vector<std::vector<TokenId>> raw;
  raw.reserve(sequences.size());
  for (const auto& s : sequences) raw.push_back(s.tokens);
  return make_examples(std::span<const std::vector<TokenId>>(raw), context_length);
}

// Right-pads the selected examples to a common length.
inline TrainingBatch make_batch(std::span<const TrainingExample> examples,
                                std::span<const std::size_t> indices) {
  TrainingBatch b;
  b.inputs.batch = static_cast<int>(indices.size());
  std::size_t len = 0;
  for (auto i : indices) len = std::max(len, examples[i].inputs.size());
  b.inputs.length = static_cast<int>(len);
  const auto pad = static_cast<TokenId>(Special::Pad);
  b.inputs.tokens.assign(indices.size() * len, pad);
  b.targets.assign(indices.size() * len, pad);
  b.mask.assign(indices.size() * len, 0);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto& ex = examples[indices[r]];
    for (std::size_t i = 0; i < ex.inputs.size(); ++i) {
      b.inputs.tokens[r * len + i] = ex.inputs[i];
      b.targets[r * len + i] = ex.targets[i];
      b.mask[r * len + i] = ex.targets[i] != pad ? 1 : 0;
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Checkpoints
//
// "SBGCKPT1" | u32 version | u32 len + config JSON | u32 tensor count |
// per tensor: u32 name len, name, u32 ndim, u32 dims..., f32 data (LE).

inline constexpr char kCheckpointMagic[8] = {'S', 'B', 'G', 'C', 'K', 'P', 'T', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

inline std::uint32_t expect_u32(std::istream& is, const std::string& what) {
  std::uint32_t v = 0;
  if (!get_u32(is, v)) throw DataError("checkpoint truncated in " + what);
  return v;
}

inline void put_f32(std::ostream& os, float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  put_u32(os, u);
}

inline float get_f32(std::istream& is) {
  const std::uint32_t u = expect_u32(is, "tensor data");
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

}  // namespace detail

template <class T>
void save_checkpoint(const std::filesystem::path& path, const ModelParams<T>& params) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw IoError("cannot write checkpoint " + tmp.string());
    os.write(kCheckpointMagic, sizeof kCheckpointMagic);
    detail::put_u32(os, kCheckpointVersion);
    const std::string cfg = nlohmann::json(params.config).dump();
    detail::put_u32(os, static_cast<std::uint32_t>(cfg.size()));
    os.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));
    const ParameterLayout lay(params.config);
    detail::put_u32(os, static_cast<std::uint32_t>(lay.tensors.size()));
    for (const auto& t : lay.tensors) {
      detail::put_u32(os, static_cast<std::uint32_t>(t.name.size()));
      os.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
      detail::put_u32(os, static_cast<std::uint32_t>(t.shape.size()));
      for (int s : t.shape) detail::put_u32(os, static_cast<std::uint32_t>(s));
      for (std::size_t i = 0; i < t.size; ++i) {
        detail::put_f32(os, static_cast<float>(params.data[t.offset + i]));
      }
    }
    if (!os) throw IoError("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// Loads a checkpoint. When `expected` is given its config must match the
// stored one.
template <class T = float>
ModelParams<T> load_checkpoint(const std::filesystem::path& path,
                               const ModelConfig* expected = nullptr) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint " + path.string());
  char magic[sizeof kCheckpointMagic];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
    throw DataError("not a checkpoint file: " + path.string());
  }
  if (detail::expect_u32(is, "header") != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version");
  }
  const auto cfg_len = detail::expect_u32(is, "header");
  std::string cfg_text(cfg_len, '\0');
  if (!is.read(cfg_text.data(), cfg_len)) throw DataError("checkpoint truncated in config");
  ModelConfig config;
  try {
    config = nlohmann::json::parse(cfg_text).get<ModelConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint config unreadable: ") + e.what());
  }
  try {
    config.validate();
  } catch (const ConfigError& e) {
    throw DataError(std::string("checkpoint config invalid: ") + e.what());
  }
  if (expected != nullptr && !(*expected == config)) {
    throw DataError("checkpoint config does not match the requested model config");
  }
  ModelParams<T> p(config);
  const ParameterLayout lay(config);
  if (detail::expect_u32(is, "header") != lay.tensors.size()) {
    throw DataError("checkpoint tensor count does not match config");
  }
  for (const auto& t : lay.tensors) {
    const auto name_len = detail::expect_u32(is, "tensor header");
    std::string name(name_len, '\0');
    if (!is.read(name.data(), name_len)) throw DataError("checkpoint truncated in tensor name");
    if (name != t.name) throw DataError("checkpoint tensor '" + name + "' where '" + t.name + "' expected");
    const auto ndim = detail::expect_u32(is, "tensor header");
    std::vector<int> shape;
    for (std::uint32_t i = 0; i < ndim; ++i) {
      shape.push_back(static_cast<int>(detail::expect_u32(is, "tensor header")));
    }
    if (shape != t.shape) throw DataError("checkpoint tensor '" + name + "' has the wrong shape");
    for (std::size_t i = 0; i < t.size; ++i) p.data[t.offset + i] = static_cast<T>(detail::get_f32(is));
  }
  if (is.peek() != std::char_traits<char>::eof()) throw DataError("trailing bytes in checkpoint");
  return p;
}

// ---------------------------------------------------------------------------
// Optimizer

template <class T>
struct AdamState {
  std::vector<double> m, v;
  int step = 0;
};

// L2 norm of the gradient, scaled in place to at most `max_norm`.
template <class T>
double clip_gradient(std::vector<T>& grad, double max_norm) {
  double sq = 0.0;
  for (T g : grad) sq += static_cast<double>(g) * static_cast<double>(g);
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const T s = static_cast<T>(max_norm / norm);
    for (T& g : grad) g *= s;
  }
  return norm;
}

// Adam with decoupled weight decay applied to matrices only.
template <class T>
void adam_update(ModelParams<T>& params, const std::vector<T>& grad, AdamState<T>& state,
                 const TrainConfig& c, double lr) {
  if (state.m.empty()) {
    state.m.assign(params.data.size(), 0.0);
    state.v.assign(params.data.size(), 0.0);
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(c.beta1, state.step);
  const double bc2 = 1.0 - std::pow(c.beta2, state.step);
  const ParameterLayout lay(params.config);
  for (const auto& t : lay.tensors) {
    const double decay = t.shape.size() >= 2 ? c.weight_decay : 0.0;
    for (std::size_t i = t.offset; i < t.offset + t.size; ++i) {
      const double g = grad[i];
      state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
      state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g * g;
      const double mhat = state.m[i] / bc1;
      const double vhat = state.v[i] / bc2;
      double w = params.data[i];
      w -= lr * (mhat / (std::sqrt(vhat) + c.epsilon) + decay * w);
      params.data[i] = static_cast<T>(w);
    }
  }
}

// ---------------------------------------------------------------------------
// Training loop

struct StepStats {
  int step = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  double learning_rate = 0.0;
};

template <class T>
struct TrainResult {
  ModelParams<T> params;
  std::vector<double> loss_curve;
  std::vector<std::filesystem::path> checkpoints;
};

using StepCallback = std::function<void(const StepStats&)>;

template <class T = float>
TrainResult<T> train(std::span<const TrainingExample> examples, const ModelConfig& model,
                     const TrainConfig& tc, const StepCallback& on_step = {},
                     const ModelParams<T>* initial = nullptr) {
  model.validate();
  tc.validate();
  if (examples.empty()) throw ConfigError("train: corpus has no training windows");
  for (const auto& ex : examples) {
    if (ex.inputs.size() > static_cast<std::size_t>(model.context_length)) {
      throw ConfigError("train: window longer than context_length");
    }
  }

  TrainResult<T> result;
  result.params = initial != nullptr ? *initial : init_params<T>(model, tc.seed);
  if (!(result.params.config == model)) throw ConfigError("train: initial params do not match model config");
  AdamState<T> adam;
  std::mt19937_64 shuffle_rng(tc.seed ^ 0x9e3779b97f4a7c15ULL);
  std::mt19937_64 dropout_rng(tc.seed + 17);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t cursor = order.size();
  std::vector<std::size_t> picked;
  Activations<T> workspace;

  auto fail = [&](const std::string& what) {
    if (!tc.checkpoint_dir.empty()) save_checkpoint(tc.checkpoint_dir / "last_good.ckpt", result.params);
    throw TrainingError(what);
  };

  for (int step = 0; step < tc.steps; ++step) {
    picked.clear();
    for (int i = 0; i < tc.batch_size && i < static_cast<int>(examples.size()); ++i) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        cursor = 0;
      }
      picked.push_back(order[cursor++]);
    }
    const TrainingBatch batch = make_batch(examples, picked);
    LossAndGrad<T> lg;
    try {
      lg = backward(result.params, batch, model.dropout > 0 ? &dropout_rng : nullptr, &workspace);
    } catch (const TrainingError& e) {
      fail(std::string(e.what()) + " at step " + std::to_string(step));
    }
    if (!std::isfinite(lg.loss)) fail("non-finite loss at step " + std::to_string(step));
    const double norm = clip_gradient(lg.grad, tc.grad_clip);
    const double lr = learning_rate_at(tc, step);
    adam_update(result.params, lg.grad, adam, tc, lr);
    result.loss_curve.push_back(lg.loss);
    if (on_step) on_step({step, lg.loss, norm, lr});
    if (tc.checkpoint_interval > 0 && !tc.checkpoint_dir.empty() &&
        (step + 1) % tc.checkpoint_interval == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "step_%06d.ckpt", step + 1);
      result.checkpoints.push_back(tc.checkpoint_dir / name);
      save_checkpoint(result.checkpoints.back(), result.params);
    }
  }
  return result;
}

}  // namespace sabergen
