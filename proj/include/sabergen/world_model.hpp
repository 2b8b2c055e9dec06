#pragma once

// Decoder-only autoregressive transformer with hand-written backprop.
//
// Pre-norm residual blocks (LayerNorm -> causal multi-head attention,
// LayerNorm -> GELU MLP), learned absolute position embeddings, a final
// LayerNorm and an output projection tied to the token embedding. All
// weights are stored as y = x W + b with W laid out [in x out].
//
// Templated on the scalar type: float for training, double for the
// finite-difference gradient checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sabergen/codec.hpp"
#include "sabergen/errors.hpp"
#include "sabergen/linalg.hpp"
#include "sabergen/log.hpp"

namespace sabergen {

struct ModelConfig {
  int vocab_size = 0;
  int context_length = 256;
  int layers = 4;
  int model_dim = 128;
  int heads = 4;
  double mlp_ratio = 4.0;
  double dropout = 0.0;
  // "learned": absolute position table added to the input. "rotary": query
  // and key pairs rotated by position angle, no position table.
  std::string positions = "learned";

  bool rotary() const { return positions == "rotary"; }
  int head_dim() const { return model_dim / heads; }
  int hidden_dim() const { return static_cast<int>(std::lround(model_dim * mlp_ratio)); }

  void validate() const {
    if (vocab_size < 1) throw ConfigError("model: vocab_size must be positive");
    if (context_length < 2) throw ConfigError("model: context_length must be at least 2");
    if (layers < 1) throw ConfigError("model: layers must be positive");
    if (model_dim < 1 || heads < 1) throw ConfigError("model: model_dim and heads must be positive");
    if (model_dim % heads != 0) throw ConfigError("model: model_dim must be divisible by heads");
    if (!(mlp_ratio > 0.0) || hidden_dim() < 1) throw ConfigError("model: mlp_ratio must be positive");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("model: dropout must be in [0, 1)");
    if (positions != "learned" && positions != "rotary") {
      throw ConfigError("model: positions must be 'learned' or 'rotary'");
    }
    if (rotary() && head_dim() % 2 != 0) throw ConfigError("model: rotary positions need an even head_dim");
  }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

inline void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = {{"vocab_size", c.vocab_size}, {"context_length", c.context_length},
       {"layers", c.layers},         {"model_dim", c.model_dim},
       {"heads", c.heads},           {"mlp_ratio", c.mlp_ratio},
       {"dropout", c.dropout},       {"positions", c.positions}};
}

inline void from_json(const nlohmann::json& j, ModelConfig& c) {
  c.vocab_size = j.value("vocab_size", c.vocab_size);
  c.context_length = j.value("context_length", c.context_length);
  c.layers = j.value("layers", c.layers);
  c.model_dim = j.value("model_dim", c.model_dim);
  c.heads = j.value("heads", c.heads);
  c.mlp_ratio = j.value("mlp_ratio", c.mlp_ratio);
  c.dropout = j.value("dropout", c.dropout);
  c.positions = j.value("positions", c.positions);
}

// ---------------------------------------------------------------------------
// Parameter layout

struct TensorInfo {
  std::string name;
  std::vector<int> shape;
  std::size_t offset = 0;
  std::size_t size = 0;
};

struct LayerOffsets {
  std::size_t ln1_g, ln1_b, qkv_w, qkv_b, proj_w, proj_b;
  std::size_t ln2_g, ln2_b, fc_w, fc_b, out_w, out_b;
};

struct ParameterLayout {
  std::vector<TensorInfo> tensors;
  std::size_t tok_emb = 0;
  std::size_t pos_emb = 0;  // only with learned positions
  std::vector<LayerOffsets> layers;
  std::size_t lnf_g = 0;
  std::size_t lnf_b = 0;
  std::size_t total = 0;

  explicit ParameterLayout(const ModelConfig& c) {
    const int d = c.model_dim, h = c.hidden_dim();
    tok_emb = add("tok_emb", {c.vocab_size, d});
    if (!c.rotary()) pos_emb = add("pos_emb", {c.context_length, d});
    for (int l = 0; l < c.layers; ++l) {
      const std::string p = "h" + std::to_string(l) + ".";
      LayerOffsets o{};
      o.ln1_g = add(p + "ln1.g", {d});
      o.ln1_b = add(p + "ln1.b", {d});
      o.qkv_w = add(p + "attn.qkv.w", {d, 3 * d});
      o.qkv_b = add(p + "attn.qkv.b", {3 * d});
      o.proj_w = add(p + "attn.proj.w", {d, d});
      o.proj_b = add(p + "attn.proj.b", {d});
      o.ln2_g = add(p + "ln2.g", {d});
      o.ln2_b = add(p + "ln2.b", {d});
      o.fc_w = add(p + "mlp.fc.w", {d, h});
      o.fc_b = add(p + "mlp.fc.b", {h});
      o.out_w = add(p + "mlp.proj.w", {h, d});
      o.out_b = add(p + "mlp.proj.b", {d});
      layers.push_back(o);
    }
    lnf_g = add("ln_f.g", {d});
    lnf_b = add("ln_f.b", {d});
  }

  // Name of the tensor owning flat index `i`.
  const TensorInfo& owner(std::size_t i) const {
    for (const auto& t : tensors) {
      if (i >= t.offset && i < t.offset + t.size) return t;
    }
    throw std::out_of_range("parameter index out of range");
  }

 private:
  std::size_t add(std::string name, std::vector<int> shape) {
    std::size_t n = 1;
    for (int s : shape) n *= static_cast<std::size_t>(s);
    tensors.push_back({std::move(name), std::move(shape), total, n});
    total += n;
    return tensors.back().offset;
  }
};

template <class T>
struct ModelParams {
  ModelConfig config;
  std::vector<T> data;

  ModelParams() = default;
  explicit ModelParams(const ModelConfig& c)
      : config(c), data(ParameterLayout(c).total, T(0)) {}

  ParameterLayout layout() const { return ParameterLayout(config); }
  std::size_t size() const { return data.size(); }

  template <class U>
  ModelParams<U> cast() const {
    ModelParams<U> out;
    out.config = config;
    out.data.assign(data.begin(), data.end());
    return out;
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Normal(0, 0.02) weights, residual output projections scaled by
// 1/sqrt(2 * layers), zero biases, unit LayerNorm gains.
template <class T>
ModelParams<T> init_params(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  ModelParams<T> p(config);
  const ParameterLayout lay(config);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double std_w = 0.02;
  const double std_res = 0.02 / std::sqrt(2.0 * config.layers);
  auto fill = [&](std::size_t off, std::size_t n, double s) {
    for (std::size_t i = 0; i < n; ++i) p.data[off + i] = static_cast<T>(s * normal(rng));
  };
  auto ones = [&](std::size_t off, std::size_t n) {
    std::fill_n(p.data.begin() + static_cast<std::ptrdiff_t>(off), n, T(1));
  };
  const auto d = static_cast<std::size_t>(config.model_dim);
  const auto h = static_cast<std::size_t>(config.hidden_dim());
  fill(lay.tok_emb, static_cast<std::size_t>(config.vocab_size) * d, std_w);
  if (!config.rotary()) fill(lay.pos_emb, static_cast<std::size_t>(config.context_length) * d, std_w);
  for (const auto& o : lay.layers) {
    ones(o.ln1_g, d);
    ones(o.ln2_g, d);
    fill(o.qkv_w, d * 3 * d, std_w);
    fill(o.proj_w, d * d, std_res);
    fill(o.fc_w, d * h, std_w);
    fill(o.out_w, h * d, std_res);
  }
  ones(lay.lnf_g, d);
  return p;
}

// ---------------------------------------------------------------------------
// Batches

// Row-major [batch x length] token ids.
struct TokenBatch {
  int batch = 0;
  int length = 0;
  std::vector<TokenId> tokens;

  TokenId at(int b, int t) const {
    return tokens[static_cast<std::size_t>(b) * static_cast<std::size_t>(length) +
                  static_cast<std::size_t>(t)];
  }
};

// Inputs plus next-token targets and a per-position loss mask.
struct TrainingBatch {
  TokenBatch inputs;
  std::vector<TokenId> targets;
  std::vector<std::uint8_t> mask;  // 1 = position contributes to the loss
};

namespace detail {

inline constexpr double kLayerNormEps = 1e-5;
inline constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)

template <class T>
T gelu(T x) {
  const T u = static_cast<T>(kGeluC) * (x + T(0.044715) * x * x * x);
  return T(0.5) * x * (T(1) + std::tanh(u));
}

template <class T>
T gelu_grad(T x) {
  const T u = static_cast<T>(kGeluC) * (x + T(0.044715) * x * x * x);
  const T th = std::tanh(u);
  const T du = static_cast<T>(kGeluC) * (T(1) + T(3) * T(0.044715) * x * x);
  return T(0.5) * (T(1) + th) + T(0.5) * x * (T(1) - th * th) * du;
}

template <class T>
void layer_norm(const T* x, const T* g, const T* b, T* out, T* mean, T* rstd, int rows, int d) {
  for (int r = 0; r < rows; ++r) {
    const T* xr = x + static_cast<std::size_t>(r) * d;
    T* o = out + static_cast<std::size_t>(r) * d;
    T m = 0;
    for (int i = 0; i < d; ++i) m += xr[i];
    m /= static_cast<T>(d);
    T v = 0;
    for (int i = 0; i < d; ++i) v += (xr[i] - m) * (xr[i] - m);
    v /= static_cast<T>(d);
    const T rs = T(1) / std::sqrt(v + static_cast<T>(kLayerNormEps));
    for (int i = 0; i < d; ++i) o[i] = (xr[i] - m) * rs * g[i] + b[i];
    mean[r] = m;
    rstd[r] = rs;
  }
}

// Accumulates dg, db and writes (or adds, when accumulate) dx.
template <class T>
void layer_norm_backward(const T* x, const T* g, const T* mean, const T* rstd, const T* dout,
                         T* dx, T* dg, T* db, int rows, int d, bool accumulate) {
  std::vector<T> dxhat(static_cast<std::size_t>(d));
  for (int r = 0; r < rows; ++r) {
    const T* xr = x + static_cast<std::size_t>(r) * d;
    const T* dr = dout + static_cast<std::size_t>(r) * d;
    T* dxr = dx + static_cast<std::size_t>(r) * d;
    T sum_dxhat = 0, sum_dxhat_xhat = 0;
    for (int i = 0; i < d; ++i) {
      const T xhat = (xr[i] - mean[r]) * rstd[r];
      dxhat[i] = dr[i] * g[i];
      dg[i] += dr[i] * xhat;
      db[i] += dr[i];
      sum_dxhat += dxhat[i];
      sum_dxhat_xhat += dxhat[i] * xhat;
    }
    const T inv_d = T(1) / static_cast<T>(d);
    for (int i = 0; i < d; ++i) {
      const T xhat = (xr[i] - mean[r]) * rstd[r];
      const T v = rstd[r] * (dxhat[i] - sum_dxhat * inv_d - xhat * sum_dxhat_xhat * inv_d);
      dxr[i] = accumulate ? dxr[i] + v : v;
    }
  }
}

template <class T>
void add_bias(T* y, const T* b, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    T* yr = y + static_cast<std::size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) yr[c] += b[c];
  }
}

template <class T>
void bias_grad(const T* dy, T* db, int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    const T* dr = dy + static_cast<std::size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) db[c] += dr[c];
  }
}

}  // namespace detail

// Cached intermediate values of one forward pass, consumed by backward.
template <class T>
struct Activations {
  struct Layer {
    std::vector<T> ln1, ln1_mean, ln1_rstd;
    std::vector<T> qkv;
    std::vector<T> att;  // [batch, heads, length, length] softmax probabilities
    std::vector<T> y;    // concatenated head outputs
    std::vector<T> x_mid;
    std::vector<T> ln2, ln2_mean, ln2_rstd;
    std::vector<T> fc, act;
    std::vector<std::uint8_t> drop_attn, drop_mlp;
  };

  int batch = 0;
  int length = 0;
  std::vector<std::vector<T>> x;  // residual stream entering each layer, plus final
  std::vector<Layer> layers;
  std::vector<T> lnf, lnf_mean, lnf_rstd;
  std::vector<T> logits;  // [batch * length, vocab]
};

namespace detail {

template <class T>
void check_tokens(const ModelConfig& c, const TokenBatch& b) {
  if (b.batch < 1 || b.length < 1) throw DataError("forward: empty batch");
  if (b.length > c.context_length) {
    throw DataError("forward: sequence length exceeds context_length");
  }
  if (b.tokens.size() != static_cast<std::size_t>(b.batch) * static_cast<std::size_t>(b.length)) {
    throw DataError("forward: token buffer does not match batch shape");
  }
  for (TokenId id : b.tokens) {
    if (id >= static_cast<TokenId>(c.vocab_size)) {
      throw DataError("forward: token id " + std::to_string(id) + " out of range");
    }
  }
}

// Applies inverted dropout in place, recording the keep mask.
template <class T, class Rng>
void dropout(std::vector<T>& v, std::vector<std::uint8_t>& keep, double p, Rng* rng) {
  if (p <= 0.0 || rng == nullptr) {
    keep.clear();
    return;
  }
  keep.resize(v.size());
  std::bernoulli_distribution bern(1.0 - p);
  const T scale = static_cast<T>(1.0 / (1.0 - p));
  for (std::size_t i = 0; i < v.size(); ++i) {
    keep[i] = bern(*rng) ? 1 : 0;
    v[i] = keep[i] ? v[i] * scale : T(0);
  }
}

// Rotates each (i, i + half) pair of every head's query and key by
// t * base^(-2i / head_dim). `sign` -1 applies the inverse rotation, which
// is also the transpose used in the backward pass.
template <class T>
void rotate_qk(T* qkv, int batch, int length, int model_dim, int heads, int sign) {
  const int hd = model_dim / heads, half = hd / 2;
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < length; ++t) {
      T* row = qkv + (static_cast<std::size_t>(b) * length + t) * 3 * model_dim;
      for (int i = 0; i < half; ++i) {
        const double angle = t * std::pow(10000.0, -2.0 * i / hd);
        const T cs = static_cast<T>(std::cos(angle)), sn = static_cast<T>(sign * std::sin(angle));
        for (int part = 0; part < 2; ++part) {  // query, key
          for (int h = 0; h < heads; ++h) {
            T* v = row + part * model_dim + h * hd;
            const T x0 = v[i], x1 = v[i + half];
            v[i] = x0 * cs - x1 * sn;
            v[i + half] = x0 * sn + x1 * cs;
          }
        }
      }
    }
  }
}

}  // namespace detail

// Runs the network up to the final LayerNorm and fills `acts`. When
// `logit_rows` is empty all rows get logits; otherwise only the listed rows
// (flat b * length + t), packed in that order.
using DropoutRng = std::mt19937_64;

template <class T>
void forward_into(const ModelParams<T>& params, const TokenBatch& batch, Activations<T>& acts,
                  std::span<const std::size_t> logit_rows = {}, DropoutRng* dropout_rng = nullptr) {
  const ModelConfig& c = params.config;
  detail::check_tokens<T>(c, batch);
  const ParameterLayout lay(c);
  const T* w = params.data.data();
  const int B = batch.batch, L = batch.length, D = c.model_dim, H = c.heads;
  const int hd = c.head_dim(), F = c.hidden_dim(), V = c.vocab_size;
  const int N = B * L;
  const auto n = static_cast<std::size_t>(N);
  const auto d = static_cast<std::size_t>(D);
  const T scale = T(1) / std::sqrt(static_cast<T>(hd));

  acts.batch = B;
  acts.length = L;
  acts.x.resize(static_cast<std::size_t>(c.layers) + 1);
  for (auto& xs : acts.x) xs.resize(n * d);
  acts.layers.resize(static_cast<std::size_t>(c.layers));

  auto& x0 = acts.x[0];
  for (int b = 0; b < B; ++b) {
    for (int t = 0; t < L; ++t) {
      const T* te = w + lay.tok_emb + static_cast<std::size_t>(batch.at(b, t)) * d;
      T* xr = x0.data() + (static_cast<std::size_t>(b) * L + t) * d;
      std::copy_n(te, D, xr);
      if (c.rotary()) continue;
      const T* pe = w + lay.pos_emb + static_cast<std::size_t>(t) * d;
      for (int i = 0; i < D; ++i) xr[i] += pe[i];
    }
  }

  for (int l = 0; l < c.layers; ++l) {
    const auto& o = lay.layers[static_cast<std::size_t>(l)];
    auto& a = acts.layers[static_cast<std::size_t>(l)];
    const auto& x = acts.x[static_cast<std::size_t>(l)];

    a.ln1.resize(n * d);
    a.ln1_mean.resize(n);
    a.ln1_rstd.resize(n);
    detail::layer_norm(x.data(), w + o.ln1_g, w + o.ln1_b, a.ln1.data(), a.ln1_mean.data(),
                       a.ln1_rstd.data(), N, D);

    a.qkv.resize(n * 3 * d);
    linalg::gemm(false, false, N, 3 * D, D, T(1), a.ln1.data(), D, w + o.qkv_w, 3 * D, T(0),
                 a.qkv.data(), 3 * D);
    detail::add_bias(a.qkv.data(), w + o.qkv_b, N, 3 * D);
    if (c.rotary()) detail::rotate_qk(a.qkv.data(), B, L, D, H, 1);

    const auto ll = static_cast<std::size_t>(L) * static_cast<std::size_t>(L);
    a.att.resize(static_cast<std::size_t>(B) * static_cast<std::size_t>(H) * ll);
    a.y.resize(n * d);
    for (int b = 0; b < B; ++b) {
      const T* base = a.qkv.data() + static_cast<std::size_t>(b) * L * 3 * d;
      for (int h = 0; h < H; ++h) {
        const T* q = base + static_cast<std::size_t>(h) * hd;
        const T* k = q + D;
        const T* v = q + 2 * D;
        T* p = a.att.data() + (static_cast<std::size_t>(b) * H + h) * ll;
        linalg::gemm(false, true, L, L, hd, scale, q, 3 * D, k, 3 * D, T(0), p, L);
        for (int i = 0; i < L; ++i) {
          T* row = p + static_cast<std::size_t>(i) * L;
          T mx = row[0];
          for (int j = 1; j <= i; ++j) mx = std::max(mx, row[j]);
          T sum = 0;
          for (int j = 0; j <= i; ++j) {
            row[j] = std::exp(row[j] - mx);
            sum += row[j];
          }
          const T inv = T(1) / sum;
          for (int j = 0; j <= i; ++j) row[j] *= inv;
          for (int j = i + 1; j < L; ++j) row[j] = T(0);
        }
        T* y = a.y.data() + static_cast<std::size_t>(b) * L * d + static_cast<std::size_t>(h) * hd;
        linalg::gemm(false, false, L, hd, L, T(1), p, L, v, 3 * D, T(0), y, D);
      }
    }

    std::vector<T> attn_out(n * d);
    linalg::gemm(false, false, N, D, D, T(1), a.y.data(), D, w + o.proj_w, D, T(0),
                 attn_out.data(), D);
    detail::add_bias(attn_out.data(), w + o.proj_b, N, D);
    detail::dropout(attn_out, a.drop_attn, c.dropout, dropout_rng);
    a.x_mid.resize(n * d);
    for (std::size_t i = 0; i < n * d; ++i) a.x_mid[i] = x[i] + attn_out[i];

    a.ln2.resize(n * d);
    a.ln2_mean.resize(n);
    a.ln2_rstd.resize(n);
    detail::layer_norm(a.x_mid.data(), w + o.ln2_g, w + o.ln2_b, a.ln2.data(), a.ln2_mean.data(),
                       a.ln2_rstd.data(), N, D);

    const auto f = static_cast<std::size_t>(F);
    a.fc.resize(n * f);
    linalg::gemm(false, false, N, F, D, T(1), a.ln2.data(), D, w + o.fc_w, F, T(0), a.fc.data(), F);
    detail::add_bias(a.fc.data(), w + o.fc_b, N, F);
    a.act.resize(n * f);
    for (std::size_t i = 0; i < n * f; ++i) a.act[i] = detail::gelu(a.fc[i]);

    std::vector<T> mlp_out(n * d);
    linalg::gemm(false, false, N, D, F, T(1), a.act.data(), F, w + o.out_w, D, T(0),
                 mlp_out.data(), D);
    detail::add_bias(mlp_out.data(), w + o.out_b, N, D);
    detail::dropout(mlp_out, a.drop_mlp, c.dropout, dropout_rng);
    auto& next = acts.x[static_cast<std::size_t>(l) + 1];
    for (std::size_t i = 0; i < n * d; ++i) next[i] = a.x_mid[i] + mlp_out[i];
  }

  acts.lnf.resize(n * d);
  acts.lnf_mean.resize(n);
  acts.lnf_rstd.resize(n);
  detail::layer_norm(acts.x.back().data(), w + lay.lnf_g, w + lay.lnf_b, acts.lnf.data(),
                     acts.lnf_mean.data(), acts.lnf_rstd.data(), N, D);

  const auto vs = static_cast<std::size_t>(V);
  if (logit_rows.empty()) {
    acts.logits.resize(n * vs);
    linalg::gemm(false, true, N, V, D, T(1), acts.lnf.data(), D, w + lay.tok_emb, D, T(0),
                 acts.logits.data(), V);
  } else {
    const int m = static_cast<int>(logit_rows.size());
    std::vector<T> rows(logit_rows.size() * d);
    for (std::size_t r = 0; r < logit_rows.size(); ++r) {
      std::copy_n(acts.lnf.data() + logit_rows[r] * d, d, rows.data() + r * d);
    }
    acts.logits.resize(logit_rows.size() * vs);
    linalg::gemm(false, true, m, V, D, T(1), rows.data(), D, w + lay.tok_emb, D, T(0),
                 acts.logits.data(), V);
  }
}

// Logits [batch * length * vocab], position (b, t) at (b * length + t) * vocab.
template <class T>
std::vector<T> forward(const ModelParams<T>& params, const TokenBatch& batch) {
  Activations<T> acts;
  forward_into(params, batch, acts);
  return std::move(acts.logits);
}

// Mean cross-entropy over positions with mask = 1. With no unmasked
// positions the loss is defined as 0 and a warning is emitted. When `dlogits`
// is non-null it receives d(loss)/d(logits).
template <class T>
double cross_entropy(std::span<const T> logits, int vocab, std::span<const TokenId> targets,
                     std::span<const std::uint8_t> mask, std::vector<T>* dlogits = nullptr) {
  const std::size_t rows = targets.size();
  if (logits.size() != rows * static_cast<std::size_t>(vocab) || mask.size() != rows) {
    throw DataError("loss: logits, targets and mask shapes differ");
  }
  std::size_t count = 0;
  for (auto m : mask) count += m ? 1 : 0;
  if (dlogits != nullptr) dlogits->assign(logits.size(), T(0));
  if (count == 0) {
    warn("loss: every position is masked; loss defined as 0");
    return 0.0;
  }
  const auto vs = static_cast<std::size_t>(vocab);
  double total = 0.0;
  const double inv = 1.0 / static_cast<double>(count);
  std::vector<double> probs(vs);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!mask[r]) continue;
    if (targets[r] >= vs) throw DataError("loss: target id out of range");
    const T* lr = logits.data() + r * vs;
    double mx = lr[0];
    for (std::size_t i = 1; i < vs; ++i) mx = std::max(mx, static_cast<double>(lr[i]));
    double sum = 0.0;
    for (std::size_t i = 0; i < vs; ++i) {
      probs[i] = std::exp(static_cast<double>(lr[i]) - mx);
      sum += probs[i];
    }
    total += std::log(sum) + mx - static_cast<double>(lr[targets[r]]);
    if (dlogits != nullptr) {
      T* dr = dlogits->data() + r * vs;
      for (std::size_t i = 0; i < vs; ++i) dr[i] = static_cast<T>(probs[i] / sum * inv);
      dr[targets[r]] -= static_cast<T>(inv);
    }
  }
  return total * inv;
}

template <class T>
struct LossAndGrad {
  double loss = 0.0;
  std::vector<T> grad;  // same layout as ModelParams::data
};

// Exact gradient of the masked mean cross-entropy with respect to every
// parameter. The tied embedding receives both its lookup and its output
// projection contributions.
// `workspace` lets a training loop reuse activation buffers across steps.
template <class T>
LossAndGrad<T> backward(const ModelParams<T>& params, const TrainingBatch& batch,
                        DropoutRng* dropout_rng = nullptr, Activations<T>* workspace = nullptr) {
  const ModelConfig& c = params.config;
  Activations<T> local;
  Activations<T>& acts = workspace != nullptr ? *workspace : local;
  forward_into(params, batch.inputs, acts, {}, dropout_rng);

  const ParameterLayout lay(c);
  const T* w = params.data.data();
  const int B = acts.batch, L = acts.length, D = c.model_dim, H = c.heads;
  const int hd = c.head_dim(), F = c.hidden_dim(), V = c.vocab_size;
  const int N = B * L;
  const auto n = static_cast<std::size_t>(N);
  const auto d = static_cast<std::size_t>(D);
  const auto f = static_cast<std::size_t>(F);
  const T scale = T(1) / std::sqrt(static_cast<T>(hd));

  LossAndGrad<T> out;
  out.grad.assign(params.data.size(), T(0));
  T* g = out.grad.data();

  std::vector<T> dlogits;
  out.loss = cross_entropy<T>(acts.logits, V, batch.targets, batch.mask, &dlogits);

  // Output projection (tied): logits = lnf @ tok_emb^T
  std::vector<T> dlnf(n * d, T(0));
  linalg::gemm(false, false, N, D, V, T(1), dlogits.data(), V, w + lay.tok_emb, D, T(0),
               dlnf.data(), D);
  linalg::gemm(true, false, V, D, N, T(1), dlogits.data(), V, acts.lnf.data(), D, T(1),
               g + lay.tok_emb, D);

  std::vector<T> dx(n * d, T(0));
  detail::layer_norm_backward(acts.x.back().data(), w + lay.lnf_g, acts.lnf_mean.data(),
                              acts.lnf_rstd.data(), dlnf.data(), dx.data(), g + lay.lnf_g,
                              g + lay.lnf_b, N, D, false);

  std::vector<T> dmlp(n * d), dact(n * f), dln2(n * d), dattn(n * d), dy(n * d),
      dqkv(n * 3 * d), dln1(n * d);
  const auto ll = static_cast<std::size_t>(L) * static_cast<std::size_t>(L);
  std::vector<T> dp(ll), ds(ll);

  for (int l = c.layers - 1; l >= 0; --l) {
    const auto& o = lay.layers[static_cast<std::size_t>(l)];
    const auto& a = acts.layers[static_cast<std::size_t>(l)];
    const auto& x = acts.x[static_cast<std::size_t>(l)];

    // x_next = x_mid + drop(mlp_out); dx holds d(x_next).
    dmlp = dx;
    if (!a.drop_mlp.empty()) {
      const T s = static_cast<T>(1.0 / (1.0 - c.dropout));
      for (std::size_t i = 0; i < dmlp.size(); ++i) dmlp[i] = a.drop_mlp[i] ? dmlp[i] * s : T(0);
    }
    detail::bias_grad(dmlp.data(), g + o.out_b, N, D);
    linalg::gemm(true, false, F, D, N, T(1), a.act.data(), F, dmlp.data(), D, T(1),
                 g + o.out_w, D);
    linalg::gemm(false, true, N, F, D, T(1), dmlp.data(), D, w + o.out_w, D, T(0), dact.data(), F);
    for (std::size_t i = 0; i < n * f; ++i) dact[i] *= detail::gelu_grad(a.fc[i]);
    detail::bias_grad(dact.data(), g + o.fc_b, N, F);
    linalg::gemm(true, false, D, F, N, T(1), a.ln2.data(), D, dact.data(), F, T(1),
                 g + o.fc_w, F);
    linalg::gemm(false, true, N, D, F, T(1), dact.data(), F, w + o.fc_w, F, T(0), dln2.data(), D);
    // d(x_mid) = d(x_next) + LN2 backward
    detail::layer_norm_backward(a.x_mid.data(), w + o.ln2_g, a.ln2_mean.data(), a.ln2_rstd.data(),
                                dln2.data(), dx.data(), g + o.ln2_g, g + o.ln2_b, N, D, true);

    // x_mid = x + drop(attn_out)
    dattn = dx;
    if (!a.drop_attn.empty()) {
      const T s = static_cast<T>(1.0 / (1.0 - c.dropout));
      for (std::size_t i = 0; i < dattn.size(); ++i) dattn[i] = a.drop_attn[i] ? dattn[i] * s : T(0);
    }
    detail::bias_grad(dattn.data(), g + o.proj_b, N, D);
    linalg::gemm(true, false, D, D, N, T(1), a.y.data(), D, dattn.data(), D, T(1),
                 g + o.proj_w, D);
    linalg::gemm(false, true, N, D, D, T(1), dattn.data(), D, w + o.proj_w, D, T(0), dy.data(), D);

    std::fill(dqkv.begin(), dqkv.end(), T(0));
    for (int b = 0; b < B; ++b) {
      const std::size_t row0 = static_cast<std::size_t>(b) * L;
      const T* base = a.qkv.data() + row0 * 3 * d;
      T* dbase = dqkv.data() + row0 * 3 * d;
      for (int h = 0; h < H; ++h) {
        const std::size_t col = static_cast<std::size_t>(h) * hd;
        const T* q = base + col;
        const T* k = q + D;
        const T* v = q + 2 * D;
        T* dq = dbase + col;
        T* dk = dq + D;
        T* dv = dq + 2 * D;
        const T* p = a.att.data() + (static_cast<std::size_t>(b) * H + h) * ll;
        const T* dyh = dy.data() + row0 * d + col;
        linalg::gemm(false, true, L, L, hd, T(1), dyh, D, v, 3 * D, T(0), dp.data(), L);
        linalg::gemm(true, false, L, hd, L, T(1), p, L, dyh, D, T(0), dv, 3 * D);
        for (int i = 0; i < L; ++i) {
          const T* pr = p + static_cast<std::size_t>(i) * L;
          const T* dpr = dp.data() + static_cast<std::size_t>(i) * L;
          T* dsr = ds.data() + static_cast<std::size_t>(i) * L;
          T dot = 0;
          for (int j = 0; j <= i; ++j) dot += pr[j] * dpr[j];
          for (int j = 0; j <= i; ++j) dsr[j] = pr[j] * (dpr[j] - dot);
          for (int j = i + 1; j < L; ++j) dsr[j] = T(0);
        }
        linalg::gemm(false, false, L, hd, L, scale, ds.data(), L, k, 3 * D, T(0), dq, 3 * D);
        linalg::gemm(true, false, L, hd, L, scale, ds.data(), L, q, 3 * D, T(0), dk, 3 * D);
      }
    }

    if (c.rotary()) detail::rotate_qk(dqkv.data(), B, L, D, H, -1);
    detail::bias_grad(dqkv.data(), g + o.qkv_b, N, 3 * D);
    linalg::gemm(true, false, D, 3 * D, N, T(1), a.ln1.data(), D, dqkv.data(), 3 * D, T(1),
                 g + o.qkv_w, 3 * D);
    linalg::gemm(false, true, N, D, 3 * D, T(1), dqkv.data(), 3 * D, w + o.qkv_w, 3 * D, T(0),
                 dln1.data(), D);
    detail::layer_norm_backward(x.data(), w + o.ln1_g, a.ln1_mean.data(), a.ln1_rstd.data(),
                                dln1.data(), dx.data(), g + o.ln1_g, g + o.ln1_b, N, D, true);
  }

  // Embedding lookups.
  for (int b = 0; b < B; ++b) {
    for (int t = 0; t < L; ++t) {
      const T* dr = dx.data() + (static_cast<std::size_t>(b) * L + t) * d;
      T* te = g + lay.tok_emb + static_cast<std::size_t>(batch.inputs.at(b, t)) * d;
      for (int i = 0; i < D; ++i) te[i] += dr[i];
      if (c.rotary()) continue;
      T* pe = g + lay.pos_emb + static_cast<std::size_t>(t) * d;
      for (int i = 0; i < D; ++i) pe[i] += dr[i];
    }
  }

  for (const auto& t : lay.tensors) {
    for (std::size_t i = t.offset; i < t.offset + t.size; ++i) {
      if (!std::isfinite(static_cast<double>(g[i]))) {
        throw TrainingError("non-finite gradient in parameter '" + t.name + "'");
      }
    }
  }
  return out;
}

// Loss of a batch without gradients.
template <class T>
double batch_loss(const ModelParams<T>& params, const TrainingBatch& batch) {
  Activations<T> acts;
  forward_into(params, batch.inputs, acts);
  return cross_entropy<T>(acts.logits, params.config.vocab_size, batch.targets, batch.mask);
}

}  // namespace sabergen
