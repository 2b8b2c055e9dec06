#pragma once

// Bidirectional GameRecord <-> token sequence conversion.
//
// Emission grammar (one game):
//
//   <bos>
//   <game> @game_id TEXT @date TEXT @home TEXT @away TEXT @venue TEXT
//          [@weather TEXT] @season SEASON
//   per plate appearance:
//     <pa> @pa_id D3 @batter D6 @pitcher D6 @inning D2 @half HALF @outs OUTS
//          @score_home D2 @score_away D2 @runners RUNNERS
//     per pitch:
//       <pitch> @count COUNT @pitch_type TYPE @release_speed B
//               @release_pos_x B @release_pos_y B @release_pos_z B
//               @spin_rate B @spin_axis B @plate_x B @plate_z B
//               @sz_top B @sz_bot B @swing SWING @outcome OUTCOME
//     @event EVENT
//   <eos>
//
// TEXT is a run of printable-ASCII character tokens closed by <end>; Dn is a
// fixed-width run of n digit tokens; B is a per-field quantization bucket.
// Every pitch therefore costs kTokensPerPitch tokens and every plate
// appearance header plus event costs kTokensPerPlateAppearance tokens.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sabergen/errors.hpp"
#include "sabergen/event_model.hpp"
#include "sabergen/log.hpp"

namespace sabergen {

using TokenId = std::uint32_t;

// ---------------------------------------------------------------------------
// Quantization

enum class NumericField : std::uint8_t {
  ReleaseSpeed,
  ReleasePosX,
  ReleasePosY,
  ReleasePosZ,
  SpinRate,
  SpinAxis,
  PlateX,
  PlateZ,
  SzTop,
  SzBot,
};

inline constexpr std::size_t kNumericFieldCount = 10;

inline constexpr std::array<std::string_view, kNumericFieldCount>
    kNumericFieldNames = {
        "release_speed", "release_pos_x", "release_pos_y", "release_pos_z",
        "spin_rate",     "spin_axis",     "plate_x",       "plate_z",
        "sz_top",        "sz_bot",
};

struct FieldQuantization {
  double lower = 0.0;
  double upper = 1.0;
  double step = 1.0;

  friend bool operator==(const FieldQuantization&,
                         const FieldQuantization&) = default;
};

inline constexpr int kMaxBucketsPerField = 999;

struct QuantizationSpec {
  std::array<FieldQuantization, kNumericFieldCount> fields{};

  const FieldQuantization& operator[](NumericField f) const {
    return fields[static_cast<std::size_t>(f)];
  }
  FieldQuantization& operator[](NumericField f) {
    return fields[static_cast<std::size_t>(f)];
  }

  int bucket_count(NumericField f) const {
    const auto& q = (*this)[f];
    return static_cast<int>(std::ceil((q.upper - q.lower) / q.step - 1e-9));
  }

  // Throws ConfigError when a field has step <= 0, upper <= lower, or too
  // many buckets.
  void validate() const {
    for (std::size_t i = 0; i < kNumericFieldCount; ++i) {
      const auto& q = fields[i];
      const std::string name(kNumericFieldNames[i]);
      if (!(q.step > 0.0) || !std::isfinite(q.step)) {
        throw ConfigError("quantization: step must be positive for " + name);
      }
      if (!(q.upper > q.lower)) {
        throw ConfigError("quantization: upper must exceed lower for " + name);
      }
      if (bucket_count(static_cast<NumericField>(i)) > kMaxBucketsPerField) {
        throw ConfigError("quantization: too many buckets for " + name);
      }
    }
  }

  // Bucket index of v; out-of-range values clamp to the edge buckets and set
  // *clamped.
  int bucket_of(NumericField f, double v, bool* clamped = nullptr) const {
    const auto& q = (*this)[f];
    const int n = bucket_count(f);
    const double raw = std::floor((v - q.lower) / q.step + 1e-9);
    int idx = 0;
    bool clip = false;
    if (!(raw >= 0.0)) {  // also catches NaN
      clip = true;
    } else if (raw > n - 1) {
      idx = n - 1;
      clip = true;
    } else {
      idx = static_cast<int>(raw);
    }
    if (clamped != nullptr) *clamped = clip;
    return idx;
  }

  double midpoint(NumericField f, int bucket) const {
    const auto& q = (*this)[f];
    return q.lower + (static_cast<double>(bucket) + 0.5) * q.step;
  }

  double quantize(NumericField f, double v) const {
    return midpoint(f, bucket_of(f, v));
  }

  friend bool operator==(const QuantizationSpec&,
                         const QuantizationSpec&) = default;
};

inline QuantizationSpec default_quantization() {
  QuantizationSpec q;
  q[NumericField::ReleaseSpeed] = {30.0, 110.0, 0.5};
  q[NumericField::ReleasePosX] = {-5.0, 5.0, 0.1};
  q[NumericField::ReleasePosY] = {45.0, 60.0, 0.1};
  q[NumericField::ReleasePosZ] = {0.0, 8.0, 0.1};
  q[NumericField::SpinRate] = {0.0, 4000.0, 50.0};
  q[NumericField::SpinAxis] = {0.0, 360.0, 5.0};
  q[NumericField::PlateX] = {-4.0, 4.0, 0.1};
  q[NumericField::PlateZ] = {-2.0, 7.0, 0.1};
  q[NumericField::SzTop] = {2.0, 5.0, 0.1};
  q[NumericField::SzBot] = {0.0, 3.0, 0.1};
  return q;
}

// Replaces every numeric field of the game with its bucket midpoint.
inline GameRecord quantize(GameRecord g, const QuantizationSpec& q) {
  for (auto& pa : g.plate_appearances) {
    for (auto& p : pa.pitches) {
      p.release_speed = q.quantize(NumericField::ReleaseSpeed, p.release_speed);
      p.release_pos[0] = q.quantize(NumericField::ReleasePosX, p.release_pos[0]);
      p.release_pos[1] = q.quantize(NumericField::ReleasePosY, p.release_pos[1]);
      p.release_pos[2] = q.quantize(NumericField::ReleasePosZ, p.release_pos[2]);
      p.spin_rate = q.quantize(NumericField::SpinRate, p.spin_rate);
      p.spin_axis = q.quantize(NumericField::SpinAxis, p.spin_axis);
      p.plate_x = q.quantize(NumericField::PlateX, p.plate_x);
      p.plate_z = q.quantize(NumericField::PlateZ, p.plate_z);
      p.sz_top = q.quantize(NumericField::SzTop, p.sz_top);
      p.sz_bot = q.quantize(NumericField::SzBot, p.sz_bot);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Vocabulary

enum class Special : TokenId { Pad = 0, Bos, Eos, GameSep, PaSep, PitchSep, Unk };
inline constexpr std::size_t kSpecialCount = 7;
inline constexpr std::array<std::string_view, kSpecialCount> kSpecialSurfaces = {
    "<pad>", "<bos>", "<eos>", "<game>", "<pa>", "<pitch>", "<unk>",
};

enum class Tag : std::uint8_t {
  GameId, Date, Home, Away, Venue, Weather, Season,
  PaId, Batter, Pitcher, Inning, Half, Outs, ScoreHome, ScoreAway, Runners,
  Count, PitchType, ReleaseSpeed, ReleasePosX, ReleasePosY, ReleasePosZ,
  SpinRate, SpinAxis, PlateX, PlateZ, SzTop, SzBot, Swing, Outcome, Event,
};
inline constexpr std::size_t kTagCount = 31;
inline constexpr std::array<std::string_view, kTagCount> kTagNames = {
    "game_id", "date",       "home",       "away",          "venue",
    "weather", "season",     "pa_id",      "batter",        "pitcher",
    "inning",  "half",       "outs",       "score_home",    "score_away",
    "runners", "count",      "pitch_type", "release_speed", "release_pos_x",
    "release_pos_y", "release_pos_z", "spin_rate", "spin_axis", "plate_x",
    "plate_z", "sz_top",     "sz_bot",     "swing",         "outcome",
    "event",
};

inline constexpr int kFirstPrintable = 0x20;
inline constexpr int kLastPrintable = 0x7e;
inline constexpr int kPrintableCount = kLastPrintable - kFirstPrintable + 1;

inline constexpr std::size_t kTokensPerPitch = 1 + 2 * 14;
inline constexpr std::size_t kTokensPerPlateAppearance =
    1 + (1 + 3) + (1 + 6) + (1 + 6) + (1 + 2) + 2 + 2 + (1 + 2) + (1 + 2) + 2 + 2;

class Vocabulary {
 public:
  Vocabulary() = default;

  // Builds the lookup tables from an ordered surface list. Throws ConfigError
  // when the list is missing a surface the codec needs or has duplicates.
  explicit Vocabulary(std::vector<std::string> surfaces)
      : surfaces_(std::move(surfaces)) {
    for (std::size_t i = 0; i < surfaces_.size(); ++i) {
      if (!ids_.emplace(surfaces_[i], static_cast<TokenId>(i)).second) {
        throw ConfigError("vocabulary: duplicate surface '" + surfaces_[i] + "'");
      }
    }
    for (std::size_t i = 0; i < kSpecialCount; ++i) {
      if (surfaces_.size() <= i || surfaces_[i] != kSpecialSurfaces[i]) {
        throw ConfigError("vocabulary: specials must occupy ids 0..6");
      }
    }
    for (std::size_t i = 0; i < kTagCount; ++i) {
      tags_[i] = require(tag_surface(static_cast<Tag>(i)));
    }
    for (std::size_t i = 0; i < kPitchTypeCount; ++i) {
      pitch_types_[i] = require(std::string(kPitchCodes[i]));
    }
    for (std::size_t i = 0; i < kOutcomeNames.size(); ++i) {
      outcomes_[i] = require("o:" + std::string(kOutcomeNames[i]));
    }
    for (std::size_t i = 0; i < kTerminalNames.size(); ++i) {
      events_[i] = require("e:" + std::string(kTerminalNames[i]));
    }
    for (int b = 0; b <= 3; ++b) {
      for (int s = 0; s <= 2; ++s) {
        counts_[count_index(b, s)] = require(count_surface(b, s));
      }
    }
    swing_[0] = require("swing:n");
    swing_[1] = require("swing:y");
    half_[0] = require("half:top");
    half_[1] = require("half:bot");
    for (int i = 0; i < 3; ++i) outs_[i] = require("outs:" + std::to_string(i));
    for (int i = 0; i < 8; ++i) runners_[i] = require(runner_surface(i));
    season_[0] = require("season:R");
    season_[1] = require("season:P");
    for (int d = 0; d < 10; ++d) digits_[d] = require("d:" + std::to_string(d));
    for (int c = 0; c < kPrintableCount; ++c) {
      chars_[c] = require(char_surface(static_cast<char>(kFirstPrintable + c)));
    }
    end_ = require("<end>");
    for (std::size_t f = 0; f < kNumericFieldCount; ++f) {
      bucket_base_[f] = require(bucket_surface(static_cast<NumericField>(f), 0));
      int n = 0;
      while (ids_.contains(bucket_surface(static_cast<NumericField>(f), n))) ++n;
      bucket_counts_[f] = n;
      for (int b = 0; b < n; ++b) {
        if (ids_.at(bucket_surface(static_cast<NumericField>(f), b)) !=
            bucket_base_[f] + static_cast<TokenId>(b)) {
          throw ConfigError("vocabulary: bucket tokens must be contiguous");
        }
      }
    }
  }

  std::size_t size() const { return surfaces_.size(); }
  const std::vector<std::string>& surfaces() const { return surfaces_; }
  const std::string& surface(TokenId id) const { return surfaces_.at(id); }

  // Unknown surfaces map to <unk>.
  TokenId lookup(std::string_view surface) const {
    auto it = ids_.find(std::string(surface));
    return it == ids_.end() ? special(Special::Unk) : it->second;
  }

  static constexpr TokenId special(Special s) { return static_cast<TokenId>(s); }
  TokenId tag(Tag t) const { return tags_[static_cast<std::size_t>(t)]; }
  TokenId pitch_type(PitchType t) const { return pitch_types_[static_cast<std::size_t>(t)]; }
  TokenId outcome(PitchOutcome o) const { return outcomes_[static_cast<std::size_t>(o)]; }
  TokenId event(TerminalEvent e) const { return events_[static_cast<std::size_t>(e)]; }
  TokenId count(int balls, int strikes) const { return counts_[count_index(balls, strikes)]; }
  TokenId swing(bool s) const { return swing_[s ? 1 : 0]; }
  TokenId half(Half h) const { return half_[static_cast<std::size_t>(h)]; }
  TokenId outs(int n) const { return outs_[n]; }
  TokenId runners(int mask) const { return runners_[mask]; }
  TokenId season(SeasonType s) const { return season_[static_cast<std::size_t>(s)]; }
  TokenId digit(int d) const { return digits_[d]; }
  TokenId character(char c) const { return chars_[c - kFirstPrintable]; }
  TokenId end() const { return end_; }
  TokenId bucket(NumericField f, int b) const {
    return bucket_base_[static_cast<std::size_t>(f)] + static_cast<TokenId>(b);
  }
  int bucket_count(NumericField f) const {
    return bucket_counts_[static_cast<std::size_t>(f)];
  }

  const std::array<TokenId, kPitchTypeCount>& pitch_type_tokens() const {
    return pitch_types_;
  }

  // Inverse lookups used by the parser; nullopt when `id` is not of the kind.
  template <std::size_t N>
  static std::optional<std::size_t> index_in(const std::array<TokenId, N>& table,
                                             TokenId id) {
    for (std::size_t i = 0; i < N; ++i) {
      if (table[i] == id) return i;
    }
    return std::nullopt;
  }
  std::optional<std::size_t> pitch_type_index(TokenId id) const { return index_in(pitch_types_, id); }
  std::optional<std::size_t> outcome_index(TokenId id) const { return index_in(outcomes_, id); }
  std::optional<std::size_t> event_index(TokenId id) const { return index_in(events_, id); }
  std::optional<std::size_t> count_state(TokenId id) const { return index_in(counts_, id); }
  std::optional<std::size_t> swing_index(TokenId id) const { return index_in(swing_, id); }
  std::optional<std::size_t> half_index(TokenId id) const { return index_in(half_, id); }
  std::optional<std::size_t> outs_index(TokenId id) const { return index_in(outs_, id); }
  std::optional<std::size_t> runners_index(TokenId id) const { return index_in(runners_, id); }
  std::optional<std::size_t> season_index(TokenId id) const { return index_in(season_, id); }
  std::optional<std::size_t> digit_index(TokenId id) const { return index_in(digits_, id); }
  std::optional<char> char_of(TokenId id) const {
    if (id >= chars_[0] && id <= chars_[kPrintableCount - 1]) {
      return static_cast<char>(kFirstPrintable + (id - chars_[0]));
    }
    return std::nullopt;
  }
  std::optional<int> bucket_index(NumericField f, TokenId id) const {
    const auto base = bucket_base_[static_cast<std::size_t>(f)];
    if (id >= base && id < base + static_cast<TokenId>(bucket_count(f))) {
      return static_cast<int>(id - base);
    }
    return std::nullopt;
  }

  static std::string tag_surface(Tag t) {
    return "@" + std::string(kTagNames[static_cast<std::size_t>(t)]);
  }
  static std::string count_surface(int b, int s) {
    return "c:" + std::to_string(b) + "-" + std::to_string(s);
  }
  static std::string runner_surface(int mask) {
    std::string s = "r:";
    for (int base = 0; base < 3; ++base) s += (mask >> base) & 1 ? '1' : '0';
    return s;
  }
  static std::string char_surface(char c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "ch:%02x", static_cast<unsigned>(c));
    return buf;
  }
  static std::string bucket_surface(NumericField f, int b) {
    return std::string(kNumericFieldNames[static_cast<std::size_t>(f)]) + "#" +
           std::to_string(b);
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.surfaces_ == b.surfaces_;
  }

 private:
  TokenId require(const std::string& surface) const {
    auto it = ids_.find(surface);
    if (it == ids_.end()) {
      throw ConfigError("vocabulary: missing surface '" + surface + "'");
    }
    return it->second;
  }

  std::vector<std::string> surfaces_;
  std::unordered_map<std::string, TokenId> ids_;
  std::array<TokenId, kTagCount> tags_{};
  std::array<TokenId, kPitchTypeCount> pitch_types_{};
  std::array<TokenId, kOutcomeNames.size()> outcomes_{};
  std::array<TokenId, kTerminalNames.size()> events_{};
  std::array<TokenId, kCountStates> counts_{};
  std::array<TokenId, 2> swing_{};
  std::array<TokenId, 2> half_{};
  std::array<TokenId, 3> outs_{};
  std::array<TokenId, 8> runners_{};
  std::array<TokenId, 2> season_{};
  std::array<TokenId, 10> digits_{};
  std::array<TokenId, kPrintableCount> chars_{};
  TokenId end_ = 0;
  std::array<TokenId, kNumericFieldCount> bucket_base_{};
  std::array<int, kNumericFieldCount> bucket_counts_{};
};

// Number of non-special, non-tag, non-bucket tokens: enumerations plus digit
// and character literals and the <end> terminator.
inline constexpr std::size_t kEnumValueCount =
    kPitchTypeCount + kOutcomeNames.size() + kTerminalNames.size() +
    kCountStates + 2 + 2 + 3 + 8 + 2 + 10 + kPrintableCount + 1;

inline Vocabulary build_vocab(const QuantizationSpec& qspec) {
  qspec.validate();
  std::vector<std::string> s;
  for (auto sp : kSpecialSurfaces) s.emplace_back(sp);
  for (std::size_t i = 0; i < kTagCount; ++i) {
    s.push_back(Vocabulary::tag_surface(static_cast<Tag>(i)));
  }
  for (auto code : kPitchCodes) s.emplace_back(code);
  for (auto o : kOutcomeNames) s.push_back("o:" + std::string(o));
  for (auto e : kTerminalNames) s.push_back("e:" + std::string(e));
  for (int b = 0; b <= 3; ++b) {
    for (int st = 0; st <= 2; ++st) s.push_back(Vocabulary::count_surface(b, st));
  }
  s.emplace_back("swing:n");
  s.emplace_back("swing:y");
  s.emplace_back("half:top");
  s.emplace_back("half:bot");
  for (int i = 0; i < 3; ++i) s.push_back("outs:" + std::to_string(i));
  for (int i = 0; i < 8; ++i) s.push_back(Vocabulary::runner_surface(i));
  s.emplace_back("season:R");
  s.emplace_back("season:P");
  for (int d = 0; d < 10; ++d) s.push_back("d:" + std::to_string(d));
  for (int c = kFirstPrintable; c <= kLastPrintable; ++c) {
    s.push_back(Vocabulary::char_surface(static_cast<char>(c)));
  }
  s.emplace_back("<end>");
  for (std::size_t f = 0; f < kNumericFieldCount; ++f) {
    const auto field = static_cast<NumericField>(f);
    for (int b = 0; b < qspec.bucket_count(field); ++b) {
      s.push_back(Vocabulary::bucket_surface(field, b));
    }
  }
  return Vocabulary(std::move(s));
}

// ---------------------------------------------------------------------------
// Token sequences

struct TokenSequence {
  std::vector<TokenId> tokens;
  std::string game_id;

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

// Offsets of the answer positions for one pitch inside a serialized game.
struct PitchAnchor {
  std::size_t pa_index = 0;
  std::size_t pitch_index = 0;
  std::size_t pa_start = 0;          // offset of <pa>
  std::size_t pitch_type_value = 0;  // offset of the pitch-type value token
  std::size_t swing_value = 0;       // offset of the swing value token
};

struct AnnotatedSequence {
  TokenSequence sequence;
  std::vector<PitchAnchor> anchors;
};

namespace detail {

class Emitter {
 public:
  Emitter(const Vocabulary& vocab, const QuantizationSpec& qspec,
          std::vector<TokenId>& out)
      : v_(vocab), q_(qspec), out_(out) {}

  void put(TokenId id) { out_.push_back(id); }
  void tag(Tag t) { put(v_.tag(t)); }

  void text(Tag t, std::string_view s) {
    tag(t);
    for (char c : s) {
      if (c < kFirstPrintable || c > kLastPrintable) {
        throw SerializationError(std::string(kTagNames[static_cast<std::size_t>(t)]),
                                 "non-printable character");
      }
      put(v_.character(c));
    }
    put(v_.end());
  }

  void digits(Tag t, std::int64_t value, int width) {
    const std::string name(kTagNames[static_cast<std::size_t>(t)]);
    std::int64_t limit = 1;
    for (int i = 0; i < width; ++i) limit *= 10;
    if (value < 0 || value >= limit) {
      throw SerializationError(name, "value " + std::to_string(value) +
                                         " does not fit " + std::to_string(width) +
                                         " digits");
    }
    tag(t);
    std::array<int, 20> ds{};
    for (int i = width - 1; i >= 0; --i) {
      ds[static_cast<std::size_t>(i)] = static_cast<int>(value % 10);
      value /= 10;
    }
    for (int i = 0; i < width; ++i) put(v_.digit(ds[static_cast<std::size_t>(i)]));
  }

  void numeric(Tag t, NumericField f, double value) {
    bool clamped = false;
    const int b = q_.bucket_of(f, value, &clamped);
    if (clamped) {
      warn("serialize: " + std::string(kNumericFieldNames[static_cast<std::size_t>(f)]) +
           " value " + std::to_string(value) + " clamped to bucket range");
    }
    tag(t);
    put(v_.bucket(f, b));
  }

  std::size_t size() const { return out_.size(); }

 private:
  const Vocabulary& v_;
  const QuantizationSpec& q_;
  std::vector<TokenId>& out_;
};

template <std::size_t N>
void check_enum(std::size_t value, std::string_view field) {
  if (value >= N) throw SerializationError(std::string(field), "unknown enumeration value");
}

}  // namespace detail

// Serializes one game and records the answer offsets of every pitch.
inline AnnotatedSequence serialize_annotated(const GameRecord& game,
                                             const Vocabulary& vocab,
                                             const QuantizationSpec& qspec) {
  if (vocab.bucket_count(NumericField::ReleaseSpeed) !=
      qspec.bucket_count(NumericField::ReleaseSpeed)) {
    throw ConfigError("serialize: vocabulary does not match quantization spec");
  }
  AnnotatedSequence result;
  auto& out = result.sequence.tokens;
  result.sequence.game_id = game.context.game_id;
  detail::Emitter e(vocab, qspec, out);

  const auto& ctx = game.context;
  e.put(Vocabulary::special(Special::Bos));
  e.put(Vocabulary::special(Special::GameSep));
  e.text(Tag::GameId, ctx.game_id);
  e.text(Tag::Date, ctx.date);
  e.text(Tag::Home, ctx.home_team);
  e.text(Tag::Away, ctx.away_team);
  e.text(Tag::Venue, ctx.venue);
  if (ctx.weather) e.text(Tag::Weather, *ctx.weather);
  detail::check_enum<2>(static_cast<std::size_t>(ctx.season_type), "season");
  e.tag(Tag::Season);
  e.put(vocab.season(ctx.season_type));

  for (std::size_t i = 0; i < game.plate_appearances.size(); ++i) {
    const auto& pa = game.plate_appearances[i];
    const auto& st = pa.inning_state;
    const std::size_t pa_start = e.size();
    e.put(Vocabulary::special(Special::PaSep));
    e.digits(Tag::PaId, pa.pa_id, 3);
    e.digits(Tag::Batter, pa.batter_id, 6);
    e.digits(Tag::Pitcher, pa.pitcher_id, 6);
    e.digits(Tag::Inning, st.inning, 2);
    detail::check_enum<2>(static_cast<std::size_t>(st.half), "half");
    e.tag(Tag::Half);
    e.put(vocab.half(st.half));
    if (st.outs < 0 || st.outs > 2) throw SerializationError("outs", "out of range");
    e.tag(Tag::Outs);
    e.put(vocab.outs(st.outs));
    e.digits(Tag::ScoreHome, st.home_score, 2);
    e.digits(Tag::ScoreAway, st.away_score, 2);
    e.tag(Tag::Runners);
    e.put(vocab.runners((st.runners[0] ? 1 : 0) | (st.runners[1] ? 2 : 0) |
                        (st.runners[2] ? 4 : 0)));

    for (std::size_t j = 0; j < pa.pitches.size(); ++j) {
      const auto& p = pa.pitches[j];
      if (p.pitch_number != static_cast<int>(j) + 1) {
        throw SerializationError("pitch_number", "pitches must be numbered 1..n");
      }
      if (p.balls < 0 || p.balls > 3 || p.strikes < 0 || p.strikes > 2) {
        throw SerializationError("count", "out of range");
      }
      detail::check_enum<kPitchTypeCount>(static_cast<std::size_t>(p.pitch_type),
                                          "pitch_type");
      detail::check_enum<kOutcomeNames.size()>(static_cast<std::size_t>(p.outcome),
                                               "outcome");
      PitchAnchor anchor{i, j, pa_start, 0, 0};
      e.put(Vocabulary::special(Special::PitchSep));
      e.tag(Tag::Count);
      e.put(vocab.count(p.balls, p.strikes));
      e.tag(Tag::PitchType);
      anchor.pitch_type_value = e.size();
      e.put(vocab.pitch_type(p.pitch_type));
      e.numeric(Tag::ReleaseSpeed, NumericField::ReleaseSpeed, p.release_speed);
      e.numeric(Tag::ReleasePosX, NumericField::ReleasePosX, p.release_pos[0]);
      e.numeric(Tag::ReleasePosY, NumericField::ReleasePosY, p.release_pos[1]);
      e.numeric(Tag::ReleasePosZ, NumericField::ReleasePosZ, p.release_pos[2]);
      e.numeric(Tag::SpinRate, NumericField::SpinRate, p.spin_rate);
      e.numeric(Tag::SpinAxis, NumericField::SpinAxis, p.spin_axis);
      e.numeric(Tag::PlateX, NumericField::PlateX, p.plate_x);
      e.numeric(Tag::PlateZ, NumericField::PlateZ, p.plate_z);
      e.numeric(Tag::SzTop, NumericField::SzTop, p.sz_top);
      e.numeric(Tag::SzBot, NumericField::SzBot, p.sz_bot);
      e.tag(Tag::Swing);
      anchor.swing_value = e.size();
      e.put(vocab.swing(p.swing));
      e.tag(Tag::Outcome);
      e.put(vocab.outcome(p.outcome));
      result.anchors.push_back(anchor);
    }
    detail::check_enum<kTerminalNames.size()>(static_cast<std::size_t>(pa.terminal_event),
                                              "event");
    e.tag(Tag::Event);
    e.put(vocab.event(pa.terminal_event));
  }
  e.put(Vocabulary::special(Special::Eos));
  return result;
}

inline TokenSequence serialize(const GameRecord& game, const Vocabulary& vocab,
                               const QuantizationSpec& qspec) {
  return serialize_annotated(game, vocab, qspec).sequence;
}

namespace detail {

class Reader {
 public:
  Reader(std::span<const TokenId> toks, const Vocabulary& vocab,
         const QuantizationSpec& qspec)
      : t_(toks), v_(vocab), q_(qspec) {}

  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ >= t_.size(); }

  TokenId peek() const {
    if (done()) throw ParseError(pos_, "unexpected end of sequence");
    return t_[pos_];
  }

  TokenId next() {
    const TokenId id = peek();
    if (id == Vocabulary::special(Special::Unk)) throw ParseError(pos_, "unknown token");
    if (id >= v_.size()) throw ParseError(pos_, "token id out of vocabulary");
    ++pos_;
    return id;
  }

  void expect(TokenId want, std::string_view what) {
    const std::size_t at = pos_;
    if (next() != want) throw ParseError(at, "expected " + std::string(what));
  }

  void expect_tag(Tag t) {
    expect(v_.tag(t), Vocabulary::tag_surface(t));
  }

  template <class F>
  auto value(std::string_view what, F&& classify) {
    const std::size_t at = pos_;
    auto r = classify(next());
    if (!r) throw ParseError(at, "expected " + std::string(what) + " value");
    return *r;
  }

  std::string text(Tag t) {
    expect_tag(t);
    std::string s;
    while (true) {
      const std::size_t at = pos_;
      const TokenId id = next();
      if (id == v_.end()) return s;
      auto c = v_.char_of(id);
      if (!c) throw ParseError(at, "expected character or <end>");
      s += *c;
    }
  }

  std::int64_t digits(Tag t, int width) {
    expect_tag(t);
    std::int64_t value = 0;
    for (int i = 0; i < width; ++i) {
      value = value * 10 + static_cast<std::int64_t>(value_of_digit());
    }
    return value;
  }

  double numeric(Tag t, NumericField f) {
    expect_tag(t);
    const int b = value("bucket", [&](TokenId id) { return v_.bucket_index(f, id); });
    return q_.midpoint(f, b);
  }

 private:
  std::size_t value_of_digit() {
    return value("digit", [&](TokenId id) { return v_.digit_index(id); });
  }

  std::span<const TokenId> t_;
  const Vocabulary& v_;
  const QuantizationSpec& q_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Inverse of serialize up to quantization. Throws ParseError with the
// offending token offset on malformed structure or <unk>.
inline GameRecord parse(std::span<const TokenId> tokens, const Vocabulary& vocab,
                        const QuantizationSpec& qspec) {
  detail::Reader r(tokens, vocab, qspec);
  GameRecord g;
  r.expect(Vocabulary::special(Special::Bos), "<bos>");
  r.expect(Vocabulary::special(Special::GameSep), "<game>");
  auto& ctx = g.context;
  ctx.game_id = r.text(Tag::GameId);
  ctx.date = r.text(Tag::Date);
  ctx.home_team = r.text(Tag::Home);
  ctx.away_team = r.text(Tag::Away);
  ctx.venue = r.text(Tag::Venue);
  if (r.peek() == vocab.tag(Tag::Weather)) ctx.weather = r.text(Tag::Weather);
  r.expect_tag(Tag::Season);
  ctx.season_type = static_cast<SeasonType>(
      r.value("season", [&](TokenId id) { return vocab.season_index(id); }));

  while (r.peek() == Vocabulary::special(Special::PaSep)) {
    r.next();
    PlateAppearance pa;
    auto& st = pa.inning_state;
    pa.pa_id = r.digits(Tag::PaId, 3);
    pa.batter_id = r.digits(Tag::Batter, 6);
    pa.pitcher_id = r.digits(Tag::Pitcher, 6);
    st.inning = static_cast<int>(r.digits(Tag::Inning, 2));
    r.expect_tag(Tag::Half);
    st.half = static_cast<Half>(r.value("half", [&](TokenId id) { return vocab.half_index(id); }));
    r.expect_tag(Tag::Outs);
    st.outs = static_cast<int>(r.value("outs", [&](TokenId id) { return vocab.outs_index(id); }));
    st.home_score = static_cast<int>(r.digits(Tag::ScoreHome, 2));
    st.away_score = static_cast<int>(r.digits(Tag::ScoreAway, 2));
    r.expect_tag(Tag::Runners);
    const auto mask = r.value("runners", [&](TokenId id) { return vocab.runners_index(id); });
    st.runners = {(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0};

    while (r.peek() == Vocabulary::special(Special::PitchSep)) {
      r.next();
      PitchEvent p;
      p.pitch_number = static_cast<int>(pa.pitches.size()) + 1;
      r.expect_tag(Tag::Count);
      const auto c = r.value("count", [&](TokenId id) { return vocab.count_state(id); });
      p.balls = static_cast<int>(c / 3);
      p.strikes = static_cast<int>(c % 3);
      r.expect_tag(Tag::PitchType);
      p.pitch_type = static_cast<PitchType>(
          r.value("pitch_type", [&](TokenId id) { return vocab.pitch_type_index(id); }));
      p.release_speed = r.numeric(Tag::ReleaseSpeed, NumericField::ReleaseSpeed);
      p.release_pos[0] = r.numeric(Tag::ReleasePosX, NumericField::ReleasePosX);
      p.release_pos[1] = r.numeric(Tag::ReleasePosY, NumericField::ReleasePosY);
      p.release_pos[2] = r.numeric(Tag::ReleasePosZ, NumericField::ReleasePosZ);
      p.spin_rate = r.numeric(Tag::SpinRate, NumericField::SpinRate);
      p.spin_axis = r.numeric(Tag::SpinAxis, NumericField::SpinAxis);
      p.plate_x = r.numeric(Tag::PlateX, NumericField::PlateX);
      p.plate_z = r.numeric(Tag::PlateZ, NumericField::PlateZ);
      p.sz_top = r.numeric(Tag::SzTop, NumericField::SzTop);
      p.sz_bot = r.numeric(Tag::SzBot, NumericField::SzBot);
      r.expect_tag(Tag::Swing);
      p.swing = r.value("swing", [&](TokenId id) { return vocab.swing_index(id); }) == 1;
      r.expect_tag(Tag::Outcome);
      p.outcome = static_cast<PitchOutcome>(
          r.value("outcome", [&](TokenId id) { return vocab.outcome_index(id); }));
      pa.pitches.push_back(p);
    }
    r.expect_tag(Tag::Event);
    pa.terminal_event = static_cast<TerminalEvent>(
        r.value("event", [&](TokenId id) { return vocab.event_index(id); }));
    g.plate_appearances.push_back(std::move(pa));
  }
  if (r.done()) throw ParseError(r.pos(), "missing <eos>");
  r.expect(Vocabulary::special(Special::Eos), "<eos>");
  if (!r.done()) throw ParseError(r.pos(), "trailing tokens after <eos>");
  return g;
}

inline GameRecord parse(const TokenSequence& seq, const Vocabulary& vocab,
                        const QuantizationSpec& qspec) {
  return parse(std::span<const TokenId>(seq.tokens), vocab, qspec);
}

// ---------------------------------------------------------------------------
// Windowing

struct Window {
  std::vector<TokenId> tokens;
  std::size_t offset = 0;

  friend bool operator==(const Window&, const Window&) = default;
};

// Disjoint chunks of at most `width` tokens at offsets 0, W, 2W, ...
inline std::vector<Window> window(std::span<const TokenId> seq, std::size_t width) {
  if (width < 2) throw ConfigError("window: width must be at least 2");
  std::vector<Window> out;
  out.reserve((seq.size() + width - 1) / width);
  for (std::size_t off = 0; off < seq.size(); off += width) {
    const std::size_t n = std::min(width, seq.size() - off);
    out.push_back({std::vector<TokenId>(seq.begin() + static_cast<std::ptrdiff_t>(off),
                                        seq.begin() + static_cast<std::ptrdiff_t>(off + n)),
                   off});
  }
  return out;
}

inline std::vector<Window> window(const TokenSequence& seq, std::size_t width) {
  return window(std::span<const TokenId>(seq.tokens), width);
}

// ---------------------------------------------------------------------------
// Files

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff),
                     static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

inline bool get_u32(std::istream& is, std::uint32_t& v) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) return false;
  v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
      (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  return true;
}

}  // namespace detail

// One record per game: little-endian u32 count, then that many u32 ids.
inline void write_token_file(const std::filesystem::path& path,
                             std::span<const TokenSequence> seqs) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write token file " + path.string());
  for (const auto& s : seqs) {
    detail::put_u32(os, static_cast<std::uint32_t>(s.tokens.size()));
    for (TokenId id : s.tokens) detail::put_u32(os, id);
  }
  if (!os) throw IoError("failed writing token file " + path.string());
}

inline std::vector<std::vector<TokenId>> read_token_file(
    const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open token file " + path.string());
  std::vector<std::vector<TokenId>> out;
  std::uint32_t n = 0;
  while (detail::get_u32(is, n)) {
    std::vector<TokenId> rec(n);
    for (auto& id : rec) {
      if (!detail::get_u32(is, id)) {
        throw DataError("truncated token file " + path.string());
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

// Plain text, one surface per line; line number (0-based) is the id.
inline void write_vocab_file(const std::filesystem::path& path, const Vocabulary& v) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write vocabulary file " + path.string());
  for (const auto& s : v.surfaces()) os << s << '\n';
}

inline Vocabulary read_vocab_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open vocabulary file " + path.string());
  std::vector<std::string> surfaces;
  for (std::string line; std::getline(is, line);) surfaces.push_back(line);
  return Vocabulary(std::move(surfaces));
}

}  // namespace sabergen
