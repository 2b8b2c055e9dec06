#pragma once

// Structured domain types for games, plate appearances and pitches.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sabergen {

enum class PitchType : std::uint8_t {
  FourSeam,
  Sinker,
  Cutter,
  Slider,
  Sweeper,
  Curveball,
  KnuckleCurve,
  Changeup,
  Splitter,
  Knuckleball,
  Eephus,
  Other,
};

inline constexpr std::size_t kPitchTypeCount = 12;

inline constexpr std::array<PitchType, kPitchTypeCount> kAllPitchTypes = {
    PitchType::FourSeam,  PitchType::Sinker,       PitchType::Cutter,
    PitchType::Slider,    PitchType::Sweeper,      PitchType::Curveball,
    PitchType::KnuckleCurve, PitchType::Changeup,  PitchType::Splitter,
    PitchType::Knuckleball,  PitchType::Eephus,    PitchType::Other,
};

inline constexpr std::array<std::string_view, kPitchTypeCount> kPitchCodes = {
    "FF", "SI", "FC", "SL", "ST", "CU", "KC", "CH", "FS", "KN", "EP", "XX",
};

constexpr std::string_view pitch_code(PitchType t) {
  return kPitchCodes[static_cast<std::size_t>(t)];
}

constexpr std::optional<PitchType> pitch_type_from_code(std::string_view code) {
  for (std::size_t i = 0; i < kPitchTypeCount; ++i) {
    if (kPitchCodes[i] == code) return kAllPitchTypes[i];
  }
  return std::nullopt;
}

// Lenient mapping used by ingestion: unknown or historical codes become Other.
inline PitchType pitch_type_from_code_or_other(std::string_view code) {
  return pitch_type_from_code(code).value_or(PitchType::Other);
}

constexpr bool is_fastball(PitchType t) {
  return t == PitchType::FourSeam || t == PitchType::Sinker ||
         t == PitchType::Cutter;
}

enum class PitchOutcome : std::uint8_t {
  Ball,
  CalledStrike,
  SwingingStrike,
  Foul,
  InPlay,
  HitByPitch,
  Other,
};

inline constexpr std::array<std::string_view, 7> kOutcomeNames = {
    "ball", "called_strike", "swinging_strike", "foul",
    "in_play", "hit_by_pitch", "other",
};

constexpr std::string_view outcome_name(PitchOutcome o) {
  return kOutcomeNames[static_cast<std::size_t>(o)];
}

constexpr bool is_swing_outcome(PitchOutcome o) {
  return o == PitchOutcome::SwingingStrike || o == PitchOutcome::Foul ||
         o == PitchOutcome::InPlay;
}

enum class TerminalEvent : std::uint8_t {
  Strikeout,
  Walk,
  HitByPitch,
  InPlayOut,
  Single,
  Double,
  Triple,
  HomeRun,
  Other,
};

inline constexpr std::array<std::string_view, 9> kTerminalNames = {
    "strikeout", "walk",   "hit_by_pitch", "in_play_out", "single",
    "double",    "triple", "home_run",     "other",
};

constexpr std::string_view terminal_name(TerminalEvent e) {
  return kTerminalNames[static_cast<std::size_t>(e)];
}

enum class Half : std::uint8_t { Top, Bottom };
enum class SeasonType : std::uint8_t { Regular, Postseason };

struct PitchEvent {
  PitchType pitch_type = PitchType::FourSeam;
  double release_speed = 0.0;              // mph
  std::array<double, 3> release_pos{};     // ft
  double spin_rate = 0.0;                  // rpm
  double spin_axis = 0.0;                  // degrees
  double plate_x = 0.0;                    // ft, catcher view
  double plate_z = 0.0;                    // ft
  double sz_top = 0.0;
  double sz_bot = 0.0;
  int balls = 0;
  int strikes = 0;
  bool swing = false;
  PitchOutcome outcome = PitchOutcome::Ball;
  int pitch_number = 1;

  friend bool operator==(const PitchEvent&, const PitchEvent&) = default;
};

struct InningState {
  int inning = 1;
  Half half = Half::Top;
  int outs = 0;
  int home_score = 0;
  int away_score = 0;
  std::array<bool, 3> runners{};  // first, second, third

  friend bool operator==(const InningState&, const InningState&) = default;
};

struct GameContext {
  std::string game_id;
  std::string date;  // YYYY-MM-DD
  std::string home_team;
  std::string away_team;
  std::string venue;
  std::optional<std::string> weather;
  SeasonType season_type = SeasonType::Regular;

  friend bool operator==(const GameContext&, const GameContext&) = default;
};

struct PlateAppearance {
  std::int64_t pa_id = 0;
  std::int64_t batter_id = 0;
  std::int64_t pitcher_id = 0;
  InningState inning_state;
  std::vector<PitchEvent> pitches;
  TerminalEvent terminal_event = TerminalEvent::Other;

  friend bool operator==(const PlateAppearance&,
                         const PlateAppearance&) = default;
};

struct GameRecord {
  GameContext context;
  std::vector<PlateAppearance> plate_appearances;

  friend bool operator==(const GameRecord&, const GameRecord&) = default;
};

// ---------------------------------------------------------------------------
// Count rule

struct Count {
  int balls = 0;
  int strikes = 0;
  friend bool operator==(const Count&, const Count&) = default;
};

// Count after a pitch with the given outcome. May return balls == 4 or
// strikes == 3, which means the plate appearance must end on this pitch.
constexpr Count next_count(Count c, PitchOutcome outcome) {
  switch (outcome) {
    case PitchOutcome::Ball:
      ++c.balls;
      break;
    case PitchOutcome::CalledStrike:
    case PitchOutcome::SwingingStrike:
      ++c.strikes;
      break;
    case PitchOutcome::Foul:
      if (c.strikes < 2) ++c.strikes;
      break;
    case PitchOutcome::InPlay:
    case PitchOutcome::HitByPitch:
    case PitchOutcome::Other:
      break;
  }
  return c;
}

constexpr int count_index(int balls, int strikes) { return balls * 3 + strikes; }
inline constexpr int kCountStates = 12;

// ---------------------------------------------------------------------------
// Strike zone

inline constexpr double kZoneHalfWidth = 0.83;  // ft: half plate + ball radius

inline bool in_zone(const PitchEvent& p) {
  return std::abs(p.plate_x) <= kZoneHalfWidth && p.sz_bot <= p.plate_z &&
         p.plate_z <= p.sz_top;
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string path;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool contains(std::string_view message) const {
    for (const auto& v : violations) {
      if (v.message == message) return true;
    }
    return false;
  }
};

namespace detail {

inline std::string pitch_path(std::size_t pa, std::size_t pitch) {
  return "pa[" + std::to_string(pa) + "].pitch[" + std::to_string(pitch) + "]";
}

inline void validate_pitch(const PitchEvent& p, const std::string& path,
                           std::vector<Violation>& out) {
  auto add = [&](std::string msg) { out.push_back({path, std::move(msg)}); };
  if (p.swing != is_swing_outcome(p.outcome)) add("swing/outcome mismatch");
  if (!(p.sz_bot < p.sz_top)) add("strike zone bounds inverted");
  if (!(p.release_speed > 30.0 && p.release_speed < 110.0)) {
    add("release_speed out of range");
  }
  if (!(p.spin_rate >= 0.0 && p.spin_rate < 4000.0)) add("spin_rate out of range");
  if (!(p.spin_axis >= 0.0 && p.spin_axis < 360.0)) add("spin_axis out of range");
  if (p.balls < 0 || p.balls > 3) add("balls out of range");
  if (p.strikes < 0 || p.strikes > 2) add("strikes out of range");
  bool finite = std::isfinite(p.plate_x) && std::isfinite(p.plate_z);
  for (double v : p.release_pos) finite = finite && std::isfinite(v);
  if (!finite) add("non-finite coordinate");
}

}  // namespace detail

// Collects every invariant violation in `game`; violations are data, never
// exceptions. Paths look like "pa[3].pitch[1]".
inline ValidationResult validate_game(const GameRecord& game) {
  std::vector<Violation> out;
  const auto& ctx = game.context;
  if (ctx.home_team == ctx.away_team) {
    out.push_back({"context", "home_team equals away_team"});
  }

  std::optional<std::int64_t> last_pa_id;
  std::array<int, 2> last_inning = {0, 0};
  for (std::size_t i = 0; i < game.plate_appearances.size(); ++i) {
    const auto& pa = game.plate_appearances[i];
    const std::string pa_path = "pa[" + std::to_string(i) + "]";
    const auto& st = pa.inning_state;

    if (last_pa_id && pa.pa_id <= *last_pa_id) {
      out.push_back({pa_path, "plate appearances out of order"});
    }
    last_pa_id = pa.pa_id;
    if (st.inning < 1) out.push_back({pa_path, "inning out of range"});
    if (st.outs < 0 || st.outs > 2) out.push_back({pa_path, "outs out of range"});
    if (st.home_score < 0 || st.away_score < 0) {
      out.push_back({pa_path, "negative score"});
    }
    auto& last = last_inning[static_cast<std::size_t>(st.half)];
    if (st.inning < last) {
      out.push_back({pa_path, "inning decreased within half sequence"});
    }
    last = st.inning;

    if (pa.pitches.empty()) {
      out.push_back({pa_path, "plate appearance has no pitches"});
      continue;
    }
    for (std::size_t j = 0; j < pa.pitches.size(); ++j) {
      const auto& p = pa.pitches[j];
      const auto path = detail::pitch_path(i, j);
      detail::validate_pitch(p, path, out);
      if (j == 0) {
        if (p.pitch_number != 1) out.push_back({path, "pitch_number must start at 1"});
        continue;
      }
      const auto& prev = pa.pitches[j - 1];
      if (p.pitch_number <= prev.pitch_number) {
        out.push_back({path, "pitch_number not increasing"});
      }
      const Count expect = next_count({prev.balls, prev.strikes}, prev.outcome);
      if (expect != Count{p.balls, p.strikes} || expect.balls > 3 ||
          expect.strikes > 2) {
        out.push_back({path, "illegal count transition"});
      }
    }
  }
  return {std::move(out)};
}

}  // namespace sabergen
