#pragma once

// JSON encoding of GameRecords (one game per line) and a Statcast-style CSV
// writer used to export simulated corpora.

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sabergen/errors.hpp"
#include "sabergen/event_model.hpp"

namespace sabergen {

inline void to_json(nlohmann::json& j, const PitchEvent& p) {
  j = {{"pitch_type", pitch_code(p.pitch_type)},
       {"release_speed", p.release_speed},
       {"release_pos", p.release_pos},
       {"spin_rate", p.spin_rate},
       {"spin_axis", p.spin_axis},
       {"plate_x", p.plate_x},
       {"plate_z", p.plate_z},
       {"sz_top", p.sz_top},
       {"sz_bot", p.sz_bot},
       {"balls", p.balls},
       {"strikes", p.strikes},
       {"swing", p.swing},
       {"outcome", outcome_name(p.outcome)},
       {"pitch_number", p.pitch_number}};
}

namespace detail {

template <std::size_t N>
std::size_t name_index(const std::array<std::string_view, N>& names,
                       const std::string& value, const char* field) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == value) return i;
  }
  throw DataError(std::string("unknown ") + field + " '" + value + "'");
}

}  // namespace detail

inline void from_json(const nlohmann::json& j, PitchEvent& p) {
  const auto code = j.at("pitch_type").get<std::string>();
  const auto t = pitch_type_from_code(code);
  if (!t) throw DataError("unknown pitch_type '" + code + "'");
  p.pitch_type = *t;
  j.at("release_speed").get_to(p.release_speed);
  j.at("release_pos").get_to(p.release_pos);
  j.at("spin_rate").get_to(p.spin_rate);
  j.at("spin_axis").get_to(p.spin_axis);
  j.at("plate_x").get_to(p.plate_x);
  j.at("plate_z").get_to(p.plate_z);
  j.at("sz_top").get_to(p.sz_top);
  j.at("sz_bot").get_to(p.sz_bot);
  j.at("balls").get_to(p.balls);
  j.at("strikes").get_to(p.strikes);
  j.at("swing").get_to(p.swing);
  p.outcome = static_cast<PitchOutcome>(
      detail::name_index(kOutcomeNames, j.at("outcome").get<std::string>(), "outcome"));
  j.at("pitch_number").get_to(p.pitch_number);
}

inline void to_json(nlohmann::json& j, const PlateAppearance& pa) {
  const auto& s = pa.inning_state;
  j = {{"pa_id", pa.pa_id},
       {"batter_id", pa.batter_id},
       {"pitcher_id", pa.pitcher_id},
       {"inning", s.inning},
       {"half", s.half == Half::Top ? "top" : "bottom"},
       {"outs", s.outs},
       {"home_score", s.home_score},
       {"away_score", s.away_score},
       {"runners", s.runners},
       {"pitches", pa.pitches},
       {"terminal_event", terminal_name(pa.terminal_event)}};
}

inline void from_json(const nlohmann::json& j, PlateAppearance& pa) {
  auto& s = pa.inning_state;
  j.at("pa_id").get_to(pa.pa_id);
  j.at("batter_id").get_to(pa.batter_id);
  j.at("pitcher_id").get_to(pa.pitcher_id);
  j.at("inning").get_to(s.inning);
  s.half = j.at("half").get<std::string>() == "top" ? Half::Top : Half::Bottom;
  j.at("outs").get_to(s.outs);
  j.at("home_score").get_to(s.home_score);
  j.at("away_score").get_to(s.away_score);
  j.at("runners").get_to(s.runners);
  j.at("pitches").get_to(pa.pitches);
  pa.terminal_event = static_cast<TerminalEvent>(detail::name_index(
      kTerminalNames, j.at("terminal_event").get<std::string>(), "terminal_event"));
}

inline void to_json(nlohmann::json& j, const GameRecord& g) {
  const auto& c = g.context;
  j = {{"game_id", c.game_id},
       {"date", c.date},
       {"home_team", c.home_team},
       {"away_team", c.away_team},
       {"venue", c.venue},
       {"season_type", c.season_type == SeasonType::Regular ? "regular" : "postseason"},
       {"plate_appearances", g.plate_appearances}};
  if (c.weather) j["weather"] = *c.weather;
}

inline void from_json(const nlohmann::json& j, GameRecord& g) {
  auto& c = g.context;
  j.at("game_id").get_to(c.game_id);
  j.at("date").get_to(c.date);
  j.at("home_team").get_to(c.home_team);
  j.at("away_team").get_to(c.away_team);
  j.at("venue").get_to(c.venue);
  if (j.contains("weather")) c.weather = j.at("weather").get<std::string>();
  c.season_type = j.at("season_type").get<std::string>() == "regular" ? SeasonType::Regular
                                                                       : SeasonType::Postseason;
  j.at("plate_appearances").get_to(g.plate_appearances);
}

inline void write_games_jsonl(const std::filesystem::path& path,
                              std::span<const GameRecord> games) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write games file " + path.string());
  for (const auto& g : games) os << nlohmann::json(g).dump() << '\n';
  if (!os) throw IoError("failed writing games file " + path.string());
}

inline std::vector<GameRecord> read_games_jsonl(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open games file " + path.string());
  std::vector<GameRecord> games;
  std::size_t line_no = 0;
  for (std::string line; std::getline(is, line);) {
    ++line_no;
    if (line.empty()) continue;
    try {
      games.push_back(nlohmann::json::parse(line).get<GameRecord>());
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return games;
}

// ---------------------------------------------------------------------------
// Statcast-style CSV export

inline constexpr std::array<std::string_view, 32> kStatcastColumns = {
    "game_pk",        "game_date",       "game_type",       "home_team",
    "away_team",      "inning",          "inning_topbot",   "outs_when_up",
    "balls",          "strikes",         "at_bat_number",   "pitch_number",
    "batter",         "pitcher",         "pitch_type",      "release_speed",
    "release_spin_rate", "spin_axis",    "release_pos_x",   "release_pos_y",
    "release_pos_z",  "plate_x",         "plate_z",         "sz_top",
    "sz_bot",         "description",     "events",          "home_score",
    "away_score",     "on_1b",           "on_2b",           "on_3b",
};

inline std::string_view statcast_description(PitchOutcome o) {
  switch (o) {
    case PitchOutcome::Ball: return "ball";
    case PitchOutcome::CalledStrike: return "called_strike";
    case PitchOutcome::SwingingStrike: return "swinging_strike";
    case PitchOutcome::Foul: return "foul";
    case PitchOutcome::InPlay: return "hit_into_play";
    case PitchOutcome::HitByPitch: return "hit_by_pitch";
    case PitchOutcome::Other: return "pitchout_other";
  }
  return "";
}

inline std::string_view statcast_event(TerminalEvent e) {
  switch (e) {
    case TerminalEvent::Strikeout: return "strikeout";
    case TerminalEvent::Walk: return "walk";
    case TerminalEvent::HitByPitch: return "hit_by_pitch";
    case TerminalEvent::InPlayOut: return "field_out";
    case TerminalEvent::Single: return "single";
    case TerminalEvent::Double: return "double";
    case TerminalEvent::Triple: return "triple";
    case TerminalEvent::HomeRun: return "home_run";
    case TerminalEvent::Other: return "other_out";
  }
  return "";
}

namespace detail {

inline std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace detail

// Writes one row per pitch. Numeric game ids are required by the format, so
// the game's index in `games` (plus `first_game_pk`) is used as game_pk.
inline void write_statcast_csv(const std::filesystem::path& path,
                               std::span<const GameRecord> games,
                               std::int64_t first_game_pk = 1) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write csv " + path.string());
  for (std::size_t i = 0; i < kStatcastColumns.size(); ++i) {
    os << (i ? "," : "") << kStatcastColumns[i];
  }
  os << '\n';
  for (std::size_t gi = 0; gi < games.size(); ++gi) {
    const auto& g = games[gi];
    const auto& c = g.context;
    const std::string game_type = c.season_type == SeasonType::Regular ? "R" : "W";
    for (const auto& pa : g.plate_appearances) {
      const auto& s = pa.inning_state;
      for (std::size_t j = 0; j < pa.pitches.size(); ++j) {
        const auto& p = pa.pitches[j];
        const bool last = j + 1 == pa.pitches.size();
        const std::vector<std::string> row = {
            std::to_string(first_game_pk + static_cast<std::int64_t>(gi)),
            c.date,
            game_type,
            detail::csv_quote(c.home_team),
            detail::csv_quote(c.away_team),
            std::to_string(s.inning),
            s.half == Half::Top ? "Top" : "Bot",
            std::to_string(s.outs),
            std::to_string(p.balls),
            std::to_string(p.strikes),
            std::to_string(pa.pa_id),
            std::to_string(p.pitch_number),
            std::to_string(pa.batter_id),
            std::to_string(pa.pitcher_id),
            std::string(pitch_code(p.pitch_type)),
            detail::csv_number(p.release_speed),
            detail::csv_number(p.spin_rate),
            detail::csv_number(p.spin_axis),
            detail::csv_number(p.release_pos[0]),
            detail::csv_number(p.release_pos[1]),
            detail::csv_number(p.release_pos[2]),
            detail::csv_number(p.plate_x),
            detail::csv_number(p.plate_z),
            detail::csv_number(p.sz_top),
            detail::csv_number(p.sz_bot),
            std::string(statcast_description(p.outcome)),
            last ? std::string(statcast_event(pa.terminal_event)) : std::string(),
            std::to_string(s.home_score),
            std::to_string(s.away_score),
            s.runners[0] ? "1" : "",
            s.runners[1] ? "1" : "",
            s.runners[2] ? "1" : "",
        };
        for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << row[k];
        os << '\n';
      }
    }
  }
}

}  // namespace sabergen
