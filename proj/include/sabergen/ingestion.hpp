#pragma once

// Statcast-style CSV ingestion and the regular-season / postseason split.

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sabergen/errors.hpp"
#include "sabergen/event_model.hpp"
#include "sabergen/game_io.hpp"

namespace sabergen {

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
  std::map<std::string, std::size_t> row_drop_reasons;
  std::size_t games_read = 0;
  std::size_t games_kept = 0;
  std::size_t games_dropped = 0;
  std::map<std::string, std::size_t> game_drop_reasons;

  void drop_row(const std::string& reason) {
    ++rows_dropped;
    ++row_drop_reasons[reason];
  }
  void drop_game(const std::string& reason) {
    ++games_dropped;
    ++game_drop_reasons[reason];
  }
};

inline void to_json(nlohmann::json& j, const IngestReport& r) {
  j = {{"rows_read", r.rows_read},
       {"rows_dropped", r.rows_dropped},
       {"row_drop_reasons", r.row_drop_reasons},
       {"games_read", r.games_read},
       {"games_kept", r.games_kept},
       {"games_dropped", r.games_dropped},
       {"game_drop_reasons", r.game_drop_reasons}};
}

struct IngestResult {
  std::vector<GameRecord> games;
  IngestReport report;
};

// Maps canonical column names onto the names used in a particular file.
// Columns not listed keep their canonical name.
struct CsvSchema {
  std::map<std::string, std::string> renames;

  std::string column(std::string_view canonical) const {
    auto it = renames.find(std::string(canonical));
    return it == renames.end() ? std::string(canonical) : it->second;
  }
};

inline const char* const kNonRegularPostseason = "non-regular/postseason";

// Splits one CSV record into fields (RFC 4180 quoting, no embedded newlines).
inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

// Statcast description -> (outcome, swing). Swing is true exactly for the
// swinging descriptions; everything swung at maps to a swing outcome.
inline PitchOutcome outcome_from_description(std::string_view d) {
  if (d == "ball" || d == "blocked_ball" || d == "intent_ball" || d == "pitchout" ||
      d == "automatic_ball") {
    return PitchOutcome::Ball;
  }
  if (d == "called_strike" || d == "automatic_strike") return PitchOutcome::CalledStrike;
  if (d == "swinging_strike" || d == "swinging_strike_blocked" || d == "foul_tip" ||
      d == "missed_bunt" || d == "foul_bunt" || d == "bunt_foul_tip") {
    return PitchOutcome::SwingingStrike;
  }
  if (d == "foul") return PitchOutcome::Foul;
  if (d == "hit_into_play" || d == "hit_into_play_no_out" || d == "hit_into_play_score") {
    return PitchOutcome::InPlay;
  }
  if (d == "hit_by_pitch") return PitchOutcome::HitByPitch;
  return PitchOutcome::Other;
}

inline bool swing_from_description(std::string_view d) {
  static constexpr std::array<std::string_view, 10> kSwings = {
      "swinging_strike", "swinging_strike_blocked", "foul",        "foul_tip",
      "hit_into_play",   "hit_into_play_no_out",    "hit_into_play_score",
      "foul_bunt",       "missed_bunt",             "bunt_foul_tip"};
  return std::find(kSwings.begin(), kSwings.end(), d) != kSwings.end();
}

inline TerminalEvent terminal_from_event(std::string_view e) {
  if (e == "strikeout" || e == "strikeout_double_play") return TerminalEvent::Strikeout;
  if (e == "walk" || e == "intent_walk") return TerminalEvent::Walk;
  if (e == "hit_by_pitch") return TerminalEvent::HitByPitch;
  if (e == "single") return TerminalEvent::Single;
  if (e == "double") return TerminalEvent::Double;
  if (e == "triple") return TerminalEvent::Triple;
  if (e == "home_run") return TerminalEvent::HomeRun;
  if (e == "field_out" || e == "force_out" || e == "grounded_into_double_play" ||
      e == "double_play" || e == "triple_play" || e == "fielders_choice_out" ||
      e == "sac_fly" || e == "sac_bunt" || e == "sac_fly_double_play" ||
      e == "sac_bunt_double_play") {
    return TerminalEvent::InPlayOut;
  }
  return TerminalEvent::Other;
}

inline std::optional<SeasonType> season_from_game_type(std::string_view t) {
  if (t == "R") return SeasonType::Regular;
  if (t == "F" || t == "D" || t == "L" || t == "W") return SeasonType::Postseason;
  return std::nullopt;
}

namespace detail {

inline constexpr std::array<std::string_view, 32> kRequiredColumns = kStatcastColumns;

inline bool is_null(std::string_view s) {
  return s.empty() || s == "NA" || s == "null" || s == "NULL" || s == "NaN";
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (is_null(s)) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

struct CsvRow {
  std::string game_pk;
  std::string game_date;
  std::string game_type;
  std::string home_team;
  std::string away_team;
  std::int64_t at_bat_number = 0;
  int pitch_number = 0;
  std::int64_t batter = 0;
  std::int64_t pitcher = 0;
  int inning = 0;
  Half half = Half::Top;
  int outs = 0;
  int home_score = 0;
  int away_score = 0;
  std::array<bool, 3> runners{};
  PitchEvent pitch;
  std::string events;
};

}  // namespace detail

// Reads Statcast-style CSV text. Rows are grouped by game_pk and ordered by
// (at_bat_number, pitch_number); pitches are renumbered 1..n per plate
// appearance. Games failing validate_game are dropped and counted.
inline IngestResult ingest_csv(std::istream& in, const CsvSchema& schema = {}) {
  IngestResult result;
  auto& report = result.report;

  std::string line;
  if (!std::getline(in, line)) throw DataError("csv: missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_csv_line(line);
  std::unordered_map<std::string, std::size_t> col_index;
  for (std::size_t i = 0; i < header.size(); ++i) col_index.emplace(header[i], i);
  std::array<std::size_t, detail::kRequiredColumns.size()> idx{};
  for (std::size_t i = 0; i < detail::kRequiredColumns.size(); ++i) {
    const auto name = schema.column(detail::kRequiredColumns[i]);
    auto it = col_index.find(name);
    if (it == col_index.end()) throw DataError("csv: missing required column '" + name + "'");
    idx[i] = it->second;
  }
  auto col = [&](std::string_view canonical) {
    for (std::size_t i = 0; i < detail::kRequiredColumns.size(); ++i) {
      if (detail::kRequiredColumns[i] == canonical) return idx[i];
    }
    throw std::logic_error("unknown column");
  };
  const std::size_t c_game_pk = col("game_pk"), c_date = col("game_date"),
                    c_type = col("game_type"), c_home = col("home_team"),
                    c_away = col("away_team"), c_inning = col("inning"),
                    c_topbot = col("inning_topbot"), c_outs = col("outs_when_up"),
                    c_balls = col("balls"), c_strikes = col("strikes"),
                    c_ab = col("at_bat_number"), c_pn = col("pitch_number"),
                    c_batter = col("batter"), c_pitcher = col("pitcher"),
                    c_ptype = col("pitch_type"), c_speed = col("release_speed"),
                    c_spin = col("release_spin_rate"), c_axis = col("spin_axis"),
                    c_rx = col("release_pos_x"), c_ry = col("release_pos_y"),
                    c_rz = col("release_pos_z"), c_px = col("plate_x"),
                    c_pz = col("plate_z"), c_top = col("sz_top"), c_bot = col("sz_bot"),
                    c_desc = col("description"), c_events = col("events"),
                    c_hs = col("home_score"), c_as = col("away_score"),
                    c_on1 = col("on_1b"), c_on2 = col("on_2b"), c_on3 = col("on_3b");

  std::map<std::string, std::vector<detail::CsvRow>> by_game;
  std::vector<std::string> game_order;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++report.rows_read;
    const auto f = split_csv_line(line);
    if (f.size() < header.size()) {
      report.drop_row("short row");
      continue;
    }
    detail::CsvRow r;
    r.game_pk = f[c_game_pk];
    r.game_date = f[c_date];
    r.game_type = f[c_type];
    r.home_team = f[c_home];
    r.away_team = f[c_away];
    r.events = f[c_events];
    auto& p = r.pitch;
    if (detail::is_null(f[c_px]) || detail::is_null(f[c_pz])) {
      report.drop_row("missing plate location");
      continue;
    }
    const bool ok =
        !r.game_pk.empty() && detail::parse_number(f[c_ab], r.at_bat_number) &&
        detail::parse_number(f[c_pn], r.pitch_number) &&
        detail::parse_number(f[c_batter], r.batter) &&
        detail::parse_number(f[c_pitcher], r.pitcher) &&
        detail::parse_number(f[c_inning], r.inning) &&
        detail::parse_number(f[c_outs], r.outs) &&
        detail::parse_number(f[c_hs], r.home_score) &&
        detail::parse_number(f[c_as], r.away_score) &&
        detail::parse_number(f[c_balls], p.balls) &&
        detail::parse_number(f[c_strikes], p.strikes) &&
        detail::parse_number(f[c_speed], p.release_speed) &&
        detail::parse_number(f[c_spin], p.spin_rate) &&
        detail::parse_number(f[c_axis], p.spin_axis) &&
        detail::parse_number(f[c_rx], p.release_pos[0]) &&
        detail::parse_number(f[c_ry], p.release_pos[1]) &&
        detail::parse_number(f[c_rz], p.release_pos[2]) &&
        detail::parse_number(f[c_px], p.plate_x) &&
        detail::parse_number(f[c_pz], p.plate_z) &&
        detail::parse_number(f[c_top], p.sz_top) &&
        detail::parse_number(f[c_bot], p.sz_bot);
    if (!ok) {
      report.drop_row("unparseable field");
      continue;
    }
    const auto& topbot = f[c_topbot];
    if (topbot == "Top") {
      r.half = Half::Top;
    } else if (topbot == "Bot") {
      r.half = Half::Bottom;
    } else {
      report.drop_row("unparseable field");
      continue;
    }
    r.runners = {!detail::is_null(f[c_on1]), !detail::is_null(f[c_on2]),
                 !detail::is_null(f[c_on3])};
    p.pitch_type = pitch_type_from_code_or_other(f[c_ptype]);
    p.outcome = outcome_from_description(f[c_desc]);
    p.swing = swing_from_description(f[c_desc]);

    auto [it, inserted] = by_game.try_emplace(r.game_pk);
    if (inserted) game_order.push_back(r.game_pk);
    it->second.push_back(std::move(r));
  }

  std::sort(game_order.begin(), game_order.end(), [&](const auto& a, const auto& b) {
    const auto& ra = by_game.at(a).front();
    const auto& rb = by_game.at(b).front();
    if (ra.game_date != rb.game_date) return ra.game_date < rb.game_date;
    return a < b;
  });

  for (const auto& pk : game_order) {
    auto& rows = by_game.at(pk);
    ++report.games_read;
    const auto season = season_from_game_type(rows.front().game_type);
    if (!season) {
      report.drop_game(kNonRegularPostseason);
      continue;
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      if (a.at_bat_number != b.at_bat_number) return a.at_bat_number < b.at_bat_number;
      return a.pitch_number < b.pitch_number;
    });

    GameRecord g;
    g.context.game_id = pk;
    g.context.date = rows.front().game_date;
    g.context.home_team = rows.front().home_team;
    g.context.away_team = rows.front().away_team;
    g.context.season_type = *season;
    for (const auto& r : rows) {
      if (g.plate_appearances.empty() || g.plate_appearances.back().pa_id != r.at_bat_number) {
        PlateAppearance pa;
        pa.pa_id = r.at_bat_number;
        pa.batter_id = r.batter;
        pa.pitcher_id = r.pitcher;
        pa.inning_state = {r.inning, r.half, r.outs, r.home_score, r.away_score, r.runners};
        g.plate_appearances.push_back(std::move(pa));
      }
      auto& pa = g.plate_appearances.back();
      auto p = r.pitch;
      p.pitch_number = static_cast<int>(pa.pitches.size()) + 1;
      pa.pitches.push_back(p);
      if (!detail::is_null(r.events)) pa.terminal_event = terminal_from_event(r.events);
    }
    if (!validate_game(g).ok()) {
      report.drop_game("failed validation");
      continue;
    }
    ++report.games_kept;
    result.games.push_back(std::move(g));
  }
  return result;
}

inline IngestResult ingest_csv(const std::filesystem::path& path, const CsvSchema& schema = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open csv " + path.string());
  return ingest_csv(in, schema);
}

// ---------------------------------------------------------------------------
// Split

struct DateRange {
  std::optional<std::string> from;  // inclusive, YYYY-MM-DD
  std::optional<std::string> to;    // inclusive

  bool contains(const std::string& date) const {
    return (!from || date >= *from) && (!to || date <= *to);
  }
};

struct SplitSpec {
  DateRange train_dates;
  DateRange eval_dates;
};

struct SplitResult {
  std::vector<GameRecord> train;
  std::vector<GameRecord> eval;
};

// Regular-season games go to train, postseason games to eval; each side is
// then filtered by its optional date range.
inline SplitResult split(const std::vector<GameRecord>& games, const SplitSpec& spec = {}) {
  SplitResult out;
  for (const auto& g : games) {
    if (g.context.season_type == SeasonType::Regular) {
      if (spec.train_dates.contains(g.context.date)) out.train.push_back(g);
    } else if (spec.eval_dates.contains(g.context.date)) {
      out.eval.push_back(g);
    }
  }
  return out;
}

}  // namespace sabergen
