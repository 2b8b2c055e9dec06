#pragma once

// Parameterized stochastic game model for synthetic corpora.
//
// Each plate appearance: the pitcher draws a pitch type from the mix row of
// the current count, physics from per-type normal distributions, the batter
// swings with the zone-appropriate probability, and outcomes follow the fixed
// rule table in OutcomeRules. Taken pitches are CalledStrike iff in zone,
// else Ball. The plate appearance ends on a strikeout, walk or ball in play.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "sabergen/codec.hpp"
#include "sabergen/errors.hpp"
#include "sabergen/event_model.hpp"

namespace sabergen {

struct Normal {
  double mean = 0.0;
  double stddev = 0.0;
};

struct PitchPhysics {
  Normal speed{93.0, 1.5};
  Normal spin{2250.0, 120.0};
  Normal spin_axis{210.0, 15.0};
  std::array<Normal, 3> release_pos{Normal{-1.8, 0.15}, Normal{54.0, 0.3}, Normal{5.8, 0.15}};
  Normal plate_x{0.0, 0.75};
  Normal plate_z{2.5, 0.75};
};

struct PitcherSpec {
  std::int64_t id = 0;
  std::vector<PitchType> arsenal;
  // mix[count_index(b, s)] is a probability vector over `arsenal`.
  std::array<std::vector<double>, kCountStates> mix;

  const std::vector<double>& row(int balls, int strikes) const {
    return mix[static_cast<std::size_t>(count_index(balls, strikes))];
  }

  // Probability of throwing `t` in the given count (0 when not in arsenal).
  double probability(int balls, int strikes, PitchType t) const {
    const auto& r = row(balls, strikes);
    for (std::size_t k = 0; k < arsenal.size(); ++k) {
      if (arsenal[k] == t) return r[k];
    }
    return 0.0;
  }
};

struct BatterSpec {
  std::int64_t id = 0;
  double swing_in_zone = 0.65;
  double swing_out_zone = 0.3;
  double sz_top = 3.45;
  double sz_bot = 1.55;
};

// Conditional outcome distributions. Swing outcomes and in-play events are
// each probability vectors.
struct OutcomeRules {
  double swinging_strike = 0.25;
  double foul = 0.40;
  double in_play = 0.35;
  double in_play_out = 0.68;
  double single = 0.20;
  double double_ = 0.06;
  double triple = 0.01;
  double home_run = 0.05;
};

struct SimulatorConfig {
  int games = 10;
  std::uint64_t seed = 1;
  int innings = 9;
  double postseason_fraction = 0.0;
  bool snap_locations = true;
  std::string start_date = "2023-04-01";
  std::string home_team = "SEA";
  std::string away_team = "HOU";
  std::string venue = "Desk Park";
  std::vector<PitcherSpec> pitchers;
  std::vector<BatterSpec> batters;
  std::map<PitchType, PitchPhysics> physics;
  OutcomeRules outcomes;

  const PitcherSpec* pitcher(std::int64_t id) const {
    for (const auto& p : pitchers) {
      if (p.id == id) return &p;
    }
    return nullptr;
  }

  PitchPhysics physics_for(PitchType t) const;

  // Throws ConfigError naming the first violated invariant.
  void validate() const;
};

// Per-type defaults loosely shaped like league-average pitch characteristics.
inline PitchPhysics default_physics(PitchType t) {
  PitchPhysics p;
  switch (t) {
    case PitchType::FourSeam: p.speed = {94.5, 1.3}; p.spin = {2300, 100}; p.spin_axis = {210, 10}; p.plate_z = {2.8, 0.7}; break;
    case PitchType::Sinker: p.speed = {93.5, 1.3}; p.spin = {2150, 100}; p.spin_axis = {230, 10}; p.plate_z = {2.2, 0.7}; break;
    case PitchType::Cutter: p.speed = {89.0, 1.3}; p.spin = {2400, 110}; p.spin_axis = {190, 12}; break;
    case PitchType::Slider: p.speed = {85.0, 1.5}; p.spin = {2450, 130}; p.spin_axis = {100, 15}; p.plate_x = {0.4, 0.8}; p.plate_z = {2.0, 0.75}; break;
    case PitchType::Sweeper: p.speed = {82.0, 1.5}; p.spin = {2600, 130}; p.spin_axis = {80, 15}; p.plate_x = {0.6, 0.8}; break;
    case PitchType::Curveball: p.speed = {79.0, 1.8}; p.spin = {2550, 150}; p.spin_axis = {40, 15}; p.plate_z = {1.9, 0.8}; break;
    case PitchType::KnuckleCurve: p.speed = {81.0, 1.8}; p.spin = {2500, 150}; p.spin_axis = {35, 15}; p.plate_z = {1.9, 0.8}; break;
    case PitchType::Changeup: p.speed = {85.5, 1.6}; p.spin = {1750, 150}; p.spin_axis = {240, 15}; p.plate_z = {2.0, 0.7}; break;
    case PitchType::Splitter: p.speed = {86.0, 1.6}; p.spin = {1400, 150}; p.spin_axis = {230, 20}; p.plate_z = {1.8, 0.7}; break;
    case PitchType::Knuckleball: p.speed = {76.0, 2.0}; p.spin = {300, 100}; p.spin_axis = {180, 60}; break;
    case PitchType::Eephus: p.speed = {60.0, 4.0}; p.spin = {1500, 300}; p.spin_axis = {45, 30}; break;
    case PitchType::Other: p.speed = {80.0, 5.0}; p.spin = {2000, 300}; p.spin_axis = {180, 60}; break;
  }
  return p;
}

inline PitchPhysics SimulatorConfig::physics_for(PitchType t) const {
  auto it = physics.find(t);
  return it == physics.end() ? default_physics(t) : it->second;
}

inline void SimulatorConfig::validate() const {
  auto prob = [](double p, const std::string& what) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("simulator: " + what + " not in [0,1]");
  };
  auto sums_to_one = [](double s, const std::string& what) {
    if (std::abs(s - 1.0) > 1e-9) throw ConfigError("simulator: " + what + " must sum to 1");
  };
  if (games < 0) throw ConfigError("simulator: games must be non-negative");
  if (innings < 1 || innings > 99) throw ConfigError("simulator: innings out of range");
  prob(postseason_fraction, "postseason_fraction");
  if (pitchers.empty()) throw ConfigError("simulator: at least one pitcher required");
  if (batters.empty()) throw ConfigError("simulator: at least one batter required");
  if (home_team == away_team) throw ConfigError("simulator: home_team equals away_team");
  for (const auto& p : pitchers) {
    const std::string name = "pitcher " + std::to_string(p.id);
    if (p.arsenal.empty() || p.arsenal.size() > kPitchTypeCount) {
      throw ConfigError("simulator: " + name + " arsenal size must be in [1, 12]");
    }
    for (std::size_t i = 0; i < p.arsenal.size(); ++i) {
      for (std::size_t k = i + 1; k < p.arsenal.size(); ++k) {
        if (p.arsenal[i] == p.arsenal[k]) {
          throw ConfigError("simulator: " + name + " arsenal has duplicates");
        }
      }
    }
    for (const auto& row : p.mix) {
      if (row.size() != p.arsenal.size()) {
        throw ConfigError("simulator: " + name + " mix row size differs from arsenal");
      }
      double s = 0.0;
      for (double v : row) {
        prob(v, name + " mix entry");
        s += v;
      }
      sums_to_one(s, name + " mix row");
    }
  }
  for (const auto& b : batters) {
    prob(b.swing_in_zone, "swing_in_zone");
    prob(b.swing_out_zone, "swing_out_zone");
    if (!(b.sz_bot < b.sz_top)) throw ConfigError("simulator: batter strike zone inverted");
  }
  const auto& o = outcomes;
  for (double v : {o.swinging_strike, o.foul, o.in_play, o.in_play_out, o.single, o.double_,
                   o.triple, o.home_run}) {
    prob(v, "outcome probability");
  }
  sums_to_one(o.swinging_strike + o.foul + o.in_play, "swing outcome probabilities");
  sums_to_one(o.in_play_out + o.single + o.double_ + o.triple + o.home_run,
              "in-play event probabilities");
}

namespace detail {

inline std::string add_days(const std::string& iso, int days) {
  using namespace std::chrono;
  int y = 0;
  unsigned m = 0, d = 0;
  if (std::sscanf(iso.c_str(), "%d-%u-%u", &y, &m, &d) != 3) {
    throw ConfigError("simulator: bad start_date '" + iso + "'");
  }
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) throw ConfigError("simulator: bad start_date '" + iso + "'");
  const year_month_day out{sys_days{ymd} + std::chrono::days{days}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(out.year()),
                static_cast<unsigned>(out.month()), static_cast<unsigned>(out.day()));
  return buf;
}

class GameSimulator {
 public:
  GameSimulator(const SimulatorConfig& cfg, int game_index)
      : cfg_(cfg), grid_(default_quantization()) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(game_index)};
    rng_.seed(seq);
    const auto n = static_cast<std::size_t>(cfg.pitchers.size());
    home_pitcher_ = &cfg.pitchers[(2 * static_cast<std::size_t>(game_index)) % n];
    away_pitcher_ = &cfg.pitchers[(2 * static_cast<std::size_t>(game_index) + 1) % n];
  }

  GameRecord run(int game_index) {
    GameRecord g;
    auto& c = g.context;
    char id[32];
    std::snprintf(id, sizeof id, "SIM-%06d", game_index + 1);
    c.game_id = id;
    c.date = add_days(cfg_.start_date, game_index);
    c.home_team = cfg_.home_team;
    c.away_team = cfg_.away_team;
    c.venue = cfg_.venue;
    const int postseason =
        static_cast<int>(std::lround(cfg_.postseason_fraction * cfg_.games));
    c.season_type = game_index >= cfg_.games - postseason ? SeasonType::Postseason
                                                          : SeasonType::Regular;

    std::array<std::size_t, 2> lineup{0, cfg_.batters.size() / 2};
    std::array<int, 2> score{0, 0};  // home, away
    std::int64_t pa_id = 0;
    for (int inning = 1; inning <= cfg_.innings; ++inning) {
      for (Half half : {Half::Top, Half::Bottom}) {
        const std::size_t side = half == Half::Top ? 1 : 0;  // batting team
        const PitcherSpec& pitcher = half == Half::Top ? *home_pitcher_ : *away_pitcher_;
        int outs = 0;
        std::array<bool, 3> runners{};
        while (outs < 3) {
          const BatterSpec& batter = cfg_.batters[lineup[side] % cfg_.batters.size()];
          ++lineup[side];
          PlateAppearance pa;
          pa.pa_id = ++pa_id;
          pa.batter_id = batter.id;
          pa.pitcher_id = pitcher.id;
          pa.inning_state = {inning, half, outs, std::min(score[0], 99),
                             std::min(score[1], 99), runners};
          pa.terminal_event = play_plate_appearance(pitcher, batter, pa.pitches);
          advance(pa.terminal_event, outs, runners, score[side]);
          g.plate_appearances.push_back(std::move(pa));
        }
      }
    }
    return g;
  }

 private:
  double draw(const Normal& n) {
    if (n.stddev <= 0.0) return n.mean;
    return std::normal_distribution<double>(n.mean, n.stddev)(rng_);
  }
  bool bernoulli(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }
  std::size_t categorical(std::initializer_list<double> w) {
    return std::discrete_distribution<std::size_t>(w)(rng_);
  }

  double snap(NumericField f, double v) const {
    return cfg_.snap_locations ? grid_.quantize(f, v) : v;
  }

  PitchEvent make_pitch(const PitcherSpec& pitcher, const BatterSpec& batter, Count count) {
    const auto& row = pitcher.row(count.balls, count.strikes);
    const auto k = std::discrete_distribution<std::size_t>(row.begin(), row.end())(rng_);
    PitchEvent p;
    p.pitch_type = pitcher.arsenal[k];
    const auto phys = cfg_.physics_for(p.pitch_type);
    p.release_speed = std::clamp(draw(phys.speed), 31.0, 109.0);
    for (std::size_t i = 0; i < 3; ++i) p.release_pos[i] = draw(phys.release_pos[i]);
    p.spin_rate = std::clamp(draw(phys.spin), 0.0, 3999.0);
    double axis = std::fmod(draw(phys.spin_axis), 360.0);
    if (axis < 0.0) axis += 360.0;
    p.spin_axis = axis >= 360.0 ? 0.0 : axis;
    p.plate_x = snap(NumericField::PlateX, draw(phys.plate_x));
    p.plate_z = snap(NumericField::PlateZ, draw(phys.plate_z));
    p.sz_top = snap(NumericField::SzTop, batter.sz_top);
    p.sz_bot = snap(NumericField::SzBot, batter.sz_bot);
    p.balls = count.balls;
    p.strikes = count.strikes;
    const bool zone = in_zone(p);
    p.swing = bernoulli(zone ? batter.swing_in_zone : batter.swing_out_zone);
    if (p.swing) {
      const auto& o = cfg_.outcomes;
      constexpr std::array<PitchOutcome, 3> kSwing = {
          PitchOutcome::SwingingStrike, PitchOutcome::Foul, PitchOutcome::InPlay};
      p.outcome = kSwing[categorical({o.swinging_strike, o.foul, o.in_play})];
    } else {
      p.outcome = zone ? PitchOutcome::CalledStrike : PitchOutcome::Ball;
    }
    return p;
  }

  TerminalEvent play_plate_appearance(const PitcherSpec& pitcher, const BatterSpec& batter,
                                      std::vector<PitchEvent>& pitches) {
    Count count;
    while (true) {
      auto p = make_pitch(pitcher, batter, count);
      p.pitch_number = static_cast<int>(pitches.size()) + 1;
      pitches.push_back(p);
      if (p.outcome == PitchOutcome::InPlay) {
        const auto& o = cfg_.outcomes;
        constexpr std::array<TerminalEvent, 5> kEvents = {
            TerminalEvent::InPlayOut, TerminalEvent::Single, TerminalEvent::Double,
            TerminalEvent::Triple, TerminalEvent::HomeRun};
        return kEvents[categorical({o.in_play_out, o.single, o.double_, o.triple, o.home_run})];
      }
      count = next_count(count, p.outcome);
      if (count.balls > 3) return TerminalEvent::Walk;
      if (count.strikes > 2) return TerminalEvent::Strikeout;
    }
  }

  static void advance(TerminalEvent e, int& outs, std::array<bool, 3>& runners, int& score) {
    auto push = [&](int bases) {  // batter and all runners move `bases`
      std::array<bool, 3> next{};
      for (int b = 2; b >= 0; --b) {
        if (!runners[b]) continue;
        const int to = b + bases;
        if (to >= 3) ++score; else next[to] = true;
      }
      if (bases >= 4) ++score; else next[bases - 1] = true;
      runners = next;
    };
    switch (e) {
      case TerminalEvent::Strikeout:
      case TerminalEvent::InPlayOut:
      case TerminalEvent::Other:
        ++outs;
        break;
      case TerminalEvent::Walk:
      case TerminalEvent::HitByPitch:
        if (runners[0]) {
          if (runners[1]) {
            if (runners[2]) ++score;
            runners[2] = true;
          }
          runners[1] = true;
        }
        runners[0] = true;
        break;
      case TerminalEvent::Single: push(1); break;
      case TerminalEvent::Double: push(2); break;
      case TerminalEvent::Triple: push(3); break;
      case TerminalEvent::HomeRun: push(4); break;
    }
  }

  const SimulatorConfig& cfg_;
  QuantizationSpec grid_;
  std::mt19937_64 rng_;
  const PitcherSpec* home_pitcher_ = nullptr;
  const PitcherSpec* away_pitcher_ = nullptr;
};

}  // namespace detail

// Deterministic given config.seed; each game draws from its own seeded
// stream, so games can be generated independently.
inline std::vector<GameRecord> simulate(const SimulatorConfig& config) {
  config.validate();
  std::vector<GameRecord> games;
  games.reserve(static_cast<std::size_t>(config.games));
  for (int i = 0; i < config.games; ++i) {
    games.push_back(detail::GameSimulator(config, i).run(i));
  }
  return games;
}

// ---------------------------------------------------------------------------
// Config documents

namespace detail {

inline PitchType pitch_type_or_throw(const std::string& code) {
  auto t = pitch_type_from_code(code);
  if (!t) throw ConfigError("simulator: unknown pitch type '" + code + "'");
  return *t;
}

inline Normal normal_from_json(const nlohmann::json& j, Normal fallback) {
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_object()) {
    return {j.value("mean", fallback.mean), j.value("stddev", fallback.stddev)};
  }
  throw ConfigError("simulator: physics entries must be [mean, stddev]");
}

inline nlohmann::json normal_to_json(const Normal& n) { return {n.mean, n.stddev}; }

}  // namespace detail

// Accepts the nested document layout documented in configs/*.toml:
// pitchers[].mix is a table keyed "b-s" (plus optional "default").
inline SimulatorConfig simulator_config_from_json(const nlohmann::json& j) {
  SimulatorConfig c;
  try {
    c.games = j.value("games", c.games);
    c.seed = j.value("seed", c.seed);
    c.innings = j.value("innings", c.innings);
    c.postseason_fraction = j.value("postseason_fraction", c.postseason_fraction);
    c.snap_locations = j.value("snap_locations", c.snap_locations);
    c.start_date = j.value("start_date", c.start_date);
    c.home_team = j.value("home_team", c.home_team);
    c.away_team = j.value("away_team", c.away_team);
    c.venue = j.value("venue", c.venue);
    for (const auto& pj : j.value("pitchers", nlohmann::json::array())) {
      PitcherSpec p;
      p.id = pj.at("id").get<std::int64_t>();
      for (const auto& code : pj.at("arsenal")) {
        p.arsenal.push_back(detail::pitch_type_or_throw(code.get<std::string>()));
      }
      const auto& mix = pj.at("mix");
      std::optional<std::vector<double>> fallback;
      if (mix.contains("default")) fallback = mix.at("default").get<std::vector<double>>();
      for (int b = 0; b <= 3; ++b) {
        for (int s = 0; s <= 2; ++s) {
          const std::string key = std::to_string(b) + "-" + std::to_string(s);
          auto& row = p.mix[static_cast<std::size_t>(count_index(b, s))];
          if (mix.contains(key)) {
            row = mix.at(key).get<std::vector<double>>();
          } else if (fallback) {
            row = *fallback;
          } else {
            throw ConfigError("simulator: pitcher " + std::to_string(p.id) +
                              " has no mix for count " + key);
          }
        }
      }
      c.pitchers.push_back(std::move(p));
    }
    for (const auto& bj : j.value("batters", nlohmann::json::array())) {
      BatterSpec b;
      b.id = bj.at("id").get<std::int64_t>();
      b.swing_in_zone = bj.value("swing_in_zone", b.swing_in_zone);
      b.swing_out_zone = bj.value("swing_out_zone", b.swing_out_zone);
      b.sz_top = bj.value("sz_top", b.sz_top);
      b.sz_bot = bj.value("sz_bot", b.sz_bot);
      c.batters.push_back(b);
    }
    if (j.contains("physics")) {
      for (const auto& [code, pj] : j.at("physics").items()) {
        const auto t = detail::pitch_type_or_throw(code);
        auto ph = default_physics(t);
        if (pj.contains("speed")) ph.speed = detail::normal_from_json(pj["speed"], ph.speed);
        if (pj.contains("spin")) ph.spin = detail::normal_from_json(pj["spin"], ph.spin);
        if (pj.contains("spin_axis")) ph.spin_axis = detail::normal_from_json(pj["spin_axis"], ph.spin_axis);
        if (pj.contains("plate_x")) ph.plate_x = detail::normal_from_json(pj["plate_x"], ph.plate_x);
        if (pj.contains("plate_z")) ph.plate_z = detail::normal_from_json(pj["plate_z"], ph.plate_z);
        if (pj.contains("release_pos")) {
          for (std::size_t i = 0; i < 3; ++i) {
            ph.release_pos[i] = detail::normal_from_json(pj["release_pos"].at(i), ph.release_pos[i]);
          }
        }
        c.physics[t] = ph;
      }
    }
    if (j.contains("outcomes")) {
      const auto& o = j.at("outcomes");
      auto& r = c.outcomes;
      r.swinging_strike = o.value("swinging_strike", r.swinging_strike);
      r.foul = o.value("foul", r.foul);
      r.in_play = o.value("in_play", r.in_play);
      r.in_play_out = o.value("in_play_out", r.in_play_out);
      r.single = o.value("single", r.single);
      r.double_ = o.value("double", r.double_);
      r.triple = o.value("triple", r.triple);
      r.home_run = o.value("home_run", r.home_run);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("simulator config: ") + e.what());
  }
  c.validate();
  return c;
}

// Fully resolved form (every count row spelled out), suitable for manifests.
inline nlohmann::json simulator_config_to_json(const SimulatorConfig& c) {
  nlohmann::json j = {{"games", c.games},
                      {"seed", c.seed},
                      {"innings", c.innings},
                      {"postseason_fraction", c.postseason_fraction},
                      {"snap_locations", c.snap_locations},
                      {"start_date", c.start_date},
                      {"home_team", c.home_team},
                      {"away_team", c.away_team},
                      {"venue", c.venue}};
  auto& pitchers = j["pitchers"] = nlohmann::json::array();
  for (const auto& p : c.pitchers) {
    nlohmann::json pj = {{"id", p.id}};
    for (auto t : p.arsenal) pj["arsenal"].push_back(pitch_code(t));
    for (int b = 0; b <= 3; ++b) {
      for (int s = 0; s <= 2; ++s) {
        pj["mix"][std::to_string(b) + "-" + std::to_string(s)] = p.row(b, s);
      }
    }
    pitchers.push_back(pj);
  }
  auto& batters = j["batters"] = nlohmann::json::array();
  for (const auto& b : c.batters) {
    batters.push_back({{"id", b.id},
                       {"swing_in_zone", b.swing_in_zone},
                       {"swing_out_zone", b.swing_out_zone},
                       {"sz_top", b.sz_top},
                       {"sz_bot", b.sz_bot}});
  }
  for (const auto& [t, ph] : c.physics) {
    auto& pj = j["physics"][std::string(pitch_code(t))];
    pj["speed"] = detail::normal_to_json(ph.speed);
    pj["spin"] = detail::normal_to_json(ph.spin);
    pj["spin_axis"] = detail::normal_to_json(ph.spin_axis);
    pj["plate_x"] = detail::normal_to_json(ph.plate_x);
    pj["plate_z"] = detail::normal_to_json(ph.plate_z);
    for (const auto& n : ph.release_pos) pj["release_pos"].push_back(detail::normal_to_json(n));
  }
  const auto& o = c.outcomes;
  j["outcomes"] = {{"swinging_strike", o.swinging_strike}, {"foul", o.foul},
                   {"in_play", o.in_play},               {"in_play_out", o.in_play_out},
                   {"single", o.single},                 {"double", o.double_},
                   {"triple", o.triple},                 {"home_run", o.home_run}};
  return j;
}

// The two-pitcher corpus used by the distribution-recovery checks: a
// two-pitch pitcher whose mix depends strongly on the count and a four-pitch
// pitcher with flatter mixes. Batters swing at 0.8 in zone and 0.3 out of it.
inline SimulatorConfig default_simulator_config() {
  SimulatorConfig c;
  c.games = 240;
  c.seed = 20240401;
  c.postseason_fraction = 0.2;

  PitcherSpec a;
  a.id = 477132;
  a.arsenal = {PitchType::FourSeam, PitchType::Slider};
  for (int b = 0; b <= 3; ++b) {
    for (int s = 0; s <= 2; ++s) {
      // Ahead in the count -> more sliders; behind -> more fastballs.
      const double fb = std::clamp(0.70 + 0.08 * b - 0.22 * s, 0.1, 0.95);
      a.mix[static_cast<std::size_t>(count_index(b, s))] = {fb, 1.0 - fb};
    }
  }

  PitcherSpec b;
  b.id = 605400;
  b.arsenal = {PitchType::Sinker, PitchType::Changeup, PitchType::Curveball,
               PitchType::Cutter};
  for (int bl = 0; bl <= 3; ++bl) {
    for (int s = 0; s <= 2; ++s) {
      std::vector<double> row;
      if (bl > s) {
        row = {0.50, 0.20, 0.10, 0.20};
      } else if (s > bl) {
        row = {0.20, 0.30, 0.40, 0.10};
      } else {
        row = {0.35, 0.25, 0.20, 0.20};
      }
      b.mix[static_cast<std::size_t>(count_index(bl, s))] = row;
    }
  }
  c.pitchers = {a, b};

  for (int i = 0; i < 9; ++i) {
    BatterSpec bs;
    bs.id = 600001 + i;
    bs.swing_in_zone = 0.8;
    bs.swing_out_zone = 0.3;
    c.batters.push_back(bs);
  }
  return c;
}

}  // namespace sabergen
