#pragma once

// Hand-built and randomized GameRecords shared by the test suites.

#include <random>
#include <string>

#include "sabergen/event_model.hpp"

namespace sabergen::testing {

inline PitchEvent make_pitch(int number, int balls, int strikes, PitchOutcome outcome,
                             PitchType type = PitchType::FourSeam) {
  PitchEvent p;
  p.pitch_type = type;
  p.release_speed = 94.37;
  p.release_pos = {-1.83, 54.2, 5.91};
  p.spin_rate = 2310.0;
  p.spin_axis = 212.0;
  p.plate_x = 0.12;
  p.plate_z = 2.45;
  p.sz_top = 3.41;
  p.sz_bot = 1.58;
  p.balls = balls;
  p.strikes = strikes;
  p.outcome = outcome;
  p.swing = is_swing_outcome(outcome);
  p.pitch_number = number;
  return p;
}

inline GameContext make_context() {
  GameContext c;
  c.game_id = "G1";
  c.date = "2024-04-01";
  c.home_team = "SEA";
  c.away_team = "HOU";
  c.venue = "T-Mobile Park";
  c.season_type = SeasonType::Regular;
  return c;
}

// Two legal plate appearances: a 3-pitch strikeout and a 2-pitch single.
inline GameRecord make_two_pa_game() {
  GameRecord g;
  g.context = make_context();

  PlateAppearance a;
  a.pa_id = 1;
  a.batter_id = 514888;
  a.pitcher_id = 669923;
  a.inning_state = {1, Half::Top, 0, 0, 0, {false, false, false}};
  a.pitches = {make_pitch(1, 0, 0, PitchOutcome::CalledStrike),
               make_pitch(2, 0, 1, PitchOutcome::Foul, PitchType::Slider),
               make_pitch(3, 0, 2, PitchOutcome::SwingingStrike, PitchType::Slider)};
  a.terminal_event = TerminalEvent::Strikeout;

  PlateAppearance b;
  b.pa_id = 2;
  b.batter_id = 670541;
  b.pitcher_id = 669923;
  b.inning_state = {1, Half::Top, 1, 0, 0, {false, false, false}};
  b.pitches = {make_pitch(1, 0, 0, PitchOutcome::Ball, PitchType::Changeup),
               make_pitch(2, 1, 0, PitchOutcome::InPlay, PitchType::Sinker)};
  b.terminal_event = TerminalEvent::Single;

  g.plate_appearances = {a, b};
  return g;
}

// Random game satisfying every event-model invariant. Counts are generated by
// replaying random outcomes through the count rule.
template <class Rng>
GameRecord random_game(Rng& rng, int max_pas = 12) {
  auto uni = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto text = [&](int len) {
    std::string s;
    for (int i = 0; i < len; ++i) s += static_cast<char>(pick(0x20, 0x7e));
    return s;
  };

  GameRecord g;
  g.context.game_id = text(pick(1, 12));
  g.context.date = "20" + std::to_string(pick(10, 24)) + "-0" + std::to_string(pick(1, 9)) +
                   "-1" + std::to_string(pick(0, 9));
  g.context.home_team = "H" + text(2);
  g.context.away_team = "A" + text(2);
  g.context.venue = text(pick(0, 20));
  if (pick(0, 1) == 1) g.context.weather = text(pick(0, 8));
  g.context.season_type = pick(0, 1) ? SeasonType::Postseason : SeasonType::Regular;

  const int n_pa = pick(0, max_pas);
  int inning = 1;
  for (int i = 0; i < n_pa; ++i) {
    PlateAppearance pa;
    pa.pa_id = i + 1;
    pa.batter_id = pick(0, 999999);
    pa.pitcher_id = pick(0, 999999);
    inning += pick(0, 3) == 0 ? 1 : 0;
    pa.inning_state.inning = inning;
    pa.inning_state.half = Half::Top;
    pa.inning_state.outs = pick(0, 2);
    pa.inning_state.home_score = pick(0, 15);
    pa.inning_state.away_score = pick(0, 15);
    pa.inning_state.runners = {pick(0, 1) == 1, pick(0, 1) == 1, pick(0, 1) == 1};
    pa.terminal_event = static_cast<TerminalEvent>(pick(0, 8));

    Count c;
    for (int n = 1;; ++n) {
      PitchEvent p;
      p.pitch_type = static_cast<PitchType>(pick(0, kPitchTypeCount - 1));
      p.release_speed = uni(30.5, 109.5);
      p.release_pos = {uni(-5.0, 5.0), uni(45.0, 60.0), uni(0.0, 8.0)};
      p.spin_rate = uni(0.0, 3999.0);
      p.spin_axis = uni(0.0, 359.9);
      p.plate_x = uni(-4.0, 4.0);
      p.plate_z = uni(-2.0, 7.0);
      p.sz_top = uni(3.0, 4.5);
      p.sz_bot = uni(0.5, 2.5);
      p.balls = c.balls;
      p.strikes = c.strikes;
      p.pitch_number = n;
      p.outcome = static_cast<PitchOutcome>(pick(0, 6));
      p.swing = is_swing_outcome(p.outcome);
      pa.pitches.push_back(p);
      const Count next = next_count(c, p.outcome);
      const bool ends = next.balls > 3 || next.strikes > 2 ||
                        p.outcome == PitchOutcome::InPlay ||
                        p.outcome == PitchOutcome::HitByPitch || n >= 14 ||
                        pick(0, 9) == 0;
      if (ends) break;
      c = next;
    }
    g.plate_appearances.push_back(std::move(pa));
  }
  return g;
}

}  // namespace sabergen::testing
