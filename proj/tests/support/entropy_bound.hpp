#pragma once

// Irreducible next-token entropy of simulated games, computed from the
// generating SimulatorConfig alone. Only tokens drawn at random by the
// simulator contribute: pitch type, the eight sampled numeric fields, swing,
// swing outcome and in-play event. Everything else is treated as free, so
// the sum is a lower bound on the cross-entropy of any predictor.

#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "sabergen/codec.hpp"
#include "sabergen/simulator.hpp"

namespace sabergen::testing {

inline double entropy_of(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

inline double binary_entropy(double p) {
  const double v[2] = {p, 1.0 - p};
  return entropy_of(v);
}

// Bucket distribution of transform(v) for v ~ n, by integrating the normal
// density over `cells` slices of +-9 sigma.
inline std::map<int, double> bucket_distribution(const QuantizationSpec& q, NumericField f, const Normal& n,
                                                 const std::function<double(double)>& transform,
                                                 int cells = 40000) {
  std::map<int, double> out;
  if (n.stddev <= 0.0) {
    out[q.bucket_of(f, transform(n.mean))] = 1.0;
    return out;
  }
  const double lo = n.mean - 9.0 * n.stddev, width = 18.0 * n.stddev / cells;
  auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - n.mean) / (n.stddev * std::sqrt(2.0))); };
  double prev = cdf(lo);
  for (int i = 0; i < cells; ++i) {
    const double next = cdf(lo + (i + 1) * width);
    out[q.bucket_of(f, transform(lo + (i + 0.5) * width))] += next - prev;
    prev = next;
  }
  return out;
}

inline double entropy_of(const std::map<int, double>& dist) {
  std::vector<double> p;
  for (const auto& [_, v] : dist) p.push_back(v);
  return entropy_of(p);
}

struct TypeEntropy {
  double numeric = 0.0;  // eight sampled fields
  double in_zone = 0.0;  // P(snapped location is in the batter's zone)
};

inline TypeEntropy type_entropy(const SimulatorConfig& cfg, PitchType t, const BatterSpec& batter) {
  const auto q = default_quantization();
  const auto ph = cfg.physics_for(t);
  const auto id = [](double v) { return v; };
  const auto speed = [](double v) { return std::clamp(v, 31.0, 109.0); };
  const auto spin = [](double v) { return std::clamp(v, 0.0, 3999.0); };
  const auto axis = [](double v) {
    double a = std::fmod(v, 360.0);
    if (a < 0.0) a += 360.0;
    return a >= 360.0 ? 0.0 : a;
  };
  TypeEntropy e;
  e.numeric += entropy_of(bucket_distribution(q, NumericField::ReleaseSpeed, ph.speed, speed));
  e.numeric += entropy_of(bucket_distribution(q, NumericField::ReleasePosX, ph.release_pos[0], id));
  e.numeric += entropy_of(bucket_distribution(q, NumericField::ReleasePosY, ph.release_pos[1], id));
  e.numeric += entropy_of(bucket_distribution(q, NumericField::ReleasePosZ, ph.release_pos[2], id));
  e.numeric += entropy_of(bucket_distribution(q, NumericField::SpinRate, ph.spin, spin));
  e.numeric += entropy_of(bucket_distribution(q, NumericField::SpinAxis, ph.spin_axis, axis));
  const auto px = bucket_distribution(q, NumericField::PlateX, ph.plate_x, id);
  const auto pz = bucket_distribution(q, NumericField::PlateZ, ph.plate_z, id);
  e.numeric += entropy_of(px) + entropy_of(pz);

  const double top = q.quantize(NumericField::SzTop, batter.sz_top);
  const double bot = q.quantize(NumericField::SzBot, batter.sz_bot);
  double in_x = 0.0, in_z = 0.0;
  for (const auto& [b, p] : px) {
    if (std::abs(q.midpoint(NumericField::PlateX, b)) <= kZoneHalfWidth) in_x += p;
  }
  for (const auto& [b, p] : pz) {
    const double z = q.midpoint(NumericField::PlateZ, b);
    if (bot <= z && z <= top) in_z += p;
  }
  e.in_zone = in_x * in_z;
  return e;
}

// Expected entropy (nats) of one pitch thrown in the given situation,
// including the in-play event it may end the plate appearance with.
class EntropyBound {
 public:
  explicit EntropyBound(const SimulatorConfig& cfg) : cfg_(cfg) {}

  double pitch(std::int64_t pitcher_id, std::int64_t batter_id, int balls, int strikes) {
    const auto* pitcher = cfg_.pitcher(pitcher_id);
    const BatterSpec* batter = nullptr;
    for (const auto& b : cfg_.batters) {
      if (b.id == batter_id) batter = &b;
    }
    if (pitcher == nullptr || batter == nullptr) throw DataError("entropy bound: unknown player");
    const auto& o = cfg_.outcomes;
    const double swing_outcome[3] = {o.swinging_strike, o.foul, o.in_play};
    const double event[5] = {o.in_play_out, o.single, o.double_, o.triple, o.home_run};
    const double h_swing = entropy_of(swing_outcome) + o.in_play * entropy_of(event);

    const auto& row = pitcher->row(balls, strikes);
    double h = entropy_of(row);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] <= 0.0) continue;
      const auto& te = cached(pitcher->arsenal[k], *batter);
      const double iz = te.in_zone, si = batter->swing_in_zone, so = batter->swing_out_zone;
      h += row[k] * (te.numeric + iz * (binary_entropy(si) + si * h_swing) +
                     (1.0 - iz) * (binary_entropy(so) + so * h_swing));
    }
    return h;
  }

  // Sum over every pitch of the games.
  double games(std::span<const GameRecord> games) {
    double total = 0.0;
    for (const auto& g : games) {
      for (const auto& pa : g.plate_appearances) {
        for (const auto& p : pa.pitches) total += pitch(pa.pitcher_id, pa.batter_id, p.balls, p.strikes);
      }
    }
    return total;
  }

 private:
  const TypeEntropy& cached(PitchType t, const BatterSpec& b) {
    const auto key = std::make_pair(static_cast<int>(t), b.id);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, type_entropy(cfg_, t, b)).first;
    return it->second;
  }

  const SimulatorConfig& cfg_;
  std::map<std::pair<int, std::int64_t>, TypeEntropy> cache_;
};

}  // namespace sabergen::testing
