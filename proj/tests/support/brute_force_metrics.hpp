#pragma once

// Independent recount of every evaluation metric, plus an exhaustive sweep
// over small dumps comparing it against the library.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "sabergen/evaluation.hpp"

namespace sabergen::testing {

inline constexpr std::array<const char*, 3> kOracleLabels = {"A", "B", "C"};

// Exact fraction with small integer parts.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Fraction operator+(const Fraction& o) const {
    Fraction r{num * o.den + o.num * den, den * o.den};
    const auto g = std::gcd(r.num, r.den);
    return g ? Fraction{r.num / g, r.den / g} : r;
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct OracleMetrics {
  std::int64_t n = 0;
  std::int64_t table[3][3] = {};  // [gold][predicted]
  std::int64_t iz_n = 0, iz_ok = 0, oz_n = 0, oz_ok = 0;
  std::map<std::pair<std::string, int>, std::pair<int, int>> pa;  // (pitches, correct)
};

inline int oracle_index(const std::string& l) {
  for (int i = 0; i < 3; ++i) {
    if (l == kOracleLabels[static_cast<std::size_t>(i)]) return i;
  }
  return -1;
}

inline OracleMetrics recount(const std::vector<PredictionRecord>& d) {
  OracleMetrics m;
  for (const auto& r : d) {
    ++m.n;
    const int g = oracle_index(r.gold), p = oracle_index(r.predicted);
    ++m.table[g][p];
    if (r.in_zone.has_value()) {
      (*r.in_zone ? m.iz_n : m.oz_n) += 1;
      (*r.in_zone ? m.iz_ok : m.oz_ok) += g == p ? 1 : 0;
    }
    auto& t = m.pa[{r.game_id, r.pa_id}];
    t.first += 1;
    t.second += g == p ? 1 : 0;
  }
  return m;
}

// Returns a description of the first disagreement, or "" when all agree.
inline std::string compare_with_library(const std::vector<PredictionRecord>& d) {
  const auto o = recount(d);
  auto div = [](std::int64_t a, std::int64_t b) { return static_cast<double>(a) / static_cast<double>(b); };

  std::int64_t trace = 0;
  for (int i = 0; i < 3; ++i) trace += o.table[i][i];
  if (accuracy(d) != div(trace, o.n)) return "accuracy";

  const auto recall = recall_per_class(d);
  Fraction macro{0, 1};
  int present = 0;
  for (int c = 0; c < 3; ++c) {
    std::int64_t row = 0, col = 0;
    for (int k = 0; k < 3; ++k) {
      row += o.table[c][k];
      col += o.table[k][c];
    }
    const std::string label = kOracleLabels[static_cast<std::size_t>(c)];
    if (row == 0) {
      if (recall.contains(label)) return "recall of absent class";
      continue;
    }
    if (!recall.contains(label) || recall.at(label) != div(o.table[c][c], row)) return "recall " + label;
    // F1 from precision and recall as exact fractions: 2PR / (P + R)
    const std::int64_t tp = o.table[c][c];
    if (tp > 0) {
      const Fraction p{tp, col}, r{tp, row};
      const Fraction pr{p.num * r.num, p.den * r.den};
      const Fraction sum = p + r;
      macro = macro + Fraction{2 * pr.num * sum.den, pr.den * sum.num};
    }
    ++present;
  }
  macro.den *= present;
  if (std::abs(macro_f1(d) - macro.value()) > 1e-12) return "macro_f1";

  const auto z = zone_accuracy(d);
  if (z.in_zone.has_value() != (o.iz_n > 0) || (o.iz_n && *z.in_zone != div(o.iz_ok, o.iz_n))) return "iz";
  if (z.out_of_zone.has_value() != (o.oz_n > 0) || (o.oz_n && *z.out_of_zone != div(o.oz_ok, o.oz_n))) return "oz";

  const auto curve = consistency_curve(d);
  int longest = 0;
  for (const auto& [k, t] : o.pa) longest = std::max(longest, t.first);
  if (static_cast<int>(curve.size()) != longest) return "consistency length";
  for (int x = 1; x <= longest; ++x) {
    std::int64_t hit = 0;
    for (const auto& [k, t] : o.pa) hit += t.second >= x ? 1 : 0;
    const auto& pt = curve[static_cast<std::size_t>(x - 1)];
    if (pt.first != x || pt.second != div(hit, static_cast<std::int64_t>(o.pa.size()))) return "consistency";
  }

  const auto cm = confusion_matrix(d);
  const auto errors = error_counts(d);
  std::size_t e = 0;
  for (int g = 0; g < 3; ++g) {
    std::int64_t row = 0;
    for (int p = 0; p < 3; ++p) {
      row += o.table[g][p];
      const auto gi = std::find(cm.labels.begin(), cm.labels.end(), kOracleLabels[static_cast<std::size_t>(g)]);
      const auto pi = std::find(cm.labels.begin(), cm.labels.end(), kOracleLabels[static_cast<std::size_t>(p)]);
      const bool in_matrix = gi != cm.labels.end() && pi != cm.labels.end();
      const std::int64_t got =
          in_matrix ? static_cast<std::int64_t>(cm.counts[static_cast<std::size_t>(gi - cm.labels.begin())]
                                                         [static_cast<std::size_t>(pi - cm.labels.begin())])
                    : 0;
      if (got != o.table[g][p]) return "confusion";
    }
    if (row == 0) continue;
    if (e >= errors.size() || errors[e].first != kOracleLabels[static_cast<std::size_t>(g)] ||
        static_cast<std::int64_t>(errors[e].second) != row - o.table[g][g]) {
      return "error counts";
    }
    ++e;
  }
  if (e != errors.size()) return "error counts length";
  return "";
}

// Calls `visit(counts)` for every multiset of size 1..max_n over `kinds`
// element kinds.
inline void for_each_multiset(int kinds, int max_n, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> counts(static_cast<std::size_t>(kinds), 0);
  std::function<void(int, int)> rec = [&](int k, int left) {
    if (k == kinds) {
      if (left < max_n) visit(counts);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[static_cast<std::size_t>(k)] = c;
      rec(k + 1, left - c);
    }
    counts[static_cast<std::size_t>(k)] = 0;
  };
  rec(0, max_n);
}

struct SweepStats {
  std::size_t label_dumps = 0;
  std::size_t zone_dumps = 0;
  std::size_t pa_dumps = 0;
  std::string first_failure;
};

// Three exhaustive sweeps over multisets of up to `max_n` instances:
// (gold, predicted) pairs; the same with an in-zone flag; the same with one
// of `pas` plate appearances. Metrics are order-free, so multisets cover
// every dump up to instance order. Returns the number of dumps checked.
inline std::size_t sweep_and_compare(int max_n, int pas, SweepStats* stats) {
  SweepStats local;
  SweepStats& s = stats ? *stats : local;
  std::vector<PredictionRecord> dump;
  auto check = [&](std::size_t& counter, const std::vector<int>& counts, int zone_mult, int pa_mult) {
    dump.clear();
    for (std::size_t k = 0; k < counts.size(); ++k) {
      const int pair = static_cast<int>(k) / (zone_mult * pa_mult);
      const int rest = static_cast<int>(k) % (zone_mult * pa_mult);
      for (int c = 0; c < counts[k]; ++c) {
        PredictionRecord r;
        r.game_id = "G";
        r.task = PredictionTask::PitchTypeMulti;
        r.gold = kOracleLabels[static_cast<std::size_t>(pair / 3)];
        r.predicted = kOracleLabels[static_cast<std::size_t>(pair % 3)];
        if (zone_mult == 2) r.in_zone = rest == 1;
        r.pa_id = pa_mult > 1 ? 1 + rest : 1;
        dump.push_back(std::move(r));
      }
    }
    ++counter;
    if (s.first_failure.empty()) {
      const auto why = compare_with_library(dump);
      if (!why.empty()) {
        s.first_failure = why + " on a dump of " + std::to_string(dump.size());
      }
    }
  };
  for_each_multiset(9, max_n, [&](const auto& c) { check(s.label_dumps, c, 1, 1); });
  for_each_multiset(18, max_n, [&](const auto& c) { check(s.zone_dumps, c, 2, 1); });
  for_each_multiset(9 * pas, max_n, [&](const auto& c) { check(s.pa_dumps, c, 1, pas); });
  return s.first_failure.empty() ? s.label_dumps + s.zone_dumps + s.pa_dumps : 0;
}

}  // namespace sabergen::testing
