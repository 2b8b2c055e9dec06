#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "sabergen/evaluation.hpp"
#include "support/brute_force_metrics.hpp"

namespace sabergen {
namespace {

PredictionRecord rec(std::string gold, std::string pred, int pa = 1, std::string game = "G") {
  PredictionRecord r;
  r.game_id = std::move(game);
  r.pa_id = pa;
  r.task = PredictionTask::PitchTypeMulti;
  r.gold = std::move(gold);
  r.predicted = std::move(pred);
  return r;
}

TEST(MetricsTest, AllCorrect) {
  const std::vector<PredictionRecord> d = {rec("A", "A"), rec("B", "B"), rec("C", "C")};
  EXPECT_EQ(accuracy(d), 1.0);
  EXPECT_EQ(macro_f1(d), 1.0);
}

TEST(MetricsTest, TwoClassHandExample) {
  const std::vector<PredictionRecord> d = {rec("A", "A"), rec("A", "B"), rec("B", "B"), rec("B", "B")};
  EXPECT_DOUBLE_EQ(accuracy(d), 0.75);
  const auto r = recall_per_class(d);
  EXPECT_DOUBLE_EQ(r.at("A"), 0.5);
  EXPECT_DOUBLE_EQ(r.at("B"), 1.0);
  // F1_A = 2/3 (P=1, R=1/2), F1_B = 4/5 (P=2/3, R=1)
  EXPECT_NEAR(macro_f1(d), (2.0 / 3.0 + 4.0 / 5.0) / 2.0, 1e-15);
  EXPECT_NEAR(macro_f1(d), 0.7333333333333333, 1e-15);
}

TEST(MetricsTest, AbsentGoldClassesExcluded) {
  std::vector<PredictionRecord> d = {rec("A", "A"), rec("A", "A")};
  d[0].probabilities = {{"A", 0.9}, {"B", 0.05}, {"C", 0.05}};
  const auto r = recall_per_class(d);
  EXPECT_EQ(r.size(), 1u);
  EXPECT_EQ(r.at("A"), 1.0);
  EXPECT_EQ(macro_f1(d), 1.0);
}

TEST(MetricsTest, EmptyDumpIsError) {
  const std::vector<PredictionRecord> d;
  EXPECT_THROW(accuracy(d), DataError);
  EXPECT_THROW(macro_f1(d), DataError);
  EXPECT_THROW(evaluate(d), DataError);
}

TEST(ZoneTest, Examples) {
  std::vector<PredictionRecord> d;
  for (int i = 0; i < 4; ++i) {
    auto r = rec("swing", "swing");
    r.in_zone = true;
    d.push_back(r);
  }
  for (int i = 0; i < 4; ++i) {
    auto r = rec("take", i % 2 ? "take" : "swing");
    r.in_zone = false;
    d.push_back(r);
  }
  auto z = zone_accuracy(d);
  EXPECT_EQ(z.in_zone, 1.0);
  EXPECT_EQ(z.out_of_zone, 0.5);
  d.resize(4);
  z = zone_accuracy(d);
  EXPECT_EQ(z.in_zone, 1.0);
  EXPECT_FALSE(z.out_of_zone.has_value());
}

TEST(ConsistencyTest, Examples) {
  const std::vector<PredictionRecord> d = {rec("A", "A", 1), rec("B", "B", 1), rec("A", "B", 2),
                                           rec("B", "A", 2)};
  const auto c = consistency_curve(d);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], (std::pair<int, double>{1, 0.5}));
  EXPECT_EQ(c[1], (std::pair<int, double>{2, 0.5}));

  const std::vector<PredictionRecord> all = {rec("A", "A", 1), rec("A", "A", 1), rec("A", "A", 1),
                                             rec("A", "A", 2), rec("A", "A", 2)};
  for (const auto& [x, f] : consistency_curve(all)) {
    if (x <= 2) {
      EXPECT_EQ(f, 1.0);
    }
  }
}

TEST(ConsistencyTest, SamePaIdInDifferentGamesIsDistinct) {
  const std::vector<PredictionRecord> d = {rec("A", "A", 1, "G1"), rec("A", "A", 1, "G2")};
  const auto c = consistency_curve(d);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].second, 1.0);
}

TEST(ConsistencyTest, CountingIdentityAndMonotone) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PredictionRecord> d;
    const int n = 1 + static_cast<int>(rng() % 60);
    for (int i = 0; i < n; ++i) {
      d.push_back(rec(std::string(1, static_cast<char>('A' + rng() % 3)),
                      std::string(1, static_cast<char>('A' + rng() % 3)), static_cast<int>(rng() % 8)));
    }
    const auto c = consistency_curve(d);
    for (std::size_t i = 1; i < c.size(); ++i) EXPECT_LE(c[i].second, c[i - 1].second);
    const auto pas = tally_plate_appearances(d);
    std::size_t correct = 0;
    for (const auto& [k, t] : pas) correct += t.correct;
    EXPECT_NEAR(static_cast<double>(correct), accuracy(d) * n, 1e-9);
    // the curve sums to the mean correct count per plate appearance
    double area = 0;
    for (const auto& [x, f] : c) area += f;
    EXPECT_NEAR(area * static_cast<double>(pas.size()), static_cast<double>(correct), 1e-9);
  }
}

TEST(ArsenalTest, BinsAndAbsent) {
  std::vector<PredictionRecord> d;
  for (int size : {1, 1, 2, 3, 7}) {
    auto r = rec("A", size == 3 ? "B" : "A");
    r.arsenal_size = size;
    d.push_back(r);
  }
  const auto bins = arsenal_breakdown(d);
  ASSERT_EQ(bins.size(), 4u);
  EXPECT_EQ(bins[0].count, 2u);
  EXPECT_EQ(bins[0].accuracy, 1.0);
  EXPECT_EQ(bins[1].count, 2u);
  EXPECT_EQ(bins[1].accuracy, 0.5);
  EXPECT_EQ(bins[2].count, 0u);
  EXPECT_FALSE(bins[2].accuracy.has_value());
  EXPECT_EQ(bins[3].accuracy, 1.0);
}

TEST(ConfusionTest, ThreeInstanceExample) {
  const std::vector<PredictionRecord> d = {rec("FF", "FF"), rec("SL", "FF"), rec("FF", "SL")};
  const auto m = confusion_matrix(d);
  ASSERT_EQ(m.labels, (std::vector<std::string>{"FF", "SL"}));
  EXPECT_EQ(m.counts[0][0], 1u);
  EXPECT_EQ(m.counts[0][1], 1u);
  EXPECT_EQ(m.counts[1][0], 1u);
  EXPECT_EQ(m.counts[1][1], 0u);
  const auto e = error_counts(d);
  EXPECT_EQ(e, (std::vector<std::pair<std::string, std::size_t>>{{"FF", 1}, {"SL", 1}}));
}

TEST(ConfusionTest, PerfectIsDiagonal) {
  const std::vector<PredictionRecord> d = {rec("FF", "FF"), rec("SL", "SL"), rec("CU", "CU")};
  const auto m = confusion_matrix(d);
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    for (std::size_t j = 0; j < m.labels.size(); ++j) EXPECT_EQ(m.counts[i][j], i == j ? 1u : 0u);
  }
  for (const auto& [l, n] : error_counts(d)) EXPECT_EQ(n, 0u);
}

TEST(ConfusionTest, RowSumsAndTrace) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PredictionRecord> d;
    const int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      d.push_back(rec(std::string(1, static_cast<char>('A' + rng() % 4)),
                      std::string(1, static_cast<char>('A' + rng() % 4))));
    }
    const auto m = confusion_matrix(d);
    EXPECT_EQ(m.total(), d.size());
    std::size_t trace = 0;
    for (std::size_t i = 0; i < m.labels.size(); ++i) {
      trace += m.counts[i][i];
      std::size_t row = 0;
      for (auto c : m.counts[i]) row += c;
      EXPECT_EQ(row, static_cast<std::size_t>(std::count_if(d.begin(), d.end(), [&](const auto& r) {
                  return r.gold == m.labels[i];
                })));
    }
    EXPECT_NEAR(accuracy(d), static_cast<double>(trace) / n, 1e-15);
  }
}

TEST(MetricsTest, MacroF1InvariantUnderRelabeling) {
  std::mt19937_64 rng(3);
  const std::string names = "ABC";
  for (int trial = 0; trial < 200; ++trial) {
    std::string perm = names;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<PredictionRecord> d, relabeled;
    const int n = 1 + static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) {
      const auto g = rng() % 3, p = rng() % 3;
      d.push_back(rec(std::string(1, names[g]), std::string(1, names[p])));
      relabeled.push_back(rec(std::string(1, perm[g]), std::string(1, perm[p])));
    }
    EXPECT_NEAR(macro_f1(d), macro_f1(relabeled), 1e-15);
  }
}

TEST(OracleTest, ExhaustiveSmallDumps) {
  // Every multiset of up to 6 (gold, predicted, in_zone, pa) instances over a
  // 3-label alphabet; the acceptance suite runs the full 10-instance sweep.
  testing::SweepStats stats;
  const auto checked = testing::sweep_and_compare(6, 2, &stats);
  EXPECT_EQ(stats.first_failure, "");
  EXPECT_GT(checked, 100000u);
}

// ---------------------------------------------------------------------------

std::vector<PredictionRecord> fixture_dump(PredictionTask task) {
  std::vector<PredictionRecord> d;
  const char* types[] = {"FF", "SL", "CH", "FF", "FF", "SL", "CU", "FF", "SL", "FF"};
  const char* preds[] = {"FF", "FF", "CH", "FF", "SL", "SL", "FF", "FF", "FF", "FF"};
  for (int i = 0; i < 10; ++i) {
    PredictionRecord r;
    r.game_id = "SIM-000001";
    r.pa_id = 1 + i / 4;
    r.pitch_number = 1 + i % 4;
    r.task = task;
    r.pitcher_id = i < 6 ? 477132 : 605400;
    if (task == PredictionTask::SwingDecision) {
      r.in_zone = i % 3 != 0;
      r.gold = i % 2 ? "swing" : "take";
      r.predicted = i % 3 ? "swing" : "take";
      r.probabilities = {{"swing", 0.6}, {"take", 0.4}};
    } else {
      r.arsenal_size = i < 6 ? 2 : 4;
      r.gold = types[i];
      r.predicted = preds[i];
      r.probabilities = {{"FF", 0.5}, {"SL", 0.2}, {"CH", 0.1}, {"CU", 0.2}};
    }
    d.push_back(r);
  }
  return d;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

TEST(ReportTest, GoldenFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "sabergen_report_golden";
  std::filesystem::remove_all(dir);
  const std::vector<TaskReport> reports = {evaluate(fixture_dump(PredictionTask::PitchTypeMulti)),
                                           evaluate(fixture_dump(PredictionTask::SwingDecision))};
  emit_report(reports, dir);
  const std::filesystem::path golden = SABERGEN_GOLDEN_DIR;
  std::size_t compared = 0;
  for (const auto& entry : std::filesystem::directory_iterator(golden)) {
    const auto name = entry.path().filename();
    ASSERT_TRUE(std::filesystem::exists(dir / name)) << name;
    EXPECT_EQ(slurp(dir / name), slurp(entry.path())) << name;
    ++compared;
  }
  std::size_t written = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++written;
  EXPECT_EQ(compared, written);
  EXPECT_GE(compared, 11u);
  std::filesystem::remove_all(dir);
}

TEST(ReportTest, RerunIsByteIdentical) {
  const auto a = std::filesystem::temp_directory_path() / "sabergen_report_a";
  const auto b = std::filesystem::temp_directory_path() / "sabergen_report_b";
  const std::vector<TaskReport> reports = {evaluate(fixture_dump(PredictionTask::PitchTypeMulti))};
  emit_report(reports, a);
  emit_report(reports, b);
  for (const auto& entry : std::filesystem::directory_iterator(a)) {
    EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename()));
  }
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST(ReportTest, OptionalSectionsOmitted) {
  const auto dir = std::filesystem::temp_directory_path() / "sabergen_report_swing_only";
  std::filesystem::remove_all(dir);
  auto d = fixture_dump(PredictionTask::SwingDecision);
  for (auto& r : d) r.in_zone = true;
  const std::vector<TaskReport> reports = {evaluate(d)};
  emit_report(reports, dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "metrics.swing.tsv"));
  EXPECT_FALSE(std::filesystem::exists(dir / "confusion.tsv"));
  EXPECT_FALSE(std::filesystem::exists(dir / "consistency.svg"));
  const auto metrics = slurp(dir / "metrics.swing.tsv");
  EXPECT_NE(metrics.find("oz_accuracy\t\tabsent"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(ReportTest, UnwritableDirectoryIsIoError) {
  const auto file = std::filesystem::temp_directory_path() / "sabergen_not_a_dir";
  { std::ofstream os(file); os << "x"; }
  const std::vector<TaskReport> reports = {evaluate(fixture_dump(PredictionTask::PitchTypeMulti))};
  EXPECT_THROW(emit_report(reports, file / "sub"), IoError);
  std::filesystem::remove(file);
}

}  // namespace
}  // namespace sabergen
