#pragma once

// Metrics, analyses and report emission over prediction dumps.

#include <algorithm>
#include <array>
#include <tuple>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sabergen/errors.hpp"
#include "sabergen/predictor.hpp"

namespace sabergen {

// ---------------------------------------------------------------------------
// Class metrics

struct ClassMetrics {
  std::string label;
  std::size_t support = 0;    // gold instances
  std::size_t predicted = 0;  // predicted instances
  std::size_t correct = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

namespace detail {

inline void require_nonempty(std::span<const PredictionRecord> dump) {
  if (dump.empty()) throw DataError("evaluation: prediction dump is empty");
}

}  // namespace detail

// Label order: the answer-set order carried by the probability vectors,
// followed by any other gold or predicted labels in lexical order.
inline std::vector<std::string> label_order(std::span<const PredictionRecord> dump) {
  std::vector<std::string> out;
  if (!dump.empty()) {
    for (const auto& [label, p] : dump.front().probabilities) out.push_back(label);
  }
  std::vector<std::string> extra;
  for (const auto& r : dump) {
    for (const auto* l : {&r.gold, &r.predicted}) {
      if (std::find(out.begin(), out.end(), *l) == out.end() &&
          std::find(extra.begin(), extra.end(), *l) == extra.end()) {
        extra.push_back(*l);
      }
    }
  }
  std::sort(extra.begin(), extra.end());
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

inline double accuracy(std::span<const PredictionRecord> dump) {
  detail::require_nonempty(dump);
  std::size_t ok = 0;
  for (const auto& r : dump) ok += r.gold == r.predicted ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(dump.size());
}

// Every label in label_order(), including ones absent from gold.
inline std::vector<ClassMetrics> class_metrics(std::span<const PredictionRecord> dump) {
  detail::require_nonempty(dump);
  std::vector<ClassMetrics> out;
  for (const auto& label : label_order(dump)) {
    ClassMetrics m;
    m.label = label;
    for (const auto& r : dump) {
      m.support += r.gold == label ? 1 : 0;
      m.predicted += r.predicted == label ? 1 : 0;
      m.correct += r.gold == label && r.predicted == label ? 1 : 0;
    }
    m.precision = m.predicted ? static_cast<double>(m.correct) / m.predicted : 0.0;
    m.recall = m.support ? static_cast<double>(m.correct) / m.support : 0.0;
    // harmonic mean of precision and recall, 2TP / (2TP + FP + FN)
    m.f1 = m.support + m.predicted ? 2.0 * m.correct / static_cast<double>(m.support + m.predicted) : 0.0;
    out.push_back(m);
  }
  return out;
}

// Recall for each class with gold support.
inline std::map<std::string, double> recall_per_class(std::span<const PredictionRecord> dump) {
  std::map<std::string, double> out;
  for (const auto& m : class_metrics(dump)) {
    if (m.support > 0) out[m.label] = m.recall;
  }
  return out;
}

// Mean F1 over classes that occur in gold.
inline double macro_f1(std::span<const PredictionRecord> dump) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& m : class_metrics(dump)) {
    if (m.support == 0) continue;
    sum += m.f1;
    ++n;
  }
  return sum / static_cast<double>(n);
}

struct ZoneAccuracy {
  std::optional<double> in_zone;
  std::optional<double> out_of_zone;
  std::size_t in_zone_count = 0;
  std::size_t out_of_zone_count = 0;
};

inline ZoneAccuracy zone_accuracy(std::span<const PredictionRecord> dump) {
  ZoneAccuracy z;
  std::size_t iz_ok = 0, oz_ok = 0;
  for (const auto& r : dump) {
    if (!r.in_zone) continue;
    const bool ok = r.gold == r.predicted;
    if (*r.in_zone) {
      ++z.in_zone_count;
      iz_ok += ok ? 1 : 0;
    } else {
      ++z.out_of_zone_count;
      oz_ok += ok ? 1 : 0;
    }
  }
  if (z.in_zone_count) z.in_zone = static_cast<double>(iz_ok) / z.in_zone_count;
  if (z.out_of_zone_count) z.out_of_zone = static_cast<double>(oz_ok) / z.out_of_zone_count;
  return z;
}

// ---------------------------------------------------------------------------
// Plate-appearance consistency

struct PaTally {
  std::size_t pitches = 0;
  std::size_t correct = 0;
};

inline std::map<std::pair<std::string, int>, PaTally> tally_plate_appearances(
    std::span<const PredictionRecord> dump) {
  std::map<std::pair<std::string, int>, PaTally> out;
  for (const auto& r : dump) {
    auto& t = out[{r.game_id, r.pa_id}];
    ++t.pitches;
    t.correct += r.gold == r.predicted ? 1 : 0;
  }
  return out;
}

// (X, fraction of plate appearances with at least X correct predictions)
// for X = 1 .. longest plate appearance.
inline std::vector<std::pair<int, double>> consistency_curve(std::span<const PredictionRecord> dump) {
  const auto pas = tally_plate_appearances(dump);
  std::size_t longest = 0;
  for (const auto& [k, t] : pas) longest = std::max(longest, t.pitches);
  std::vector<std::pair<int, double>> out;
  for (std::size_t x = 1; x <= longest; ++x) {
    std::size_t n = 0;
    for (const auto& [k, t] : pas) n += t.correct >= x ? 1 : 0;
    out.emplace_back(static_cast<int>(x), static_cast<double>(n) / static_cast<double>(pas.size()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Arsenal breakdown

struct ArsenalBin {
  std::string name;
  int lo = 0;
  int hi = 0;  // inclusive; 0 means unbounded
  std::size_t count = 0;
  std::size_t correct = 0;
  std::optional<double> accuracy;
};

inline std::vector<ArsenalBin> arsenal_breakdown(std::span<const PredictionRecord> dump) {
  std::vector<ArsenalBin> bins(4);
  const std::array<std::tuple<const char*, int, int>, 4> edges = {
      {{"1", 1, 1}, {"2-3", 2, 3}, {"4-5", 4, 5}, {"6+", 6, 0}}};
  for (std::size_t i = 0; i < 4; ++i) std::tie(bins[i].name, bins[i].lo, bins[i].hi) = edges[i];
  for (const auto& r : dump) {
    if (!r.arsenal_size) continue;
    for (auto& b : bins) {
      if (*r.arsenal_size >= b.lo && (b.hi == 0 || *r.arsenal_size <= b.hi)) {
        ++b.count;
        b.correct += r.gold == r.predicted ? 1 : 0;
      }
    }
  }
  for (auto& b : bins) {
    if (b.count) b.accuracy = static_cast<double>(b.correct) / static_cast<double>(b.count);
  }
  return bins;
}

// ---------------------------------------------------------------------------
// Confusion

struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> counts;  // [gold][predicted]

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& row : counts) {
      for (auto c : row) n += c;
    }
    return n;
  }
};

inline ConfusionMatrix confusion_matrix(std::span<const PredictionRecord> dump) {
  ConfusionMatrix m;
  m.labels = label_order(dump);
  m.counts.assign(m.labels.size(), std::vector<std::size_t>(m.labels.size(), 0));
  auto index = [&](const std::string& l) {
    return static_cast<std::size_t>(std::find(m.labels.begin(), m.labels.end(), l) - m.labels.begin());
  };
  for (const auto& r : dump) ++m.counts[index(r.gold)][index(r.predicted)];
  return m;
}

// Misclassified instances per gold class, for classes present in gold.
inline std::vector<std::pair<std::string, std::size_t>> error_counts(
    std::span<const PredictionRecord> dump) {
  const auto m = confusion_matrix(dump);
  std::vector<std::pair<std::string, std::size_t>> out;
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    std::size_t row = 0;
    for (auto c : m.counts[i]) row += c;
    if (row > 0) out.emplace_back(m.labels[i], row - m.counts[i][i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report

struct TaskReport {
  PredictionTask task = PredictionTask::PitchTypeMulti;
  std::size_t instances = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassMetrics> classes;
  std::optional<ZoneAccuracy> zone;
  std::vector<std::pair<int, double>> consistency;
  std::vector<ArsenalBin> arsenal;
  std::optional<ConfusionMatrix> confusion;
  std::vector<std::pair<std::string, std::size_t>> errors;

  const ClassMetrics* find_class(std::string_view label) const {
    for (const auto& c : classes) {
      if (c.label == label) return &c;
    }
    return nullptr;
  }
};

// All records must share one task.
inline TaskReport evaluate(std::span<const PredictionRecord> dump) {
  detail::require_nonempty(dump);
  TaskReport r;
  r.task = dump.front().task;
  for (const auto& rec : dump) {
    if (rec.task != r.task) throw DataError("evaluation: dump mixes tasks");
  }
  r.instances = dump.size();
  r.accuracy = accuracy(dump);
  r.macro_f1 = macro_f1(dump);
  r.classes = class_metrics(dump);
  if (r.task == PredictionTask::SwingDecision) {
    r.zone = zone_accuracy(dump);
  } else {
    r.consistency = consistency_curve(dump);
    r.arsenal = arsenal_breakdown(dump);
    r.confusion = confusion_matrix(dump);
    r.errors = error_counts(dump);
  }
  return r;
}

namespace detail {

inline std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string opt6(const std::optional<double>& v) { return v ? fixed6(*v) : "absent"; }

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os << text;
  if (!os) throw IoError("failed writing " + path.string());
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Fixed 640x400 canvas, plot area [70, 600] x [40, 340].
class Svg {
 public:
  explicit Svg(std::string_view title) {
    os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
           "viewBox=\"0 0 640 400\" font-family=\"sans-serif\" font-size=\"11\">\n"
        << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    text(320, 22, title, "middle", 14);
  }

  void text(double x, double y, std::string_view s, std::string_view anchor = "start",
            int size = 11) {
    os_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"" << anchor
        << "\" font-size=\"" << size << "\">" << xml_escape(s) << "</text>\n";
  }

  void rect(double x, double y, double w, double h, std::string_view fill) {
    os_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
        << "\" height=\"" << num(h) << "\" fill=\"" << fill << "\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, std::string_view stroke = "black") {
    os_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
        << "\" y2=\"" << num(y2) << "\" stroke=\"" << stroke << "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, std::string_view stroke) {
    os_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      os_ << (i ? " " : "") << num(pts[i].first) << ',' << num(pts[i].second);
    }
    os_ << "\"/>\n";
  }

  void circle(double x, double y, double r, std::string_view fill) {
    os_ << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(r)
        << "\" fill=\"" << fill << "\"/>\n";
  }

  // Axes with a [0, ymax] vertical scale.
  void axes(double ymax, std::string_view xlabel, std::string_view ylabel) {
    line(kLeft, kBottom, kRight, kBottom);
    line(kLeft, kTop, kLeft, kBottom);
    for (int i = 0; i <= 4; ++i) {
      const double v = ymax * i / 4.0;
      const double y = kBottom - (kBottom - kTop) * i / 4.0;
      line(kLeft - 4, y, kLeft, y);
      text(kLeft - 6, y + 4, ymax >= 10 ? std::to_string(static_cast<long>(v + 0.5)) : fixed2(v), "end");
    }
    text((kLeft + kRight) / 2, 385, xlabel, "middle");
    os_ << "<text x=\"18\" y=\"190\" text-anchor=\"middle\" transform=\"rotate(-90 18 190)\">"
        << xml_escape(ylabel) << "</text>\n";
  }

  std::string str() const { return os_.str() + "</svg>\n"; }

  static constexpr double kLeft = 70, kRight = 600, kTop = 40, kBottom = 340;

  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
  }
  static std::string fixed2(double v) { return num(v); }

 private:
  std::ostringstream os_;
};

inline std::string bar_chart(std::string_view title, std::string_view xlabel,
                             std::string_view ylabel,
                             const std::vector<std::pair<std::string, std::optional<double>>>& bars,
                             double ymax) {
  Svg s(title);
  s.axes(ymax, xlabel, ylabel);
  const double slot = (Svg::kRight - Svg::kLeft) / std::max<std::size_t>(bars.size(), 1);
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double cx = Svg::kLeft + slot * (static_cast<double>(i) + 0.5);
    s.text(cx, Svg::kBottom + 16, bars[i].first, "middle");
    if (!bars[i].second) {
      s.text(cx, Svg::kBottom - 6, "absent", "middle");
      continue;
    }
    const double h = ymax > 0 ? (Svg::kBottom - Svg::kTop) * (*bars[i].second / ymax) : 0.0;
    s.rect(cx - slot * 0.35, Svg::kBottom - h, slot * 0.7, h, "#4878a8");
    s.text(cx, Svg::kBottom - h - 4,
           ymax >= 10 ? std::to_string(static_cast<long>(*bars[i].second + 0.5)) : Svg::fixed2(*bars[i].second),
           "middle");
  }
  return s.str();
}

inline std::string consistency_svg(const std::vector<std::pair<int, double>>& curve) {
  Svg s("Plate appearances with at least X correct predictions");
  s.axes(1.0, "X (correct predictions in the plate appearance)", "fraction of plate appearances");
  const std::size_t n = curve.size();
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = n > 1 ? Svg::kLeft + (Svg::kRight - Svg::kLeft) * static_cast<double>(i) / (n - 1)
                           : (Svg::kLeft + Svg::kRight) / 2;
    const double y = Svg::kBottom - (Svg::kBottom - Svg::kTop) * curve[i].second;
    pts.emplace_back(x, y);
    s.text(x, Svg::kBottom + 16, std::to_string(curve[i].first), "middle");
  }
  if (!pts.empty()) s.polyline(pts, "#4878a8");
  for (const auto& [x, y] : pts) s.circle(x, y, 3, "#4878a8");
  return s.str();
}

inline std::string confusion_svg(const ConfusionMatrix& m) {
  Svg s("Confusion matrix (rows: gold, columns: predicted)");
  const std::size_t k = m.labels.size();
  const double size = std::min(280.0 / std::max<std::size_t>(k, 1), 40.0);
  const double x0 = 200, y0 = 60;
  std::size_t peak = 1;
  for (const auto& row : m.counts) {
    for (auto c : row) peak = std::max(peak, c);
  }
  for (std::size_t i = 0; i < k; ++i) {
    s.text(x0 - 6, y0 + size * (static_cast<double>(i) + 0.5) + 4, m.labels[i], "end");
    s.text(x0 + size * (static_cast<double>(i) + 0.5), y0 - 6, m.labels[i], "middle");
    for (std::size_t j = 0; j < k; ++j) {
      const int shade = 255 - static_cast<int>(200.0 * static_cast<double>(m.counts[i][j]) / peak);
      char fill[16];
      std::snprintf(fill, sizeof fill, "#%02x%02xff", shade, shade);
      s.rect(x0 + size * static_cast<double>(j), y0 + size * static_cast<double>(i), size, size, fill);
    }
  }
  return s.str();
}

}  // namespace detail

// Published reference figures, listed in summary.tsv next to desk results.
struct ReferenceFigure {
  std::string item;
  double published;
  std::string source;  // who reported it
};

inline const std::vector<ReferenceFigure>& reference_figures() {
  static const std::vector<ReferenceFigure> refs = {
      {"pitch_type_binary.accuracy", 0.637, "world model"},
      {"pitch_type_binary.recall", 0.792, "world model"},
      {"pitch_type_binary.macro_f1", 0.722, "world model"},
      {"pitch_type_binary.accuracy", 0.633, "RNN baseline"},
      {"pitch_type_binary.recall", 0.792, "RNN baseline"},
      {"pitch_type_binary.macro_f1", 0.720, "RNN baseline"},
      {"swing.iz_accuracy", 0.766, "world model"},
      {"swing.oz_accuracy", 0.792, "world model"},
      {"swing.iz_accuracy", 0.325, "MLP baseline"},
      {"swing.oz_accuracy", 0.704, "MLP baseline"},
      {"swing.accuracy", 0.78, "world model (headline)"},
      {"consistency.at_least_1", 0.838, "world model"},
      {"consistency.at_least_2", 0.547, "world model"},
      {"arsenal.2-3.accuracy", 0.668, "world model"},
      {"next_pitch.accuracy", 0.64, "world model (abstract headline)"},
      {"next_pitch.accuracy", 0.84, "world model (results headline)"},
  };
  return refs;
}

// Writes one metrics table per task plus the pitch-type analyses, plots and
// the summary. Re-running on the same reports produces identical bytes.
inline void emit_report(std::span<const TaskReport> reports, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create report directory " + dir.string());
  }
  using detail::fixed6;
  std::map<std::string, std::optional<double>> desk;

  const TaskReport* pitch = nullptr;
  for (const auto& r : reports) {
    if (r.task == PredictionTask::PitchTypeMulti) pitch = &r;
  }
  for (const auto& r : reports) {
    if (!pitch && r.task == PredictionTask::PitchTypeBinary) pitch = &r;
  }

  for (const auto& r : reports) {
    const std::string name(task_name(r.task));
    std::ostringstream os;
    if (r.task == PredictionTask::PitchTypeBinary) {
      os << "# recall column of the headline row is the recall of class FB (fastball)\n";
    }
    os << "metric\tclass\tvalue\n";
    os << "instances\t\t" << r.instances << '\n';
    os << "accuracy\t\t" << fixed6(r.accuracy) << '\n';
    os << "macro_f1\t\t" << fixed6(r.macro_f1) << '\n';
    for (const auto& c : r.classes) {
      os << "support\t" << c.label << '\t' << c.support << '\n';
      os << "precision\t" << c.label << '\t' << fixed6(c.precision) << '\n';
      os << "recall\t" << c.label << '\t' << (c.support ? fixed6(c.recall) : "absent") << '\n';
      os << "f1\t" << c.label << '\t' << fixed6(c.f1) << '\n';
    }
    if (r.zone) {
      os << "iz_accuracy\t\t" << detail::opt6(r.zone->in_zone) << '\n';
      os << "oz_accuracy\t\t" << detail::opt6(r.zone->out_of_zone) << '\n';
      os << "iz_instances\t\t" << r.zone->in_zone_count << '\n';
      os << "oz_instances\t\t" << r.zone->out_of_zone_count << '\n';
      desk["swing.iz_accuracy"] = r.zone->in_zone;
      desk["swing.oz_accuracy"] = r.zone->out_of_zone;
    }
    detail::write_text(dir / ("metrics." + name + ".tsv"), os.str());
    desk[name + ".accuracy"] = r.accuracy;
    desk[name + ".macro_f1"] = r.macro_f1;
    if (r.task == PredictionTask::PitchTypeBinary) {
      const auto* fb = r.find_class(kFastballLabel);
      if (fb && fb->support) desk[name + ".recall"] = fb->recall;
    }
  }
  if (const auto* m = [&]() -> const TaskReport* {
        for (const auto& r : reports) {
          if (r.task == PredictionTask::PitchTypeMulti) return &r;
        }
        return nullptr;
      }()) {
    desk["next_pitch.accuracy"] = m->accuracy;
  }

  if (pitch != nullptr) {
    std::ostringstream cons;
    cons << "x\tfraction\n";
    for (const auto& [x, f] : pitch->consistency) cons << x << '\t' << fixed6(f) << '\n';
    detail::write_text(dir / "consistency.tsv", cons.str());
    for (const auto& [x, f] : pitch->consistency) {
      if (x <= 2) desk["consistency.at_least_" + std::to_string(x)] = f;
    }

    std::ostringstream ars;
    ars << "bin\tcount\taccuracy\n";
    for (const auto& b : pitch->arsenal) {
      ars << b.name << '\t' << b.count << '\t' << detail::opt6(b.accuracy) << '\n';
      desk["arsenal." + b.name + ".accuracy"] = b.accuracy;
    }
    detail::write_text(dir / "arsenal.tsv", ars.str());

    const auto& m = *pitch->confusion;
    std::ostringstream conf;
    conf << "gold\\predicted";
    for (const auto& l : m.labels) conf << '\t' << l;
    conf << '\n';
    for (std::size_t i = 0; i < m.labels.size(); ++i) {
      conf << m.labels[i];
      for (auto c : m.counts[i]) conf << '\t' << c;
      conf << '\n';
    }
    detail::write_text(dir / "confusion.tsv", conf.str());

    std::ostringstream err;
    err << "class\terrors\n";
    for (const auto& [l, n] : pitch->errors) err << l << '\t' << n << '\n';
    detail::write_text(dir / "errors.tsv", err.str());

    detail::write_text(dir / "consistency.svg", detail::consistency_svg(pitch->consistency));
    std::vector<std::pair<std::string, std::optional<double>>> abars;
    for (const auto& b : pitch->arsenal) abars.emplace_back(b.name, b.accuracy);
    detail::write_text(dir / "arsenal.svg",
                       detail::bar_chart("Accuracy by pitcher arsenal size", "arsenal size",
                                         "accuracy", abars, 1.0));
    detail::write_text(dir / "confusion.svg", detail::confusion_svg(m));
    std::vector<std::pair<std::string, std::optional<double>>> ebars;
    double emax = 1.0;
    for (const auto& [l, n] : pitch->errors) {
      ebars.emplace_back(l, static_cast<double>(n));
      emax = std::max(emax, static_cast<double>(n));
    }
    detail::write_text(dir / "errors.svg",
                       detail::bar_chart("Misclassified pitches by gold class", "gold class",
                                         "errors", ebars, emax));
  }

  std::ostringstream sum;
  sum << "item\tsource\tpublished\tdesk\tnote\n";
  for (const auto& ref : reference_figures()) {
    const auto it = desk.find(ref.item);
    std::string note = "not comparable at desk scale";
    if (ref.item == "next_pitch.accuracy") note += "; published headline figures 0.64, 0.84 and 0.637 conflict";
    if (ref.item == "pitch_type_binary.recall") note += "; desk value is recall of class FB";
    sum << ref.item << '\t' << ref.source << '\t' << detail::fixed6(ref.published) << '\t'
        << (it != desk.end() ? detail::opt6(it->second) : "absent") << '\t' << note << '\n';
  }
  detail::write_text(dir / "summary.tsv", sum.str());
}

}  // namespace sabergen
