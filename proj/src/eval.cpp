#include "allin1/eval.hpp"

#include <array>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "allin1/error.hpp"

namespace allin1 {

namespace {

void require_nonempty(const PredictionSet& preds) {
  if (preds.pairs.empty()) throw UsageError("metrics need at least one prediction");
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::map<CanonicalLabel, LabelScores> per_label_prf(const PredictionSet& preds) {
  require_nonempty(preds);
  std::array<std::size_t, kNumLabels> tp{}, gold{}, predicted{};
  for (const auto& [g, p] : preds.pairs) {
    ++gold[index_of(g)];
    ++predicted[index_of(p)];
    if (g == p) ++tp[index_of(g)];
  }
  std::map<CanonicalLabel, LabelScores> out;
  for (CanonicalLabel label : kAllLabels) {
    const std::size_t k = index_of(label);
    if (gold[k] == 0 && predicted[k] == 0) continue;
    LabelScores s;
    s.precision = ratio(tp[k], predicted[k]);
    s.recall = ratio(tp[k], gold[k]);
    s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    s.support = gold[k];
    out.emplace(label, s);
  }
  return out;
}

double weighted_f1(const PredictionSet& preds) {
  double sum = 0;
  for (const auto& [label, s] : per_label_prf(preds)) sum += s.f1 * static_cast<double>(s.support);
  return sum / static_cast<double>(preds.pairs.size());
}

// Pooled over labels: every error is one FP (predicted label) and one FN
// (gold label), so precision = recall = accuracy.
double micro_f1(const PredictionSet& preds) {
  require_nonempty(preds);
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& [g, p] : preds.pairs) {
    if (g == p) {
      ++tp;
    } else {
      ++fp;
      ++fn;
    }
  }
  const double precision = ratio(tp, tp + fp);
  const double recall = ratio(tp, tp + fn);
  return precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
}

double exact_accuracy(const PredictionSet& preds) {
  require_nonempty(preds);
  std::size_t correct = 0;
  for (const auto& [g, p] : preds.pairs) correct += g == p;
  return ratio(correct, preds.pairs.size());
}

MetricsReport evaluate(const PredictionSet& preds) {
  MetricsReport report;
  report.language = preds.language;
  report.count = preds.pairs.size();
  report.per_label = per_label_prf(preds);
  report.weighted_f1 = weighted_f1(preds);
  report.micro_f1 = micro_f1(preds);
  report.exact_accuracy = exact_accuracy(preds);
  return report;
}

AveragedMetrics macro_average(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw UsageError("macro_average of no reports");
  AveragedMetrics avg;
  for (const MetricsReport& r : reports) {
    avg.weighted_f1 += r.weighted_f1;
    avg.micro_f1 += r.micro_f1;
    avg.exact_accuracy += r.exact_accuracy;
  }
  const auto n = static_cast<double>(reports.size());
  avg.weighted_f1 /= n;
  avg.micro_f1 /= n;
  avg.exact_accuracy /= n;
  return avg;
}

std::string format_report(const MetricsReport& report) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "language        %s (%zu instances)\n",
                std::string(to_string(report.language)).c_str(), report.count);
  out << line;
  std::snprintf(line, sizeof line, "weighted F1     %6.2f\n", 100 * report.weighted_f1);
  out << line;
  std::snprintf(line, sizeof line, "micro F1        %6.2f\n", 100 * report.micro_f1);
  out << line;
  std::snprintf(line, sizeof line, "exact accuracy  %6.2f\n\n", 100 * report.exact_accuracy);
  out << line;
  std::snprintf(line, sizeof line, "%-12s %9s %9s %9s %8s\n", "label", "precision", "recall", "f1",
                "support");
  out << line;
  for (const auto& [label, s] : report.per_label) {
    std::snprintf(line, sizeof line, "%-12s %9.2f %9.2f %9.2f %8zu\n",
                  std::string(to_string(label)).c_str(), 100 * s.precision, 100 * s.recall,
                  100 * s.f1, s.support);
    out << line;
  }
  return out.str();
}

std::string report_to_json(const MetricsReport& report) {
  nlohmann::ordered_json doc;
  doc["language"] = std::string(to_string(report.language));
  doc["count"] = report.count;
  doc["weighted_f1"] = report.weighted_f1;
  doc["micro_f1"] = report.micro_f1;
  doc["exact_accuracy"] = report.exact_accuracy;
  nlohmann::ordered_json labels = nlohmann::ordered_json::object();
  for (const auto& [label, s] : report.per_label)
    labels[std::string(to_string(label))] = {
        {"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}, {"support", s.support}};
  doc["per_label"] = std::move(labels);
  return doc.dump(2) + "\n";
}

}  // namespace allin1
