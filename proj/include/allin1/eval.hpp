#pragma once

// Classification metrics: per-label precision/recall/F1, support-weighted F1,
// micro F1 and exact accuracy, plus macro averages across languages.

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "allin1/corpus.hpp"
#include "allin1/language.hpp"

namespace allin1 {

struct PredictionSet {
  Language language = Language::en;
  std::vector<std::pair<CanonicalLabel, CanonicalLabel>> pairs;  // (gold, predicted)
};

struct LabelScores {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::size_t support = 0;  // gold occurrences
};

struct MetricsReport {
  Language language = Language::en;
  double weighted_f1 = 0;
  double micro_f1 = 0;
  double exact_accuracy = 0;
  std::size_t count = 0;
  std::map<CanonicalLabel, LabelScores> per_label;
};

// Zero denominators give 0. Labels that are neither gold nor predicted are
// left out.
std::map<CanonicalLabel, LabelScores> per_label_prf(const PredictionSet& preds);
double weighted_f1(const PredictionSet& preds);
double micro_f1(const PredictionSet& preds);
double exact_accuracy(const PredictionSet& preds);

MetricsReport evaluate(const PredictionSet& preds);

struct AveragedMetrics {
  double weighted_f1 = 0;
  double micro_f1 = 0;
  double exact_accuracy = 0;
};

AveragedMetrics macro_average(std::span<const MetricsReport> reports);

// Human-readable table, percentages with two decimals.
std::string format_report(const MetricsReport& report);
// {"language", "count", "weighted_f1", "micro_f1", "exact_accuracy",
//  "per_label": {label: {"precision", "recall", "f1", "support"}}}
std::string report_to_json(const MetricsReport& report);

}  // namespace allin1
