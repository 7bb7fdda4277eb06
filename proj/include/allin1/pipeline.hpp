#pragma once

// End-to-end glue: fit the feature extractors and the one-vs-rest model on
// the union of every training language, and apply the result. A bundle
// holds a single LinearModel however many languages it serves.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "allin1/corpus.hpp"
#include "allin1/embeddings.hpp"
#include "allin1/features.hpp"
#include "allin1/svm.hpp"

namespace allin1 {

enum class TrainMode { monolingual, multilingual };

std::string_view to_string(TrainMode mode);
TrainMode parse_train_mode(std::string_view name);

struct PipelineSettings {
  TrainMode mode = TrainMode::multilingual;
  std::vector<Language> languages;  // languages the bundle was trained on
  Language pivot = Language::en;
  NgramSettings ngrams;
  TrainConfig train;
  bool with_dev = false;

  bool operator==(const PipelineSettings& o) const;
};

// Parameters are stored in single precision, the on-disk precision, so a
// bundle predicts identically before and after a save/load round trip.
struct ModelBundle {
  PipelineSettings settings;
  NgramVocabulary vocab;
  MinMaxScaler<float> scaler;
  std::map<Language, EmbeddingTable<float>> tables;
  LinearModel<float> model;

  Eigen::Index feature_width() const { return static_cast<Eigen::Index>(vocab.size()) + scaler.dim(); }
  bool operator==(const ModelBundle&) const = default;
};

// `docs` maps each training language to its labeled documents, `tables` to
// its (aligned, row-normalized) embeddings. Every labeled language needs a
// table of the same dimension.
ModelBundle train_bundle(const std::map<Language, std::vector<LabeledDoc>>& docs,
                         const std::map<Language, EmbeddingTable<double>>& tables,
                         PipelineSettings settings);

FeatureVector featurize(const ModelBundle& bundle, const LabeledDoc& doc);

struct Predictions {
  std::vector<CanonicalLabel> labels;
  std::size_t tokens = 0;
  std::size_t oov_tokens = 0;

  double oov_rate() const { return tokens == 0 ? 0.0 : static_cast<double>(oov_tokens) / tokens; }
};

// Throws UsageError if a document's language has no table in the bundle.
Predictions predict_docs(const ModelBundle& bundle, std::span<const LabeledDoc> docs);

}  // namespace allin1
