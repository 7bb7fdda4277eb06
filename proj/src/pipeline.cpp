#include "allin1/pipeline.hpp"

#include <algorithm>

namespace allin1 {

std::string_view to_string(TrainMode mode) {
  return mode == TrainMode::monolingual ? "monolingual" : "multilingual";
}

TrainMode parse_train_mode(std::string_view name) {
  if (name == "monolingual") return TrainMode::monolingual;
  if (name == "multilingual") return TrainMode::multilingual;
  throw UsageError("unknown mode '" + std::string(name) + "' (expected monolingual|multilingual)");
}

bool PipelineSettings::operator==(const PipelineSettings& o) const {
  return mode == o.mode && languages == o.languages && pivot == o.pivot &&
         ngrams.n_min == o.ngrams.n_min && ngrams.n_max == o.ngrams.n_max &&
         ngrams.min_df == o.ngrams.min_df && train.C == o.train.C && train.tol == o.train.tol &&
         train.max_epochs == o.train.max_epochs && train.seed == o.train.seed &&
         train.bias_scale == o.train.bias_scale && with_dev == o.with_dev;
}

ModelBundle train_bundle(const std::map<Language, std::vector<LabeledDoc>>& docs,
                         const std::map<Language, EmbeddingTable<double>>& tables,
                         PipelineSettings settings) {
  settings.train.validate();
  if (docs.empty()) throw UsageError("no training data");

  ModelBundle bundle;
  settings.languages.clear();
  std::vector<LabeledDoc> all;
  Eigen::Index dim = -1;
  for (const auto& [lang, lang_docs] : docs) {
    auto table = tables.find(lang);
    if (table == tables.end())
      throw UsageError("no embedding table for training language " + std::string(to_string(lang)));
    if (dim >= 0 && table->second.dim() != dim)
      throw DataError("embedding tables differ in dimension");
    dim = table->second.dim();
    bundle.tables.emplace(lang, table->second.cast<float>());
    settings.languages.push_back(lang);
    for (const LabeledDoc& doc : lang_docs) {
      if (!doc.label) throw DataError("training document '" + doc.id + "' has no label");
      all.push_back(doc);
      all.back().language = lang;
    }
  }
  if (all.empty()) throw UsageError("no training documents");

  bundle.vocab = fit_ngrams(all, settings.ngrams);

  std::vector<Eigen::VectorXd> embedded;
  embedded.reserve(all.size());
  for (const LabeledDoc& doc : all)
    embedded.push_back(embed_document(std::span<const std::string>(doc.tokens),
                                      bundle.tables.at(doc.language))
                           .vector);
  bundle.scaler = fit_minmax(embedded).cast<float>();

  std::vector<FeatureVector> features;
  std::vector<CanonicalLabel> labels;
  features.reserve(all.size());
  labels.reserve(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    features.push_back({vectorize_ngrams(all[i], bundle.vocab), apply_minmax(embedded[i], bundle.scaler)});
    labels.push_back(*all[i].label);
  }
  bundle.model = train_ovr(features, labels, settings.train).cast<float>();
  bundle.settings = std::move(settings);
  return bundle;
}

FeatureVector featurize(const ModelBundle& bundle, const LabeledDoc& doc) {
  auto table = bundle.tables.find(doc.language);
  if (table == bundle.tables.end())
    throw UsageError("language " + std::string(to_string(doc.language)) +
                     " is not covered by this model");
  return featurize(doc, bundle.vocab, table->second, bundle.scaler);
}

Predictions predict_docs(const ModelBundle& bundle, std::span<const LabeledDoc> docs) {
  Predictions out;
  out.labels.reserve(docs.size());
  for (const LabeledDoc& doc : docs) {
    auto table = bundle.tables.find(doc.language);
    if (table == bundle.tables.end())
      throw UsageError("language " + std::string(to_string(doc.language)) +
                       " is not covered by this model");
    const DocumentEmbedding emb = embed_document(std::span<const std::string>(doc.tokens), table->second);
    out.tokens += doc.tokens.size();
    out.oov_tokens += emb.oov_count;
    const FeatureVector x{vectorize_ngrams(doc, bundle.vocab), apply_minmax(emb.vector, bundle.scaler)};
    out.labels.push_back(predict(bundle.model, x));
  }
  return out;
}

}  // namespace allin1
