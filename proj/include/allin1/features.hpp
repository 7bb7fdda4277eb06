#pragma once

// Hybrid document features: a binary TF-IDF block over character n-grams,
// followed by the min-max scaled averaged word embedding. The classifier sees
// the concatenation, n-gram columns first.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "allin1/corpus.hpp"
#include "allin1/embeddings.hpp"

namespace allin1 {

struct NgramSettings {
  int n_min = 3;
  int n_max = 10;
  int min_df = 1;
};

// Tokens joined by single spaces; n-grams may span the joining space.
std::string analysis_string(std::span<const std::string> tokens);

// Distinct character (code point) n-grams of `text` with n in [n_min, n_max],
// sorted bytewise.
std::vector<std::string> char_ngrams(std::string_view text, int n_min, int n_max);

class NgramVocabulary {
 public:
  struct Entry {
    std::string ngram;
    std::size_t df;
    bool operator==(const Entry&) const = default;
  };

  NgramVocabulary() = default;
  // Entries must be sorted by n-gram with df in [1, n_docs].
  NgramVocabulary(int n_min, int n_max, std::size_t n_docs, std::vector<Entry> entries);

  int n_min() const { return n_min_; }
  int n_max() const { return n_max_; }
  std::size_t n_docs() const { return n_docs_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

  std::optional<std::size_t> column(const std::string& ngram) const;
  // ln((1 + n_docs) / (1 + df)) + 1
  double idf(std::size_t column) const { return idf_[column]; }

  bool operator==(const NgramVocabulary& o) const {
    return n_min_ == o.n_min_ && n_max_ == o.n_max_ && n_docs_ == o.n_docs_ &&
           entries_ == o.entries_;
  }

 private:
  int n_min_ = 3;
  int n_max_ = 10;
  std::size_t n_docs_ = 0;
  std::vector<Entry> entries_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::size_t> index_;
};

NgramVocabulary fit_ngrams(std::span<const LabeledDoc> train_docs, const NgramSettings& settings);

using SparseBlock = Eigen::SparseVector<double>;

// Binary term frequency times idf, L2-normalized. Empty when the document
// contains no vocabulary n-gram.
SparseBlock vectorize_ngrams(const LabeledDoc& doc, const NgramVocabulary& vocab);

template <typename Scalar>
struct MinMaxScaler {
  Vector<Scalar> mins;
  Vector<Scalar> maxs;

  Eigen::Index dim() const { return mins.size(); }

  template <typename Other>
  MinMaxScaler<Other> cast() const {
    return {mins.template cast<Other>(), maxs.template cast<Other>()};
  }
  bool operator==(const MinMaxScaler& o) const {
    return mins.size() == o.mins.size() && mins == o.mins && maxs == o.maxs;
  }
};

MinMaxScaler<double> fit_minmax(std::span<const Eigen::VectorXd> vectors);

// (v - min) / (max - min) per dimension, 0 for constant dimensions, clipped
// to [0, 1].
template <typename Scalar>
Eigen::VectorXd apply_minmax(const Eigen::Ref<const Eigen::VectorXd>& v,
                             const MinMaxScaler<Scalar>& scaler) {
  if (v.size() != scaler.dim()) throw DataError("apply_minmax: dimension mismatch");
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double lo = static_cast<double>(scaler.mins(i));
    const double hi = static_cast<double>(scaler.maxs(i));
    out(i) = hi > lo ? std::clamp((v(i) - lo) / (hi - lo), 0.0, 1.0) : 0.0;
  }
  return out;
}

struct FeatureVector {
  SparseBlock sparse;     // n-gram block, width |vocab|
  Eigen::VectorXd dense;  // scaled embedding block, width dim

  Eigen::Index width() const { return sparse.size() + dense.size(); }

  // The concatenated vector [sparse, dense].
  Eigen::VectorXd densify() const;

  bool operator==(const FeatureVector& o) const;
};

template <typename Scalar>
FeatureVector featurize(const LabeledDoc& doc, const NgramVocabulary& vocab,
                        const EmbeddingTable<Scalar>& table, const MinMaxScaler<Scalar>& scaler) {
  return {vectorize_ngrams(doc, vocab),
          apply_minmax(embed_document(std::span<const std::string>(doc.tokens), table).vector, scaler)};
}

}  // namespace allin1
