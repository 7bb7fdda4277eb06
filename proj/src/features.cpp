#include "allin1/features.hpp"

#include <algorithm>
#include <cmath>

#include "utf8.hpp"

namespace allin1 {

std::string analysis_string(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<std::string> char_ngrams(std::string_view text, int n_min, int n_max) {
  const std::vector<std::size_t> bounds = utf8::boundaries(text);
  const std::size_t n_chars = bounds.size() - 1;
  std::vector<std::string> grams;
  for (std::size_t start = 0; start < n_chars; ++start) {
    for (int n = n_min; n <= n_max; ++n) {
      const std::size_t end = start + static_cast<std::size_t>(n);
      if (end > n_chars) break;
      grams.emplace_back(text.substr(bounds[start], bounds[end] - bounds[start]));
    }
  }
  std::sort(grams.begin(), grams.end());
  grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
  return grams;
}

NgramVocabulary::NgramVocabulary(int n_min, int n_max, std::size_t n_docs,
                                 std::vector<Entry> entries)
    : n_min_(n_min), n_max_(n_max), n_docs_(n_docs), entries_(std::move(entries)) {
  if (n_min_ < 1 || n_min_ > n_max_) throw UsageError("n-gram range must satisfy 1 <= n_min <= n_max");
  idf_.reserve(entries_.size());
  index_.reserve(entries_.size());
  for (std::size_t col = 0; col < entries_.size(); ++col) {
    const Entry& e = entries_[col];
    if (col > 0 && !(entries_[col - 1].ngram < e.ngram))
      throw DataError("n-gram vocabulary entries must be strictly sorted");
    if (e.df < 1 || e.df > n_docs_) throw DataError("n-gram document frequency out of range");
    index_.emplace(e.ngram, col);
    idf_.push_back(std::log((1.0 + static_cast<double>(n_docs_)) / (1.0 + static_cast<double>(e.df))) +
                   1.0);
  }
}

std::optional<std::size_t> NgramVocabulary::column(const std::string& ngram) const {
  auto it = index_.find(ngram);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NgramVocabulary fit_ngrams(std::span<const LabeledDoc> train_docs, const NgramSettings& settings) {
  if (train_docs.empty()) throw UsageError("fit_ngrams: no training documents");
  if (settings.n_min < 1 || settings.n_min > settings.n_max)
    throw UsageError("n-gram range must satisfy 1 <= n_min <= n_max");
  std::unordered_map<std::string, std::size_t> df;
  for (const LabeledDoc& doc : train_docs)
    for (std::string& g : char_ngrams(analysis_string(doc.tokens), settings.n_min, settings.n_max))
      ++df[std::move(g)];

  std::vector<NgramVocabulary::Entry> entries;
  entries.reserve(df.size());
  for (auto& [gram, count] : df)
    if (count >= static_cast<std::size_t>(std::max(settings.min_df, 1))) entries.push_back({gram, count});
  if (entries.empty()) throw DataError("fit_ngrams: empty n-gram vocabulary");
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.ngram < b.ngram; });
  return NgramVocabulary(settings.n_min, settings.n_max, train_docs.size(), std::move(entries));
}

SparseBlock vectorize_ngrams(const LabeledDoc& doc, const NgramVocabulary& vocab) {
  std::vector<std::size_t> columns;
  for (const std::string& g : char_ngrams(analysis_string(doc.tokens), vocab.n_min(), vocab.n_max()))
    if (auto col = vocab.column(g)) columns.push_back(*col);
  std::sort(columns.begin(), columns.end());

  SparseBlock block(static_cast<Eigen::Index>(vocab.size()));
  block.reserve(static_cast<Eigen::Index>(columns.size()));
  double sq = 0;
  for (std::size_t col : columns) sq += vocab.idf(col) * vocab.idf(col);
  const double norm = std::sqrt(sq);
  for (std::size_t col : columns)
    block.insertBack(static_cast<Eigen::Index>(col)) = vocab.idf(col) / norm;
  return block;
}

MinMaxScaler<double> fit_minmax(std::span<const Eigen::VectorXd> vectors) {
  if (vectors.empty()) throw UsageError("fit_minmax: no vectors");
  MinMaxScaler<double> scaler{vectors.front(), vectors.front()};
  for (const Eigen::VectorXd& v : vectors) {
    if (v.size() != scaler.dim()) throw DataError("fit_minmax: vectors differ in dimension");
    scaler.mins = scaler.mins.cwiseMin(v);
    scaler.maxs = scaler.maxs.cwiseMax(v);
  }
  return scaler;
}

Eigen::VectorXd FeatureVector::densify() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(width());
  for (SparseBlock::InnerIterator it(sparse); it; ++it) out(it.index()) = it.value();
  out.tail(dense.size()) = dense;
  return out;
}

bool FeatureVector::operator==(const FeatureVector& o) const {
  if (sparse.size() != o.sparse.size() || sparse.nonZeros() != o.sparse.nonZeros() ||
      dense.size() != o.dense.size() || dense != o.dense)
    return false;
  for (Eigen::Index k = 0; k < sparse.nonZeros(); ++k)
    if (sparse.innerIndexPtr()[k] != o.sparse.innerIndexPtr()[k] ||
        sparse.valuePtr()[k] != o.sparse.valuePtr()[k])
      return false;
  return true;
}

}  // namespace allin1
