#pragma once

// Monolingual embedding tables and their alignment into one shared space.
//
// Alignment follows the offline orthogonal-map recipe: word types spelled
// identically in two vocabularies form a pseudo-dictionary, and the
// orthogonal Procrustes solution W = U V^T (from the SVD of X^T Y) maps the
// source space onto the pivot space. Every non-pivot language is mapped onto
// the pivot independently, which makes all spaces mutually comparable.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "allin1/error.hpp"
#include "allin1/language.hpp"

namespace allin1 {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Vocabulary-indexed dense vectors for one language; row i belongs to vocab[i].
template <typename Scalar>
class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  // Throws DataError on duplicate words, a row-count mismatch or an empty
  // vocabulary.
  EmbeddingTable(Language language, std::vector<std::string> vocab, RowMatrix<Scalar> matrix)
      : language_(language), vocab_(std::move(vocab)), matrix_(std::move(matrix)) {
    if (vocab_.empty()) throw DataError("embedding table has an empty vocabulary");
    if (static_cast<Eigen::Index>(vocab_.size()) != matrix_.rows())
      throw DataError("embedding table: vocabulary size does not match matrix rows");
    if (!matrix_.allFinite()) throw NumericError("embedding table contains non-finite values");
    index_.reserve(vocab_.size());
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
      if (!index_.emplace(vocab_[i], static_cast<Eigen::Index>(i)).second)
        throw DataError("embedding table: duplicate word '" + vocab_[i] + "'");
    }
  }

  Language language() const { return language_; }
  Eigen::Index dim() const { return matrix_.cols(); }
  Eigen::Index size() const { return matrix_.rows(); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  const RowMatrix<Scalar>& matrix() const { return matrix_; }

  std::optional<Eigen::Index> find(const std::string& word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  auto row(Eigen::Index i) const { return matrix_.row(i); }

  // Same vocabulary, new vectors (e.g. after rotation or normalization).
  EmbeddingTable with_matrix(RowMatrix<Scalar> matrix) const {
    if (matrix.rows() != matrix_.rows())
      throw DataError("replacement matrix has the wrong number of rows");
    EmbeddingTable out = *this;
    out.matrix_ = std::move(matrix);
    return out;
  }

  template <typename Other>
  EmbeddingTable<Other> cast() const {
    return EmbeddingTable<Other>(language_, vocab_, matrix_.template cast<Other>());
  }

  bool operator==(const EmbeddingTable& o) const {
    return language_ == o.language_ && vocab_ == o.vocab_ && matrix_.rows() == o.matrix_.rows() &&
           matrix_.cols() == o.matrix_.cols() && matrix_ == o.matrix_;
  }

 private:
  Language language_ = Language::en;
  std::vector<std::string> vocab_;
  RowMatrix<Scalar> matrix_;
  std::unordered_map<std::string, Eigen::Index> index_;
};

struct LoadedEmbeddings {
  EmbeddingTable<double> table;
  std::size_t duplicates_skipped = 0;
};

// Text format: optional `<count> <dim>` header (detected when the first line
// holds exactly two integers), then `word v1 ... vdim` per line.
LoadedEmbeddings load_embeddings(std::istream& in, Language language);
LoadedEmbeddings load_embeddings(const std::filesystem::path& path, Language language);

// Writes the same text format (with header), using enough digits for the
// values to round-trip exactly.
void save_embeddings(const EmbeddingTable<double>& table, const std::filesystem::path& path);

// Divides every row by its Euclidean norm; zero rows stay zero.
template <typename Derived>
RowMatrix<typename Derived::Scalar> normalize_rows(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  RowMatrix<Scalar> out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const Scalar norm = out.row(i).norm();
    if (norm > Scalar(0)) out.row(i) /= norm;
  }
  return out;
}

template <typename Scalar>
EmbeddingTable<Scalar> normalize_rows(const EmbeddingTable<Scalar>& table) {
  return table.with_matrix(normalize_rows(table.matrix()));
}

// Row index pairs (source, target) of byte-identical word types.
struct PseudoDictionary {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
};

// Pairs come out in source-vocabulary order; `cap` keeps only the first cap
// pairs. Throws InsufficientDictionaryError when fewer than dim pairs remain.
template <typename Scalar>
PseudoDictionary build_pseudo_dictionary(const EmbeddingTable<Scalar>& src,
                                         const EmbeddingTable<Scalar>& tgt,
                                         std::optional<std::size_t> cap = std::nullopt) {
  PseudoDictionary dict;
  for (Eigen::Index i = 0; i < src.size(); ++i) {
    if (cap && dict.pairs.size() >= *cap) break;
    if (auto j = tgt.find(src.vocab()[static_cast<std::size_t>(i)])) dict.pairs.emplace_back(i, *j);
  }
  const auto needed = static_cast<std::size_t>(std::max(src.dim(), tgt.dim()));
  if (dict.pairs.size() < needed)
    throw InsufficientDictionaryError(
        std::string(to_string(src.language())) + "->" + std::string(to_string(tgt.language())) +
        ": pseudo-dictionary has " + std::to_string(dict.pairs.size()) +
        " shared word types, need at least " + std::to_string(needed));
  return dict;
}

// Orthogonal Procrustes: the d x d orthogonal W minimizing ||X W - Y||_F,
// W = U V^T for the thin SVD X^T Y = U S V^T. Throws NumericError on
// non-finite input and InsufficientDictionaryError when X^T Y is rank
// deficient (W would not be unique).
template <typename DerivedX, typename DerivedY>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, Eigen::Dynamic> fit_orthogonal_map(
    const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& Y) {
  using Scalar = typename DerivedX::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (X.rows() != Y.rows() || X.cols() != Y.cols())
    throw NumericError("fit_orthogonal_map: X and Y must have the same shape");
  if (X.rows() < X.cols())
    throw InsufficientDictionaryError("fit_orthogonal_map: need at least as many pairs as dimensions");
  if (!X.allFinite() || !Y.allFinite())
    throw NumericError("fit_orthogonal_map: non-finite input");

  const Matrix cross = X.transpose() * Y;
  Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericError("fit_orthogonal_map: SVD failed");
  const auto& sigma = svd.singularValues();
  const Scalar floor = sigma(0) * static_cast<Scalar>(cross.cols()) *
                       std::numeric_limits<Scalar>::epsilon();
  if (sigma(0) <= Scalar(0) || sigma(sigma.size() - 1) <= floor)
    throw InsufficientDictionaryError("fit_orthogonal_map: cross-covariance is rank deficient");
  return svd.matrixU() * svd.matrixV().transpose();
}

template <typename Scalar>
struct AlignmentMap {
  Language source_language = Language::en;
  Language pivot_language = Language::en;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> W;
};

template <typename Scalar>
struct AlignmentResult {
  std::map<Language, EmbeddingTable<Scalar>> tables;
  std::map<Language, AlignmentMap<Scalar>> maps;
  std::map<Language, std::size_t> dictionary_sizes;
  // Mean cosine between each dictionary pair after alignment (1 for the pivot).
  std::map<Language, Scalar> mean_dictionary_cosine;
};

// Maps every table onto the pivot's space. The pivot table is returned as is
// with an identity map. Tables are expected to be row-normalized already.
template <typename Scalar>
AlignmentResult<Scalar> align_all(const std::map<Language, EmbeddingTable<Scalar>>& tables,
                                  Language pivot,
                                  std::optional<std::size_t> dictionary_cap = std::nullopt) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  auto pivot_it = tables.find(pivot);
  if (pivot_it == tables.end())
    throw UsageError("pivot language " + std::string(to_string(pivot)) + " has no embedding table");
  const EmbeddingTable<Scalar>& pivot_table = pivot_it->second;

  AlignmentResult<Scalar> result;
  for (const auto& [lang, table] : tables) {
    if (lang == pivot) {
      result.tables.emplace(lang, table);
      result.maps.emplace(lang, AlignmentMap<Scalar>{lang, pivot, Matrix::Identity(table.dim(), table.dim())});
      result.dictionary_sizes.emplace(lang, static_cast<std::size_t>(table.size()));
      result.mean_dictionary_cosine.emplace(lang, Scalar(1));
      continue;
    }
    if (table.dim() != pivot_table.dim())
      throw DataError(std::string(to_string(lang)) + ": embedding dimension " +
                      std::to_string(table.dim()) + " differs from pivot dimension " +
                      std::to_string(pivot_table.dim()));
    const PseudoDictionary dict = build_pseudo_dictionary(table, pivot_table, dictionary_cap);
    const auto n = static_cast<Eigen::Index>(dict.pairs.size());
    Matrix X(n, table.dim()), Y(n, table.dim());
    for (Eigen::Index k = 0; k < n; ++k) {
      X.row(k) = table.row(dict.pairs[static_cast<std::size_t>(k)].first);
      Y.row(k) = pivot_table.row(dict.pairs[static_cast<std::size_t>(k)].second);
    }
    Matrix W;
    try {
      W = fit_orthogonal_map(X, Y);
    } catch (const InsufficientDictionaryError& e) {
      throw InsufficientDictionaryError(std::string(to_string(lang)) + ": " + e.what());
    }
    const Matrix mapped = X * W;
    Scalar cos_sum = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const Scalar denom = mapped.row(k).norm() * Y.row(k).norm();
      cos_sum += denom > Scalar(0) ? mapped.row(k).dot(Y.row(k)) / denom : Scalar(0);
    }
    RowMatrix<Scalar> aligned = table.matrix() * W;
    result.tables.emplace(lang, table.with_matrix(std::move(aligned)));
    result.maps.emplace(lang, AlignmentMap<Scalar>{lang, pivot, std::move(W)});
    result.dictionary_sizes.emplace(lang, dict.pairs.size());
    result.mean_dictionary_cosine.emplace(lang, cos_sum / static_cast<Scalar>(n));
  }
  return result;
}

// Continuous bag-of-words: mean of the in-vocabulary token vectors, zero when
// every token is out of vocabulary.
struct DocumentEmbedding {
  Eigen::VectorXd vector;
  std::size_t oov_count = 0;
};

template <typename Scalar>
DocumentEmbedding embed_document(std::span<const std::string> tokens,
                                 const EmbeddingTable<Scalar>& table) {
  DocumentEmbedding out{Eigen::VectorXd::Zero(table.dim()), 0};
  std::vector<Eigen::Index> rows;
  rows.reserve(tokens.size());
  for (const std::string& token : tokens) {
    if (auto i = table.find(token))
      rows.push_back(*i);
    else
      ++out.oov_count;
  }
  // Summing in row order makes the result independent of token order.
  std::sort(rows.begin(), rows.end());
  for (Eigen::Index i : rows) out.vector += table.row(i).transpose().template cast<double>();
  if (!rows.empty()) out.vector /= static_cast<double>(rows.size());
  return out;
}

}  // namespace allin1
