#include "allin1/svm.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>

namespace allin1 {

void TrainConfig::validate() const {
  if (!(C > 0)) throw UsageError("C must be positive");
  if (!(tol > 0)) throw UsageError("tol must be positive");
  if (max_epochs < 1) throw UsageError("max_epochs must be at least 1");
  if (!std::isfinite(bias_scale)) throw UsageError("bias_scale must be finite");
}

namespace {

// Row access for the solver. Both views accumulate in ascending column order
// with the bias last, so a FeatureVector and its densified form produce the
// same floating-point results.
class FeatureRows {
 public:
  FeatureRows(std::span<const FeatureVector> rows, double bias_scale)
      : rows_(rows), bias_(bias_scale), n_features_(rows.empty() ? 0 : rows.front().width()) {
    for (const FeatureVector& x : rows_) {
      if (x.width() != n_features_) throw DataError("feature vectors differ in width");
      if (x.sparse.size() != rows_.front().sparse.size())
        throw DataError("feature vectors differ in n-gram block width");
      for (Eigen::Index k = 0; k < x.sparse.nonZeros(); ++k)
        if (!std::isfinite(x.sparse.valuePtr()[k])) throw NumericError("non-finite feature value");
      if (!x.dense.allFinite()) throw NumericError("non-finite feature value");
    }
  }

  std::size_t size() const { return rows_.size(); }
  Eigen::Index n_features() const { return n_features_; }

  double dot(std::size_t i, const Eigen::VectorXd& w) const {
    const FeatureVector& x = rows_[i];
    double s = 0;
    const Eigen::Index nnz = x.sparse.nonZeros();
    const double* values = x.sparse.valuePtr();
    const auto* index = x.sparse.innerIndexPtr();
    for (Eigen::Index k = 0; k < nnz; ++k) s += values[k] * w[index[k]];
    const Eigen::Index offset = x.sparse.size();
    for (Eigen::Index k = 0; k < x.dense.size(); ++k)
      if (x.dense[k] != 0) s += x.dense[k] * w[offset + k];
    s += bias_ * w[n_features_];
    return s;
  }

  void axpy(std::size_t i, double a, Eigen::VectorXd& w) const {
    const FeatureVector& x = rows_[i];
    const Eigen::Index nnz = x.sparse.nonZeros();
    const double* values = x.sparse.valuePtr();
    const auto* index = x.sparse.innerIndexPtr();
    for (Eigen::Index k = 0; k < nnz; ++k) w[index[k]] += a * values[k];
    const Eigen::Index offset = x.sparse.size();
    for (Eigen::Index k = 0; k < x.dense.size(); ++k)
      if (x.dense[k] != 0) w[offset + k] += a * x.dense[k];
    if (bias_ != 0) w[n_features_] += a * bias_;
  }

  double squared_norm(std::size_t i) const {
    const FeatureVector& x = rows_[i];
    double s = 0;
    const Eigen::Index nnz = x.sparse.nonZeros();
    const double* values = x.sparse.valuePtr();
    for (Eigen::Index k = 0; k < nnz; ++k) s += values[k] * values[k];
    for (Eigen::Index k = 0; k < x.dense.size(); ++k)
      if (x.dense[k] != 0) s += x.dense[k] * x.dense[k];
    s += bias_ * bias_;
    return s;
  }

 private:
  std::span<const FeatureVector> rows_;
  double bias_;
  Eigen::Index n_features_;
};

class DenseRows {
 public:
  DenseRows(const RowMatrix<double>& X, double bias_scale) : X_(X), bias_(bias_scale) {
    if (!X_.allFinite()) throw NumericError("non-finite feature value");
  }

  std::size_t size() const { return static_cast<std::size_t>(X_.rows()); }
  Eigen::Index n_features() const { return X_.cols(); }

  double dot(std::size_t i, const Eigen::VectorXd& w) const {
    const double* x = X_.data() + static_cast<Eigen::Index>(i) * X_.cols();
    double s = 0;
    for (Eigen::Index k = 0; k < X_.cols(); ++k)
      if (x[k] != 0) s += x[k] * w[k];
    s += bias_ * w[X_.cols()];
    return s;
  }

  void axpy(std::size_t i, double a, Eigen::VectorXd& w) const {
    const double* x = X_.data() + static_cast<Eigen::Index>(i) * X_.cols();
    for (Eigen::Index k = 0; k < X_.cols(); ++k)
      if (x[k] != 0) w[k] += a * x[k];
    if (bias_ != 0) w[X_.cols()] += a * bias_;
  }

  double squared_norm(std::size_t i) const {
    const double* x = X_.data() + static_cast<Eigen::Index>(i) * X_.cols();
    double s = 0;
    for (Eigen::Index k = 0; k < X_.cols(); ++k)
      if (x[k] != 0) s += x[k] * x[k];
    s += bias_ * bias_;
    return s;
  }

 private:
  const RowMatrix<double>& X_;
  double bias_;
};

// Fisher-Yates driven directly by the engine output; std::shuffle and the
// standard distributions are implementation-defined.
void shuffle(std::vector<std::size_t>& order, std::mt19937_64& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
}

template <typename Rows>
Eigen::VectorXd solve_dual(const Rows& rows, std::span<const int> y, const TrainConfig& cfg,
                           TrainTrace* trace) {
  cfg.validate();
  const std::size_t n = rows.size();
  if (n == 0) throw UsageError("train_binary: no training samples");
  if (y.size() != n) throw UsageError("train_binary: label count does not match sample count");
  for (int label : y)
    if (label != 1 && label != -1) throw UsageError("train_binary: labels must be +1 or -1");

  Eigen::VectorXd w = Eigen::VectorXd::Zero(rows.n_features() + 1);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  std::vector<double> qd(n);
  for (std::size_t i = 0; i < n; ++i) qd[i] = rows.squared_norm(i);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(cfg.seed);
  const double C = cfg.C;

  if (trace) *trace = TrainTrace{};
  int epoch = 0;
  bool converged = false;
  while (epoch < cfg.max_epochs) {
    ++epoch;
    shuffle(order, rng);
    double max_violation = 0;
    for (std::size_t i : order) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double yi = y[i];
      const double G = yi * rows.dot(i, w) - 1.0;
      double pg = G;
      if (alpha[ii] == 0)
        pg = std::min(G, 0.0);
      else if (alpha[ii] == C)
        pg = std::max(G, 0.0);
      max_violation = std::max(max_violation, std::abs(pg));
      if (std::abs(pg) <= 1e-12) continue;

      const double old = alpha[ii];
      if (qd[i] > 0)
        alpha[ii] = std::clamp(old - G / qd[i], 0.0, C);
      else
        alpha[ii] = G < 0 ? C : 0.0;
      const double step = (alpha[ii] - old) * yi;
      if (step != 0) rows.axpy(i, step, w);
    }
    if (trace) {
      trace->dual_objective.push_back(alpha.sum() - 0.5 * w.squaredNorm());
      trace->max_violation.push_back(max_violation);
      if ((alpha.array() < 0).any() || (alpha.array() > C).any()) trace->alpha_always_feasible = false;
    }
    if (max_violation < cfg.tol) {
      converged = true;
      break;
    }
  }
  if (!w.allFinite()) throw NumericError("train_binary: solver diverged");
  if (trace) {
    trace->alpha = alpha;
    trace->epochs = epoch;
    trace->converged = converged;
  }
  return w;
}

template <typename Rows>
double primal(const Rows& rows, std::span<const int> y, const Eigen::VectorXd& w,
              const TrainConfig& cfg) {
  if (y.size() != rows.size()) throw UsageError("primal_objective: label count mismatch");
  if (w.size() != rows.n_features() + 1) throw UsageError("primal_objective: weight width mismatch");
  double loss = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    loss += std::max(0.0, 1.0 - y[i] * rows.dot(i, w));
  return 0.5 * w.squaredNorm() + cfg.C * loss;
}

template <typename Scalar, typename Rows>
Eigen::VectorXd scores_for(const LinearModel<Scalar>& model, const Rows& rows) {
  if (rows.n_features() != model.n_features())
    throw DataError("feature width " + std::to_string(rows.n_features()) +
                    " does not match model width " + std::to_string(model.n_features()));
  Eigen::VectorXd scores(static_cast<Eigen::Index>(model.classes.size()));
  for (Eigen::Index k = 0; k < scores.size(); ++k) {
    if (!model.active[static_cast<std::size_t>(k)]) {
      scores[k] = -std::numeric_limits<double>::infinity();
      continue;
    }
    const Eigen::VectorXd w = model.weights.row(k).transpose().template cast<double>();
    scores[k] = rows.dot(0, w);
  }
  return scores;
}

}  // namespace

Eigen::VectorXd train_binary(std::span<const FeatureVector> X, std::span<const int> y,
                             const TrainConfig& cfg, TrainTrace* trace) {
  return solve_dual(FeatureRows(X, cfg.bias_scale), y, cfg, trace);
}

Eigen::VectorXd train_binary(const RowMatrix<double>& X, std::span<const int> y,
                             const TrainConfig& cfg, TrainTrace* trace) {
  return solve_dual(DenseRows(X, cfg.bias_scale), y, cfg, trace);
}

double primal_objective(std::span<const FeatureVector> X, std::span<const int> y,
                        const Eigen::VectorXd& w, const TrainConfig& cfg) {
  return primal(FeatureRows(X, cfg.bias_scale), y, w, cfg);
}

double primal_objective(const RowMatrix<double>& X, std::span<const int> y,
                        const Eigen::VectorXd& w, const TrainConfig& cfg) {
  return primal(DenseRows(X, cfg.bias_scale), y, w, cfg);
}

LinearModel<double> train_ovr(std::span<const FeatureVector> X,
                              std::span<const CanonicalLabel> labels, const TrainConfig& cfg) {
  cfg.validate();
  if (X.empty()) throw UsageError("train_ovr: no training documents");
  if (X.size() != labels.size()) throw UsageError("train_ovr: label count does not match documents");
  const FeatureRows rows(X, cfg.bias_scale);  // validates widths and finiteness up front

  LinearModel<double> model;
  model.classes.assign(kAllLabels.begin(), kAllLabels.end());
  model.active.assign(kNumLabels, false);
  model.weights = RowMatrix<double>::Zero(static_cast<Eigen::Index>(kNumLabels), rows.n_features() + 1);
  model.bias_scale = cfg.bias_scale;
  for (CanonicalLabel label : labels) model.active[index_of(label)] = true;

  std::vector<std::future<Eigen::VectorXd>> jobs(kNumLabels);
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    if (!model.active[k]) continue;
    jobs[k] = std::async(std::launch::async, [&, k] {
      std::vector<int> y(labels.size());
      for (std::size_t i = 0; i < labels.size(); ++i) y[i] = index_of(labels[i]) == k ? 1 : -1;
      return train_binary(X, y, cfg);
    });
  }
  for (std::size_t k = 0; k < kNumLabels; ++k)
    if (model.active[k]) model.weights.row(static_cast<Eigen::Index>(k)) = jobs[k].get().transpose();
  return model;
}

template <typename Scalar>
Eigen::VectorXd decision_scores(const LinearModel<Scalar>& model, const FeatureVector& x) {
  return scores_for(model, FeatureRows(std::span<const FeatureVector>(&x, 1), model.bias_scale));
}

template <typename Scalar>
Eigen::VectorXd decision_scores(const LinearModel<Scalar>& model, const Eigen::VectorXd& x) {
  const RowMatrix<double> row = x.transpose();
  return scores_for(model, DenseRows(row, model.bias_scale));
}

template Eigen::VectorXd decision_scores(const LinearModel<double>&, const FeatureVector&);
template Eigen::VectorXd decision_scores(const LinearModel<float>&, const FeatureVector&);
template Eigen::VectorXd decision_scores(const LinearModel<double>&, const Eigen::VectorXd&);
template Eigen::VectorXd decision_scores(const LinearModel<float>&, const Eigen::VectorXd&);

Eigen::Index argmax_first(const Eigen::VectorXd& scores) {
  if (scores.size() == 0) throw UsageError("argmax over an empty score vector");
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < scores.size(); ++k)
    if (scores[k] > scores[best]) best = k;
  return best;
}

}  // namespace allin1
