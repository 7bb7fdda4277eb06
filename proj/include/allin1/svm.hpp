#pragma once

// L2-regularized hinge-loss linear SVM trained by dual coordinate descent,
// and its one-vs-rest multiclass wrapper.
//
// The binary solver minimizes
//   f(w) = 1/2 ||w||^2 + C * sum_i max(0, 1 - y_i w . xhat_i)
// where xhat_i is x_i with a constant bias feature (bias_scale) appended, by
// maximizing the dual
//   D(a) = sum_i a_i - 1/2 ||sum_i a_i y_i xhat_i||^2,   0 <= a_i <= C
// one coordinate at a time in a seeded random order per epoch.

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "allin1/corpus.hpp"
#include "allin1/embeddings.hpp"
#include "allin1/features.hpp"

namespace allin1 {

struct TrainConfig {
  double C = 10.0;
  double tol = 1e-4;
  int max_epochs = 1000;
  std::uint64_t seed = 0;
  double bias_scale = 1.0;

  void validate() const;
};

// Per-epoch record of a binary solve.
struct TrainTrace {
  std::vector<double> dual_objective;
  std::vector<double> max_violation;
  bool alpha_always_feasible = true;
  Eigen::VectorXd alpha;
  int epochs = 0;
  bool converged = false;
};

// Returns w of length n_features + 1; the last entry weights the bias feature.
// Labels are +1 / -1. Throws NumericError on non-finite features.
Eigen::VectorXd train_binary(std::span<const FeatureVector> X, std::span<const int> y,
                             const TrainConfig& cfg, TrainTrace* trace = nullptr);
// Same solver over dense rows (one sample per row).
Eigen::VectorXd train_binary(const RowMatrix<double>& X, std::span<const int> y,
                             const TrainConfig& cfg, TrainTrace* trace = nullptr);

double primal_objective(std::span<const FeatureVector> X, std::span<const int> y,
                        const Eigen::VectorXd& w, const TrainConfig& cfg);
double primal_objective(const RowMatrix<double>& X, std::span<const int> y,
                        const Eigen::VectorXd& w, const TrainConfig& cfg);

// One row of weights per class in `classes` (lexicographic). Rows of classes
// that had no training data are inactive and never win the argmax.
template <typename Scalar>
struct LinearModel {
  std::vector<CanonicalLabel> classes;
  std::vector<bool> active;
  RowMatrix<Scalar> weights;  // |classes| x (n_features + 1)
  double bias_scale = 1.0;

  Eigen::Index n_features() const { return weights.cols() - 1; }

  template <typename Other>
  LinearModel<Other> cast() const {
    return {classes, active, weights.template cast<Other>(), bias_scale};
  }
  bool operator==(const LinearModel& o) const {
    return classes == o.classes && active == o.active && bias_scale == o.bias_scale &&
           weights.rows() == o.weights.rows() && weights.cols() == o.weights.cols() &&
           weights == o.weights;
  }
};

// One binary problem per class present in `labels`, trained in parallel.
LinearModel<double> train_ovr(std::span<const FeatureVector> X,
                              std::span<const CanonicalLabel> labels, const TrainConfig& cfg);

template <typename Scalar>
Eigen::VectorXd decision_scores(const LinearModel<Scalar>& model, const FeatureVector& x);
template <typename Scalar>
Eigen::VectorXd decision_scores(const LinearModel<Scalar>& model, const Eigen::VectorXd& x);

// Index of the maximal score; ties go to the lowest index (classes are
// sorted, so the lexicographically first name). -inf entries never win
// unless every entry is -inf.
Eigen::Index argmax_first(const Eigen::VectorXd& scores);

template <typename Scalar>
CanonicalLabel predict(const LinearModel<Scalar>& model, const FeatureVector& x) {
  return model.classes[static_cast<std::size_t>(argmax_first(decision_scores(model, x)))];
}

extern template Eigen::VectorXd decision_scores(const LinearModel<double>&, const FeatureVector&);
extern template Eigen::VectorXd decision_scores(const LinearModel<float>&, const FeatureVector&);
extern template Eigen::VectorXd decision_scores(const LinearModel<double>&, const Eigen::VectorXd&);
extern template Eigen::VectorXd decision_scores(const LinearModel<float>&, const Eigen::VectorXd&);

}  // namespace allin1
