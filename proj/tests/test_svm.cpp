#include <doctest.h>

#include <random>

#include "allin1/svm.hpp"
#include "oracles.hpp"

using namespace allin1;

namespace {

FeatureVector dense_only(const Eigen::VectorXd& v) {
  return {SparseBlock(0), v};
}

std::vector<FeatureVector> rows_of(const Eigen::MatrixXd& X) {
  std::vector<FeatureVector> out;
  for (Eigen::Index i = 0; i < X.rows(); ++i) out.push_back(dense_only(X.row(i).transpose()));
  return out;
}

}  // namespace

TEST_CASE("two points on a line give the analytic max-margin solution") {
  RowMatrix<double> X(2, 1);
  X << -1, 1;
  const std::vector<int> y = {-1, 1};
  TrainConfig cfg;
  TrainTrace trace;
  const Eigen::VectorXd w = train_binary(X, y, cfg, &trace);
  CHECK(std::abs(w(0) - 1) < 1e-6);
  CHECK(std::abs(w(1)) < 1e-6);
  CHECK(primal_objective(X, y, w, cfg) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(trace.converged);
}

TEST_CASE("a single-class problem scores every training point positive") {
  std::mt19937_64 rng(1);
  const RowMatrix<double> X = oracle::gaussian(15, 4, rng);
  const std::vector<int> y(15, 1);
  const Eigen::VectorXd w = train_binary(X, y, TrainConfig{});
  for (Eigen::Index i = 0; i < X.rows(); ++i) CHECK(X.row(i).dot(w.head(4)) + w(4) > 0);
}

TEST_CASE("dual coordinate descent matches the FISTA oracle on random problems") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> npts(5, 30), ndim(1, 10);
  const double Cs[] = {0.1, 1.0, 10.0};
  for (int trial = 0; trial < 25; ++trial) {
    const int n = npts(rng), d = ndim(rng);
    const Eigen::MatrixXd X = oracle::gaussian(n, d, rng);
    std::vector<int> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = (X(i, 0) + 0.5 * oracle::gaussian(1, 1, rng)(0)) > 0 ? 1 : -1;
    TrainConfig cfg;
    cfg.C = Cs[trial % 3];
    cfg.seed = static_cast<std::uint64_t>(trial);
    cfg.tol = 1e-8;  // 1e-4 on the projected gradient leaves ~1e-3 on the primal at C=10
    TrainTrace trace;
    const RowMatrix<double> Xr = X;
    const Eigen::VectorXd w = train_binary(Xr, y, cfg, &trace);
    const auto ref = oracle::svm_dual_fista(X, y, cfg.C, cfg.bias_scale);
    const double p = primal_objective(Xr, y, w, cfg);
    INFO("trial " << trial << " n=" << n << " d=" << d << " C=" << cfg.C);
    CHECK(p <= ref.best_primal * (1 + 1e-4));
    CHECK(p >= ref.best_dual * (1 - 1e-12));
    CHECK(trace.alpha_always_feasible);
    for (std::size_t e = 1; e < trace.dual_objective.size(); ++e)
      CHECK(trace.dual_objective[e] >= trace.dual_objective[e - 1] - 1e-12 * std::abs(trace.dual_objective[e - 1]));
    const double dual = trace.dual_objective.back();
    CHECK((p - dual) / std::max(1.0, std::abs(p)) < 1e-2);
  }
}

TEST_CASE("sparse and densified inputs train to identical weights") {
  std::mt19937_64 rng(3);
  std::vector<FeatureVector> rows;
  RowMatrix<double> dense(25, 12);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 25; ++i) {
    SparseBlock s(9);
    for (int k = 0; k < 9; ++k)
      if (u(rng) < 0.3) s.insertBack(k) = u(rng) + 0.1;
    Eigen::VectorXd d(3);
    d << u(rng), 0.0, u(rng);
    rows.push_back({s, d});
    dense.row(i) = rows.back().densify().transpose();
  }
  std::vector<int> y(25);
  for (int i = 0; i < 25; ++i) y[static_cast<std::size_t>(i)] = dense(i, 9) > 0.5 ? 1 : -1;
  const TrainConfig cfg;
  const Eigen::VectorXd a = train_binary(rows, y, cfg);
  const Eigen::VectorXd b = train_binary(dense, y, cfg);
  CHECK(a == b);
}

TEST_CASE("train_binary validates its input") {
  RowMatrix<double> X(2, 1);
  X << 1, std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(train_binary(X, std::vector<int>{1, -1}, TrainConfig{}), NumericError);
  X << 1, 2;
  CHECK_THROWS_AS(train_binary(X, std::vector<int>{1}, TrainConfig{}), UsageError);
  CHECK_THROWS_AS(train_binary(X, std::vector<int>{1, 0}, TrainConfig{}), UsageError);
  TrainConfig bad;
  bad.C = 0;
  CHECK_THROWS_AS(train_binary(X, std::vector<int>{1, -1}, bad), UsageError);
}

TEST_CASE("one-vs-rest separates well-separated blobs") {
  std::mt19937_64 rng(4);
  std::vector<FeatureVector> X;
  std::vector<CanonicalLabel> labels;
  const Eigen::Vector2d centers[] = {{0, 6}, {6, -4}, {-6, -4}};
  const CanonicalLabel classes[] = {CanonicalLabel::bug, CanonicalLabel::comment, CanonicalLabel::request};
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 30; ++i) {
      X.push_back(dense_only(centers[c] + 0.7 * Eigen::Vector2d(oracle::gaussian(2, 1, rng))));
      labels.push_back(classes[c]);
    }
  const auto model = train_ovr(X, labels, TrainConfig{});
  CHECK(model.classes == std::vector<CanonicalLabel>(kAllLabels.begin(), kAllLabels.end()));
  CHECK(model.active == std::vector<bool>{true, true, false, false, true});
  int correct = 0;
  for (std::size_t i = 0; i < X.size(); ++i) correct += predict(model, X[i]) == labels[i];
  CHECK(correct == 90);

  const auto again = train_ovr(X, labels, TrainConfig{});
  CHECK(again == model);
}

TEST_CASE("a single training class is predicted everywhere") {
  std::mt19937_64 rng(5);
  const auto X = rows_of(oracle::gaussian(10, 3, rng));
  const std::vector<CanonicalLabel> labels(10, CanonicalLabel::meaningless);
  const auto model = train_ovr(X, labels, TrainConfig{});
  for (int k = 0; k < 20; ++k)
    CHECK(predict(model, dense_only(10 * oracle::gaussian(3, 1, rng))) == CanonicalLabel::meaningless);
}

TEST_CASE("decision scores are plain dot products with the bias") {
  LinearModel<double> zero{{kAllLabels.begin(), kAllLabels.end()}, std::vector<bool>(5, true),
                           RowMatrix<double>::Zero(5, 4), 1.0};
  CHECK(decision_scores(zero, Eigen::VectorXd(Eigen::Vector3d(1, 2, 3))) == Eigen::VectorXd::Zero(5));

  std::mt19937_64 rng(6);
  LinearModel<double> m{{kAllLabels.begin(), kAllLabels.end()}, std::vector<bool>(5, true),
                        oracle::gaussian(5, 4, rng), 2.0};
  const Eigen::VectorXd onehot = Eigen::Vector3d(0, 1, 0);
  const Eigen::VectorXd s = decision_scores(m, onehot);
  for (int k = 0; k < 5; ++k) CHECK(s(k) == m.weights(k, 1) + 2.0 * m.weights(k, 3));

  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd x = oracle::gaussian(3, 1, rng);
    const Eigen::VectorXd got = decision_scores(m, x);
    for (int k = 0; k < 5; ++k) {
      double expect = 0;
      for (int j = 0; j < 3; ++j) expect += m.weights(k, j) * x(j);
      expect += m.bias_scale * m.weights(k, 3);
      CHECK(std::abs(got(k) - expect) < 1e-12);
    }
  }
  CHECK_THROWS_AS(decision_scores(m, Eigen::VectorXd(Eigen::Vector2d(1, 1))), DataError);
}

TEST_CASE("argmax breaks ties towards the lexicographically first class") {
  Eigen::VectorXd s(5);
  s << 0.1, 0.2, 0.2, -1, -1;  // bug, comment, complaint, meaningless, request
  CHECK(argmax_first(s) == 1);
  s << 0.1, 0.2, 0.3, -1, -1;
  CHECK(argmax_first(s) == 2);

  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> level(0, 3);
  for (int trial = 0; trial < 1000; ++trial) {
    for (int k = 0; k < 5; ++k) s(k) = level(rng);
    Eigen::Index best = 0;
    for (Eigen::Index k = 0; k < 5; ++k)
      if (s(k) > s(best)) best = k;
    CHECK(argmax_first(s) == best);
  }
}

TEST_CASE("predictions are invariant to positive rescaling of the weights") {
  std::mt19937_64 rng(8);
  LinearModel<double> m{{kAllLabels.begin(), kAllLabels.end()}, std::vector<bool>(5, true),
                        oracle::gaussian(5, 6, rng), 1.0};
  LinearModel<double> scaled = m;
  scaled.weights *= 3.5;
  for (int trial = 0; trial < 200; ++trial) {
    const FeatureVector x = dense_only(oracle::gaussian(5, 1, rng));
    CHECK(predict(m, x) == predict(scaled, x));
  }
}

TEST_CASE("inactive classes never win") {
  LinearModel<float> m{{kAllLabels.begin(), kAllLabels.end()}, {false, true, false, false, false},
                       RowMatrix<float>::Zero(5, 2), 1.0};
  m.weights(0, 1) = 100.0f;
  CHECK(predict(m, dense_only(Eigen::VectorXd::Ones(1))) == CanonicalLabel::comment);
}
