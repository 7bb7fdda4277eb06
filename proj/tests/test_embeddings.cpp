#include <doctest.h>

#include <random>
#include <sstream>

#include "allin1/embeddings.hpp"
#include "oracles.hpp"

using namespace allin1;

namespace {

EmbeddingTable<double> table_of(Language lang, std::vector<std::string> vocab,
                                const Eigen::MatrixXd& m) {
  return EmbeddingTable<double>(lang, std::move(vocab), m);
}

double max_orthogonality_defect(const Eigen::MatrixXd& W) {
  return (W.transpose() * W - Eigen::MatrixXd::Identity(W.cols(), W.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("load_embeddings reads headerless and headered text tables") {
  std::istringstream plain("hotel 1 2 3\nthe 4 5 6\n");
  const auto loaded = load_embeddings(plain, Language::en);
  CHECK(loaded.table.size() == 2);
  CHECK(loaded.table.dim() == 3);
  CHECK(loaded.table.row(1)(2) == 6.0);
  CHECK(loaded.duplicates_skipped == 0);

  std::istringstream headered("2 3\nhotel 1 2 3\nthe 4 5 6\n");
  CHECK(load_embeddings(headered, Language::en).table == loaded.table);
}

TEST_CASE("load_embeddings keeps the first of duplicate words and counts the rest") {
  std::istringstream in("a 1 0\nb 0 1\na 9 9\n");
  const auto loaded = load_embeddings(in, Language::es);
  CHECK(loaded.table.size() == 2);
  CHECK(loaded.duplicates_skipped == 1);
  CHECK(loaded.table.row(*loaded.table.find("a"))(0) == 1.0);
}

TEST_CASE("load_embeddings rejects dimension mismatches and empty vocabularies") {
  std::string header = "2 64\nw0";
  for (int i = 0; i < 63; ++i) header += " 0.5";
  std::istringstream short_row(header + "\n");
  try {
    load_embeddings(short_row, Language::en);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream ragged("a 1 2\nb 1\n");
  CHECK_THROWS_AS(load_embeddings(ragged, Language::en), ParseError);
  std::istringstream empty("");
  CHECK_THROWS_AS(load_embeddings(empty, Language::en), DataError);
  std::istringstream header_only("0 64\n");
  CHECK_THROWS_AS(load_embeddings(header_only, Language::en), DataError);
  std::istringstream bad_number("a 1 x\n");
  CHECK_THROWS_AS(load_embeddings(bad_number, Language::en), ParseError);
}

TEST_CASE("normalize_rows scales rows to unit length and leaves zero rows alone") {
  Eigen::MatrixXd m(3, 2);
  m << 3, 4, 0, 0, -1, 0;
  const auto n = normalize_rows(m);
  CHECK(n(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(n(0, 1) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(n(1, 0) == 0.0);
  CHECK(n(1, 1) == 0.0);
  CHECK(n(2, 0) == -1.0);

  std::mt19937_64 rng(3);
  const Eigen::MatrixXd r = oracle::gaussian(50, 8, rng);
  const auto once = normalize_rows(r);
  for (Eigen::Index i = 0; i < once.rows(); ++i) CHECK(std::abs(once.row(i).norm() - 1) < 1e-9);
  CHECK((normalize_rows(once) - once).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("build_pseudo_dictionary pairs byte-identical words") {
  const auto src = table_of(Language::es, {"hotel", "el"}, Eigen::MatrixXd::Ones(2, 1));
  const auto tgt = table_of(Language::en, {"the", "hotel"}, Eigen::MatrixXd::Ones(2, 1));
  const auto dict = build_pseudo_dictionary(src, tgt);
  REQUIRE(dict.pairs.size() == 1);
  CHECK(dict.pairs[0] == std::pair<Eigen::Index, Eigen::Index>{0, 1});

  const auto disjoint = table_of(Language::fr, {"hôtel", "le"}, Eigen::MatrixXd::Ones(2, 1));
  CHECK_THROWS_AS(build_pseudo_dictionary(disjoint, tgt), InsufficientDictionaryError);

  const auto capital = table_of(Language::fr, {"Hotel"}, Eigen::MatrixXd::Ones(1, 1));
  CHECK_THROWS_AS(build_pseudo_dictionary(capital, tgt), InsufficientDictionaryError);
}

TEST_CASE("build_pseudo_dictionary needs at least dim pairs and honours the cap") {
  std::vector<std::string> words;
  for (int i = 0; i < 6; ++i) words.push_back("w" + std::to_string(i));
  const auto a = table_of(Language::es, words, Eigen::MatrixXd::Random(6, 3));
  const auto b = table_of(Language::en, {words.rbegin(), words.rend()}, Eigen::MatrixXd::Random(6, 3));
  const auto dict = build_pseudo_dictionary(a, b);
  CHECK(dict.pairs.size() == 6);
  for (auto [s, t] : dict.pairs) CHECK(a.vocab()[s] == b.vocab()[t]);
  CHECK(build_pseudo_dictionary(a, b, 4).pairs.size() == 4);
  CHECK(build_pseudo_dictionary(a, b, 4).pairs.back().first == 3);
  CHECK_THROWS_AS(build_pseudo_dictionary(a, b, 2), InsufficientDictionaryError);
}

TEST_CASE("fit_orthogonal_map returns the identity for identical spaces") {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd X = oracle::gaussian(40, 8, rng);
  const Eigen::MatrixXd W = fit_orthogonal_map(X, X);
  CHECK((W - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("fit_orthogonal_map recovers a planted rotation") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd R = oracle::random_orthogonal(16, rng);
    const Eigen::MatrixXd X = oracle::gaussian(200, 16, rng);
    const Eigen::MatrixXd W = fit_orthogonal_map(X, X * R);
    CHECK((W - R).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(max_orthogonality_defect(W) < 1e-8);
  }
}

TEST_CASE("fit_orthogonal_map matches the polar-decomposition oracle and is optimal") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd X = oracle::gaussian(50, 10, rng);
    const Eigen::MatrixXd Y = oracle::gaussian(50, 10, rng);
    const Eigen::MatrixXd W = fit_orthogonal_map(X, Y);
    CHECK((W - oracle::procrustes_polar(X, Y)).cwiseAbs().maxCoeff() < 1e-8);
    const double err = (X * W - Y).norm();
    for (int k = 0; k < 200; ++k) CHECK(err <= (X * oracle::random_orthogonal(10, rng) - Y).norm());
  }
}

TEST_CASE("fitted maps preserve norms") {
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd W = fit_orthogonal_map(oracle::gaussian(30, 6, rng), oracle::gaussian(30, 6, rng));
  for (int k = 0; k < 50; ++k) {
    const Eigen::RowVectorXd x = oracle::gaussian(1, 6, rng);
    CHECK(std::abs((x * W).norm() - x.norm()) < 1e-9);
  }
}

TEST_CASE("fit_orthogonal_map reports bad input") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(5, 3);
  Eigen::MatrixXd Y = Eigen::MatrixXd::Ones(5, 3);
  CHECK_THROWS_AS(fit_orthogonal_map(X, Y), InsufficientDictionaryError);  // rank one
  X(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(fit_orthogonal_map(X, Y), NumericError);
  CHECK_THROWS_AS(fit_orthogonal_map(Eigen::MatrixXd::Ones(2, 3), Eigen::MatrixXd::Ones(2, 3)),
                  InsufficientDictionaryError);
}

TEST_CASE("fit_orthogonal_map works in single precision") {
  std::mt19937_64 rng(6);
  const Eigen::MatrixXd R = oracle::random_orthogonal(8, rng);
  const Eigen::MatrixXf X = oracle::gaussian(64, 8, rng).cast<float>();
  const Eigen::MatrixXf W = fit_orthogonal_map(X, Eigen::MatrixXf(X * R.cast<float>()));
  CHECK((W - R.cast<float>()).cwiseAbs().maxCoeff() < 1e-4f);
}

TEST_CASE("align_all leaves a lone pivot untouched") {
  std::mt19937_64 rng(8);
  std::vector<std::string> words = {"a", "b", "c", "d"};
  const auto en = table_of(Language::en, words, oracle::gaussian(4, 3, rng));
  const auto result = align_all<double>({{Language::en, en}}, Language::en);
  CHECK(result.tables.at(Language::en) == en);
  CHECK(result.maps.at(Language::en).W == Eigen::MatrixXd::Identity(3, 3));
  CHECK_THROWS_AS(align_all<double>({{Language::es, en}}, Language::en), UsageError);
}

TEST_CASE("align_all undoes per-language rotations through the pivot") {
  std::mt19937_64 rng(10);
  std::vector<std::string> words;
  for (int i = 0; i < 120; ++i) words.push_back("tok" + std::to_string(i));
  const RowMatrix<double> base = normalize_rows(oracle::gaussian(120, 12, rng));
  std::map<Language, EmbeddingTable<double>> tables;
  tables.emplace(Language::en, EmbeddingTable<double>(Language::en, words, base));
  for (Language lang : {Language::es, Language::fr, Language::jp})
    tables.emplace(lang, EmbeddingTable<double>(lang, words, base * oracle::random_orthogonal(12, rng)));

  const auto result = align_all(tables, Language::en);
  CHECK((result.tables.at(Language::es).matrix() - base).cwiseAbs().maxCoeff() < 1e-8);
  for (Language a : kAllLanguages) {
    CHECK(max_orthogonality_defect(result.maps.at(a).W) < 1e-8);
    CHECK(result.mean_dictionary_cosine.at(a) > 0.999);
    for (Language b : kAllLanguages) {
      for (Eigen::Index i = 0; i < 120; i += 7) {
        const auto u = result.tables.at(a).row(i);
        const auto v = result.tables.at(b).row(i);
        CHECK(u.dot(v) / (u.norm() * v.norm()) > 0.999);
      }
    }
  }
}

TEST_CASE("align_all names the language whose dictionary is too small") {
  const auto en = table_of(Language::en, {"a", "b", "c"}, Eigen::MatrixXd::Identity(3, 3));
  const auto fr = table_of(Language::fr, {"a", "x", "y"}, Eigen::MatrixXd::Identity(3, 3));
  try {
    align_all<double>({{Language::en, en}, {Language::fr, fr}}, Language::en);
    FAIL("expected InsufficientDictionaryError");
  } catch (const InsufficientDictionaryError& e) {
    CHECK(std::string(e.what()).find("fr") != std::string::npos);
  }
}

TEST_CASE("embed_document averages in-vocabulary rows") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 0, 0, 1;
  const auto table = table_of(Language::en, {"x", "y"}, m);
  const std::vector<std::string> both = {"x", "zz", "y"};
  const auto e = embed_document(std::span<const std::string>(both), table);
  CHECK(e.vector == Eigen::Vector2d(0.5, 0.5));
  CHECK(e.oov_count == 1);

  const std::vector<std::string> one = {"y"};
  CHECK(embed_document(std::span<const std::string>(one), table).vector == Eigen::Vector2d(0, 1));

  const std::vector<std::string> none = {"p", "q", "r"};
  const auto z = embed_document(std::span<const std::string>(none), table);
  CHECK(z.vector == Eigen::Vector2d::Zero());
  CHECK(z.oov_count == 3);
}

TEST_CASE("embed_document is invariant to token order") {
  std::mt19937_64 rng(12);
  std::vector<std::string> words;
  for (int i = 0; i < 30; ++i) words.push_back("w" + std::to_string(i));
  const auto table = table_of(Language::en, words, oracle::gaussian(30, 5, rng));
  std::uniform_int_distribution<int> pick(0, 35);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> tokens;
    for (int k = 0; k < 12; ++k) tokens.push_back("w" + std::to_string(pick(rng)));
    auto shuffled = tokens;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto a = embed_document(std::span<const std::string>(tokens), table);
    const auto b = embed_document(std::span<const std::string>(shuffled), table);
    CHECK(a.vector == b.vector);
    CHECK(a.oov_count == b.oov_count);
  }
}
