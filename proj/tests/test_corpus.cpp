#include <doctest.h>

#include <random>
#include <sstream>

#include "allin1/corpus.hpp"

using namespace allin1;

namespace {

using Tokens = std::vector<std::string>;

std::string join(const Tokens& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) out += (i ? " " : "") + tokens[i];
  return out;
}

}  // namespace

TEST_CASE("normalize_label keeps the first label and folds typos into meaningless") {
  CHECK(normalize_label({"comment", "complaint"}) == CanonicalLabel::comment);
  CHECK(normalize_label({"undefined"}) == CanonicalLabel::meaningless);
  CHECK(normalize_label({"bug"}) == CanonicalLabel::bug);
  for (const char* typo : {"undetermined", "nonsense", "noneless", "UNDEFINED", "Nonsense"})
    CHECK(normalize_label({typo}) == CanonicalLabel::meaningless);
  CHECK(normalize_label({"Request"}) == CanonicalLabel::request);
  CHECK(normalize_label({"COMPLAINT", "bug"}) == CanonicalLabel::complaint);
}

TEST_CASE("normalize_label rejects unknown labels and names the value") {
  try {
    normalize_label({"praise", "bug"});
    FAIL("expected LabelError");
  } catch (const LabelError& e) {
    CHECK(e.value() == "praise");
    CHECK(std::string(e.what()).find("praise") != std::string::npos);
  }
  CHECK_THROWS_AS(normalize_label({}), LabelError);
}

TEST_CASE("normalize_label is idempotent") {
  for (const char* raw : {"bug", "comment", "complaint", "meaningless", "request", "undefined",
                          "nonsense", "noneless", "undetermined", "Bug"}) {
    const CanonicalLabel once = normalize_label({raw});
    CHECK(normalize_label({std::string(to_string(once))}) == once);
  }
}

TEST_CASE("parse_dataset reads labeled and unlabeled lines in order") {
  std::istringstream in(
      "7\tStill calls keep dropping with the new update\tbug\n"
      "\n"
      "8\tRoom was grubby, mold on windows frames.\tcomplaint,comment\n"
      "9\tEnjoy the sunshine!!\n");
  const DatasetSplit split = parse_dataset(in, Language::en, SplitName::dev);
  CHECK(split.name == SplitName::dev);
  REQUIRE(split.docs.size() == 3);
  CHECK(split.docs[0].id == "7");
  CHECK(split.docs[0].label == CanonicalLabel::bug);
  CHECK(split.docs[0].tokens ==
        Tokens{"Still", "calls", "keep", "dropping", "with", "the", "new", "update"});
  CHECK(split.docs[1].label == CanonicalLabel::complaint);
  CHECK_FALSE(split.docs[2].label.has_value());
  CHECK(split.docs[2].tokens == Tokens{"Enjoy", "the", "sunshine", "!!"});
  for (const auto& d : split.docs) CHECK(d.language == Language::en);
}

TEST_CASE("parse_dataset on an empty file yields no documents") {
  std::istringstream in("");
  CHECK(parse_dataset(in, Language::fr).docs.empty());
}

TEST_CASE("parse_dataset reports the line of a malformed record") {
  std::istringstream in("1\tfine\tbug\n2\tno\ttoo\tmany\tfields\n");
  try {
    parse_dataset(in, Language::en);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream single("just-one-field\n");
  CHECK_THROWS_AS(parse_dataset(single, Language::en), ParseError);
}

TEST_CASE("parse_dataset reports unknown labels") {
  std::istringstream in("1\ttext\tpraise\n");
  CHECK_THROWS_AS(parse_dataset(in, Language::en), LabelError);
}

TEST_CASE("parse_dataset is deterministic") {
  const std::string bytes = "a\tThe new update is amazing.\tcomment\nb\tNeeds more control s and tricks..\trequest\r\n";
  std::istringstream first(bytes), second(bytes);
  CHECK(parse_dataset(first, Language::en) == parse_dataset(second, Language::en));
}

TEST_CASE("tokenize splits off punctuation for western languages") {
  CHECK(tokenize("The new update is amazing.", Language::en) ==
        Tokens{"The", "new", "update", "is", "amazing", "."});
  CHECK(tokenize("", Language::en).empty());
  CHECK(tokenize("   \t ", Language::es).empty());
  CHECK(tokenize("Needs more control s and tricks..", Language::en) ==
        Tokens{"Needs", "more", "control", "s", "and", "tricks", ".."});
  CHECK(tokenize("Room was grubby, mold on windows frames.", Language::en) ==
        Tokens{"Room", "was", "grubby", ",", "mold", "on", "windows", "frames", "."});
}

TEST_CASE("tokenize keeps contractions, numbers, handles, emoticons and URLs whole") {
  CHECK(tokenize("don't stop", Language::en) == Tokens{"don't", "stop"});
  CHECK(tokenize("l'hôtel était sale", Language::fr) == Tokens{"l'hôtel", "était", "sale"});
  CHECK(tokenize("costs 3.50 or 1,000", Language::en) == Tokens{"costs", "3.50", "or", "1,000"});
  CHECK(tokenize("thanks @support #fail", Language::en) == Tokens{"thanks", "@support", "#fail"});
  CHECK(tokenize("great :) <3", Language::en) == Tokens{"great", ":)", "<3"});
  CHECK(tokenize("see (http://example.com/a?b=1).", Language::en) ==
        Tokens{"see", "(", "http://example.com/a?b=1", ")."});
  CHECK(tokenize("¡Hola! ¿Qué tal?", Language::es) == Tokens{"¡", "Hola", "!", "¿", "Qué", "tal", "?"});
  CHECK(tokenize("wow!!!great", Language::en) == Tokens{"wow", "!!!", "great"});
}

TEST_CASE("tokenize passes pre-segmented Japanese through") {
  CHECK(tokenize("良い ホテル", Language::jp) == Tokens{"良い", "ホテル"});
  CHECK(tokenize("  良い   ホテル ", Language::jp) == Tokens{"良い", "ホテル"});
}

TEST_CASE("tokenize segments unspaced Japanese at script transitions") {
  CHECK(tokenize("良いホテル", Language::jp) == Tokens{"良", "い", "ホテル"});
  CHECK(tokenize("アプリが落ちる。", Language::jp) == Tokens{"アプリ", "が", "落", "ちる", "。"});
  CHECK(tokenize("iPhone7の画面", Language::jp) == Tokens{"iPhone", "7", "の", "画面"});
  CHECK(tokenize("", Language::jp).empty());
}

TEST_CASE("tokenize never returns empty tokens") {
  std::mt19937 rng(11);
  const std::vector<std::string> pieces = {"a", "B", "7", ".", ",", "!", "?", " ", "  ", "'", "-",
                                           ":)", "@", "#", "http://x.y", "é", "ñ", "—", "…", "😀",
                                           "(", ")", "\t", "www.", "日本", "カナ", "ひら", "。"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    for (int k = 0; k < 12; ++k) text += pieces[pick(rng)];
    for (Language lang : kAllLanguages)
      for (const auto& t : tokenize(text, lang)) CHECK_FALSE(t.empty());
  }
}

TEST_CASE("western tokenization is stable under re-tokenizing its joined output") {
  std::mt19937 rng(5);
  const std::vector<std::string> pieces = {"a", "Bc", "7", ".", ",", "!", "?", " ", "'", "-", ":)",
                                           ":", ")", "(", "@", "#", "http://x.y", "www.", "é", "—",
                                           "…", "😀", "<3", "3", "_", "^", "’", "\"", "https://a/b)"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    for (int k = 0; k < 10; ++k) text += pieces[pick(rng)];
    for (Language lang : {Language::en, Language::es, Language::fr}) {
      const Tokens once = tokenize(text, lang);
      INFO("text: " << text);
      CHECK(tokenize(join(once), lang) == once);
    }
  }
}
