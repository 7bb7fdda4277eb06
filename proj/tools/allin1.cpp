// allin1: align embeddings, train, predict, evaluate, run the experiment
// matrix, inspect bundles.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "allin1/bundle.hpp"
#include "allin1/eval.hpp"
#include "allin1/pipeline.hpp"

using namespace allin1;
namespace fs = std::filesystem;

namespace {

struct Config {
  std::vector<std::string> languages{"en", "es", "fr", "jp"};
  std::string pivot = "en";
  std::map<Language, std::string> emb, train, dev, test, test_translated;
  std::string align_dir = "alignment";
  std::size_t dict_cap = 0;  // 0 = no cap
  NgramSettings ngrams;
  TrainConfig svm;

  std::vector<Language> language_list() const { return parse_languages(languages); }

  static std::vector<Language> parse_languages(const std::vector<std::string>& codes) {
    std::vector<Language> out;
    for (const std::string& item : codes) {
      if (item.empty()) continue;
      const Language l = parse_language(item);
      if (std::find(out.begin(), out.end(), l) != out.end())
        throw UsageError("language " + item + " listed twice");
      out.push_back(l);
    }
    if (out.empty()) throw UsageError("no languages given");
    return out;
  }

  const std::string& path(const std::map<Language, std::string>& m, Language l, const char* key) const {
    auto it = m.find(l);
    if (it == m.end() || it->second.empty())
      throw UsageError(std::string("missing ") + key + "_" + std::string(to_string(l)));
    return it->second;
  }

  std::optional<std::size_t> cap() const {
    return dict_cap == 0 ? std::nullopt : std::optional<std::size_t>(dict_cap);
  }
};

void add_config_options(CLI::App& app, Config& cfg) {
  app.add_option("--languages", cfg.languages, "comma-separated language codes")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--pivot", cfg.pivot, "alignment pivot language")->capture_default_str();
  app.add_option("--align_dir", cfg.align_dir, "directory for alignment artifacts")->capture_default_str();
  app.add_option("--dict_cap", cfg.dict_cap, "cap on pseudo-dictionary pairs (0 = all)");
  app.add_option("--n_min", cfg.ngrams.n_min)->capture_default_str();
  app.add_option("--n_max", cfg.ngrams.n_max)->capture_default_str();
  app.add_option("--min_df", cfg.ngrams.min_df)->capture_default_str();
  app.add_option("--C", cfg.svm.C)->capture_default_str();
  app.add_option("--tol", cfg.svm.tol)->capture_default_str();
  app.add_option("--max_epochs", cfg.svm.max_epochs)->capture_default_str();
  app.add_option("--seed", cfg.svm.seed)->capture_default_str();
  app.add_option("--bias_scale", cfg.svm.bias_scale)->capture_default_str();
  for (Language l : kAllLanguages) {
    const std::string code(to_string(l));
    app.add_option("--emb_" + code, cfg.emb[l], "embedding file");
    app.add_option("--train_" + code, cfg.train[l], "training set");
    app.add_option("--dev_" + code, cfg.dev[l], "development set");
    app.add_option("--test_" + code, cfg.test[l], "test set");
    app.add_option("--test_translated_" + code, cfg.test_translated[l], "test set translated to English");
  }
}

std::map<Language, EmbeddingTable<double>> load_normalized(const Config& cfg, const std::vector<Language>& langs) {
  std::map<Language, EmbeddingTable<double>> tables;
  for (Language l : langs) {
    LoadedEmbeddings loaded = load_embeddings(fs::path(cfg.path(cfg.emb, l, "emb")), l);
    if (loaded.duplicates_skipped > 0)
      std::cerr << to_string(l) << ": skipped " << loaded.duplicates_skipped << " duplicate words\n";
    tables.emplace(l, normalize_rows(loaded.table));
  }
  return tables;
}

AlignmentResult<double> align_languages(const Config& cfg, const std::vector<Language>& langs, Language pivot) {
  std::vector<Language> with_pivot = langs;
  if (std::find(langs.begin(), langs.end(), pivot) == langs.end()) with_pivot.push_back(pivot);
  const auto tables = load_normalized(cfg, with_pivot);
  return align_all(tables, pivot, cfg.cap());
}

std::vector<LabeledDoc> read_split(const std::string& path, Language l, SplitName name) {
  return parse_dataset(fs::path(path), l, name).docs;
}

// --- align -----------------------------------------------------------------

int cmd_align(const Config& cfg) {
  const auto langs = cfg.language_list();
  const Language pivot = parse_language(cfg.pivot);
  const AlignmentResult<double> result = align_languages(cfg, langs, pivot);
  const fs::path dir(cfg.align_dir);
  fs::create_directories(dir);

  KeyValues summary{{"pivot", std::string(to_string(pivot))}};
  for (const auto& [l, table] : result.tables) {
    const std::string code(to_string(l));
    save_embeddings(table, dir / ("aligned_" + code + ".vec"));
    std::ofstream map(dir / ("map_" + code + ".txt"), std::ios::binary);
    const auto& W = result.maps.at(l).W;
    char buf[32];
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      for (Eigen::Index j = 0; j < W.cols(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", W(i, j));
        map << (j ? " " : "") << buf;
      }
      map << '\n';
    }
    summary["dictionary_size." + code] = std::to_string(result.dictionary_sizes.at(l));
    std::snprintf(buf, sizeof buf, "%.6f", result.mean_dictionary_cosine.at(l));
    summary["mean_cosine." + code] = buf;
    std::cout << code << (l == pivot ? " (pivot)" : "") << ": dictionary " << result.dictionary_sizes.at(l)
              << " pairs, mean cosine " << buf << '\n';
  }
  std::ofstream out(dir / "alignment.txt", std::ios::binary);
  write_key_values(out, summary);
  return 0;
}

std::map<Language, EmbeddingTable<double>> load_aligned(const Config& cfg, const std::vector<Language>& langs) {
  const fs::path dir(cfg.align_dir);
  if (!fs::exists(dir / "alignment.txt"))
    throw DataError("no alignment artifacts in " + dir.string() + "; run `allin1 align` first");
  std::ifstream in(dir / "alignment.txt");
  const KeyValues summary = read_key_values(in);
  if (summary.at("pivot") != cfg.pivot)
    throw DataError("alignment in " + dir.string() + " uses pivot " + summary.at("pivot") +
                    "; rerun `allin1 align`");
  std::map<Language, EmbeddingTable<double>> tables;
  for (Language l : langs) {
    const fs::path file = dir / ("aligned_" + std::string(to_string(l)) + ".vec");
    if (!fs::exists(file))
      throw DataError("no aligned table for " + std::string(to_string(l)) + "; run `allin1 align` first");
    tables.emplace(l, load_embeddings(file, l).table);
  }
  return tables;
}

// --- train -----------------------------------------------------------------

struct TrainOptions {
  std::string mode = "multilingual";
  std::vector<std::string> train_languages;
  bool with_dev = false;
  std::string out;
};

PipelineSettings settings_from(const Config& cfg, TrainMode mode, bool with_dev) {
  PipelineSettings s;
  s.mode = mode;
  s.pivot = parse_language(cfg.pivot);
  s.ngrams = cfg.ngrams;
  s.train = cfg.svm;
  s.with_dev = with_dev;
  return s;
}

std::map<Language, std::vector<LabeledDoc>> training_docs(const Config& cfg, const std::vector<Language>& langs,
                                                          bool with_dev) {
  std::map<Language, std::vector<LabeledDoc>> docs;
  for (Language l : langs) {
    auto& d = docs[l];
    d = read_split(cfg.path(cfg.train, l, "train"), l, SplitName::train);
    if (with_dev) {
      auto dev = read_split(cfg.path(cfg.dev, l, "dev"), l, SplitName::dev);
      d.insert(d.end(), dev.begin(), dev.end());
    }
  }
  return docs;
}

int cmd_train(const Config& cfg, const TrainOptions& opt) {
  const TrainMode mode = parse_train_mode(opt.mode);
  const auto langs = opt.train_languages.empty() ? cfg.language_list()
                                                 : Config::parse_languages(opt.train_languages);
  if (mode == TrainMode::monolingual && langs.size() != 1)
    throw UsageError("monolingual mode trains on exactly one language");
  if (opt.out.empty()) throw UsageError("--out is required");

  const auto tables = mode == TrainMode::monolingual ? load_normalized(cfg, langs) : load_aligned(cfg, langs);
  const auto docs = training_docs(cfg, langs, opt.with_dev);
  const ModelBundle bundle = train_bundle(docs, tables, settings_from(cfg, mode, opt.with_dev));
  save_bundle(bundle, fs::path(opt.out));
  std::size_t n = 0;
  for (const auto& [l, d] : docs) n += d.size();
  std::cout << "trained " << to_string(mode) << " model on " << n << " documents, "
            << bundle.feature_width() << " features -> " << opt.out << '\n';
  return 0;
}

// --- predict ---------------------------------------------------------------

struct PredictOptions {
  std::string bundle, input, language, output;
};

void write_predictions(std::ostream& out, const std::vector<LabeledDoc>& docs, const Predictions& preds) {
  for (std::size_t i = 0; i < docs.size(); ++i) out << docs[i].id << '\t' << to_string(preds.labels[i]) << '\n';
}

int cmd_predict(const PredictOptions& opt) {
  const Language l = parse_language(opt.language);
  const ModelBundle bundle = load_bundle(fs::path(opt.bundle));
  if (!bundle.tables.count(l))
    throw UsageError("language " + opt.language + " is not covered by bundle " + opt.bundle);
  const auto docs = read_split(opt.input, l, SplitName::test);
  const Predictions preds = predict_docs(bundle, docs);
  if (opt.output.empty() || opt.output == "-") {
    write_predictions(std::cout, docs, preds);
  } else {
    std::ofstream out(opt.output, std::ios::binary);
    if (!out) throw DataError("cannot write " + opt.output);
    write_predictions(out, docs, preds);
  }
  std::fprintf(stderr, "%zu documents, %zu tokens, OOV rate %.2f%%\n", docs.size(), preds.tokens,
               100.0 * preds.oov_rate());
  return 0;
}

// --- evaluate --------------------------------------------------------------

struct EvaluateOptions {
  std::string gold, predictions, language = "en", report;
};

std::vector<std::pair<std::string, CanonicalLabel>> read_predictions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open predictions " + path);
  std::vector<std::pair<std::string, CanonicalLabel>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw ParseError("expected id<TAB>label", line_no, path);
    out.emplace_back(line.substr(0, tab), parse_label(line.substr(tab + 1)));
  }
  return out;
}

PredictionSet align_predictions(const std::vector<LabeledDoc>& gold,
                                const std::vector<std::pair<std::string, CanonicalLabel>>& pred, Language l) {
  PredictionSet set{l, {}};
  const std::size_t n = std::min(gold.size(), pred.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (gold[i].id != pred[i].first)
      throw DataError("id mismatch at entry " + std::to_string(i + 1) + ": gold '" + gold[i].id +
                      "' vs predicted '" + pred[i].first + "'");
    if (!gold[i].label) throw DataError("gold entry '" + gold[i].id + "' has no label");
    set.pairs.emplace_back(*gold[i].label, pred[i].second);
  }
  if (gold.size() != pred.size())
    throw DataError("count mismatch: " + std::to_string(gold.size()) + " gold vs " +
                    std::to_string(pred.size()) + " predicted; first unmatched entry " +
                    std::to_string(n + 1) + " ('" + (n < gold.size() ? gold[n].id : pred[n].first) + "')");
  return set;
}

int cmd_evaluate(const EvaluateOptions& opt) {
  const Language l = parse_language(opt.language);
  const auto gold = read_split(opt.gold, l, SplitName::test);
  const MetricsReport report = evaluate(align_predictions(gold, read_predictions(opt.predictions), l));
  std::cout << format_report(report);
  if (!opt.report.empty()) {
    std::ofstream out(opt.report, std::ios::binary);
    if (!out) throw DataError("cannot write " + opt.report);
    out << report_to_json(report) << '\n';
  }
  return 0;
}

// --- matrix ----------------------------------------------------------------

double score(const ModelBundle& bundle, const std::vector<LabeledDoc>& test) {
  const Predictions preds = predict_docs(bundle, test);
  PredictionSet set;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (!test[i].label) throw DataError("test entry '" + test[i].id + "' has no label");
    set.pairs.emplace_back(*test[i].label, preds.labels[i]);
  }
  return weighted_f1(set);
}

void print_row(const std::string& name, const std::vector<Language>& langs,
               const std::map<Language, double>& cells) {
  std::printf("%-12s", name.c_str());
  double sum = 0;
  for (Language l : langs) {
    auto it = cells.find(l);
    if (it == cells.end()) {
      std::printf(" %7s", "--");
    } else {
      std::printf(" %7.2f", 100 * it->second);
      sum += it->second;
    }
  }
  if (cells.size() == langs.size())
    std::printf(" %7.2f\n", 100 * sum / static_cast<double>(langs.size()));
  else
    std::printf(" %7s\n", "--");
}

int cmd_matrix(const Config& cfg, bool with_dev) {
  const auto langs = cfg.language_list();
  const Language pivot = parse_language(cfg.pivot);
  std::map<Language, std::vector<LabeledDoc>> tests;
  for (Language l : langs) tests[l] = read_split(cfg.path(cfg.test, l, "test"), l, SplitName::test);
  const auto docs = training_docs(cfg, langs, with_dev);
  const auto own = load_normalized(cfg, langs);

  std::map<Language, double> mono, multi, translate;
  std::map<Language, std::unique_ptr<ModelBundle>> mono_models;
  for (Language l : langs) {
    auto bundle = std::make_unique<ModelBundle>(
        train_bundle({{l, docs.at(l)}}, {{l, own.at(l)}}, settings_from(cfg, TrainMode::monolingual, with_dev)));
    mono[l] = score(*bundle, tests[l]);
    mono_models[l] = std::move(bundle);
  }

  const AlignmentResult<double> aligned = align_languages(cfg, langs, pivot);
  const ModelBundle all = train_bundle(docs, aligned.tables, settings_from(cfg, TrainMode::multilingual, with_dev));
  for (Language l : langs) multi[l] = score(all, tests[l]);

  bool any_translation = false;
  for (Language l : langs) {
    auto it = cfg.test_translated.find(l);
    if (it == cfg.test_translated.end() || it->second.empty()) continue;
    any_translation = true;
    if (!mono_models.count(Language::en)) {
      std::cerr << "warning: translated test sets need an English model; skipping Translate row\n";
      any_translation = false;
      break;
    }
    auto translated = read_split(it->second, Language::en, SplitName::test);
    translate[l] = score(*mono_models.at(Language::en), translated);
  }

  std::printf("%-12s", "");
  for (Language l : langs) std::printf(" %7s", std::string(to_string(l)).c_str());
  std::printf(" %7s\n", "Avg");
  print_row("Monoling", langs, mono);
  print_row("Multiling", langs, multi);
  if (any_translation) print_row("Translate", langs, translate);
  return 0;
}

// --- inspect ---------------------------------------------------------------

int cmd_inspect(const std::string& path) {
  const KeyValues manifest = read_manifest(fs::path(path));
  write_key_values(std::cout, manifest);
  const ModelBundle bundle = load_bundle(fs::path(path));
  std::cout << "# checksums ok; " << bundle.model.weights.rows() << " x " << bundle.model.weights.cols()
            << " weight matrix\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ALL-IN-1 multilingual short-text classifier"};
  app.set_version_flag("--version", std::string(ALLIN1_VERSION));
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key = value configuration file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  Config cfg;
  add_config_options(app, cfg);

  auto* align = app.add_subcommand("align", "map every embedding table onto the pivot space");

  TrainOptions train_opt;
  auto* train = app.add_subcommand("train", "train a model bundle");
  train->add_option("--mode", train_opt.mode, "monolingual|multilingual")->capture_default_str();
  train->add_option("--train_languages", train_opt.train_languages, "defaults to --languages")->delimiter(',');
  train->add_flag("--with_dev,--with-dev", train_opt.with_dev, "append the dev split to training");
  train->add_option("--out", train_opt.out, "bundle directory")->required();

  PredictOptions predict_opt;
  auto* predict = app.add_subcommand("predict", "label a dataset with a bundle");
  predict->add_option("--bundle", predict_opt.bundle)->required();
  predict->add_option("--input", predict_opt.input)->required();
  predict->add_option("--language", predict_opt.language)->required();
  predict->add_option("--output", predict_opt.output, "defaults to stdout");

  EvaluateOptions eval_opt;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "score predictions against gold labels");
  evaluate_cmd->add_option("--gold", eval_opt.gold)->required();
  evaluate_cmd->add_option("--predictions", eval_opt.predictions)->required();
  evaluate_cmd->add_option("--language", eval_opt.language)->capture_default_str();
  evaluate_cmd->add_option("--report", eval_opt.report, "JSON report path");

  bool matrix_with_dev = false;
  auto* matrix = app.add_subcommand("matrix", "monolingual / multilingual / translate grid");
  matrix->add_flag("--with_dev,--with-dev", matrix_with_dev);

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "print a bundle manifest and verify checksums");
  inspect->add_option("bundle", inspect_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*align) return cmd_align(cfg);
    if (*train) return cmd_train(cfg, train_opt);
    if (*predict) return cmd_predict(predict_opt);
    if (*evaluate_cmd) return cmd_evaluate(eval_opt);
    if (*matrix) return cmd_matrix(cfg, matrix_with_dev);
    if (*inspect) return cmd_inspect(inspect_path);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
