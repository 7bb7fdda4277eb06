#include "allin1/bundle.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace allin1 {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string join_languages(const std::vector<Language>& langs) {
  std::string out;
  for (std::size_t i = 0; i < langs.size(); ++i) {
    if (i) out += ',';
    out += to_string(langs[i]);
  }
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// Serialized file contents keyed by file name; the manifest records a
// checksum for each.
using FileSet = std::map<std::string, std::string>;

std::uint32_t crc32_of(const std::string& bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

std::string hex32(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

template <typename Derived>
std::string encode_f32(const Eigen::DenseBase<Derived>& values) {
  std::string out;
  out.reserve(static_cast<std::size_t>(values.size()) * 4);
  // Row-major traversal regardless of storage order.
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(values(r, c)));
      for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
    }
  }
  return out;
}

RowMatrix<float> decode_f32(const std::string& bytes, Eigen::Index rows, Eigen::Index cols,
                            const std::string& name) {
  if (bytes.size() != static_cast<std::size_t>(rows * cols) * 4)
    throw DataError(name + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                    " float32 values");
  RowMatrix<float> m(rows, cols);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  for (Eigen::Index i = 0; i < rows * cols; ++i, p += 4) {
    const std::uint32_t bits = std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
                               (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
    m.data()[i] = std::bit_cast<float>(bits);
  }
  return m;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("cannot write " + path.string());
}

const std::string& require(const KeyValues& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw DataError("manifest is missing '" + key + "'");
  return it->second;
}

long long require_int(const KeyValues& kv, const std::string& key) {
  const std::string& v = require(kv, key);
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw DataError("manifest key '" + key + "' is not an integer");
  return out;
}

unsigned long long require_uint(const KeyValues& kv, const std::string& key) {
  const std::string& v = require(kv, key);
  unsigned long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw DataError("manifest key '" + key + "' is not an unsigned integer");
  return out;
}

double require_double(const KeyValues& kv, const std::string& key) {
  const std::string& v = require(kv, key);
  double out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw DataError("manifest key '" + key + "' is not a number");
  return out;
}

}  // namespace

KeyValues read_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    kv[trim(std::string_view(t).substr(0, eq))] = trim(std::string_view(t).substr(eq + 1));
  }
  return kv;
}

void write_key_values(std::ostream& out, const KeyValues& kv) {
  for (const auto& [key, value] : kv) out << key << " = " << value << '\n';
}

void save_bundle(const ModelBundle& bundle, const fs::path& dir) {
  const PipelineSettings& s = bundle.settings;
  FileSet files;

  std::string ngrams;
  for (const auto& e : bundle.vocab.entries()) {
    ngrams += std::to_string(e.df);
    ngrams += '\t';
    ngrams += e.ngram;
    ngrams += '\n';
  }
  files["ngrams.tsv"] = std::move(ngrams);

  RowMatrix<float> scaler(2, bundle.scaler.dim());
  scaler.row(0) = bundle.scaler.mins.transpose();
  scaler.row(1) = bundle.scaler.maxs.transpose();
  files["scaler.f32"] = encode_f32(scaler);
  files["weights.f32"] = encode_f32(bundle.model.weights);

  for (const auto& [lang, table] : bundle.tables) {
    const std::string stem = "emb_" + std::string(to_string(lang));
    std::string vocab;
    for (const std::string& w : table.vocab()) {
      vocab += w;
      vocab += '\n';
    }
    files[stem + ".vocab"] = std::move(vocab);
    files[stem + ".f32"] = encode_f32(table.matrix());
  }

  std::vector<std::string> class_names, active_names;
  for (std::size_t k = 0; k < bundle.model.classes.size(); ++k) {
    class_names.emplace_back(to_string(bundle.model.classes[k]));
    if (bundle.model.active[k]) active_names.emplace_back(to_string(bundle.model.classes[k]));
  }
  auto join = [](const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    return out;
  };

  KeyValues manifest;
  manifest["format_version"] = std::to_string(kBundleFormatVersion);
  manifest["created_by"] = std::string("allin1 ") + ALLIN1_VERSION;
  manifest["mode"] = std::string(to_string(s.mode));
  manifest["languages"] = join_languages(s.languages);
  manifest["pivot"] = std::string(to_string(s.pivot));
  manifest["n_min"] = std::to_string(s.ngrams.n_min);
  manifest["n_max"] = std::to_string(s.ngrams.n_max);
  manifest["min_df"] = std::to_string(s.ngrams.min_df);
  manifest["C"] = format_double(s.train.C);
  manifest["tol"] = format_double(s.train.tol);
  manifest["max_epochs"] = std::to_string(s.train.max_epochs);
  manifest["seed"] = std::to_string(s.train.seed);
  manifest["bias_scale"] = format_double(s.train.bias_scale);
  manifest["with_dev"] = s.with_dev ? "true" : "false";
  manifest["classes"] = join(class_names);
  manifest["active_classes"] = join(active_names);
  manifest["n_docs"] = std::to_string(bundle.vocab.n_docs());
  manifest["ngram_count"] = std::to_string(bundle.vocab.size());
  manifest["embedding_dim"] = std::to_string(bundle.scaler.dim());
  manifest["feature_width"] = std::to_string(bundle.feature_width());
  for (const auto& [lang, table] : bundle.tables)
    manifest["vocab_size." + std::string(to_string(lang))] = std::to_string(table.size());
  for (const auto& [name, bytes] : files) {
    manifest["crc32." + name] = hex32(crc32_of(bytes));
    manifest["bytes." + name] = std::to_string(bytes.size());
  }

  fs::create_directories(dir);
  for (const auto& [name, bytes] : files) write_file(dir / name, bytes);
  std::ostringstream text;
  write_key_values(text, manifest);
  write_file(dir / "manifest.txt", text.str());
}

KeyValues read_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.txt", std::ios::binary);
  if (!in) throw DataError("no model bundle at " + dir.string() + " (manifest.txt missing)");
  KeyValues kv = read_key_values(in);
  const long long version = require_int(kv, "format_version");
  if (version != kBundleFormatVersion)
    throw VersionError("bundle format version " + std::to_string(version) +
                       " is not supported (expected " + std::to_string(kBundleFormatVersion) + ")");
  return kv;
}

ModelBundle load_bundle(const fs::path& dir) {
  const KeyValues kv = read_manifest(dir);
  auto load_checked = [&](const std::string& name) {
    std::string bytes = read_file(dir / name);
    if (bytes.size() != require_uint(kv, "bytes." + name))
      throw ChecksumError(name + ": size does not match the manifest");
    if (hex32(crc32_of(bytes)) != require(kv, "crc32." + name))
      throw ChecksumError(name + ": checksum mismatch");
    return bytes;
  };

  ModelBundle bundle;
  PipelineSettings& s = bundle.settings;
  s.mode = parse_train_mode(require(kv, "mode"));
  for (const std::string& code : split_list(require(kv, "languages")))
    s.languages.push_back(parse_language(code));
  s.pivot = parse_language(require(kv, "pivot"));
  s.ngrams.n_min = static_cast<int>(require_int(kv, "n_min"));
  s.ngrams.n_max = static_cast<int>(require_int(kv, "n_max"));
  s.ngrams.min_df = static_cast<int>(require_int(kv, "min_df"));
  s.train.C = require_double(kv, "C");
  s.train.tol = require_double(kv, "tol");
  s.train.max_epochs = static_cast<int>(require_int(kv, "max_epochs"));
  s.train.seed = require_uint(kv, "seed");
  s.train.bias_scale = require_double(kv, "bias_scale");
  s.with_dev = require(kv, "with_dev") == "true";

  const auto n_docs = static_cast<std::size_t>(require_uint(kv, "n_docs"));
  const auto dim = static_cast<Eigen::Index>(require_int(kv, "embedding_dim"));
  const auto width = static_cast<Eigen::Index>(require_int(kv, "feature_width"));

  std::vector<NgramVocabulary::Entry> entries;
  {
    std::istringstream in(load_checked("ngrams.tsv"));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw ParseError("ngrams.tsv: expected df<TAB>ngram", line_no);
      entries.push_back({line.substr(tab + 1), static_cast<std::size_t>(std::stoull(line.substr(0, tab)))});
    }
  }
  bundle.vocab = NgramVocabulary(s.ngrams.n_min, s.ngrams.n_max, n_docs, std::move(entries));
  if (bundle.vocab.size() != require_uint(kv, "ngram_count"))
    throw DataError("ngrams.tsv does not match ngram_count");
  if (width != static_cast<Eigen::Index>(bundle.vocab.size()) + dim)
    throw DataError("feature_width does not equal ngram_count + embedding_dim");

  const RowMatrix<float> scaler = decode_f32(load_checked("scaler.f32"), 2, dim, "scaler.f32");
  bundle.scaler.mins = scaler.row(0).transpose();
  bundle.scaler.maxs = scaler.row(1).transpose();

  for (const std::string& name : split_list(require(kv, "classes")))
    bundle.model.classes.push_back(parse_label(name));
  const auto active = split_list(require(kv, "active_classes"));
  for (CanonicalLabel c : bundle.model.classes)
    bundle.model.active.push_back(std::find(active.begin(), active.end(), to_string(c)) != active.end());
  bundle.model.bias_scale = s.train.bias_scale;
  bundle.model.weights = decode_f32(load_checked("weights.f32"),
                                    static_cast<Eigen::Index>(bundle.model.classes.size()), width + 1,
                                    "weights.f32");

  for (Language lang : s.languages) {
    const std::string stem = "emb_" + std::string(to_string(lang));
    std::vector<std::string> vocab;
    std::istringstream in(load_checked(stem + ".vocab"));
    for (std::string w; std::getline(in, w);) vocab.push_back(std::move(w));
    RowMatrix<float> m = decode_f32(load_checked(stem + ".f32"), static_cast<Eigen::Index>(vocab.size()),
                                    dim, stem + ".f32");
    bundle.tables.emplace(lang, EmbeddingTable<float>(lang, std::move(vocab), std::move(m)));
  }
  return bundle;
}

}  // namespace allin1
