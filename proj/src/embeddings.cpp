#include "allin1/embeddings.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <unordered_set>

namespace allin1 {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos == line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

bool is_integer(std::string_view s) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

double parse_value(std::string_view s, std::size_t line_no) {
  double value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("invalid number '" + std::string(s) + "'", line_no);
  return value;
}

}  // namespace

LoadedEmbeddings load_embeddings(std::istream& in, Language language) {
  std::vector<std::string> vocab;
  std::vector<double> values;
  std::unordered_set<std::string> seen;
  std::size_t dim = 0;
  std::size_t duplicates = 0;
  bool first = true;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (first) {
      first = false;
      if (fields.size() == 2 && is_integer(fields[0]) && is_integer(fields[1])) {
        const long long declared = std::stoll(std::string(fields[1]));
        if (declared <= 0) throw ParseError("header declares a non-positive dimension", line_no);
        dim = static_cast<std::size_t>(declared);
        continue;
      }
    }
    if (fields.size() < 2) throw ParseError("expected a word followed by its vector", line_no);
    if (dim == 0) dim = fields.size() - 1;
    if (fields.size() - 1 != dim)
      throw ParseError("expected " + std::to_string(dim) + " values, found " +
                           std::to_string(fields.size() - 1),
                       line_no);
    std::string word(fields[0]);
    if (!seen.insert(word).second) {
      ++duplicates;
      continue;
    }
    for (std::size_t k = 1; k < fields.size(); ++k) values.push_back(parse_value(fields[k], line_no));
    vocab.push_back(std::move(word));
  }
  if (vocab.empty()) throw DataError("embedding file has an empty vocabulary");

  RowMatrix<double> matrix = Eigen::Map<const RowMatrix<double>>(
      values.data(), static_cast<Eigen::Index>(vocab.size()), static_cast<Eigen::Index>(dim));
  return {EmbeddingTable<double>(language, std::move(vocab), std::move(matrix)), duplicates};
}

LoadedEmbeddings load_embeddings(const std::filesystem::path& path, Language language) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding file " + path.string());
  try {
    return load_embeddings(in, language);
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), e.line(), path.string());
  }
}

void save_embeddings(const EmbeddingTable<double>& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write embedding file " + path.string());
  out << table.size() << ' ' << table.dim() << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < table.size(); ++i) {
    out << table.vocab()[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < table.dim(); ++k) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, table.matrix()(i, k));
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace allin1
