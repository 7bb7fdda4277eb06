#include "allin1/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>

#include "allin1/error.hpp"

namespace allin1 {

namespace {

std::string lowercase_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

CanonicalLabel parse_label(std::string_view name) {
  const std::string lower = lowercase_ascii(name);
  for (CanonicalLabel label : kAllLabels)
    if (to_string(label) == lower) return label;
  if (lower == "undetermined" || lower == "undefined" || lower == "nonsense" ||
      lower == "noneless")
    return CanonicalLabel::meaningless;
  throw LabelError(std::string(name));
}

CanonicalLabel normalize_label(const std::vector<std::string>& raw_labels) {
  if (raw_labels.empty()) throw LabelError("");
  return parse_label(raw_labels.front());
}

std::vector<RawRecord> read_records(std::istream& in) {
  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2 && fields.size() != 3)
      throw ParseError("expected 2 or 3 tab-separated fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    RawRecord rec;
    rec.id = std::string(fields[0]);
    rec.text = std::string(fields[1]);
    if (fields.size() == 3 && !fields[2].empty()) {
      for (std::string_view label : split(fields[2], ','))
        rec.raw_labels.emplace_back(label);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<RawRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset " + path.string());
  return read_records(in);
}

DatasetSplit parse_dataset(std::istream& in, Language language, SplitName name) {
  DatasetSplit split_out;
  split_out.name = name;
  for (RawRecord& rec : read_records(in)) {
    LabeledDoc doc;
    doc.id = std::move(rec.id);
    doc.language = language;
    doc.tokens = tokenize(rec.text, language);
    if (!rec.raw_labels.empty()) doc.label = normalize_label(rec.raw_labels);
    split_out.docs.push_back(std::move(doc));
  }
  return split_out;
}

DatasetSplit parse_dataset(const std::filesystem::path& path, Language language,
                           SplitName name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset " + path.string());
  try {
    return parse_dataset(in, language, name);
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), e.line(), path.string());
  }
}

}  // namespace allin1
