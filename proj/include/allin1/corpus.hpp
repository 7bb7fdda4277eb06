#pragma once

// Dataset ingestion: shared-task TSV files, label canonicalization and
// per-language tokenization.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "allin1/language.hpp"

namespace allin1 {

// The five classes the task is framed as. Enumerators are in lexicographic
// order of their names, so comparing enumerators compares names.
enum class CanonicalLabel { bug, comment, complaint, meaningless, request };

inline constexpr std::size_t kNumLabels = 5;
inline constexpr std::array<CanonicalLabel, kNumLabels> kAllLabels = {
    CanonicalLabel::bug, CanonicalLabel::comment, CanonicalLabel::complaint,
    CanonicalLabel::meaningless, CanonicalLabel::request};

constexpr std::string_view to_string(CanonicalLabel label) {
  switch (label) {
    case CanonicalLabel::bug: return "bug";
    case CanonicalLabel::comment: return "comment";
    case CanonicalLabel::complaint: return "complaint";
    case CanonicalLabel::meaningless: return "meaningless";
    case CanonicalLabel::request: return "request";
  }
  return "?";
}

constexpr std::size_t index_of(CanonicalLabel label) { return static_cast<std::size_t>(label); }

struct RawRecord {
  std::string id;
  std::string text;
  std::vector<std::string> raw_labels;
};

struct LabeledDoc {
  std::string id;
  Language language = Language::en;
  std::vector<std::string> tokens;
  std::optional<CanonicalLabel> label;

  bool operator==(const LabeledDoc&) const = default;
};

enum class SplitName { train, dev, test };

struct DatasetSplit {
  SplitName name = SplitName::train;
  std::vector<LabeledDoc> docs;

  bool operator==(const DatasetSplit&) const = default;
};

// Reduces a (possibly multi-label) annotation to one class: the first label
// wins; the typo labels undetermined/undefined/nonsense/noneless become
// meaningless. Matching is case-insensitive. Throws LabelError otherwise.
CanonicalLabel normalize_label(const std::vector<std::string>& raw_labels);
CanonicalLabel parse_label(std::string_view name);

std::vector<std::string> tokenize(std::string_view text, Language language);

// `id<TAB>text[<TAB>label{,label}*]`, one record per line, empty lines skipped.
std::vector<RawRecord> read_records(std::istream& in);
std::vector<RawRecord> read_records(const std::filesystem::path& path);

DatasetSplit parse_dataset(std::istream& in, Language language, SplitName name = SplitName::train);
DatasetSplit parse_dataset(const std::filesystem::path& path, Language language,
                           SplitName name = SplitName::train);

}  // namespace allin1
