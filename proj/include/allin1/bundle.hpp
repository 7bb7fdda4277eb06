#pragma once

// Model bundle persistence. A bundle is a directory:
//
//   manifest.txt        sorted `key = value` lines: format version, settings
//                       echo, class list, feature widths, and a CRC-32 and
//                       byte size for every other file
//   ngrams.tsv          `df<TAB>ngram` per vocabulary column
//   scaler.f32          mins then maxs
//   weights.f32         |classes| x (feature_width + 1), row-major
//   emb_<lang>.vocab    one word per line
//   emb_<lang>.f32      |vocab| x dim, row-major
//
// Arrays are raw little-endian IEEE-754 float32 regardless of host order.

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "allin1/pipeline.hpp"

namespace allin1 {

inline constexpr int kBundleFormatVersion = 1;

using KeyValues = std::map<std::string, std::string>;

// `key = value` lines; blank lines and lines starting with '#' are ignored.
KeyValues read_key_values(std::istream& in);
void write_key_values(std::ostream& out, const KeyValues& kv);

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& dir);

// Throws VersionError for an unsupported format version and ChecksumError
// when a file's size or CRC-32 disagrees with the manifest.
ModelBundle load_bundle(const std::filesystem::path& dir);

// Manifest only, without reading the arrays.
KeyValues read_manifest(const std::filesystem::path& dir);

}  // namespace allin1
