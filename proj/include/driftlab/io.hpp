// include/driftlab/io.hpp

// Copyright 2026  Driftlab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "driftlab/corpus.hpp"

namespace driftlab {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Strict double/int parsing; DomainError on trailing garbage.
double parse_double(const std::string& field);
long parse_long(const std::string& field);
std::uint64_t parse_u64(const std::string& field);

/// Splits one CSV line on commas (fields never contain commas or quotes in
/// any of this project's formats).
std::vector<std::string> split_csv_line(const std::string& line);

/// Splits text into lines, tolerating a trailing newline.
std::vector<std::string> split_lines(const std::string& text);

/// Writes via a temp file in the same directory, then renames into place.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// FNV-1a 64 digest of a byte string, as 16 hex digits.
std::string content_digest(const std::string& content);

// Corpus/pool CSV: one row per vector, exact decimal doubles, so that a
// round trip reproduces the numbers bit for bit.
//   corpus: utt_id,spk_id,v0..v{m-1}   (chosen domain)
//   pool:   index,v0..v{m-1}
std::string corpus_to_csv(const Corpus& corpus, Domain domain);
/// Rebuilds a corpus from CSV (original domain only; speaker centroid table
/// is not part of the format and is left empty).
Corpus corpus_from_csv(const std::string& text);

std::string pool_to_csv(const Pool& pool);
Pool pool_from_csv(const std::string& text);

}  // namespace driftlab
