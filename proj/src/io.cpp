// src/io.cpp

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

#include "driftlab/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "driftlab/errors.hpp"
#include "driftlab/rng.hpp"

namespace driftlab {

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw DomainError("format_double: conversion failed");
  return std::string(buf, ptr);
}

double parse_double(const std::string& field) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DomainError("parse_double: bad field '" + field + "'");
  }
  return value;
}

long parse_long(const std::string& field) {
  long value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DomainError("parse_long: bad field '" + field + "'");
  }
  return value;
}

std::uint64_t parse_u64(const std::string& field) {
  std::uint64_t value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DomainError("parse_u64: bad field '" + field + "'");
  }
  return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string::size_type start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ProtocolError("cannot open for writing: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ProtocolError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ProtocolError("rename failed: " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProtocolError("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string content_digest(const std::string& content) {
  const std::uint64_t h = fnv1a64(content);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string corpus_to_csv(const Corpus& corpus, Domain domain) {
  std::string out = "utt_id,spk_id";
  for (int i = 0; i < corpus.dim; ++i) out += ",v" + std::to_string(i);
  out += "\n";
  for (const UtteranceRecord& rec : corpus.utterances) {
    const Embedding& v = embedding_in(rec, domain);
    out += std::to_string(rec.utt);
    out += ",";
    out += std::to_string(rec.spk);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      out += ",";
      out += format_double(v(i));
    }
    out += "\n";
  }
  return out;
}

Corpus corpus_from_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ProtocolError("corpus_from_csv: empty input");
  Corpus corpus;
  SpeakerId max_spk = -1;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto fields = split_csv_line(lines[li]);
    if (fields.size() < 3) {
      throw ProtocolError("corpus_from_csv: short row at line " + std::to_string(li + 1));
    }
    UtteranceRecord rec;
    rec.utt = static_cast<UtteranceId>(parse_long(fields[0]));
    rec.spk = static_cast<SpeakerId>(parse_long(fields[1]));
    rec.original.resize(static_cast<Eigen::Index>(fields.size() - 2));
    for (std::size_t i = 2; i < fields.size(); ++i) {
      rec.original(static_cast<Eigen::Index>(i - 2)) = parse_double(fields[i]);
    }
    if (corpus.dim == 0) {
      corpus.dim = static_cast<int>(rec.original.size());
    } else if (corpus.dim != rec.original.size()) {
      throw ProtocolError("corpus_from_csv: inconsistent dimension at line " +
                          std::to_string(li + 1));
    }
    max_spk = std::max(max_spk, rec.spk);
    corpus.utterances.push_back(std::move(rec));
  }
  std::sort(corpus.utterances.begin(), corpus.utterances.end(),
            [](const UtteranceRecord& a, const UtteranceRecord& b) { return a.utt < b.utt; });
  // Centroids are not part of the CSV format; an empty table marks them
  // unavailable. Speaker count is still recoverable from the rows.
  corpus.speaker_centroids.clear();
  (void)max_spk;
  return corpus;
}

std::string pool_to_csv(const Pool& pool) {
  std::string out = "index";
  for (int i = 0; i < pool.dim; ++i) out += ",v" + std::to_string(i);
  out += "\n";
  for (int p = 0; p < pool.size(); ++p) {
    out += std::to_string(p);
    const Embedding& v = pool.vectors[static_cast<std::size_t>(p)];
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      out += ",";
      out += format_double(v(i));
    }
    out += "\n";
  }
  return out;
}

Pool pool_from_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ProtocolError("pool_from_csv: empty input");
  Pool pool;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto fields = split_csv_line(lines[li]);
    if (fields.size() < 2) {
      throw ProtocolError("pool_from_csv: short row at line " + std::to_string(li + 1));
    }
    Embedding v(static_cast<Eigen::Index>(fields.size() - 1));
    for (std::size_t i = 1; i < fields.size(); ++i) {
      v(static_cast<Eigen::Index>(i - 1)) = parse_double(fields[i]);
    }
    if (pool.dim == 0) {
      pool.dim = static_cast<int>(v.size());
    } else if (pool.dim != v.size()) {
      throw ProtocolError("pool_from_csv: inconsistent dimension at line " +
                          std::to_string(li + 1));
    }
    pool.vectors.push_back(std::move(v));
  }
  return pool;
}

}  // namespace driftlab
