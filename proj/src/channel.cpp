// src/channel.cpp

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

#include "driftlab/channel.hpp"

#include <Eigen/QR>

#include "driftlab/io.hpp"

namespace driftlab {

const char* channel_kind_name(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::identity: return "identity";
    case ChannelKind::orthogonal: return "orthogonal";
    case ChannelKind::attractor: return "attractor";
    case ChannelKind::random_mlp: return "random_mlp";
  }
  return "?";
}

ChannelKind channel_kind_from_name(const std::string& name) {
  if (name == "identity") return ChannelKind::identity;
  if (name == "orthogonal") return ChannelKind::orthogonal;
  if (name == "attractor") return ChannelKind::attractor;
  if (name == "random_mlp") return ChannelKind::random_mlp;
  throw ConfigError("unknown channel kind '" + name + "'");
}

void ChannelSpec::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ConfigError("channel.lambda must be in [0, 1]");
  }
  if (!(noise_sigma >= 0.0)) throw ConfigError("channel.noise_sigma must be >= 0");
  if (kind == ChannelKind::random_mlp && hidden_width < 1) {
    throw ConfigError("channel.hidden_width must be >= 1");
  }
}

namespace {

Eigen::MatrixXd gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {  // column-major draw order
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.next_gaussian();
  }
  return m;
}

// Q from Householder QR of a standard-normal matrix, with columns flipped so
// R's diagonal is nonnegative (unique Q for an invertible input).
Eigen::MatrixXd random_rotation(Rng& rng, Eigen::Index dim) {
  const Eigen::MatrixXd a = gaussian_matrix(rng, dim, dim);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  }
  return q;
}

}  // namespace

ChannelModel make_channel(const ChannelSpec& spec, int dim) {
  spec.validate();
  if (dim < 2) throw ConfigError("channel dimension must be >= 2");
  ChannelModel ch;
  ch.spec = spec;
  ch.dim = dim;

  Rng rng(derive_seed(spec.seed, "channel/params"));
  switch (spec.kind) {
    case ChannelKind::identity:
      break;  // no parameters
    case ChannelKind::orthogonal:
      ch.rotation = random_rotation(rng, dim);
      break;
    case ChannelKind::attractor:
      ch.rotation = random_rotation(rng, dim);
      ch.attractor_point = unit_sphere_vector(rng, dim);
      break;
    case ChannelKind::random_mlp: {
      const Eigen::Index h = spec.hidden_width;
      ch.w1 = gaussian_matrix(rng, h, dim) / std::sqrt(static_cast<double>(dim));
      ch.b1 = gaussian_vector(rng, h) / std::sqrt(static_cast<double>(dim));
      ch.w2 = gaussian_matrix(rng, dim, h) / std::sqrt(static_cast<double>(h));
      ch.b2 = gaussian_vector(rng, dim) / std::sqrt(static_cast<double>(h));
      break;
    }
  }
  return ch;
}

Embedding apply_channel(const ChannelModel& channel, const Embedding& x, Rng& rng) {
  if (x.size() != channel.dim) {
    throw DomainError("apply_channel: input dimension " + std::to_string(x.size()) +
                      " does not match channel dimension " + std::to_string(channel.dim));
  }
  if (channel.spec.kind == ChannelKind::identity) return x;

  Embedding y;
  switch (channel.spec.kind) {
    case ChannelKind::orthogonal:
      y = channel.rotation * x;
      break;
    case ChannelKind::attractor:
      y = channel.rotation * ((1.0 - channel.spec.lambda) * x +
                              channel.spec.lambda * channel.attractor_point);
      break;
    case ChannelKind::random_mlp:
      y = channel.w2 * (channel.w1 * x + channel.b1).array().tanh().matrix() + channel.b2;
      break;
    case ChannelKind::identity:
      break;  // unreachable
  }
  if (channel.spec.noise_sigma > 0.0) {
    y += channel.spec.noise_sigma * gaussian_vector(rng, channel.dim);
  }
  if (!(y.norm() > 0.0)) {
    throw DomainError("apply_channel: output collapsed to the zero vector");
  }
  return l2_normalize(y);
}

Corpus apply_channel_corpus(Corpus corpus, const ChannelModel& channel,
                            std::uint64_t noise_seed) {
  for (UtteranceRecord& rec : corpus.utterances) {
    if (!rec.pre_vocoder) {
      throw ProtocolError("utterance " + std::to_string(rec.utt) +
                          " has no pre_vocoder embedding");
    }
    Rng rng(derive_seed(noise_seed, "channel/utt", static_cast<std::uint64_t>(rec.utt)));
    rec.anonymized = apply_channel(channel, *rec.pre_vocoder, rng);
  }
  return corpus;
}

namespace {

void append_matrix(std::string& out, const char* name, const Eigen::MatrixXd& m) {
  out += name;
  out += ",";
  out += std::to_string(m.rows());
  out += ",";
  out += std::to_string(m.cols());
  out += "\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ",";
      out += format_double(m(r, c));
    }
    out += "\n";
  }
}

Eigen::MatrixXd read_matrix(const std::vector<std::string>& lines, std::size_t& li,
                            const std::string& expected_name) {
  if (li >= lines.size()) throw ProtocolError("channel text: missing section " + expected_name);
  const auto header = split_csv_line(lines[li++]);
  if (header.size() != 3 || header[0] != expected_name) {
    throw ProtocolError("channel text: expected section " + expected_name);
  }
  const long rows = parse_long(header[1]);
  const long cols = parse_long(header[2]);
  Eigen::MatrixXd m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    if (li >= lines.size()) throw ProtocolError("channel text: truncated matrix " + expected_name);
    const auto fields = split_csv_line(lines[li++]);
    if (static_cast<long>(fields.size()) != cols) {
      throw ProtocolError("channel text: bad row width in " + expected_name);
    }
    for (long c = 0; c < cols; ++c) {
      m(r, c) = parse_double(fields[static_cast<std::size_t>(c)]);
    }
  }
  return m;
}

}  // namespace

std::string channel_to_text(const ChannelModel& channel) {
  std::string out;
  out += "kind,";
  out += channel_kind_name(channel.spec.kind);
  out += "\n";
  out += "dim," + std::to_string(channel.dim) + "\n";
  out += "lambda," + format_double(channel.spec.lambda) + "\n";
  out += "noise_sigma," + format_double(channel.spec.noise_sigma) + "\n";
  out += "hidden_width," + std::to_string(channel.spec.hidden_width) + "\n";
  out += "seed," + std::to_string(channel.spec.seed) + "\n";
  switch (channel.spec.kind) {
    case ChannelKind::identity:
      break;
    case ChannelKind::orthogonal:
      append_matrix(out, "rotation", channel.rotation);
      break;
    case ChannelKind::attractor:
      append_matrix(out, "rotation", channel.rotation);
      append_matrix(out, "attractor_point", channel.attractor_point);
      break;
    case ChannelKind::random_mlp:
      append_matrix(out, "w1", channel.w1);
      append_matrix(out, "b1", channel.b1);
      append_matrix(out, "w2", channel.w2);
      append_matrix(out, "b2", channel.b2);
      break;
  }
  return out;
}

ChannelModel channel_from_text(const std::string& text) {
  const auto lines = split_lines(text);
  std::size_t li = 0;
  auto scalar_line = [&lines, &li](const std::string& key) -> std::string {
    if (li >= lines.size()) throw ProtocolError("channel text: missing field " + key);
    const auto fields = split_csv_line(lines[li++]);
    if (fields.size() != 2 || fields[0] != key) {
      throw ProtocolError("channel text: expected field " + key);
    }
    return fields[1];
  };

  ChannelModel ch;
  ch.spec.kind = channel_kind_from_name(scalar_line("kind"));
  ch.dim = static_cast<int>(parse_long(scalar_line("dim")));
  ch.spec.lambda = parse_double(scalar_line("lambda"));
  ch.spec.noise_sigma = parse_double(scalar_line("noise_sigma"));
  ch.spec.hidden_width = static_cast<int>(parse_long(scalar_line("hidden_width")));
  ch.spec.seed = parse_u64(scalar_line("seed"));
  switch (ch.spec.kind) {
    case ChannelKind::identity:
      break;
    case ChannelKind::orthogonal:
      ch.rotation = read_matrix(lines, li, "rotation");
      break;
    case ChannelKind::attractor:
      ch.rotation = read_matrix(lines, li, "rotation");
      ch.attractor_point = read_matrix(lines, li, "attractor_point");
      break;
    case ChannelKind::random_mlp:
      ch.w1 = read_matrix(lines, li, "w1");
      ch.b1 = read_matrix(lines, li, "b1");
      ch.w2 = read_matrix(lines, li, "w2");
      ch.b2 = read_matrix(lines, li, "b2");
      break;
  }
  return ch;
}

}  // namespace driftlab
