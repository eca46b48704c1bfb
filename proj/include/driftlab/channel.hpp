// include/driftlab/channel.hpp

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

#include <cstdint>
#include <string>

#include "driftlab/corpus.hpp"
#include "driftlab/rng.hpp"

namespace driftlab {

// Vocoder surrogate channels. A real vocoder does not reproduce its input
// speaker embedding exactly; the embedding extracted from its output has
// drifted. These parameterized maps induce that drift in embedding space
// with controllable strength:
//   identity    - no drift at all
//   orthogonal  - a fixed random rotation (plus optional noise); preserves
//                 all pairwise cosine geometry
//   attractor   - contraction toward a channel-specific prior direction,
//                 then rotation and noise; approximately invertible for
//                 contraction weights below 1
//   random_mlp  - a frozen random one-hidden-layer tanh network
enum class ChannelKind { identity, orthogonal, attractor, random_mlp };

const char* channel_kind_name(ChannelKind kind);
ChannelKind channel_kind_from_name(const std::string& name);

struct ChannelSpec {
  ChannelKind kind = ChannelKind::attractor;
  double lambda = 0.6;       // attractor contraction weight, in [0, 1]
  double noise_sigma = 0.05; // additive Gaussian noise scale per coordinate
  int hidden_width = 64;     // random_mlp only
  std::uint64_t seed = 0;

  void validate() const;
};

/// Frozen channel parameters; immutable after make_channel.
struct ChannelModel {
  ChannelSpec spec;
  int dim = 0;
  Eigen::MatrixXd rotation;        // Q, orthogonal (orthogonal/attractor)
  Embedding attractor_point;       // c, unit norm (attractor)
  Eigen::MatrixXd w1, w2;          // random_mlp
  Eigen::VectorXd b1, b2;
};

/// Builds the frozen parameters. The rotation is the Q factor of a
/// Householder QR of an m x m standard-normal matrix (entries drawn in
/// column-major order from Rng(derive_seed(seed, "channel/params"))), with
/// columns flipped so that R's diagonal is nonnegative, which makes Q unique.
/// random_mlp weights are Gaussian scaled by 1/sqrt(fan_in), drawn in the
/// order w1, b1, w2, b2 (matrices column-major).
ChannelModel make_channel(const ChannelSpec& spec, int dim);

/// Applies the channel to one embedding:
///   identity:    y = x
///   orthogonal:  y = l2_normalize(Q x + sigma g)
///   attractor:   y = l2_normalize(Q ((1-lambda) x + lambda c) + sigma g)
///   random_mlp:  y = l2_normalize(w2 tanh(w1 x + b1) + b2 + sigma g)
/// g is standard normal per coordinate, drawn from rng; with sigma == 0 no
/// randomness is consumed and the map is deterministic.
Embedding apply_channel(const ChannelModel& channel, const Embedding& x, Rng& rng);

/// Populates `anonymized` for every utterance from its pre_vocoder embedding,
/// with per-utterance noise stream Rng(derive_seed(noise_seed, "channel/utt",
/// utt_id)).
Corpus apply_channel_corpus(Corpus corpus, const ChannelModel& channel,
                            std::uint64_t noise_seed);

/// Text round-trip of the frozen parameters (CSV matrices, exact decimal
/// doubles), for experiment archival.
std::string channel_to_text(const ChannelModel& channel);
ChannelModel channel_from_text(const std::string& text);

}  // namespace driftlab
