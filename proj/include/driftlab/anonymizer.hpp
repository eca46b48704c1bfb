// include/driftlab/anonymizer.hpp

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

#include "driftlab/corpus.hpp"
#include "driftlab/rng.hpp"

namespace driftlab {

// Pool-based anonymization: the pseudo-speaker embedding is the normalized
// mean of a random subset of the pool vectors farthest (in cosine distance)
// from the input.

enum class AnonymizationLevel { utterance, speaker };

struct AnonymizerConfig {
  int top_k = 200;       // farthest-candidate set size
  int sample_size = 100; // random subset averaged into the pseudo-speaker
  AnonymizationLevel level = AnonymizationLevel::utterance;
  bool renormalize = true;   // scale the averaged vector back to unit norm
  bool passthrough = false;  // pseudo-speaker := input; reference/test mode
  std::uint64_t seed = 0;

  void validate(int pool_size) const;
};

/// One pseudo-speaker embedding for `input`:
///   1. rank pool vectors by cosine distance to the input, descending,
///      ties broken by ascending pool index;
///   2. keep the top_k farthest;
///   3. sample sample_size of them without replacement (partial
///      Fisher-Yates over the candidate list, ordered by rank);
///   4. return the (renormalized) componentwise mean.
/// A zero mean is reported as DomainError, never silently fixed.
Embedding pool_anonymize(const Embedding& input, const Pool& pool,
                         const AnonymizerConfig& cfg, Rng& rng);

/// Populates pre_vocoder for every utterance.
///
/// Utterance level: each utterance anonymized independently with
/// Rng(derive_seed(cfg.seed, "anonymize/utt", utt_id)).
/// Speaker level: one pseudo-speaker per speaker, computed from the
/// normalized centroid of all of that speaker's original embeddings with
/// Rng(derive_seed(cfg.seed, "anonymize/spk", speaker_id)) and assigned to
/// every utterance of the speaker.
Corpus anonymize_corpus(Corpus corpus, const Pool& pool, const AnonymizerConfig& cfg);

}  // namespace driftlab
