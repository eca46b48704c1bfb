// include/driftlab/corpus.hpp

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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "driftlab/embedding.hpp"

namespace driftlab {

// Synthetic speakers and utterances stand in for the recorded datasets: each
// speaker is a direction on the unit sphere, each utterance a noisy draw
// around it. The three embedding domains trace the anonymization pipeline:
//   original     - extracted from the source utterance
//   pre_vocoder  - output of the anonymization function (pseudo-speaker)
//   anonymized   - extracted after the vocoder surrogate channel
enum class Domain { original, pre_vocoder, anonymized };

const char* domain_name(Domain d);

struct CorpusConfig {
  int n_speakers = 40;
  int utts_per_speaker = 20;
  int dim = 32;
  double within_speaker_sigma = 0.15;  // isotropic noise scale around the centroid
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError naming the offending field
};

struct UtteranceRecord {
  UtteranceId utt = 0;
  SpeakerId spk = 0;
  Embedding original;
  std::optional<Embedding> pre_vocoder;
  std::optional<Embedding> anonymized;
};

/// Embedding of the record in the given domain; ProtocolError naming the
/// utterance if that domain has not been populated.
const Embedding& embedding_in(const UtteranceRecord& rec, Domain domain);

struct Corpus {
  int dim = 0;
  std::vector<Embedding> speaker_centroids;   // index == SpeakerId
  std::vector<UtteranceRecord> utterances;    // sorted by utterance id

  int n_speakers() const { return static_cast<int>(speaker_centroids.size()); }
  int n_utterances() const { return static_cast<int>(utterances.size()); }

  const UtteranceRecord& utterance(UtteranceId utt) const;
  UtteranceRecord& utterance(UtteranceId utt);

  /// Utterance ids of one speaker, ascending.
  std::vector<UtteranceId> utterances_of(SpeakerId spk) const;
};

struct Pool {
  int dim = 0;
  std::vector<Embedding> vectors;  // all unit norm

  int size() const { return static_cast<int>(vectors.size()); }
};

struct TrialProtocol {
  struct Trial {
    SpeakerId enroll_spk = 0;
    UtteranceId utt = 0;
    bool is_target = false;
  };

  std::map<SpeakerId, std::vector<UtteranceId>> enroll_map;
  std::vector<Trial> trials;

  int n_target_trials() const;
  int n_nontarget_trials() const;
};

/// Draws speaker centroids uniformly on the unit sphere and utterances as
/// l2_normalize(centroid + sigma * g). With sigma == 0 the centroid is reused
/// as-is (no rng consumed), so utterances equal it exactly.
///
/// Randomness contract: centroids come from Rng(derive_seed(seed,
/// "corpus/centroids")) in speaker order; speaker s's utterance noise from
/// Rng(derive_seed(seed, "corpus/utt_noise", s)) in utterance order.
Corpus generate_corpus(const CorpusConfig& cfg);

/// I.i.d. uniform unit-sphere vectors from Rng(derive_seed(seed, "pool")).
Pool generate_pool(int size, int dim, std::uint64_t seed);

/// The first enroll_per_spk utterances of each speaker (by id order) enroll
/// the speaker; every remaining utterance becomes one target trial against
/// its own speaker plus nontarget trials against nontarget_per_trial_spk
/// distinct other speakers.
///
/// Randomness contract: a single Rng(derive_seed(seed, "protocol")) consumed
/// over trial utterances in (speaker, utterance) ascending order; each draw
/// is a partial Fisher-Yates selection over the ascending list of other
/// speakers.
TrialProtocol build_protocol(const Corpus& corpus, int enroll_per_spk,
                             int nontarget_per_trial_spk, std::uint64_t seed);

/// Sub-corpus with only the listed utterances (speaker table shared).
Corpus subset_corpus(const Corpus& corpus, const std::vector<UtteranceId>& utts);

/// Copies the pre_vocoder/anonymized embeddings of `part` into `corpus`
/// (matching by utterance id).
void merge_domains(Corpus& corpus, const Corpus& part);

/// Enrollment utterance ids (ascending) and trial utterance ids (ascending)
/// referenced by the protocol.
std::vector<UtteranceId> enrollment_utterances(const TrialProtocol& protocol);
std::vector<UtteranceId> trial_utterances(const TrialProtocol& protocol);

}  // namespace driftlab
