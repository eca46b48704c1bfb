// include/driftlab/attacks.hpp

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

#include "driftlab/anonymizer.hpp"
#include "driftlab/channel.hpp"
#include "driftlab/evaluation.hpp"
#include "driftlab/mlp.hpp"

namespace driftlab {

// Attack models against the anonymization system. The attacker owns an
// independent training corpus (disjoint speakers) and its own randomness,
// but runs the same anonymization function family and the same frozen
// channel (the deployed vocoder is public knowledge under this threat
// model); only noise and sampling seeds differ.

enum class AttackKind { unprotected, lazy_informed, semi_informed, drift_reversal };

const char* attack_kind_name(AttackKind kind);
AttackKind attack_kind_from_name(const std::string& name);

struct AttackSetup {
  const Corpus* eval_corpus = nullptr;  // pre_vocoder/anonymized populated by the defender
  const TrialProtocol* protocol = nullptr;
  const Corpus* attacker_corpus = nullptr;  // original embeddings only
  const Pool* pool = nullptr;               // attacker's pool
  AnonymizerConfig anonymizer;              // function family; seeds derived per purpose
  const ChannelModel* channel = nullptr;
  std::uint64_t master_seed = 0;  // root of the attacker's seed lineage
};

struct AttackProvenance {
  AttackKind kind = AttackKind::unprotected;
  std::uint64_t master_seed = 0;
  std::string config_digest;
};

struct AttackResult {
  AttackKind kind = AttackKind::unprotected;
  EerResult eer;
  AttackProvenance provenance;
  std::vector<HistoryRow> history;  // empty for attacks without training
  double best_val_loss = 0.0;
};

/// Reference point: enrollment and trial both read original embeddings.
AttackResult unprotected_reference(const AttackSetup& setup);

/// The attacker anonymizes-and-channels its enrollment utterances with its
/// own seeds, then scores them directly against the published anonymized
/// trial embeddings. No compensation for the anonymization.
AttackResult lazy_informed(const AttackSetup& setup);

/// The attacker anonymizes-and-channels its training corpus, trains an
/// embedding transform under AAM-softmax over its own speaker labels, and
/// applies the transform to both sides of the lazy-informed scoring.
AttackResult semi_informed(const AttackSetup& setup, const TrainConfig& train_cfg);

/// The attacker learns an approximate inverse of the channel from
/// (pre_vocoder, anonymized) pairs of its training corpus under cosine loss,
/// maps published trial embeddings back toward the pre-vocoder domain, and
/// scores them against its own pseudo-speaker renderings of the enrollment
/// utterances (anonymized but not channeled).
AttackResult drift_reversal(const AttackSetup& setup, const TrainConfig& train_cfg);

}  // namespace driftlab
