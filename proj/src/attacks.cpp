// src/attacks.cpp

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

#include "driftlab/attacks.hpp"

#include <algorithm>

namespace driftlab {

const char* attack_kind_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::unprotected: return "unprotected";
    case AttackKind::lazy_informed: return "lazy_informed";
    case AttackKind::semi_informed: return "semi_informed";
    case AttackKind::drift_reversal: return "drift_reversal";
  }
  return "?";
}

AttackKind attack_kind_from_name(const std::string& name) {
  if (name == "unprotected") return AttackKind::unprotected;
  if (name == "lazy_informed") return AttackKind::lazy_informed;
  if (name == "semi_informed") return AttackKind::semi_informed;
  if (name == "drift_reversal") return AttackKind::drift_reversal;
  throw ConfigError("unknown attack '" + name + "'");
}

namespace {

// Attacker seed lineage, all rooted at setup.master_seed. The enrollment
// purposes are shared across attack kinds (the attacker renders enrollment
// data once), training purposes are per attack.
constexpr const char* kAnonEnroll = "attack/anonymize_enroll";
constexpr const char* kChannelEnroll = "attack/channel_enroll";
constexpr const char* kAnonTrain = "attack/anonymize_train";
constexpr const char* kChannelTrain = "attack/channel_train";

void check_setup(const AttackSetup& setup) {
  if (setup.eval_corpus == nullptr || setup.protocol == nullptr ||
      setup.attacker_corpus == nullptr || setup.pool == nullptr ||
      setup.channel == nullptr) {
    throw ProtocolError("attack setup is missing a component");
  }
  if (setup.eval_corpus->dim != setup.attacker_corpus->dim) {
    throw ProtocolError("attack setup: corpus dimensions differ");
  }
  // Speaker disjointness between the attacker's training speakers and the
  // evaluation speakers. Generated speakers are random directions, so any
  // near-identical centroid pair means the corpora share a source.
  for (const Embedding& eval_c : setup.eval_corpus->speaker_centroids) {
    for (const Embedding& att_c : setup.attacker_corpus->speaker_centroids) {
      if (cosine_similarity(eval_c, att_c) > 0.9999) {
        throw ProtocolError(
            "attacker training corpus shares a speaker with the evaluation corpus");
      }
    }
  }
}

AttackProvenance provenance_for(const AttackSetup& setup, AttackKind kind) {
  AttackProvenance p;
  p.kind = kind;
  p.master_seed = setup.master_seed;
  return p;
}

/// The attacker's own rendering of the evaluation enrollment utterances:
/// anonymized (speaker level within the enrollment subset) with attacker
/// seeds, then optionally pushed through the channel with attacker noise.
Corpus render_enrollment(const AttackSetup& setup, bool apply_channel_too) {
  Corpus enroll = subset_corpus(*setup.eval_corpus, enrollment_utterances(*setup.protocol));
  // strip defender embeddings; the attacker only has the original audio here
  for (UtteranceRecord& rec : enroll.utterances) {
    rec.pre_vocoder.reset();
    rec.anonymized.reset();
  }
  AnonymizerConfig anon = setup.anonymizer;
  anon.level = AnonymizationLevel::speaker;  // attack protocols anonymize per speaker
  anon.seed = derive_seed(setup.master_seed, kAnonEnroll);
  enroll = anonymize_corpus(std::move(enroll), *setup.pool, anon);
  if (apply_channel_too) {
    enroll = apply_channel_corpus(std::move(enroll), *setup.channel,
                                  derive_seed(setup.master_seed, kChannelEnroll));
  }
  return enroll;
}

/// The attacker's training corpus pushed through its own copy of the
/// pipeline: speaker-level anonymization, then the channel.
Corpus render_training(const AttackSetup& setup) {
  AnonymizerConfig anon = setup.anonymizer;
  anon.level = AnonymizationLevel::speaker;
  anon.seed = derive_seed(setup.master_seed, kAnonTrain);
  Corpus training = anonymize_corpus(*setup.attacker_corpus, *setup.pool, anon);
  return apply_channel_corpus(std::move(training), *setup.channel,
                              derive_seed(setup.master_seed, kChannelTrain));
}

EmbeddingSelector corpus_selector(const Corpus& corpus, Domain domain) {
  return [&corpus, domain](const UtteranceRecord& rec) {
    return embedding_in(corpus.utterance(rec.utt), domain);
  };
}

}  // namespace

AttackResult unprotected_reference(const AttackSetup& setup) {
  check_setup(setup);
  AttackResult result;
  result.kind = AttackKind::unprotected;
  result.provenance = provenance_for(setup, result.kind);
  result.eer = compute_eer(score_protocol(*setup.eval_corpus, *setup.protocol,
                                          domain_selector(Domain::original),
                                          domain_selector(Domain::original)));
  return result;
}

AttackResult lazy_informed(const AttackSetup& setup) {
  check_setup(setup);
  const Corpus enroll = render_enrollment(setup, /*apply_channel_too=*/true);
  AttackResult result;
  result.kind = AttackKind::lazy_informed;
  result.provenance = provenance_for(setup, result.kind);
  result.eer = compute_eer(score_protocol(*setup.eval_corpus, *setup.protocol,
                                          corpus_selector(enroll, Domain::anonymized),
                                          domain_selector(Domain::anonymized)));
  return result;
}

AttackResult semi_informed(const AttackSetup& setup, const TrainConfig& train_cfg) {
  check_setup(setup);
  const Corpus training = render_training(setup);

  Dataset data;
  data.inputs.reserve(training.utterances.size());
  data.labels.reserve(training.utterances.size());
  for (const UtteranceRecord& rec : training.utterances) {
    data.inputs.push_back(embedding_in(rec, Domain::anonymized));
    data.labels.push_back(rec.spk);
  }

  // Identity-initialized linear transform; AAM-softmax over the attacker's
  // own speaker labels re-learns discrimination in the anonymized domain.
  // Head columns start at the class prototypes so the first gradients
  // already carry speaker structure.
  const int dim = training.dim;
  MlpModel transform = MlpModel::identity(dim);
  AamHead head = AamHead::from_prototypes(data.inputs, data.labels, training.n_speakers(),
                                          train_cfg.aam_margin, train_cfg.aam_scale);
  TrainConfig cfg = train_cfg;
  cfg.shuffle_seed = derive_seed(setup.master_seed, "attack/train_shuffle/semi_informed");
  TrainResult trained = train(std::move(transform), data, LossKind::aam_softmax, cfg,
                              std::move(head));

  const Corpus enroll = render_enrollment(setup, /*apply_channel_too=*/true);
  const MlpModel& best = trained.model;
  auto transformed = [&best](const Embedding& e) { return mlp_forward(best, e); };

  AttackResult result;
  result.kind = AttackKind::semi_informed;
  result.provenance = provenance_for(setup, result.kind);
  result.history = std::move(trained.history);
  result.best_val_loss = trained.best_val_loss;
  result.eer = compute_eer(score_protocol(
      *setup.eval_corpus, *setup.protocol,
      [&enroll, &transformed](const UtteranceRecord& rec) {
        return transformed(embedding_in(enroll.utterance(rec.utt), Domain::anonymized));
      },
      [&transformed](const UtteranceRecord& rec) {
        return transformed(embedding_in(rec, Domain::anonymized));
      }));
  return result;
}

AttackResult drift_reversal(const AttackSetup& setup, const TrainConfig& train_cfg) {
  check_setup(setup);
  const Corpus training = render_training(setup);

  // pairs (anonymized -> pre_vocoder): learn to undo the channel
  Dataset data;
  data.inputs.reserve(training.utterances.size());
  data.targets.reserve(training.utterances.size());
  for (const UtteranceRecord& rec : training.utterances) {
    data.inputs.push_back(embedding_in(rec, Domain::anonymized));
    data.targets.push_back(embedding_in(rec, Domain::pre_vocoder));
  }

  const int dim = training.dim;
  const int hidden = train_cfg.hidden_width_factor * dim;
  MlpModel reversal = MlpModel::random({dim, hidden, hidden, dim},
                                       derive_seed(setup.master_seed,
                                                   "attack/mlp_init/drift_reversal"));
  TrainConfig cfg = train_cfg;
  cfg.shuffle_seed = derive_seed(setup.master_seed, "attack/train_shuffle/drift_reversal");
  TrainResult trained = train(std::move(reversal), data, LossKind::cosine, cfg);

  // Enrollment stays in the pre-vocoder domain: the attacker anonymizes the
  // original enrollment utterances itself (no channel). Trials are the
  // published anonymized embeddings mapped back by the learned inverse.
  const Corpus enroll = render_enrollment(setup, /*apply_channel_too=*/false);
  const MlpModel& best = trained.model;

  AttackResult result;
  result.kind = AttackKind::drift_reversal;
  result.provenance = provenance_for(setup, result.kind);
  result.history = std::move(trained.history);
  result.best_val_loss = trained.best_val_loss;
  result.eer = compute_eer(score_protocol(
      *setup.eval_corpus, *setup.protocol,
      [&enroll](const UtteranceRecord& rec) {
        return embedding_in(enroll.utterance(rec.utt), Domain::pre_vocoder);
      },
      [&best](const UtteranceRecord& rec) {
        return mlp_forward(best, embedding_in(rec, Domain::anonymized));
      }));
  return result;
}

}  // namespace driftlab
