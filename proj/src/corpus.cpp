// src/corpus.cpp

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

#include "driftlab/corpus.hpp"

#include <algorithm>
#include <set>

#include "driftlab/rng.hpp"

namespace driftlab {

const char* domain_name(Domain d) {
  switch (d) {
    case Domain::original: return "original";
    case Domain::pre_vocoder: return "pre_vocoder";
    case Domain::anonymized: return "anonymized";
  }
  return "?";
}

void CorpusConfig::validate() const {
  if (n_speakers < 2) throw ConfigError("corpus.n_speakers must be >= 2");
  if (utts_per_speaker < 2) throw ConfigError("corpus.utts_per_speaker must be >= 2");
  if (dim < 2) throw ConfigError("corpus.dim must be >= 2");
  if (!(within_speaker_sigma >= 0.0)) {
    throw ConfigError("corpus.within_speaker_sigma must be >= 0");
  }
}

const Embedding& embedding_in(const UtteranceRecord& rec, Domain domain) {
  switch (domain) {
    case Domain::original:
      return rec.original;
    case Domain::pre_vocoder:
      if (!rec.pre_vocoder) {
        throw ProtocolError("utterance " + std::to_string(rec.utt) +
                            " has no pre_vocoder embedding");
      }
      return *rec.pre_vocoder;
    case Domain::anonymized:
      if (!rec.anonymized) {
        throw ProtocolError("utterance " + std::to_string(rec.utt) +
                            " has no anonymized embedding");
      }
      return *rec.anonymized;
  }
  throw ProtocolError("unknown domain");
}

const UtteranceRecord& Corpus::utterance(UtteranceId utt) const {
  // Utterance ids are kept sorted; contiguous corpora hit the fast path.
  const auto idx = static_cast<std::size_t>(utt);
  if (idx < utterances.size() && utterances[idx].utt == utt) return utterances[idx];
  const auto it = std::lower_bound(
      utterances.begin(), utterances.end(), utt,
      [](const UtteranceRecord& rec, UtteranceId id) { return rec.utt < id; });
  if (it == utterances.end() || it->utt != utt) {
    throw ProtocolError("unknown utterance id " + std::to_string(utt));
  }
  return *it;
}

UtteranceRecord& Corpus::utterance(UtteranceId utt) {
  return const_cast<UtteranceRecord&>(std::as_const(*this).utterance(utt));
}

std::vector<UtteranceId> Corpus::utterances_of(SpeakerId spk) const {
  std::vector<UtteranceId> ids;
  for (const UtteranceRecord& rec : utterances) {
    if (rec.spk == spk) ids.push_back(rec.utt);
  }
  return ids;
}

int TrialProtocol::n_target_trials() const {
  return static_cast<int>(
      std::count_if(trials.begin(), trials.end(), [](const Trial& t) { return t.is_target; }));
}

int TrialProtocol::n_nontarget_trials() const {
  return static_cast<int>(trials.size()) - n_target_trials();
}

Corpus generate_corpus(const CorpusConfig& cfg) {
  cfg.validate();
  Corpus corpus;
  corpus.dim = cfg.dim;

  Rng centroid_rng(derive_seed(cfg.seed, "corpus/centroids"));
  corpus.speaker_centroids.reserve(static_cast<std::size_t>(cfg.n_speakers));
  for (int s = 0; s < cfg.n_speakers; ++s) {
    corpus.speaker_centroids.push_back(unit_sphere_vector(centroid_rng, cfg.dim));
  }

  corpus.utterances.reserve(
      static_cast<std::size_t>(cfg.n_speakers) * static_cast<std::size_t>(cfg.utts_per_speaker));
  UtteranceId next_utt = 0;
  for (int s = 0; s < cfg.n_speakers; ++s) {
    Rng noise_rng(derive_seed(cfg.seed, "corpus/utt_noise", static_cast<std::uint64_t>(s)));
    const Embedding& center = corpus.speaker_centroids[static_cast<std::size_t>(s)];
    for (int u = 0; u < cfg.utts_per_speaker; ++u) {
      UtteranceRecord rec;
      rec.utt = next_utt++;
      rec.spk = static_cast<SpeakerId>(s);
      if (cfg.within_speaker_sigma == 0.0) {
        rec.original = center;  // exact copy; no rng consumed
      } else {
        rec.original = l2_normalize(
            center + cfg.within_speaker_sigma * gaussian_vector(noise_rng, cfg.dim));
      }
      corpus.utterances.push_back(std::move(rec));
    }
  }
  return corpus;
}

Pool generate_pool(int size, int dim, std::uint64_t seed) {
  if (size < 1) throw ConfigError("pool.size must be >= 1");
  if (dim < 2) throw ConfigError("pool dim must be >= 2");
  Pool pool;
  pool.dim = dim;
  Rng rng(derive_seed(seed, "pool"));
  pool.vectors.reserve(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) pool.vectors.push_back(unit_sphere_vector(rng, dim));
  return pool;
}

TrialProtocol build_protocol(const Corpus& corpus, int enroll_per_spk,
                             int nontarget_per_trial_spk, std::uint64_t seed) {
  const int n_speakers = corpus.n_speakers();
  if (enroll_per_spk < 1) throw ConfigError("protocol.enroll_per_speaker must be >= 1");
  if (nontarget_per_trial_spk < 1) {
    throw ConfigError("protocol.nontarget_per_trial must be >= 1");
  }
  if (nontarget_per_trial_spk > n_speakers - 1) {
    throw ConfigError("protocol.nontarget_per_trial exceeds the number of other speakers");
  }

  TrialProtocol protocol;
  Rng rng(derive_seed(seed, "protocol"));
  for (SpeakerId spk = 0; spk < n_speakers; ++spk) {
    const std::vector<UtteranceId> utts = corpus.utterances_of(spk);
    if (static_cast<int>(utts.size()) <= enroll_per_spk) {
      throw ConfigError("protocol.enroll_per_speaker leaves no trial utterances for speaker " +
                        std::to_string(spk));
    }
    protocol.enroll_map[spk] =
        std::vector<UtteranceId>(utts.begin(), utts.begin() + enroll_per_spk);

    std::vector<SpeakerId> others;
    others.reserve(static_cast<std::size_t>(n_speakers - 1));
    for (SpeakerId s = 0; s < n_speakers; ++s) {
      if (s != spk) others.push_back(s);
    }

    for (std::size_t i = static_cast<std::size_t>(enroll_per_spk); i < utts.size(); ++i) {
      const UtteranceId trial_utt = utts[i];
      protocol.trials.push_back({spk, trial_utt, true});
      // partial Fisher-Yates over the ascending other-speaker list
      std::vector<SpeakerId> pick = others;
      for (int k = 0; k < nontarget_per_trial_spk; ++k) {
        const auto j = static_cast<std::size_t>(k) +
                       rng.next_below(pick.size() - static_cast<std::size_t>(k));
        std::swap(pick[static_cast<std::size_t>(k)], pick[j]);
        protocol.trials.push_back({pick[static_cast<std::size_t>(k)], trial_utt, false});
      }
    }
  }
  return protocol;
}

Corpus subset_corpus(const Corpus& corpus, const std::vector<UtteranceId>& utts) {
  Corpus sub;
  sub.dim = corpus.dim;
  sub.speaker_centroids = corpus.speaker_centroids;
  sub.utterances.reserve(utts.size());
  for (UtteranceId utt : utts) sub.utterances.push_back(corpus.utterance(utt));
  std::sort(sub.utterances.begin(), sub.utterances.end(),
            [](const UtteranceRecord& a, const UtteranceRecord& b) { return a.utt < b.utt; });
  return sub;
}

void merge_domains(Corpus& corpus, const Corpus& part) {
  for (const UtteranceRecord& rec : part.utterances) {
    UtteranceRecord& dst = corpus.utterance(rec.utt);
    if (rec.pre_vocoder) dst.pre_vocoder = rec.pre_vocoder;
    if (rec.anonymized) dst.anonymized = rec.anonymized;
  }
}

std::vector<UtteranceId> enrollment_utterances(const TrialProtocol& protocol) {
  std::vector<UtteranceId> ids;
  for (const auto& [spk, utts] : protocol.enroll_map) {
    ids.insert(ids.end(), utts.begin(), utts.end());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<UtteranceId> trial_utterances(const TrialProtocol& protocol) {
  std::set<UtteranceId> ids;
  for (const TrialProtocol::Trial& t : protocol.trials) ids.insert(t.utt);
  return std::vector<UtteranceId>(ids.begin(), ids.end());
}

}  // namespace driftlab
