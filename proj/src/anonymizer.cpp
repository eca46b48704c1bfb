// src/anonymizer.cpp

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

#include "driftlab/anonymizer.hpp"

#include <algorithm>
#include <numeric>

namespace driftlab {

void AnonymizerConfig::validate(int pool_size) const {
  if (passthrough) return;
  if (sample_size < 1) throw ConfigError("anonymizer.k_star must be >= 1");
  if (sample_size > top_k) {
    throw ConfigError("anonymizer.k_star (" + std::to_string(sample_size) +
                      ") must not exceed anonymizer.k (" + std::to_string(top_k) + ")");
  }
  if (top_k > pool_size) {
    throw ConfigError("anonymizer.k (" + std::to_string(top_k) +
                      ") exceeds the pool size (" + std::to_string(pool_size) + ")");
  }
}

Embedding pool_anonymize(const Embedding& input, const Pool& pool,
                         const AnonymizerConfig& cfg, Rng& rng) {
  if (cfg.passthrough) return input;
  cfg.validate(pool.size());
  if (!(input.norm() > 0.0)) throw DomainError("pool_anonymize: input has zero norm");
  if (pool.dim != input.size()) {
    throw DomainError("pool_anonymize: input dimension " + std::to_string(input.size()) +
                      " does not match pool dimension " + std::to_string(pool.dim));
  }

  const int pool_size = pool.size();
  std::vector<double> distance(static_cast<std::size_t>(pool_size));
  for (int p = 0; p < pool_size; ++p) {
    distance[static_cast<std::size_t>(p)] =
        cosine_distance(input, pool.vectors[static_cast<std::size_t>(p)]);
  }

  // farthest top_k, ties broken by ascending pool index
  std::vector<int> order(static_cast<std::size_t>(pool_size));
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + cfg.top_k, order.end(),
                    [&distance](int a, int b) {
                      const double da = distance[static_cast<std::size_t>(a)];
                      const double db = distance[static_cast<std::size_t>(b)];
                      if (da != db) return da > db;
                      return a < b;
                    });
  order.resize(static_cast<std::size_t>(cfg.top_k));

  // sample_size of them, uniformly without replacement (partial Fisher-Yates)
  for (int i = 0; i < cfg.sample_size; ++i) {
    const auto j = static_cast<std::size_t>(i) +
                   rng.next_below(static_cast<std::uint64_t>(cfg.top_k - i));
    std::swap(order[static_cast<std::size_t>(i)], order[j]);
  }

  Embedding mean = Embedding::Zero(input.size());
  for (int i = 0; i < cfg.sample_size; ++i) {
    mean += pool.vectors[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
  }
  mean /= static_cast<double>(cfg.sample_size);

  if (!(mean.norm() > 0.0)) {
    throw DomainError("pool_anonymize: averaged pseudo-speaker vector has zero norm");
  }
  return cfg.renormalize ? Embedding(l2_normalize(mean)) : mean;
}

Corpus anonymize_corpus(Corpus corpus, const Pool& pool, const AnonymizerConfig& cfg) {
  if (cfg.passthrough) {
    for (UtteranceRecord& rec : corpus.utterances) rec.pre_vocoder = rec.original;
    return corpus;
  }
  cfg.validate(pool.size());

  if (cfg.level == AnonymizationLevel::utterance) {
    for (UtteranceRecord& rec : corpus.utterances) {
      Rng rng(derive_seed(cfg.seed, "anonymize/utt", static_cast<std::uint64_t>(rec.utt)));
      rec.pre_vocoder = pool_anonymize(rec.original, pool, cfg, rng);
    }
    return corpus;
  }

  // speaker level: one pseudo-speaker per speaker, from the normalized
  // centroid of that speaker's original embeddings
  std::map<SpeakerId, std::vector<Embedding>> by_speaker;
  for (const UtteranceRecord& rec : corpus.utterances) {
    by_speaker[rec.spk].push_back(rec.original);
  }
  std::map<SpeakerId, Embedding> pseudo;
  for (const auto& [spk, embeddings] : by_speaker) {
    const Embedding representative = l2_normalize(centroid(embeddings));
    Rng rng(derive_seed(cfg.seed, "anonymize/spk", static_cast<std::uint64_t>(spk)));
    pseudo.emplace(spk, pool_anonymize(representative, pool, cfg, rng));
  }
  for (UtteranceRecord& rec : corpus.utterances) {
    rec.pre_vocoder = pseudo.at(rec.spk);
  }
  return corpus;
}

}  // namespace driftlab
