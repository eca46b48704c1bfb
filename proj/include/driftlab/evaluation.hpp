// include/driftlab/evaluation.hpp

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

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "driftlab/corpus.hpp"

namespace driftlab {

// Verification-style privacy evaluation: enrollment models scored against
// trial utterances with plain cosine similarity (higher = more same-speaker),
// summarized by the equal error rate.

struct ScoreSet {
  std::vector<double> target_scores;
  std::vector<double> nontarget_scores;
};

struct EerResult {
  double eer = 0.0;        // in [0, 1]
  double threshold = 0.0;  // accept iff score >= threshold
  double far = 0.0;        // false-acceptance rate at the threshold
  double frr = 0.0;        // false-rejection rate at the threshold
  int n_target = 0;
  int n_nontarget = 0;
};

struct DriftReport {
  double mean_target = 0.0;  // cosine distance original -> pre_vocoder
  double std_target = 0.0;
  double mean_drift = 0.0;   // cosine distance pre_vocoder -> anonymized
  double std_drift = 0.0;
};

/// l2_normalize(centroid(embeddings)); the averaged claimed-speaker model.
Embedding enrollment_model(std::span<const Embedding> embeddings);

/// Which embedding each side of a trial reads; domain_selector covers the
/// three pipeline domains, attacks install custom maps.
using EmbeddingSelector = std::function<Embedding(const UtteranceRecord&)>;
EmbeddingSelector domain_selector(Domain domain);

struct ScoredTrial {
  SpeakerId enroll_spk = 0;
  UtteranceId utt = 0;
  bool is_target = false;
  double score = 0.0;
};

/// Scores every protocol trial: cosine similarity between the enrollment
/// model (built from the speaker's enrollment utterances through
/// enroll_side) and the trial utterance through trial_side.
std::vector<ScoredTrial> score_trials(const Corpus& corpus, const TrialProtocol& protocol,
                                      const EmbeddingSelector& enroll_side,
                                      const EmbeddingSelector& trial_side);

ScoreSet score_protocol(const Corpus& corpus, const TrialProtocol& protocol,
                        const EmbeddingSelector& enroll_side,
                        const EmbeddingSelector& trial_side);

ScoreSet to_score_set(const std::vector<ScoredTrial>& trials);

/// Equal error rate by the step-function crossing convention. With accept
/// iff score >= t: FRR(t) = fraction of target scores < t, FAR(t) = fraction
/// of nontarget scores >= t. t sweeps the sorted multiset of all scores plus
/// +infinity; the reported operating point minimizes |FRR - FAR| (ties go to
/// the smaller t) and EER = (FAR + FRR) / 2 there.
EerResult compute_eer(const ScoreSet& scores);

/// Mean/std (population) of target distance and drift over all utterances;
/// requires all three domains populated.
DriftReport drift_target_stats(const Corpus& corpus);

struct LabeledEmbedding {
  Embedding vec;
  std::string domain;
  SpeakerId spk = 0;
};

struct ProjectedPoint {
  double x = 0.0;
  double y = 0.0;
  std::string domain;
  SpeakerId spk = 0;
};

/// Mean-centered projection onto the top-2 principal components of the
/// pooled covariance (eigendecomposition, components sign-fixed so that each
/// one's largest-magnitude coordinate is positive). Fewer than 2 nonzero
/// eigenvalues degrade gracefully to an explicit zero axis.
std::vector<ProjectedPoint> project_2d(const std::vector<LabeledEmbedding>& points);

// Fixed CSV schemas for the experiment artifacts.
std::string scores_to_csv(const std::vector<ScoredTrial>& trials);
std::string drift_report_to_csv(const DriftReport& report);

struct EerTableRow {
  std::string label;  // domain or attack name
  EerResult result;
};
std::string eer_table_to_csv(const std::vector<EerTableRow>& rows);
std::string projection_to_csv(const std::vector<ProjectedPoint>& points);

/// Parses a scores.csv payload back into scored trials (for the standalone
/// EER subcommand).
std::vector<ScoredTrial> scores_from_csv(const std::string& text);

}  // namespace driftlab
