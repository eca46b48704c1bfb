// src/evaluation.cpp

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

#include "driftlab/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "driftlab/io.hpp"

namespace driftlab {

Embedding enrollment_model(std::span<const Embedding> embeddings) {
  const Embedding mean = centroid(embeddings);
  if (!(mean.norm() > 0.0)) {
    throw DomainError("enrollment_model: averaged embedding has zero norm");
  }
  return l2_normalize(mean);
}

EmbeddingSelector domain_selector(Domain domain) {
  return [domain](const UtteranceRecord& rec) { return embedding_in(rec, domain); };
}

std::vector<ScoredTrial> score_trials(const Corpus& corpus, const TrialProtocol& protocol,
                                      const EmbeddingSelector& enroll_side,
                                      const EmbeddingSelector& trial_side) {
  std::map<SpeakerId, Embedding> models;
  for (const auto& [spk, utts] : protocol.enroll_map) {
    std::vector<Embedding> embeddings;
    embeddings.reserve(utts.size());
    for (UtteranceId utt : utts) embeddings.push_back(enroll_side(corpus.utterance(utt)));
    models.emplace(spk, enrollment_model(embeddings));
  }

  std::vector<ScoredTrial> scored;
  scored.reserve(protocol.trials.size());
  for (const TrialProtocol::Trial& trial : protocol.trials) {
    const auto it = models.find(trial.enroll_spk);
    if (it == models.end()) {
      throw ProtocolError("trial references speaker " + std::to_string(trial.enroll_spk) +
                          " with no enrollment utterances");
    }
    const Embedding trial_emb = trial_side(corpus.utterance(trial.utt));
    scored.push_back(
        {trial.enroll_spk, trial.utt, trial.is_target, cosine_similarity(it->second, trial_emb)});
  }
  return scored;
}

ScoreSet to_score_set(const std::vector<ScoredTrial>& trials) {
  ScoreSet set;
  for (const ScoredTrial& t : trials) {
    (t.is_target ? set.target_scores : set.nontarget_scores).push_back(t.score);
  }
  return set;
}

ScoreSet score_protocol(const Corpus& corpus, const TrialProtocol& protocol,
                        const EmbeddingSelector& enroll_side,
                        const EmbeddingSelector& trial_side) {
  return to_score_set(score_trials(corpus, protocol, enroll_side, trial_side));
}

EerResult compute_eer(const ScoreSet& scores) {
  if (scores.target_scores.empty()) throw DomainError("compute_eer: no target scores");
  if (scores.nontarget_scores.empty()) throw DomainError("compute_eer: no nontarget scores");

  std::vector<double> targets = scores.target_scores;
  std::vector<double> nontargets = scores.nontarget_scores;
  std::sort(targets.begin(), targets.end());
  std::sort(nontargets.begin(), nontargets.end());
  const double n_t = static_cast<double>(targets.size());
  const double n_n = static_cast<double>(nontargets.size());

  // candidate thresholds: every distinct score, plus +inf (reject-all)
  std::vector<double> candidates;
  candidates.reserve(targets.size() + nontargets.size() + 1);
  std::merge(targets.begin(), targets.end(), nontargets.begin(), nontargets.end(),
             std::back_inserter(candidates));
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  candidates.push_back(std::numeric_limits<double>::infinity());

  EerResult best;
  best.n_target = static_cast<int>(targets.size());
  best.n_nontarget = static_cast<int>(nontargets.size());
  double best_gap = std::numeric_limits<double>::infinity();
  for (const double t : candidates) {
    // accept iff score >= t: FRR = P(target < t), FAR = P(nontarget >= t)
    const double frr = std::isinf(t)
                           ? 1.0
                           : static_cast<double>(std::lower_bound(targets.begin(), targets.end(),
                                                                  t) -
                                                 targets.begin()) /
                                 n_t;
    const double far =
        std::isinf(t)
            ? 0.0
            : static_cast<double>(nontargets.end() - std::lower_bound(nontargets.begin(),
                                                                      nontargets.end(), t)) /
                  n_n;
    const double gap = std::abs(frr - far);
    if (gap < best_gap) {  // ties keep the smaller threshold
      best_gap = gap;
      best.threshold = t;
      best.far = far;
      best.frr = frr;
    }
  }
  best.eer = 0.5 * (best.far + best.frr);
  return best;
}

DriftReport drift_target_stats(const Corpus& corpus) {
  if (corpus.utterances.empty()) throw ProtocolError("drift_target_stats: empty corpus");
  std::vector<double> target_d, drift_d;
  target_d.reserve(corpus.utterances.size());
  drift_d.reserve(corpus.utterances.size());
  for (const UtteranceRecord& rec : corpus.utterances) {
    const Embedding& pre = embedding_in(rec, Domain::pre_vocoder);
    const Embedding& post = embedding_in(rec, Domain::anonymized);
    target_d.push_back(cosine_distance(rec.original, pre));
    drift_d.push_back(cosine_distance(pre, post));
  }
  auto mean_of = [](const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
  };
  auto std_of = [](const std::vector<double>& xs, double mean) {
    double s = 0.0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(xs.size()));  // population std
  };
  DriftReport report;
  report.mean_target = mean_of(target_d);
  report.std_target = std_of(target_d, report.mean_target);
  report.mean_drift = mean_of(drift_d);
  report.std_drift = std_of(drift_d, report.mean_drift);
  return report;
}

std::vector<ProjectedPoint> project_2d(const std::vector<LabeledEmbedding>& points) {
  if (points.size() < 3) throw DomainError("project_2d: need at least 3 points");
  const Eigen::Index dim = points.front().vec.size();
  if (dim < 2) throw DomainError("project_2d: dimension must be >= 2");
  for (const LabeledEmbedding& p : points) {
    if (p.vec.size() != dim) throw DomainError("project_2d: inconsistent dimensions");
  }

  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd data(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.row(i) = points[static_cast<std::size_t>(i)].vec.transpose();
  }
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw DomainError("project_2d: eigensolver failed");
  const Eigen::VectorXd eigenvalues = solver.eigenvalues();  // ascending
  const double max_eig = eigenvalues(dim - 1);
  const double tol = 1e-12 * std::max(1.0, max_eig);

  // components in descending eigenvalue order, zeroed below the rank
  auto component = [&](int rank_from_top) -> Eigen::VectorXd {
    const Eigen::Index idx = dim - 1 - rank_from_top;
    if (eigenvalues(idx) <= tol) return Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd v = solver.eigenvectors().col(idx);
    // sign convention: the largest-magnitude coordinate is positive
    Eigen::Index max_coord = 0;
    v.cwiseAbs().maxCoeff(&max_coord);
    if (v(max_coord) < 0.0) v = -v;
    return v;
  };
  const Eigen::VectorXd pc1 = component(0);
  const Eigen::VectorXd pc2 = component(1);

  std::vector<ProjectedPoint> out;
  out.reserve(points.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    ProjectedPoint p;
    p.x = centered.row(i).dot(pc1);
    p.y = centered.row(i).dot(pc2);
    p.domain = points[iu].domain;
    p.spk = points[iu].spk;
    out.push_back(std::move(p));
  }
  return out;
}

std::string scores_to_csv(const std::vector<ScoredTrial>& trials) {
  std::string out = "enroll_spk,utt,is_target,score\n";
  for (const ScoredTrial& t : trials) {
    out += std::to_string(t.enroll_spk);
    out += ",";
    out += std::to_string(t.utt);
    out += ",";
    out += t.is_target ? "1" : "0";
    out += ",";
    out += format_double(t.score);
    out += "\n";
  }
  return out;
}

std::vector<ScoredTrial> scores_from_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ProtocolError("scores_from_csv: empty input");
  std::vector<ScoredTrial> trials;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto fields = split_csv_line(lines[li]);
    if (fields.size() != 4) {
      throw ProtocolError("scores_from_csv: expected 4 fields at line " + std::to_string(li + 1));
    }
    ScoredTrial t;
    t.enroll_spk = static_cast<SpeakerId>(parse_long(fields[0]));
    t.utt = static_cast<UtteranceId>(parse_long(fields[1]));
    const long flag = parse_long(fields[2]);
    if (flag != 0 && flag != 1) {
      throw ProtocolError("scores_from_csv: is_target must be 0 or 1 at line " +
                          std::to_string(li + 1));
    }
    t.is_target = flag == 1;
    t.score = parse_double(fields[3]);
    trials.push_back(t);
  }
  return trials;
}

std::string drift_report_to_csv(const DriftReport& report) {
  std::string out = "mean_target,std_target,mean_drift,std_drift\n";
  out += format_double(report.mean_target);
  out += ",";
  out += format_double(report.std_target);
  out += ",";
  out += format_double(report.mean_drift);
  out += ",";
  out += format_double(report.std_drift);
  out += "\n";
  return out;
}

std::string eer_table_to_csv(const std::vector<EerTableRow>& rows) {
  std::string out = "label,eer_percent,threshold,n_target,n_nontarget\n";
  for (const EerTableRow& row : rows) {
    out += row.label;
    out += ",";
    out += format_double(100.0 * row.result.eer);
    out += ",";
    out += format_double(row.result.threshold);
    out += ",";
    out += std::to_string(row.result.n_target);
    out += ",";
    out += std::to_string(row.result.n_nontarget);
    out += "\n";
  }
  return out;
}

std::string projection_to_csv(const std::vector<ProjectedPoint>& points) {
  std::string out = "x,y,domain,speaker\n";
  for (const ProjectedPoint& p : points) {
    out += format_double(p.x);
    out += ",";
    out += format_double(p.y);
    out += ",";
    out += p.domain;
    out += ",";
    out += std::to_string(p.spk);
    out += "\n";
  }
  return out;
}

}  // namespace driftlab
