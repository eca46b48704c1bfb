// tests/test_evaluation.cpp

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

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "driftlab/evaluation.hpp"
#include "driftlab/rng.hpp"

using namespace driftlab;

namespace {

Embedding vec2(double x, double y) {
  Embedding v(2);
  v << x, y;
  return v;
}

// Independent EER reference: direct counting at every score, every midpoint
// between adjacent distinct scores, and +inf, with the same crossing
// convention (min |FRR-FAR|, ties to the smaller threshold).
EerResult oracle_eer(const ScoreSet& scores) {
  std::vector<double> all = scores.target_scores;
  all.insert(all.end(), scores.nontarget_scores.begin(), scores.nontarget_scores.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<double> candidates = all;
  for (std::size_t i = 0; i + 1 < all.size(); ++i) {
    candidates.push_back(0.5 * (all[i] + all[i + 1]));
  }
  candidates.push_back(std::numeric_limits<double>::infinity());
  std::sort(candidates.begin(), candidates.end());

  EerResult best;
  best.n_target = static_cast<int>(scores.target_scores.size());
  best.n_nontarget = static_cast<int>(scores.nontarget_scores.size());
  double best_gap = std::numeric_limits<double>::infinity();
  for (const double t : candidates) {
    long frr_count = 0;
    for (double s : scores.target_scores) {
      if (s < t) ++frr_count;
    }
    long far_count = 0;
    for (double s : scores.nontarget_scores) {
      if (s >= t) ++far_count;
    }
    const double frr = static_cast<double>(frr_count) / best.n_target;
    const double far = static_cast<double>(far_count) / best.n_nontarget;
    if (std::abs(frr - far) < best_gap) {
      best_gap = std::abs(frr - far);
      best.threshold = t;
      best.far = far;
      best.frr = frr;
    }
  }
  best.eer = 0.5 * (best.far + best.frr);
  return best;
}

}  // namespace

TEST_CASE("enrollment model averages and normalizes") {
  const std::vector<Embedding> pair = {vec2(1, 0), vec2(0, 1)};
  const Embedding m = enrollment_model(pair);
  CHECK(m(0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(m(1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

  const std::vector<Embedding> single = {vec2(3, 4)};
  CHECK((enrollment_model(single) - vec2(0.6, 0.8)).cwiseAbs().maxCoeff() < 1e-15);

  const std::vector<Embedding> same = {vec2(0, 1), vec2(0, 1)};
  CHECK((enrollment_model(same) - vec2(0, 1)).cwiseAbs().maxCoeff() == 0.0);

  const std::vector<Embedding> anti = {vec2(1, 0), vec2(-1, 0)};
  CHECK_THROWS_AS(enrollment_model(anti), DomainError);
}

TEST_CASE("perfect and degenerate separations") {
  ScoreSet separated;
  separated.target_scores = {0.9, 0.8, 0.95};
  separated.nontarget_scores = {0.1, 0.2, 0.3, 0.4};
  CHECK(compute_eer(separated).eer == 0.0);

  ScoreSet chance;
  chance.target_scores = {0.1, 0.5, 0.9};
  chance.nontarget_scores = {0.1, 0.5, 0.9};
  CHECK(compute_eer(chance).eer == doctest::Approx(0.5));
}

TEST_CASE("worked three-by-three example crosses at 0.75") {
  ScoreSet scores;
  scores.target_scores = {0.9, 0.8, 0.7};
  scores.nontarget_scores = {0.75, 0.2, 0.1};
  const EerResult result = compute_eer(scores);
  CHECK(result.eer == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(result.threshold == doctest::Approx(0.75));
  CHECK(result.far == doctest::Approx(1.0 / 3.0));
  CHECK(result.frr == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("eer matches the brute-force oracle on randomized score sets") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    ScoreSet scores;
    const int n_t = 1 + static_cast<int>(rng.next_below(1000));
    const int n_n = 1 + static_cast<int>(rng.next_below(1000));
    const bool quantize = rng.next_below(2) == 0;  // force ties half the time
    for (int i = 0; i < n_t; ++i) {
      double s = 2.0 * rng.next_unit() - 0.5;
      if (quantize) s = std::round(s * 8.0) / 8.0;
      scores.target_scores.push_back(s);
    }
    for (int i = 0; i < n_n; ++i) {
      double s = 1.5 * rng.next_unit() - 0.75;
      if (quantize) s = std::round(s * 8.0) / 8.0;
      scores.nontarget_scores.push_back(s);
    }
    const EerResult fast = compute_eer(scores);
    const EerResult slow = oracle_eer(scores);
    CHECK(fast.eer == slow.eer);
    // the reported operating point achieves the same gap as the oracle's
    CHECK(std::abs(fast.frr - fast.far) == doctest::Approx(std::abs(slow.frr - slow.far)));
  }
}

TEST_CASE("eer is invariant under strictly increasing score transformations") {
  Rng rng(77);
  ScoreSet scores;
  for (int i = 0; i < 150; ++i) scores.target_scores.push_back(rng.next_unit() * 0.8 + 0.1);
  for (int i = 0; i < 400; ++i) scores.nontarget_scores.push_back(rng.next_unit() * 0.8);
  const double base = compute_eer(scores).eer;

  auto transformed = [&scores](auto&& f) {
    ScoreSet out;
    for (double s : scores.target_scores) out.target_scores.push_back(f(s));
    for (double s : scores.nontarget_scores) out.nontarget_scores.push_back(f(s));
    return out;
  };
  CHECK(compute_eer(transformed([](double s) { return 3.0 * s - 7.0; })).eer == base);
  CHECK(compute_eer(transformed([](double s) { return std::exp(s); })).eer == base);
  CHECK(compute_eer(transformed([](double s) { return std::atan(4.0 * s); })).eer == base);
}

TEST_CASE("eer resolution bound holds for tie-free scores") {
  Rng rng(88);
  for (int trial = 0; trial < 30; ++trial) {
    ScoreSet scores;
    const int n_t = 2 + static_cast<int>(rng.next_below(50));
    const int n_n = 2 + static_cast<int>(rng.next_below(200));
    for (int i = 0; i < n_t; ++i) scores.target_scores.push_back(rng.next_unit());
    for (int i = 0; i < n_n; ++i) scores.nontarget_scores.push_back(rng.next_unit());
    const EerResult result = compute_eer(scores);
    CHECK(std::abs(result.far - result.frr) <=
          1.0 / std::min(result.n_target, result.n_nontarget) + 1e-12);
  }
}

TEST_CASE("eer rejects empty classes") {
  ScoreSet scores;
  scores.target_scores = {0.5};
  CHECK_THROWS_AS(compute_eer(scores), DomainError);
}

TEST_CASE("two-speaker hand corpus scores match direct computation") {
  auto unit = [](double deg) {
    const double rad = deg * std::numbers::pi / 180.0;
    return vec2(std::cos(rad), std::sin(rad));
  };
  Corpus corpus;
  corpus.dim = 2;
  corpus.speaker_centroids = {unit(0), unit(90)};
  corpus.utterances.push_back({0, 0, unit(0), std::nullopt, std::nullopt});    // enroll spk 0
  corpus.utterances.push_back({1, 0, unit(10), std::nullopt, std::nullopt});   // trial
  corpus.utterances.push_back({2, 1, unit(90), std::nullopt, std::nullopt});   // enroll spk 1
  corpus.utterances.push_back({3, 1, unit(80), std::nullopt, std::nullopt});   // trial

  TrialProtocol protocol;
  protocol.enroll_map[0] = {0};
  protocol.enroll_map[1] = {2};
  protocol.trials = {{0, 1, true}, {1, 1, false}, {1, 3, true}, {0, 3, false}};

  const auto trials = score_trials(corpus, protocol, domain_selector(Domain::original),
                                   domain_selector(Domain::original));
  REQUIRE(trials.size() == 4);
  CHECK(trials[0].score == doctest::Approx(std::cos(10.0 * std::numbers::pi / 180.0)));
  CHECK(trials[1].score == doctest::Approx(std::cos(80.0 * std::numbers::pi / 180.0)));
  CHECK(trials[2].score == doctest::Approx(std::cos(10.0 * std::numbers::pi / 180.0)));
  CHECK(trials[3].score == doctest::Approx(std::cos(80.0 * std::numbers::pi / 180.0)));

  // trial embedding equal to the enrollment model scores exactly 1
  const auto self = score_trials(
      corpus, protocol, domain_selector(Domain::original),
      [&corpus](const UtteranceRecord& rec) {
        return corpus.utterance(rec.utt).spk == 0 ? corpus.utterance(0).original
                                                  : corpus.utterance(2).original;
      });
  CHECK(self[0].score == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(self[2].score == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("missing embeddings are reported by utterance") {
  Corpus corpus;
  corpus.dim = 2;
  corpus.speaker_centroids = {vec2(1, 0)};
  corpus.utterances.push_back({0, 0, vec2(1, 0), std::nullopt, std::nullopt});
  corpus.utterances.push_back({1, 0, vec2(0, 1), std::nullopt, std::nullopt});
  TrialProtocol protocol;
  protocol.enroll_map[0] = {0};
  protocol.trials = {{0, 1, true}};
  CHECK_THROWS_AS(score_trials(corpus, protocol, domain_selector(Domain::pre_vocoder),
                               domain_selector(Domain::pre_vocoder)),
                  ProtocolError);
}

TEST_CASE("drift and target statistics on a three-utterance hand corpus") {
  Corpus corpus;
  corpus.dim = 2;
  corpus.speaker_centroids = {vec2(1, 0)};
  auto unit = [](double deg) {
    const double rad = deg * std::numbers::pi / 180.0;
    return vec2(std::cos(rad), std::sin(rad));
  };
  // target distances: 1 - cos(90), 1 - cos(120), 1 - cos(180) = 1, 1.5, 2
  // drift distances:  1 - cos(0),  1 - cos(60),  1 - cos(90)  = 0, 0.5, 1
  corpus.utterances.push_back({0, 0, unit(0), unit(90), unit(90)});
  corpus.utterances.push_back({1, 0, unit(0), unit(120), unit(180)});
  corpus.utterances.push_back({2, 0, unit(0), unit(180), unit(270)});
  const DriftReport report = drift_target_stats(corpus);
  CHECK(report.mean_target == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(report.std_target == doctest::Approx(std::sqrt((0.25 + 0.0 + 0.25) / 3.0)).epsilon(1e-9));
  CHECK(report.mean_drift == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(report.std_drift == doctest::Approx(std::sqrt((0.25 + 0.0 + 0.25) / 3.0)).epsilon(1e-9));
}

TEST_CASE("identity channel means zero drift in the report") {
  Corpus corpus;
  corpus.dim = 2;
  corpus.speaker_centroids = {vec2(1, 0)};
  corpus.utterances.push_back({0, 0, vec2(1, 0), vec2(0, 1), vec2(0, 1)});
  corpus.utterances.push_back({1, 0, vec2(1, 0), vec2(-1, 0), vec2(-1, 0)});
  const DriftReport report = drift_target_stats(corpus);
  CHECK(report.mean_drift < 1e-12);
  CHECK(report.std_drift < 1e-12);

  // no-op anonymization means zero target displacement
  Corpus noop;
  noop.dim = 2;
  noop.speaker_centroids = {vec2(1, 0)};
  noop.utterances.push_back({0, 0, vec2(1, 0), vec2(1, 0), vec2(0, 1)});
  CHECK(drift_target_stats(noop).mean_target < 1e-12);
}

TEST_CASE("projection reproduces a hand-computed rank-2 configuration") {
  // four points in R^3 with covariance diag(2, 0.5, 0)
  std::vector<LabeledEmbedding> points;
  Embedding p(3);
  p << 2, 0, 0;
  points.push_back({p, "a", 0});
  p << -2, 0, 0;
  points.push_back({p, "a", 1});
  p << 0, 1, 0;
  points.push_back({p, "b", 0});
  p << 0, -1, 0;
  points.push_back({p, "b", 1});
  const auto projected = project_2d(points);
  REQUIRE(projected.size() == 4);
  CHECK(projected[0].x == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(projected[0].y == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(projected[1].x == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(projected[2].y == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(projected[3].y == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(projected[2].domain == "b");
  CHECK(projected[3].spk == 1);
}

TEST_CASE("projection of plane-embedded points preserves pairwise distances") {
  Rng rng(303);
  std::vector<LabeledEmbedding> points;
  std::vector<std::pair<double, double>> plane;
  for (int i = 0; i < 25; ++i) {
    const double a = 3.0 * rng.next_gaussian();
    const double b = 1.5 * rng.next_gaussian();
    Embedding v = Embedding::Zero(16);
    v(3) = a;  // the data live in coordinates 3 and 7
    v(7) = b;
    plane.emplace_back(a, b);
    points.push_back({v, "o", static_cast<SpeakerId>(i)});
  }
  const auto projected = project_2d(points);
  for (std::size_t i = 0; i < plane.size(); ++i) {
    for (std::size_t j = i + 1; j < plane.size(); ++j) {
      const double din = std::hypot(plane[i].first - plane[j].first,
                                    plane[i].second - plane[j].second);
      const double dout = std::hypot(projected[i].x - projected[j].x,
                                     projected[i].y - projected[j].y);
      CHECK(std::abs(din - dout) < 1e-9);
    }
  }
}

TEST_CASE("degenerate projections collapse gracefully") {
  // all points identical -> both axes zero
  std::vector<LabeledEmbedding> same(5, {Embedding::Ones(4), "o", 0});
  for (const auto& p : project_2d(same)) {
    CHECK(p.x == 0.0);
    CHECK(p.y == 0.0);
  }

  // collinear points -> second axis explicitly zero
  std::vector<LabeledEmbedding> line;
  for (int i = 0; i < 5; ++i) {
    Embedding v = Embedding::Zero(4);
    v(1) = static_cast<double>(i);
    line.push_back({v, "o", static_cast<SpeakerId>(i)});
  }
  bool nonzero_x = false;
  for (const auto& p : project_2d(line)) {
    nonzero_x = nonzero_x || std::abs(p.x) > 0.1;
    CHECK(p.y == 0.0);
  }
  CHECK(nonzero_x);

  CHECK_THROWS_AS(project_2d({same[0], same[1]}), DomainError);
}

TEST_CASE("csv schemas carry the documented headers") {
  const std::vector<ScoredTrial> trials = {{1, 2, true, 0.25}, {3, 4, false, -0.5}};
  const std::string scores = scores_to_csv(trials);
  CHECK(scores ==
        "enroll_spk,utt,is_target,score\n1,2,1,0.25\n3,4,0,-0.5\n");
  const auto parsed = scores_from_csv(scores);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].score == 0.25);
  CHECK(parsed[1].is_target == false);

  DriftReport report{1.5, 0.25, 0.5, 0.125};
  CHECK(drift_report_to_csv(report) ==
        "mean_target,std_target,mean_drift,std_drift\n1.5,0.25,0.5,0.125\n");

  EerResult eer;
  eer.eer = 0.125;
  eer.threshold = 0.5;
  eer.n_target = 10;
  eer.n_nontarget = 20;
  CHECK(eer_table_to_csv({{"original", eer}}) ==
        "label,eer_percent,threshold,n_target,n_nontarget\noriginal,12.5,0.5,10,20\n");

  const std::vector<ProjectedPoint> pts = {{0.5, -1.5, "anonymized", 3}};
  CHECK(projection_to_csv(pts) == "x,y,domain,speaker\n0.5,-1.5,anonymized,3\n");
}
