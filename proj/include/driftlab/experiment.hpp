// include/driftlab/experiment.hpp

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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "driftlab/anonymizer.hpp"
#include "driftlab/attacks.hpp"
#include "driftlab/channel.hpp"
#include "driftlab/corpus.hpp"
#include "driftlab/mlp.hpp"

namespace driftlab {

// Config-driven experiment runner. One JSON config describes corpora, pool,
// protocol, anonymizer, a list of named channels and the attacks to run;
// the runner emits per-channel CSV reports plus a digest manifest, all
// reproducible byte for byte from the config.

struct ChannelEntry {
  std::string name;
  ChannelSpec spec;  // seed filled at run time from (master_seed, name)
};

struct ExperimentConfig {
  CorpusConfig eval_corpus;          // seed derived from master at run time
  int attacker_speakers = 200;
  int attacker_utts_per_speaker = 20;
  int pool_size = 1000;
  bool attacker_disjoint_pool = false;  // give the attacker a separately drawn pool
  int enroll_per_speaker = 5;
  int nontarget_per_trial = 10;
  AnonymizerConfig anonymizer;
  std::vector<ChannelEntry> channels;
  std::vector<AttackKind> attacks;
  TrainConfig train;
  std::uint64_t master_seed = 7;
  std::string output_dir = "out";

  void validate() const;
};

/// Config with every field at its default (the standard experiment setup).
ExperimentConfig default_config();

/// Parses and fully validates a JSON config file; parse errors carry the
/// byte position, validation errors name the field. Unknown keys are
/// rejected.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig config_from_json_text(const std::string& text);

/// Resolved echo of the config (all defaults filled in); parsing it back
/// yields an identical config.
std::string config_to_json_text(const ExperimentConfig& cfg);

/// FNV-1a digest of the resolved config text.
std::string config_digest(const ExperimentConfig& cfg);

struct ExperimentArtifacts {
  std::filesystem::path output_dir;
  std::vector<std::filesystem::path> files;  // relative to output_dir
};

/// Runs the full pipeline for every named channel: corpus/pool/protocol
/// generation, anonymization (enrollment and trial subsets independently),
/// channel application, drift report, per-domain EER table, configured
/// attacks, projection export; writes everything plus resolved_config.json
/// and manifest.json under cfg.output_dir. Channels may run in parallel
/// (DRIFTLAB_THREADS caps workers); outputs are byte-identical regardless.
/// Any stage error aborts with a message naming the stage and channel.
ExperimentArtifacts run_experiment(const ExperimentConfig& cfg);

/// Recomputes the digests named in an output directory's manifest and
/// compares; returns the list of mismatched files (empty = verified).
std::vector<std::string> verify_manifest(const std::filesystem::path& output_dir);

}  // namespace driftlab
