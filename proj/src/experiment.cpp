// src/experiment.cpp

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

#include "driftlab/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <future>
#include <iostream>
#include <set>
#include <thread>

#include <json.hpp>

#include "driftlab/io.hpp"

namespace driftlab {

namespace {

using json = nlohmann::ordered_json;

void reject_unknown_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& key = it.key();
    if (!known.contains(key)) {
      throw ConfigError("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

template <typename T>
void read_field(const json& obj, const std::string& where, const std::string& key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config field '" + (where.empty() ? key : where + "." + key) +
                      "' has the wrong type: " + e.what());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  eval_corpus.validate();
  if (attacker_speakers < 2) throw ConfigError("attacker_corpus.n_speakers must be >= 2");
  if (attacker_utts_per_speaker < 2) {
    throw ConfigError("attacker_corpus.utts_per_speaker must be >= 2");
  }
  if (pool_size < 1) throw ConfigError("pool.size must be >= 1");
  anonymizer.validate(pool_size);
  if (enroll_per_speaker < 1 || enroll_per_speaker >= eval_corpus.utts_per_speaker) {
    throw ConfigError("protocol.enroll_per_speaker must be in [1, corpus.utts_per_speaker)");
  }
  if (nontarget_per_trial < 1 || nontarget_per_trial > eval_corpus.n_speakers - 1) {
    throw ConfigError("protocol.nontarget_per_trial must be in [1, corpus.n_speakers)");
  }
  if (channels.empty()) throw ConfigError("channels must not be empty");
  std::set<std::string> names;
  for (const ChannelEntry& entry : channels) {
    if (entry.name.empty()) throw ConfigError("channels[].name must not be empty");
    for (char c : entry.name) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
        throw ConfigError("channels[].name '" + entry.name +
                          "' may only contain [A-Za-z0-9_-]");
      }
    }
    if (!names.insert(entry.name).second) {
      throw ConfigError("duplicate channel name '" + entry.name + "'");
    }
    entry.spec.validate();
  }
  std::set<AttackKind> seen;
  for (AttackKind kind : attacks) {
    if (!seen.insert(kind).second) {
      throw ConfigError(std::string("duplicate attack '") + attack_kind_name(kind) + "'");
    }
  }
  train.validate();
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.channels.push_back({"attractor", ChannelSpec{}});
  cfg.attacks = {AttackKind::unprotected, AttackKind::lazy_informed, AttackKind::semi_informed,
                 AttackKind::drift_reversal};
  return cfg;
}

ExperimentConfig config_from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");

  ExperimentConfig cfg = default_config();
  reject_unknown_keys(root, "",
                      {"master_seed", "output_dir", "corpus", "attacker_corpus", "pool",
                       "protocol", "anonymizer", "channels", "attacks", "train"});

  read_field(root, "", "master_seed", cfg.master_seed);
  read_field(root, "", "output_dir", cfg.output_dir);

  if (root.contains("corpus")) {
    const json& c = root.at("corpus");
    reject_unknown_keys(c, "corpus", {"n_speakers", "utts_per_speaker", "dim",
                                      "within_speaker_sigma"});
    read_field(c, "corpus", "n_speakers", cfg.eval_corpus.n_speakers);
    read_field(c, "corpus", "utts_per_speaker", cfg.eval_corpus.utts_per_speaker);
    read_field(c, "corpus", "dim", cfg.eval_corpus.dim);
    read_field(c, "corpus", "within_speaker_sigma", cfg.eval_corpus.within_speaker_sigma);
  }
  if (root.contains("attacker_corpus")) {
    const json& c = root.at("attacker_corpus");
    reject_unknown_keys(c, "attacker_corpus", {"n_speakers", "utts_per_speaker"});
    read_field(c, "attacker_corpus", "n_speakers", cfg.attacker_speakers);
    read_field(c, "attacker_corpus", "utts_per_speaker", cfg.attacker_utts_per_speaker);
  }
  if (root.contains("pool")) {
    const json& p = root.at("pool");
    reject_unknown_keys(p, "pool", {"size", "attacker_disjoint"});
    read_field(p, "pool", "size", cfg.pool_size);
    read_field(p, "pool", "attacker_disjoint", cfg.attacker_disjoint_pool);
  }
  if (root.contains("protocol")) {
    const json& p = root.at("protocol");
    reject_unknown_keys(p, "protocol", {"enroll_per_speaker", "nontarget_per_trial"});
    read_field(p, "protocol", "enroll_per_speaker", cfg.enroll_per_speaker);
    read_field(p, "protocol", "nontarget_per_trial", cfg.nontarget_per_trial);
  }
  if (root.contains("anonymizer")) {
    const json& a = root.at("anonymizer");
    reject_unknown_keys(a, "anonymizer", {"k", "k_star", "level", "renormalize", "passthrough"});
    read_field(a, "anonymizer", "k", cfg.anonymizer.top_k);
    read_field(a, "anonymizer", "k_star", cfg.anonymizer.sample_size);
    if (a.contains("level")) {
      const auto level = a.at("level").get<std::string>();
      if (level == "utterance") {
        cfg.anonymizer.level = AnonymizationLevel::utterance;
      } else if (level == "speaker") {
        cfg.anonymizer.level = AnonymizationLevel::speaker;
      } else {
        throw ConfigError("anonymizer.level must be 'utterance' or 'speaker'");
      }
    }
    read_field(a, "anonymizer", "renormalize", cfg.anonymizer.renormalize);
    read_field(a, "anonymizer", "passthrough", cfg.anonymizer.passthrough);
  }
  if (root.contains("channels")) {
    if (!root.at("channels").is_array()) throw ConfigError("channels must be an array");
    cfg.channels.clear();
    for (const json& c : root.at("channels")) {
      reject_unknown_keys(c, "channels[]", {"name", "kind", "lambda", "noise_sigma",
                                            "hidden_width"});
      ChannelEntry entry;
      if (!c.contains("name")) throw ConfigError("channels[].name is required");
      read_field(c, "channels[]", "name", entry.name);
      if (c.contains("kind")) {
        entry.spec.kind = channel_kind_from_name(c.at("kind").get<std::string>());
      }
      read_field(c, "channels[]", "lambda", entry.spec.lambda);
      read_field(c, "channels[]", "noise_sigma", entry.spec.noise_sigma);
      read_field(c, "channels[]", "hidden_width", entry.spec.hidden_width);
      cfg.channels.push_back(std::move(entry));
    }
  }
  if (root.contains("attacks")) {
    if (!root.at("attacks").is_array()) throw ConfigError("attacks must be an array");
    cfg.attacks.clear();
    for (const json& a : root.at("attacks")) {
      cfg.attacks.push_back(attack_kind_from_name(a.get<std::string>()));
    }
  }
  if (root.contains("train")) {
    const json& t = root.at("train");
    reject_unknown_keys(t, "train",
                        {"epochs", "batch_size", "validate_every", "validation_fraction",
                         "learning_rate", "hidden_width_factor", "aam_margin", "aam_scale"});
    read_field(t, "train", "epochs", cfg.train.epochs);
    read_field(t, "train", "batch_size", cfg.train.batch_size);
    read_field(t, "train", "validate_every", cfg.train.validate_every);
    read_field(t, "train", "validation_fraction", cfg.train.validation_fraction);
    read_field(t, "train", "learning_rate", cfg.train.adam.lr);
    read_field(t, "train", "hidden_width_factor", cfg.train.hidden_width_factor);
    read_field(t, "train", "aam_margin", cfg.train.aam_margin);
    read_field(t, "train", "aam_scale", cfg.train.aam_scale);
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  return config_from_json_text(read_file(path));
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  json root;
  root["master_seed"] = cfg.master_seed;
  root["output_dir"] = cfg.output_dir;
  root["corpus"] = {{"n_speakers", cfg.eval_corpus.n_speakers},
                    {"utts_per_speaker", cfg.eval_corpus.utts_per_speaker},
                    {"dim", cfg.eval_corpus.dim},
                    {"within_speaker_sigma", cfg.eval_corpus.within_speaker_sigma}};
  root["attacker_corpus"] = {{"n_speakers", cfg.attacker_speakers},
                             {"utts_per_speaker", cfg.attacker_utts_per_speaker}};
  root["pool"] = {{"size", cfg.pool_size}, {"attacker_disjoint", cfg.attacker_disjoint_pool}};
  root["protocol"] = {{"enroll_per_speaker", cfg.enroll_per_speaker},
                      {"nontarget_per_trial", cfg.nontarget_per_trial}};
  root["anonymizer"] = {
      {"k", cfg.anonymizer.top_k},
      {"k_star", cfg.anonymizer.sample_size},
      {"level", cfg.anonymizer.level == AnonymizationLevel::speaker ? "speaker" : "utterance"},
      {"renormalize", cfg.anonymizer.renormalize},
      {"passthrough", cfg.anonymizer.passthrough}};
  root["channels"] = json::array();
  for (const ChannelEntry& entry : cfg.channels) {
    root["channels"].push_back({{"name", entry.name},
                                {"kind", channel_kind_name(entry.spec.kind)},
                                {"lambda", entry.spec.lambda},
                                {"noise_sigma", entry.spec.noise_sigma},
                                {"hidden_width", entry.spec.hidden_width}});
  }
  root["attacks"] = json::array();
  for (AttackKind kind : cfg.attacks) root["attacks"].push_back(attack_kind_name(kind));
  root["train"] = {{"epochs", cfg.train.epochs},
                   {"batch_size", cfg.train.batch_size},
                   {"validate_every", cfg.train.validate_every},
                   {"validation_fraction", cfg.train.validation_fraction},
                   {"learning_rate", cfg.train.adam.lr},
                   {"hidden_width_factor", cfg.train.hidden_width_factor},
                   {"aam_margin", cfg.train.aam_margin},
                   {"aam_scale", cfg.train.aam_scale}};
  return root.dump(2) + "\n";
}

std::string config_digest(const ExperimentConfig& cfg) {
  return content_digest(config_to_json_text(cfg));
}

namespace {

struct BaseData {
  // Two defender renderings of the evaluation corpus. The domain-table path
  // anonymizes at the configured level (utterance by default) and feeds the
  // drift report, the per-domain EER rows and the projection. The attack
  // path anonymizes at speaker level with the enrollment and trial subsets
  // treated as independent runs of the system, which is how verification
  // protocols publish anonymized data; attacks score against it.
  Corpus eval_table;   // pre_vocoder filled, configured level
  Corpus eval_attack;  // pre_vocoder filled, speaker level per subset
  Corpus attacker;     // original only
  Pool pool;
  Pool attacker_pool;
  TrialProtocol protocol;
};

template <typename Fn>
auto stage(const std::string& name, const std::string& channel, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    const std::string where =
        channel.empty() ? "stage '" + name + "'" : "stage '" + name + "' (channel '" + channel + "')";
    throw ProtocolError(where + ": " + e.what());
  }
}

BaseData prepare_base(const ExperimentConfig& cfg) {
  BaseData base;

  CorpusConfig eval_cfg = cfg.eval_corpus;
  eval_cfg.seed = derive_seed(cfg.master_seed, "eval_corpus");

  CorpusConfig att_cfg = cfg.eval_corpus;
  att_cfg.n_speakers = cfg.attacker_speakers;
  att_cfg.utts_per_speaker = cfg.attacker_utts_per_speaker;
  att_cfg.seed = derive_seed(cfg.master_seed, "attacker_corpus");
  base.attacker = stage("generate_attacker_corpus", "", [&] { return generate_corpus(att_cfg); });

  base.pool = stage("generate_pool", "", [&] {
    return generate_pool(cfg.pool_size, cfg.eval_corpus.dim, derive_seed(cfg.master_seed, "pool"));
  });
  base.attacker_pool =
      cfg.attacker_disjoint_pool
          ? stage("generate_attacker_pool", "",
                  [&] {
                    return generate_pool(cfg.pool_size, cfg.eval_corpus.dim,
                                         derive_seed(cfg.master_seed, "attacker_pool"));
                  })
          : base.pool;

  Corpus eval = stage("generate_eval_corpus", "", [&] { return generate_corpus(eval_cfg); });

  base.protocol = stage("build_protocol", "", [&] {
    return build_protocol(eval, cfg.enroll_per_speaker, cfg.nontarget_per_trial,
                          derive_seed(cfg.master_seed, "protocol"));
  });

  base.eval_table = stage("anonymize_table", "", [&] {
    AnonymizerConfig anon = cfg.anonymizer;
    anon.seed = derive_seed(cfg.master_seed, "defender_anonymize_table");
    if (anon.level == AnonymizationLevel::utterance) {
      return anonymize_corpus(eval, base.pool, anon);
    }
    // speaker level: enrollment and trial subsets are separate runs
    Corpus out = eval;
    anon.seed = derive_seed(cfg.master_seed, "defender_anonymize_table_enroll");
    merge_domains(out, anonymize_corpus(subset_corpus(eval, enrollment_utterances(base.protocol)),
                                        base.pool, anon));
    anon.seed = derive_seed(cfg.master_seed, "defender_anonymize_table_trial");
    merge_domains(out, anonymize_corpus(subset_corpus(eval, trial_utterances(base.protocol)),
                                        base.pool, anon));
    return out;
  });

  base.eval_attack = stage("anonymize_attack", "", [&] {
    AnonymizerConfig anon = cfg.anonymizer;
    anon.level = AnonymizationLevel::speaker;
    Corpus out = std::move(eval);
    anon.seed = derive_seed(cfg.master_seed, "defender_anonymize_enroll");
    merge_domains(out, anonymize_corpus(subset_corpus(out, enrollment_utterances(base.protocol)),
                                        base.pool, anon));
    anon.seed = derive_seed(cfg.master_seed, "defender_anonymize_trial");
    merge_domains(out, anonymize_corpus(subset_corpus(out, trial_utterances(base.protocol)),
                                        base.pool, anon));
    return out;
  });
  return base;
}

struct ChannelOutputs {
  std::string name;
  std::vector<std::pair<std::string, std::string>> files;  // relative path -> digest
  std::vector<EerTableRow> eer_rows;
  DriftReport drift;
};

void emit(ChannelOutputs& out, const std::filesystem::path& out_dir,
          const std::string& rel_path, const std::string& content) {
  atomic_write_file(out_dir / rel_path, content);
  out.files.emplace_back(rel_path, content_digest(content));
}

ChannelOutputs run_channel(const ExperimentConfig& cfg, const BaseData& base,
                           const ChannelEntry& entry, const std::filesystem::path& out_dir) {
  ChannelOutputs out;
  out.name = entry.name;
  std::filesystem::create_directories(out_dir / entry.name);

  ChannelSpec spec = entry.spec;
  spec.seed = derive_seed(cfg.master_seed, "channel/" + entry.name);
  const ChannelModel channel = stage("make_channel", entry.name, [&] {
    return make_channel(spec, cfg.eval_corpus.dim);
  });

  const Corpus table_corpus = stage("apply_channel", entry.name, [&] {
    return apply_channel_corpus(base.eval_table, channel,
                                derive_seed(cfg.master_seed,
                                            "defender_channel_table/" + entry.name));
  });
  const Corpus attack_corpus = stage("apply_channel_attack", entry.name, [&] {
    return apply_channel_corpus(base.eval_attack, channel,
                                derive_seed(cfg.master_seed,
                                            "defender_channel_attack/" + entry.name));
  });

  stage("drift_report", entry.name, [&] {
    out.drift = drift_target_stats(table_corpus);
    emit(out, out_dir, entry.name + "/drift_report.csv", drift_report_to_csv(out.drift));
    return 0;
  });

  stage("evaluate_domains", entry.name, [&] {
    for (const Domain domain : {Domain::original, Domain::pre_vocoder, Domain::anonymized}) {
      const auto trials = score_trials(table_corpus, base.protocol, domain_selector(domain),
                                       domain_selector(domain));
      out.eer_rows.push_back({domain_name(domain), compute_eer(to_score_set(trials))});
      if (domain == Domain::anonymized) {
        emit(out, out_dir, entry.name + "/scores.csv", scores_to_csv(trials));
      }
    }
    return 0;
  });

  AttackSetup setup;
  setup.eval_corpus = &attack_corpus;
  setup.protocol = &base.protocol;
  setup.attacker_corpus = &base.attacker;
  setup.pool = &base.attacker_pool;
  setup.anonymizer = cfg.anonymizer;
  setup.channel = &channel;
  setup.master_seed = derive_seed(cfg.master_seed, "attack/" + entry.name);

  const std::string digest = config_digest(cfg);
  for (const AttackKind kind : cfg.attacks) {
    const std::string kind_name = attack_kind_name(kind);
    AttackResult result = stage("attack/" + kind_name, entry.name, [&] {
      switch (kind) {
        case AttackKind::unprotected: return unprotected_reference(setup);
        case AttackKind::lazy_informed: return lazy_informed(setup);
        case AttackKind::semi_informed: return semi_informed(setup, cfg.train);
        case AttackKind::drift_reversal: return drift_reversal(setup, cfg.train);
      }
      throw ConfigError("unknown attack kind");
    });
    result.provenance.config_digest = digest;
    out.eer_rows.push_back({kind_name, result.eer});
    if (!result.history.empty()) {
      emit(out, out_dir, entry.name + "/" + kind_name + "_history.csv",
           history_to_csv(result.history));
    }
  }

  emit(out, out_dir, entry.name + "/eer_table.csv", eer_table_to_csv(out.eer_rows));

  stage("projection", entry.name, [&] {
    std::vector<LabeledEmbedding> points;
    points.reserve(table_corpus.utterances.size() * 3);
    for (const UtteranceRecord& rec : table_corpus.utterances) {
      for (const Domain domain : {Domain::original, Domain::pre_vocoder, Domain::anonymized}) {
        points.push_back({embedding_in(rec, domain), domain_name(domain), rec.spk});
      }
    }
    emit(out, out_dir, entry.name + "/projection.csv", projection_to_csv(project_2d(points)));
    return 0;
  });

  stage("archive_channel", entry.name, [&] {
    emit(out, out_dir, entry.name + "/channel.txt", channel_to_text(channel));
    return 0;
  });

  return out;
}

int worker_count(std::size_t n_channels) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  std::size_t workers = std::min<std::size_t>(hw, n_channels);
  if (const char* env = std::getenv("DRIFTLAB_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) workers = std::min<std::size_t>(workers, static_cast<std::size_t>(cap));
    } catch (...) {
      throw ConfigError("DRIFTLAB_THREADS must be a positive integer");
    }
  }
  return static_cast<int>(std::max<std::size_t>(workers, 1));
}

}  // namespace

ExperimentArtifacts run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();  // nothing is written unless the config is valid

  const std::filesystem::path out_dir(cfg.output_dir);
  std::filesystem::create_directories(out_dir);

  ExperimentArtifacts artifacts;
  artifacts.output_dir = out_dir;

  const std::string resolved = config_to_json_text(cfg);
  atomic_write_file(out_dir / "resolved_config.json", resolved);
  artifacts.files.emplace_back("resolved_config.json");

  std::cout << "driftlab: preparing corpora (seed " << cfg.master_seed << ")\n";
  const BaseData base = prepare_base(cfg);

  const int workers = worker_count(cfg.channels.size());
  std::vector<ChannelOutputs> outputs(cfg.channels.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < cfg.channels.size(); ++i) {
      std::cout << "driftlab: channel '" << cfg.channels[i].name << "'\n";
      outputs[i] = run_channel(cfg, base, cfg.channels[i], out_dir);
    }
  } else {
    for (std::size_t wave = 0; wave < cfg.channels.size();
         wave += static_cast<std::size_t>(workers)) {
      const std::size_t stop =
          std::min(cfg.channels.size(), wave + static_cast<std::size_t>(workers));
      std::vector<std::future<ChannelOutputs>> futures;
      for (std::size_t i = wave; i < stop; ++i) {
        futures.push_back(std::async(std::launch::async, [&cfg, &base, &out_dir, i] {
          return run_channel(cfg, base, cfg.channels[i], out_dir);
        }));
      }
      for (std::size_t i = wave; i < stop; ++i) {
        outputs[i] = futures[i - wave].get();
        std::cout << "driftlab: channel '" << cfg.channels[i].name << "' done\n";
      }
    }
  }

  nlohmann::ordered_json manifest;
  manifest["config_digest"] = config_digest(cfg);
  manifest["files"] = nlohmann::ordered_json::object();
  manifest["files"]["resolved_config.json"] = content_digest(resolved);
  for (const ChannelOutputs& out : outputs) {
    std::vector<std::pair<std::string, std::string>> files = out.files;
    std::sort(files.begin(), files.end());
    for (const auto& [rel, digest] : files) {
      manifest["files"][rel] = digest;
      artifacts.files.emplace_back(rel);
    }
  }
  atomic_write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  artifacts.files.emplace_back("manifest.json");

  for (const ChannelOutputs& out : outputs) {
    std::cout << "driftlab: [" << out.name << "] mean target "
              << format_double(out.drift.mean_target) << ", mean drift "
              << format_double(out.drift.mean_drift) << "\n";
    for (const EerTableRow& row : out.eer_rows) {
      std::cout << "driftlab: [" << out.name << "] EER " << row.label << " = "
                << format_double(100.0 * row.result.eer) << "%\n";
    }
  }
  return artifacts;
}

std::vector<std::string> verify_manifest(const std::filesystem::path& output_dir) {
  const auto manifest = nlohmann::json::parse(read_file(output_dir / "manifest.json"));
  std::vector<std::string> mismatched;
  for (const auto& [rel, digest] : manifest.at("files").items()) {
    const std::string actual = content_digest(read_file(output_dir / rel));
    if (actual != digest.get<std::string>()) mismatched.push_back(rel);
  }
  return mismatched;
}

}  // namespace driftlab
