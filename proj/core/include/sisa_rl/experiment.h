/*
 * Copyright 2026 The sisa_rl Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SISA_RL_EXPERIMENT_H_
#define SISA_RL_EXPERIMENT_H_

// Cross-validated evaluation: per fold, a baseline agent (F1, Q-score AUC,
// timings) and a sharded ensemble that then forgets part of one shard.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sisa_rl/data.h"
#include "sisa_rl/metrics.h"
#include "sisa_rl/rl_agent.h"

namespace sisa_rl {

std::string_view ToolVersion();

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string data_path;  // CSV dataset; empty means use `synth`
  SynthSpec synth;
  std::vector<Algorithm> algorithms = {Algorithm::kDqn, Algorithm::kDdqn};
  int k_folds = 5;
  AgentConfig agent;  // algorithm and seed are overwritten per run
  int num_shards = 5;
  // 0 disables deletion (empty forget set); otherwise in (0, 1).
  double forget_fraction = 0.05;
  int unlearn_shard = 0;
  uint64_t seed = 42;
  std::string output_dir = "results";
  int threads = 1;  // shard-training workers; 1 is fully sequential

  void Validate() const;
};

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

// Every key accepted by the flat config format, in canonical order.
const std::vector<std::string>& ConfigKeys();

// Sets one key from its textual value. Throws ConfigError.
void SetConfigValue(ExperimentConfig& config, std::string_view key,
                    std::string_view value);

// `key = value` lines; '#' starts a comment; blank lines ignored.
ExperimentConfig ParseConfig(std::string_view text);
ExperimentConfig LoadConfigFile(const std::filesystem::path& path);

// Canonical (key, value) listing. Doubles use the shortest round-trip form,
// so parsing the entries back reproduces the config exactly.
ConfigEntries ToConfigEntries(const ExperimentConfig& config);
ExperimentConfig FromConfigEntries(const ConfigEntries& entries);
std::string FormatConfig(const ExperimentConfig& config);

struct FoldRecord {
  Algorithm algorithm = Algorithm::kDqn;
  int fold = 0;
  size_t train_size = 0;
  size_t test_size = 0;
  double baseline_train_seconds = 0.0;
  double baseline_inference_seconds = 0.0;
  double baseline_f1 = 0.0;
  double baseline_auc = 0.0;
  ConfusionMatrix baseline_confusion;
  double sisa_train_seconds = 0.0;
  std::vector<double> shard_train_seconds;
  double sisa_f1_before = 0.0;
  double unlearn_seconds = 0.0;
  double sisa_f1_after = 0.0;
  double delta_f1 = 0.0;
  size_t forgotten_count = 0;

  bool operator==(const FoldRecord&) const = default;
};

// Pooled out-of-fold baseline predictions, in fold order.
struct OutOfFold {
  std::vector<size_t> sample_indices;
  std::vector<int> labels;
  std::vector<int> predictions;
  std::vector<double> qscores;

  bool operator==(const OutOfFold&) const = default;
};

struct AlgorithmSummary {
  Algorithm algorithm = Algorithm::kDqn;
  double f1_mean = 0.0;
  double f1_std = 0.0;  // population std across folds
  double worst_fold_f1 = 0.0;
  double oof_auc = 0.0;
  ConfusionMatrix oof_confusion;
  double oof_f1 = 0.0;
  double mean_baseline_train_seconds = 0.0;
  double total_baseline_train_seconds = 0.0;
  double mean_inference_seconds = 0.0;
  double mean_sisa_train_seconds = 0.0;
  double total_sisa_train_seconds = 0.0;
  double mean_unlearn_seconds = 0.0;
  double total_unlearn_seconds = 0.0;
  double mean_sisa_f1_before = 0.0;
  double mean_sisa_f1_after = 0.0;
  double mean_delta_f1 = 0.0;
  std::vector<RocPoint> roc_curve;

  bool operator==(const AlgorithmSummary&) const = default;
};

struct AlgorithmResult {
  AlgorithmSummary summary;
  std::vector<FoldRecord> folds;
  OutOfFold oof;

  bool operator==(const AlgorithmResult&) const = default;
};

struct ExperimentReport {
  std::string tool_version;
  ConfigEntries config;
  std::vector<AlgorithmResult> results;

  bool operator==(const ExperimentReport&) const = default;
};

AlgorithmSummary Summarize(Algorithm algorithm,
                           const std::vector<FoldRecord>& folds,
                           const OutOfFold& oof);

// Runs every (algorithm, fold) cell. Metrics are a pure function of the
// config; only *_seconds fields vary between runs. Progress lines go to
// `progress` when non-null.
ExperimentReport RunExperiment(const ExperimentConfig& config,
                               std::ostream* progress = nullptr);

// Writes report.jsonl, table3.csv, table4.csv, table5.csv, roc_points.csv,
// confusion.csv and runtime_per_fold.csv into `directory`.
void EmitReport(const ExperimentReport& report,
                const std::filesystem::path& directory);

// The flat CSV tables only.
void WriteTables(const ExperimentReport& report,
                 const std::filesystem::path& directory);

// Reads report.jsonl (a file, or a directory containing one) and checks the
// stored aggregates against recomputation from the fold records.
ExperimentReport LoadReport(const std::filesystem::path& path);

// Human-readable rendering of the three summary tables.
void PrintTables(const ExperimentReport& report, std::ostream& out);

}  // namespace sisa_rl

#endif  // SISA_RL_EXPERIMENT_H_
