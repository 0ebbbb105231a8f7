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

#include "sisa_rl/experiment.h"

#include <algorithm>
#include <chrono>
#include <ostream>

#include "sisa_rl/random.h"
#include "sisa_rl/sisa.h"

#ifndef SISA_RL_VERSION
#define SISA_RL_VERSION "0.0.0"
#endif

namespace sisa_rl {
namespace {

// Sub-stream tags for seeds derived from the master seed. Agent seeds do not
// depend on the algorithm, so DQN and DDQN see identical initializations and
// exploration streams.
constexpr uint64_t kFoldStream = 0;
constexpr uint64_t kBaselineStream = 100;
constexpr uint64_t kPartitionStream = 200;
constexpr uint64_t kEnsembleStream = 300;
constexpr uint64_t kForgetStream = 400;

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

std::string_view ToolVersion() { return SISA_RL_VERSION; }

AlgorithmSummary Summarize(Algorithm algorithm,
                           const std::vector<FoldRecord>& folds,
                           const OutOfFold& oof) {
  AlgorithmSummary s;
  s.algorithm = algorithm;
  if (folds.empty()) return s;

  auto collect = [&](double FoldRecord::*field) {
    std::vector<double> v;
    for (const FoldRecord& f : folds) v.push_back(f.*field);
    return v;
  };
  auto sum = [](const std::vector<double>& v) {
    double total = 0.0;
    for (double x : v) total += x;
    return total;
  };

  const std::vector<double> f1 = collect(&FoldRecord::baseline_f1);
  s.f1_mean = Mean(f1);
  s.f1_std = PopulationStd(f1);
  s.worst_fold_f1 = *std::min_element(f1.begin(), f1.end());

  const std::vector<double> train = collect(&FoldRecord::baseline_train_seconds);
  s.mean_baseline_train_seconds = Mean(train);
  s.total_baseline_train_seconds = sum(train);
  s.mean_inference_seconds =
      Mean(collect(&FoldRecord::baseline_inference_seconds));
  const std::vector<double> sisa = collect(&FoldRecord::sisa_train_seconds);
  s.mean_sisa_train_seconds = Mean(sisa);
  s.total_sisa_train_seconds = sum(sisa);
  const std::vector<double> unlearn = collect(&FoldRecord::unlearn_seconds);
  s.mean_unlearn_seconds = Mean(unlearn);
  s.total_unlearn_seconds = sum(unlearn);
  s.mean_sisa_f1_before = Mean(collect(&FoldRecord::sisa_f1_before));
  s.mean_sisa_f1_after = Mean(collect(&FoldRecord::sisa_f1_after));
  s.mean_delta_f1 = Mean(collect(&FoldRecord::delta_f1));

  s.oof_confusion = Confusion(oof.labels, oof.predictions);
  s.oof_f1 = F1(s.oof_confusion);
  const RocResult roc = RocAuc(oof.qscores, oof.labels);
  s.oof_auc = roc.auc;
  s.roc_curve = roc.curve;
  return s;
}

ExperimentReport RunExperiment(const ExperimentConfig& config,
                               std::ostream* progress) {
  config.Validate();
  const Dataset data = config.data_path.empty()
                           ? GenerateSynthetic(config.synth)
                           : LoadDataset(config.data_path);
  data.Validate();
  const std::vector<FoldSplit> folds =
      StratifiedKFold(data.labels, config.k_folds,
                      MixSeed(config.seed, kFoldStream));

  ExperimentReport report;
  report.tool_version = std::string(ToolVersion());
  report.config = ToConfigEntries(config);

  for (Algorithm algorithm : config.algorithms) {
    AlgorithmResult result;
    for (const FoldSplit& split : folds) {
      const int k = split.fold_index;
      const std::vector<int> y_train =
          SelectLabels(data.labels, split.train_indices);
      const std::vector<int> y_test =
          SelectLabels(data.labels, split.test_indices);
      const Eigen::MatrixXd raw_train =
          SelectRows(data.features, split.train_indices);
      const Standardizer standardizer = FitStandardizer(raw_train);
      const Eigen::MatrixXd x_train = standardizer.Transform(raw_train);
      const Eigen::MatrixXd x_test =
          standardizer.Transform(SelectRows(data.features, split.test_indices));

      FoldRecord rec;
      rec.algorithm = algorithm;
      rec.fold = k;
      rec.train_size = split.train_indices.size();
      rec.test_size = split.test_indices.size();

      AgentConfig agent_config = config.agent;
      agent_config.algorithm = algorithm;
      agent_config.seed = MixSeed(config.seed, kBaselineStream + k);
      const TrainedAgent baseline = TrainAgent(x_train, y_train, agent_config);
      rec.baseline_train_seconds = baseline.training_seconds;

      const auto infer_start = std::chrono::steady_clock::now();
      const std::vector<int> predictions = PredictRows(baseline.network, x_test);
      rec.baseline_inference_seconds = SecondsSince(infer_start);
      const std::vector<double> qscores = QScoreRows(baseline.network, x_test);

      rec.baseline_confusion = Confusion(y_test, predictions);
      rec.baseline_f1 = F1(rec.baseline_confusion);
      rec.baseline_auc = RocAuc(qscores, y_test).auc;
      OutOfFold& oof = result.oof;
      oof.sample_indices.insert(oof.sample_indices.end(),
                                split.test_indices.begin(),
                                split.test_indices.end());
      oof.labels.insert(oof.labels.end(), y_test.begin(), y_test.end());
      oof.predictions.insert(oof.predictions.end(), predictions.begin(),
                             predictions.end());
      oof.qscores.insert(oof.qscores.end(), qscores.begin(), qscores.end());

      const ShardAssignment assignment =
          Partition(y_train, config.num_shards,
                    MixSeed(config.seed, kPartitionStream + k));
      AgentConfig shard_config = agent_config;
      shard_config.seed = MixSeed(config.seed, kEnsembleStream + k);
      const ShardEnsemble ensemble = TrainEnsemble(
          x_train, y_train, assignment, shard_config, config.threads);
      rec.sisa_train_seconds = ensemble.training_seconds;
      for (const TrainedAgent& m : ensemble.models) {
        rec.shard_train_seconds.push_back(m.training_seconds);
      }

      UnlearnRequest request;
      request.shard_index = config.unlearn_shard;
      if (config.forget_fraction > 0.0) {
        request.forget_indices = SelectForgetSet(
            assignment.shards[config.unlearn_shard], config.forget_fraction,
            MixSeed(config.seed, kForgetStream + k));
      }
      const UnlearnOutcome outcome =
          Unlearn(ensemble, request, x_train, y_train, x_test, y_test);
      rec.sisa_f1_before = outcome.f1_before;
      rec.sisa_f1_after = outcome.f1_after;
      rec.delta_f1 = outcome.delta_f1;
      rec.unlearn_seconds = outcome.retrain_seconds;
      rec.forgotten_count = outcome.forgotten_count;

      if (progress != nullptr) {
        *progress << AlgorithmName(algorithm) << " fold " << k
                  << ": F1=" << rec.baseline_f1 << " AUC=" << rec.baseline_auc
                  << " SISA F1 " << rec.sisa_f1_before << " -> "
                  << rec.sisa_f1_after << " | train "
                  << rec.baseline_train_seconds << "s, SISA "
                  << rec.sisa_train_seconds << "s, unlearn "
                  << rec.unlearn_seconds << "s" << std::endl;
      }
      result.folds.push_back(std::move(rec));
    }
    result.summary = Summarize(algorithm, result.folds, result.oof);
    report.results.push_back(std::move(result));
  }
  return report;
}

}  // namespace sisa_rl
