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

#ifndef SISA_RL_TESTS_REPORT_UTIL_H_
#define SISA_RL_TESTS_REPORT_UTIL_H_

#include <cmath>
#include <string>
#include <vector>

#include "sisa_rl/experiment.h"
#include "sisa_rl/metrics.h"
#include "sisa_rl/sisa.h"

namespace sisa_rl::testing_util {

// Copy of the report with every wall-clock field zeroed, leaving metrics.
inline ExperimentReport StripTimings(ExperimentReport report) {
  for (AlgorithmResult& r : report.results) {
    for (FoldRecord& f : r.folds) {
      f.baseline_train_seconds = 0;
      f.baseline_inference_seconds = 0;
      f.sisa_train_seconds = 0;
      f.unlearn_seconds = 0;
      for (double& s : f.shard_train_seconds) s = 0;
    }
    AlgorithmSummary& s = r.summary;
    s.mean_baseline_train_seconds = 0;
    s.total_baseline_train_seconds = 0;
    s.mean_inference_seconds = 0;
    s.mean_sisa_train_seconds = 0;
    s.total_sisa_train_seconds = 0;
    s.mean_unlearn_seconds = 0;
    s.total_unlearn_seconds = 0;
  }
  return report;
}

// Structural invariants any report must satisfy, independent of seed.
// Returns human-readable violations; empty means all hold.
inline std::vector<std::string> CheckReportInvariants(
    const ExperimentReport& report, size_t num_samples, int k_folds,
    int num_shards, double forget_fraction) {
  std::vector<std::string> bad;
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) bad.push_back(what);
  };
  for (const AlgorithmResult& r : report.results) {
    const std::string name(AlgorithmName(r.summary.algorithm));
    require(static_cast<int>(r.folds.size()) == k_folds, name + ": fold count");
    std::vector<int> seen(num_samples, 0);
    for (size_t i : r.oof.sample_indices) {
      if (i < num_samples) ++seen[i];
    }
    bool each_once = r.oof.sample_indices.size() == num_samples;
    for (int c : seen) each_once = each_once && c == 1;
    require(each_once, name + ": out-of-fold rows cover each sample once");

    ConfusionMatrix pooled;
    std::vector<double> f1s;
    for (const FoldRecord& f : r.folds) {
      const std::string cell = name + " fold " + std::to_string(f.fold);
      require(f.train_size + f.test_size == num_samples, cell + ": sizes");
      require(f.baseline_confusion.total() ==
                  static_cast<int64_t>(f.test_size),
              cell + ": confusion total");
      require(f.baseline_f1 == F1(f.baseline_confusion), cell + ": F1");
      require(f.delta_f1 == std::abs(f.sisa_f1_before - f.sisa_f1_after),
              cell + ": delta F1");
      for (double v : {f.baseline_f1, f.baseline_auc, f.sisa_f1_before,
                       f.sisa_f1_after}) {
        require(v >= 0.0 && v <= 1.0, cell + ": metric in [0, 1]");
      }
      // Shards of the training fold differ in size by at most one.
      const size_t smallest = f.train_size / num_shards;
      const size_t expected_lo =
          forget_fraction > 0
              ? static_cast<size_t>(std::ceil(forget_fraction * smallest - 1e-9))
              : 0;
      const size_t expected_hi =
          forget_fraction > 0 ? static_cast<size_t>(std::ceil(
                                    forget_fraction * (smallest + 1) - 1e-9))
                              : 0;
      require(f.forgotten_count >= expected_lo &&
                  f.forgotten_count <= expected_hi,
              cell + ": forget set size");
      require(static_cast<int>(f.shard_train_seconds.size()) == num_shards,
              cell + ": shard timings");
      for (double t : f.shard_train_seconds) {
        require(f.sisa_train_seconds >= t, cell + ": SISA >= each shard");
      }
      require(f.unlearn_seconds <= f.sisa_train_seconds,
              cell + ": unlearn <= SISA full train");
      for (double t : {f.baseline_train_seconds, f.sisa_train_seconds,
                       f.unlearn_seconds, f.baseline_inference_seconds}) {
        require(std::isfinite(t) && t >= 0.0, cell + ": timing sane");
      }
      pooled += f.baseline_confusion;
      f1s.push_back(f.baseline_f1);
    }
    require(pooled == r.summary.oof_confusion, name + ": pooled confusion");
    require(std::abs(r.summary.f1_mean - Mean(f1s)) <= 1e-12,
            name + ": F1 mean");
    require(std::abs(r.summary.f1_std - PopulationStd(f1s)) <= 1e-12,
            name + ": F1 std");
    require(r.summary.oof_auc == RocAuc(r.oof.qscores, r.oof.labels).auc,
            name + ": pooled AUC");
  }
  return bad;
}

}  // namespace sisa_rl::testing_util

#endif  // SISA_RL_TESTS_REPORT_UTIL_H_
