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

#ifndef SISA_RL_METRICS_H_
#define SISA_RL_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace sisa_rl {

// Per-feature z-scoring fitted on training rows only.
struct Standardizer {
  Eigen::VectorXd means;
  Eigen::VectorXd stds;  // population std (divisor n)

  // (x - mean) / std per column; zero-variance columns map to 0.
  Eigen::MatrixXd Transform(const Eigen::MatrixXd& features) const;
};

Standardizer FitStandardizer(const Eigen::MatrixXd& train_features);

// Deals indices into `buckets` groups, class by class: each class's indices
// (ascending) are shuffled with the seeded stream and dealt round-robin,
// continuing from the bucket where the previous class stopped. Each group is
// returned sorted ascending. Every group's per-class count is within one of
// perfect proportionality.
std::vector<std::vector<size_t>> StratifiedDeal(std::span<const int> labels,
                                                int buckets, uint64_t seed);

struct FoldSplit {
  int fold_index = 0;
  std::vector<size_t> train_indices;  // ascending
  std::vector<size_t> test_indices;   // ascending
};

// Throws std::invalid_argument if k < 2 or a class has fewer than k members.
std::vector<FoldSplit> StratifiedKFold(std::span<const int> labels, int k,
                                       uint64_t seed);

struct ConfusionMatrix {
  int64_t true_negatives = 0;
  int64_t false_positives = 0;
  int64_t false_negatives = 0;
  int64_t true_positives = 0;

  int64_t total() const {
    return true_negatives + false_positives + false_negatives + true_positives;
  }
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix Confusion(std::span<const int> labels,
                          std::span<const int> predictions);

// 2TP / (2TP + FP + FN), or 0 when the denominator is 0.
double F1(const ConfusionMatrix& cm);

class SingleClassError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RocPoint {
  double false_positive_rate = 0.0;
  double true_positive_rate = 0.0;
  bool operator==(const RocPoint&) const = default;
};

struct RocResult {
  double auc = 0.0;
  std::vector<RocPoint> curve;  // (0,0) ... (1,1)
};

// AUC is the Mann-Whitney statistic with ties counted as one half; the curve
// has one point per distinct score threshold.
RocResult RocAuc(std::span<const double> scores, std::span<const int> labels);

// |before - after|; both must lie in [0, 1].
double DeltaF1(double f1_before, double f1_after);

// Mean and population std of a sample.
double Mean(std::span<const double> values);
double PopulationStd(std::span<const double> values);

}  // namespace sisa_rl

#endif  // SISA_RL_METRICS_H_
