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

#include "sisa_rl/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sisa_rl/random.h"

namespace sisa_rl {
namespace {

void CheckBinaryLabels(std::span<const int> labels) {
  for (int y : labels) {
    if (y != 0 && y != 1) {
      throw std::invalid_argument("labels must be 0 or 1, got " +
                                  std::to_string(y));
    }
  }
}

}  // namespace

Eigen::MatrixXd Standardizer::Transform(const Eigen::MatrixXd& features) const {
  if (features.cols() != means.size()) {
    throw std::invalid_argument("Standardizer: dimension mismatch");
  }
  Eigen::MatrixXd out(features.rows(), features.cols());
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    if (stds(j) == 0.0) {
      out.col(j).setZero();
    } else {
      out.col(j) = (features.col(j).array() - means(j)) / stds(j);
    }
  }
  return out;
}

Standardizer FitStandardizer(const Eigen::MatrixXd& train_features) {
  if (train_features.rows() == 0) {
    throw std::invalid_argument("FitStandardizer: empty training matrix");
  }
  const double n = static_cast<double>(train_features.rows());
  Standardizer s;
  s.means = train_features.colwise().sum().transpose() / n;
  s.stds.resize(train_features.cols());
  for (Eigen::Index j = 0; j < train_features.cols(); ++j) {
    const double var =
        (train_features.col(j).array() - s.means(j)).square().sum() / n;
    s.stds(j) = std::sqrt(var);
  }
  return s;
}

std::vector<std::vector<size_t>> StratifiedDeal(std::span<const int> labels,
                                                int buckets, uint64_t seed) {
  if (buckets < 1) {
    throw std::invalid_argument("number of groups must be positive, got " +
                                std::to_string(buckets));
  }
  CheckBinaryLabels(labels);
  std::vector<size_t> by_class[2];
  for (size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < static_cast<size_t>(buckets)) {
      throw std::invalid_argument(
          "class " + std::to_string(c) + " has " +
          std::to_string(by_class[c].size()) + " members, fewer than " +
          std::to_string(buckets) + " groups");
    }
  }

  Rng rng(seed);
  std::vector<std::vector<size_t>> groups(buckets);
  size_t next = 0;
  for (int c = 0; c < 2; ++c) {
    rng.Shuffle(by_class[c]);
    for (size_t idx : by_class[c]) {
      groups[next].push_back(idx);
      next = (next + 1) % static_cast<size_t>(buckets);
    }
  }
  for (auto& g : groups) std::sort(g.begin(), g.end());
  return groups;
}

std::vector<FoldSplit> StratifiedKFold(std::span<const int> labels, int k,
                                       uint64_t seed) {
  if (k < 2) throw std::invalid_argument("k-fold needs k >= 2");
  const std::vector<std::vector<size_t>> tests =
      StratifiedDeal(labels, k, seed);
  std::vector<int> fold_of(labels.size());
  for (int f = 0; f < k; ++f) {
    for (size_t i : tests[f]) fold_of[i] = f;
  }
  std::vector<FoldSplit> folds(k);
  for (int f = 0; f < k; ++f) {
    folds[f].fold_index = f;
    folds[f].test_indices = tests[f];
    for (size_t i = 0; i < labels.size(); ++i) {
      if (fold_of[i] != f) folds[f].train_indices.push_back(i);
    }
  }
  return folds;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  true_negatives += other.true_negatives;
  false_positives += other.false_positives;
  false_negatives += other.false_negatives;
  true_positives += other.true_positives;
  return *this;
}

ConfusionMatrix Confusion(std::span<const int> labels,
                          std::span<const int> predictions) {
  if (labels.size() != predictions.size()) {
    throw std::invalid_argument("Confusion: label/prediction length mismatch");
  }
  CheckBinaryLabels(labels);
  CheckBinaryLabels(predictions);
  ConfusionMatrix cm;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      (predictions[i] == 1 ? cm.true_positives : cm.false_negatives) += 1;
    } else {
      (predictions[i] == 1 ? cm.false_positives : cm.true_negatives) += 1;
    }
  }
  return cm;
}

double F1(const ConfusionMatrix& cm) {
  const int64_t denom =
      2 * cm.true_positives + cm.false_positives + cm.false_negatives;
  if (denom == 0) return 0.0;
  return static_cast<double>(2 * cm.true_positives) /
         static_cast<double>(denom);
}

RocResult RocAuc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("RocAuc: score/label length mismatch");
  }
  CheckBinaryLabels(labels);
  const int64_t positives = std::count(labels.begin(), labels.end(), 1);
  const int64_t negatives = static_cast<int64_t>(labels.size()) - positives;
  if (positives == 0 || negatives == 0) {
    throw SingleClassError("RocAuc needs both classes present");
  }
  for (double s : scores) {
    if (std::isnan(s)) throw std::invalid_argument("RocAuc: NaN score");
  }

  // Descending score order; each run of equal scores is one threshold.
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });

  RocResult result;
  result.curve.push_back({0.0, 0.0});
  // Twice the Mann-Whitney U, kept integral so ties stay exact.
  int64_t twice_u = 0;
  int64_t tp = 0;
  int64_t fp = 0;
  size_t i = 0;
  while (i < order.size()) {
    int64_t group_pos = 0;
    int64_t group_neg = 0;
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      (labels[order[i]] == 1 ? group_pos : group_neg) += 1;
    }
    // Positives in this group beat every negative ranked below them
    // (negatives - fp - group_neg) and tie with the group's negatives.
    twice_u += group_pos * (2 * (negatives - fp - group_neg) + group_neg);
    tp += group_pos;
    fp += group_neg;
    result.curve.push_back({static_cast<double>(fp) / negatives,
                            static_cast<double>(tp) / positives});
  }
  result.auc = static_cast<double>(twice_u) /
               (2.0 * static_cast<double>(positives) *
                static_cast<double>(negatives));
  return result;
}

double DeltaF1(double f1_before, double f1_after) {
  auto in_range = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_range(f1_before) || !in_range(f1_after)) {
    throw std::invalid_argument("DeltaF1: F1 values must lie in [0, 1]");
  }
  return std::abs(f1_before - f1_after);
}

double Mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double PopulationStd(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double mean = Mean(values);
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return std::sqrt(sq / static_cast<double>(values.size()));
}

}  // namespace sisa_rl
