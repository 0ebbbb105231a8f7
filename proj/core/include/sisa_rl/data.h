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

#ifndef SISA_RL_DATA_H_
#define SISA_RL_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sisa_rl {

enum class DataErrorCode {
  kMissingFile,
  kMalformedRow,
  kNonBinaryLabel,
  kNonFiniteValue,
  kEmptySelection,
  kIndexOutOfRange,
  kDuplicateIndex,
  kInvalidSpec,
  kIoFailure,
};

class DataError : public std::runtime_error {
 public:
  DataError(DataErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  DataErrorCode code() const { return code_; }

 private:
  DataErrorCode code_;
};

// Labeled feature vectors, one sample per row.
struct Dataset {
  Eigen::MatrixXd features;  // n x d
  std::vector<int> labels;   // n, each 0 or 1
  std::vector<std::string> feature_names;  // empty or d entries

  size_t size() const { return labels.size(); }
  int dim() const { return static_cast<int>(features.cols()); }

  // Throws DataError if the invariants (finite, binary, consistent shapes)
  // do not hold.
  void Validate() const;
  bool operator==(const Dataset& other) const;
};

// CSV: header `f0,...,f{d-1},label` (any feature names are kept), one sample
// per line, label 0 or 1.
Dataset LoadDataset(const std::filesystem::path& path);

// Writes features with the shortest representation that reads back to the
// same double, so Save then Load is bit-exact.
void SaveDataset(const Dataset& dataset, const std::filesystem::path& path);

struct SynthSpec {
  int n_per_class = 1000;
  int dim = 103;
  // Class means sit at -separation/2 and +separation/2 on every informative
  // dimension, in units of the (unit) within-class std.
  double class_separation = 1.0;
  int noise_dims = 50;
  uint64_t seed = 1;

  void Validate() const;
};

// Balanced two-class Gaussian data; rows are in seeded random order.
Dataset GenerateSynthetic(const SynthSpec& spec);

// Row subset in index-list order.
Dataset SplitRows(const Dataset& dataset, std::span<const size_t> indices);

// Matrix-only variant for callers that keep features and labels apart.
Eigen::MatrixXd SelectRows(const Eigen::MatrixXd& features,
                           std::span<const size_t> indices);
std::vector<int> SelectLabels(std::span<const int> labels,
                              std::span<const size_t> indices);

}  // namespace sisa_rl

#endif  // SISA_RL_DATA_H_
