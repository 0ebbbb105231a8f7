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

#include "sisa_rl/data.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <algorithm>
#include <string_view>

#include "sisa_rl/random.h"

namespace sisa_rl {
namespace {

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> cells;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

std::string Where(const std::filesystem::path& path, size_t line_no) {
  return path.string() + ":" + std::to_string(line_no) + ": ";
}

void CheckIndices(size_t n, std::span<const size_t> indices) {
  if (indices.empty()) {
    throw DataError(DataErrorCode::kEmptySelection, "row selection is empty");
  }
  std::vector<bool> seen(n, false);
  for (size_t i : indices) {
    if (i >= n) {
      throw DataError(DataErrorCode::kIndexOutOfRange,
                      "row index " + std::to_string(i) + " out of range (n=" +
                          std::to_string(n) + ")");
    }
    if (seen[i]) {
      throw DataError(DataErrorCode::kDuplicateIndex,
                      "duplicate row index " + std::to_string(i));
    }
    seen[i] = true;
  }
}

}  // namespace

void Dataset::Validate() const {
  if (static_cast<size_t>(features.rows()) != labels.size()) {
    throw DataError(DataErrorCode::kMalformedRow,
                    "feature rows and label count differ");
  }
  if (!feature_names.empty() &&
      feature_names.size() != static_cast<size_t>(features.cols())) {
    throw DataError(DataErrorCode::kMalformedRow,
                    "feature_names length differs from dimension");
  }
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw DataError(DataErrorCode::kNonBinaryLabel,
                      "row " + std::to_string(i) + ": label " +
                          std::to_string(labels[i]) + " is not 0/1");
    }
  }
  if (!features.allFinite()) {
    throw DataError(DataErrorCode::kNonFiniteValue,
                    "dataset contains NaN or Inf");
  }
}

bool Dataset::operator==(const Dataset& other) const {
  return features.rows() == other.features.rows() &&
         features.cols() == other.features.cols() &&
         (features.array() == other.features.array()).all() &&
         labels == other.labels && feature_names == other.feature_names;
}

Dataset LoadDataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError(DataErrorCode::kMissingFile,
                    "cannot open dataset " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(DataErrorCode::kMalformedRow,
                    Where(path, 1) + "missing header");
  }
  std::vector<std::string_view> header = SplitCommas(Trim(line));
  if (header.size() < 2 || Trim(header.back()) != "label") {
    throw DataError(DataErrorCode::kMalformedRow,
                    Where(path, 1) + "header must end with a 'label' column");
  }
  const size_t dim = header.size() - 1;

  Dataset ds;
  for (size_t j = 0; j < dim; ++j) ds.feature_names.emplace_back(Trim(header[j]));

  std::vector<double> values;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = Trim(line);
    if (row.empty()) continue;
    const std::vector<std::string_view> cells = SplitCommas(row);
    if (cells.size() != dim + 1) {
      throw DataError(DataErrorCode::kMalformedRow,
                      Where(path, line_no) + "expected " +
                          std::to_string(dim + 1) + " fields, got " +
                          std::to_string(cells.size()));
    }
    for (size_t j = 0; j < dim; ++j) {
      const std::string_view cell = Trim(cells[j]);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw DataError(DataErrorCode::kMalformedRow,
                        Where(path, line_no) + "bad number '" +
                            std::string(cell) + "'");
      }
      if (!std::isfinite(v)) {
        throw DataError(DataErrorCode::kNonFiniteValue,
                        Where(path, line_no) + "non-finite value in column " +
                            std::to_string(j));
      }
      values.push_back(v);
    }
    const std::string_view label = Trim(cells[dim]);
    if (label != "0" && label != "1") {
      // Distinguish a numeric-but-wrong label from garbage.
      double v = 0.0;
      auto [ptr, ec] =
          std::from_chars(label.data(), label.data() + label.size(), v);
      if (ec == std::errc() && ptr == label.data() + label.size()) {
        throw DataError(DataErrorCode::kNonBinaryLabel,
                        Where(path, line_no) + "label '" + std::string(label) +
                            "' is not 0/1");
      }
      throw DataError(DataErrorCode::kMalformedRow,
                      Where(path, line_no) + "bad label '" +
                          std::string(label) + "'");
    }
    ds.labels.push_back(label == "1" ? 1 : 0);
  }

  const Eigen::Index n = static_cast<Eigen::Index>(ds.labels.size());
  ds.features.resize(n, static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (size_t j = 0; j < dim; ++j) {
      ds.features(i, static_cast<Eigen::Index>(j)) = values[i * dim + j];
    }
  }
  return ds;
}

void SaveDataset(const Dataset& dataset, const std::filesystem::path& path) {
  dataset.Validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw DataError(DataErrorCode::kIoFailure,
                    "cannot write dataset " + path.string());
  }
  const int d = dataset.dim();
  for (int j = 0; j < d; ++j) {
    if (dataset.feature_names.empty()) {
      out << 'f' << j;
    } else {
      out << dataset.feature_names[j];
    }
    out << ',';
  }
  out << "label\n";
  char buf[64];
  for (size_t i = 0; i < dataset.size(); ++i) {
    for (int j = 0; j < d; ++j) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf),
                                     dataset.features(static_cast<Eigen::Index>(i), j));
      out.write(buf, ptr - buf);
      out << ',';
    }
    out << dataset.labels[i] << '\n';
  }
  if (!out) {
    throw DataError(DataErrorCode::kIoFailure,
                    "write failed for " + path.string());
  }
}

void SynthSpec::Validate() const {
  auto fail = [](const std::string& msg) {
    throw DataError(DataErrorCode::kInvalidSpec, "invalid synth spec: " + msg);
  };
  if (n_per_class < 1) fail("n_per_class must be positive");
  if (dim < 1) fail("dim must be positive");
  if (noise_dims < 0 || noise_dims > dim) fail("need 0 <= noise_dims <= dim");
  if (!(class_separation >= 0.0) || !std::isfinite(class_separation)) {
    fail("class_separation must be finite and non-negative");
  }
}

Dataset GenerateSynthetic(const SynthSpec& spec) {
  spec.Validate();
  Rng rng(spec.seed);
  const size_t n = 2 * static_cast<size_t>(spec.n_per_class);
  const int informative = spec.dim - spec.noise_dims;
  const double half = spec.class_separation / 2.0;

  Dataset ds;
  ds.labels.assign(n, 0);
  std::fill(ds.labels.begin() + spec.n_per_class, ds.labels.end(), 1);
  rng.Shuffle(ds.labels);

  ds.features.resize(static_cast<Eigen::Index>(n), spec.dim);
  for (size_t i = 0; i < n; ++i) {
    const double mean = ds.labels[i] == 1 ? half : -half;
    for (int j = 0; j < spec.dim; ++j) {
      const double shift = j < informative ? mean : 0.0;
      ds.features(static_cast<Eigen::Index>(i), j) = shift + rng.Normal();
    }
  }
  for (int j = 0; j < spec.dim; ++j) ds.feature_names.push_back("f" + std::to_string(j));
  return ds;
}

Eigen::MatrixXd SelectRows(const Eigen::MatrixXd& features,
                           std::span<const size_t> indices) {
  CheckIndices(static_cast<size_t>(features.rows()), indices);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(indices.size()), features.cols());
  for (size_t r = 0; r < indices.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) =
        features.row(static_cast<Eigen::Index>(indices[r]));
  }
  return out;
}

std::vector<int> SelectLabels(std::span<const int> labels,
                              std::span<const size_t> indices) {
  CheckIndices(labels.size(), indices);
  std::vector<int> out;
  out.reserve(indices.size());
  for (size_t i : indices) out.push_back(labels[i]);
  return out;
}

Dataset SplitRows(const Dataset& dataset, std::span<const size_t> indices) {
  Dataset out;
  out.features = SelectRows(dataset.features, indices);
  out.labels = SelectLabels(dataset.labels, indices);
  out.feature_names = dataset.feature_names;
  return out;
}

}  // namespace sisa_rl
