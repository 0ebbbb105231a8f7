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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "sisa_rl/byte_io.h"
#include "sisa_rl/experiment.h"

namespace sisa_rl {
namespace {

using nlohmann::json;

constexpr const char* kReportFormat = "sisa_rl.report";
constexpr int kReportVersion = 1;
constexpr const char* kReportFile = "report.jsonl";
constexpr double kAggregateTolerance = 1e-12;

std::string Num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

json ConfusionToJson(const ConfusionMatrix& cm) {
  return {{"tn", cm.true_negatives},
          {"fp", cm.false_positives},
          {"fn", cm.false_negatives},
          {"tp", cm.true_positives}};
}

ConfusionMatrix ConfusionFromJson(const json& j) {
  ConfusionMatrix cm;
  cm.true_negatives = j.at("tn").get<int64_t>();
  cm.false_positives = j.at("fp").get<int64_t>();
  cm.false_negatives = j.at("fn").get<int64_t>();
  cm.true_positives = j.at("tp").get<int64_t>();
  return cm;
}

// Scalar summary fields, shared by the writer and the consistency check.
const std::vector<std::pair<const char*, double AlgorithmSummary::*>>&
SummaryFields() {
  using S = AlgorithmSummary;
  static const std::vector<std::pair<const char*, double S::*>> fields = {
      {"f1_mean", &S::f1_mean},
      {"f1_std", &S::f1_std},
      {"worst_fold_f1", &S::worst_fold_f1},
      {"oof_auc", &S::oof_auc},
      {"oof_f1", &S::oof_f1},
      {"mean_baseline_train_seconds", &S::mean_baseline_train_seconds},
      {"total_baseline_train_seconds", &S::total_baseline_train_seconds},
      {"mean_inference_seconds", &S::mean_inference_seconds},
      {"mean_sisa_train_seconds", &S::mean_sisa_train_seconds},
      {"total_sisa_train_seconds", &S::total_sisa_train_seconds},
      {"mean_unlearn_seconds", &S::mean_unlearn_seconds},
      {"total_unlearn_seconds", &S::total_unlearn_seconds},
      {"mean_sisa_f1_before", &S::mean_sisa_f1_before},
      {"mean_sisa_f1_after", &S::mean_sisa_f1_after},
      {"mean_delta_f1", &S::mean_delta_f1},
  };
  return fields;
}

json FoldToJson(const FoldRecord& f) {
  return {{"type", "fold"},
          {"algorithm", std::string(AlgorithmName(f.algorithm))},
          {"fold", f.fold},
          {"train_size", f.train_size},
          {"test_size", f.test_size},
          {"baseline_train_seconds", f.baseline_train_seconds},
          {"baseline_inference_seconds", f.baseline_inference_seconds},
          {"baseline_f1", f.baseline_f1},
          {"baseline_auc", f.baseline_auc},
          {"baseline_confusion", ConfusionToJson(f.baseline_confusion)},
          {"sisa_train_seconds", f.sisa_train_seconds},
          {"shard_train_seconds", f.shard_train_seconds},
          {"sisa_f1_before", f.sisa_f1_before},
          {"unlearn_seconds", f.unlearn_seconds},
          {"sisa_f1_after", f.sisa_f1_after},
          {"delta_f1", f.delta_f1},
          {"forgotten_count", f.forgotten_count}};
}

FoldRecord FoldFromJson(const json& j) {
  FoldRecord f;
  f.algorithm = ParseAlgorithm(j.at("algorithm").get<std::string>());
  f.fold = j.at("fold").get<int>();
  f.train_size = j.at("train_size").get<size_t>();
  f.test_size = j.at("test_size").get<size_t>();
  f.baseline_train_seconds = j.at("baseline_train_seconds").get<double>();
  f.baseline_inference_seconds = j.at("baseline_inference_seconds").get<double>();
  f.baseline_f1 = j.at("baseline_f1").get<double>();
  f.baseline_auc = j.at("baseline_auc").get<double>();
  f.baseline_confusion = ConfusionFromJson(j.at("baseline_confusion"));
  f.sisa_train_seconds = j.at("sisa_train_seconds").get<double>();
  f.shard_train_seconds = j.at("shard_train_seconds").get<std::vector<double>>();
  f.sisa_f1_before = j.at("sisa_f1_before").get<double>();
  f.unlearn_seconds = j.at("unlearn_seconds").get<double>();
  f.sisa_f1_after = j.at("sisa_f1_after").get<double>();
  f.delta_f1 = j.at("delta_f1").get<double>();
  f.forgotten_count = j.at("forgotten_count").get<size_t>();
  if (std::abs(f.delta_f1 - std::abs(f.sisa_f1_before - f.sisa_f1_after)) >
      kAggregateTolerance) {
    throw FormatError("fold record delta_f1 != |before - after|");
  }
  return f;
}

json SummaryToJson(const AlgorithmSummary& s) {
  json j = {{"type", "summary"},
            {"algorithm", std::string(AlgorithmName(s.algorithm))},
            {"oof_confusion", ConfusionToJson(s.oof_confusion)}};
  for (const auto& [name, field] : SummaryFields()) j[name] = s.*field;
  return j;
}

std::ofstream OpenCsv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void WriteTables(const ExperimentReport& report,
                 const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);

  std::ofstream t3 = OpenCsv(directory / "table3.csv");
  t3 << "model,id_f1_mean,id_f1_std,worst_fold_f1,oof_auc,train_time_s,"
        "inference_time_s\n";
  std::ofstream t4 = OpenCsv(directory / "table4.csv");
  t4 << "model,f1_before,f1_after,delta_f1\n";
  std::ofstream t5 = OpenCsv(directory / "table5.csv");
  t5 << "model,baseline_train_s,sisa_full_train_s,one_shard_unlearn_s\n";
  std::ofstream roc = OpenCsv(directory / "roc_points.csv");
  roc << "model,fpr,tpr\n";
  std::ofstream cm = OpenCsv(directory / "confusion.csv");
  cm << "model,tn,fp,fn,tp\n";
  std::ofstream rt = OpenCsv(directory / "runtime_per_fold.csv");
  rt << "model,fold,baseline_train_s,sisa_full_train_s,one_shard_unlearn_s,"
        "baseline_inference_s\n";

  for (const AlgorithmResult& r : report.results) {
    const AlgorithmSummary& s = r.summary;
    const std::string model(AlgorithmName(s.algorithm));
    t3 << model << ',' << Num(s.f1_mean) << ',' << Num(s.f1_std) << ','
       << Num(s.worst_fold_f1) << ',' << Num(s.oof_auc) << ','
       << Num(s.mean_baseline_train_seconds) << ','
       << Num(s.mean_inference_seconds) << '\n';
    t4 << model << ',' << Num(s.mean_sisa_f1_before) << ','
       << Num(s.mean_sisa_f1_after) << ',' << Num(s.mean_delta_f1) << '\n';
    t5 << model << ',' << Num(s.mean_baseline_train_seconds) << ','
       << Num(s.mean_sisa_train_seconds) << ',' << Num(s.mean_unlearn_seconds)
       << '\n';
    for (const RocPoint& p : s.roc_curve) {
      roc << model << ',' << Num(p.false_positive_rate) << ','
          << Num(p.true_positive_rate) << '\n';
    }
    const ConfusionMatrix& c = s.oof_confusion;
    cm << model << ',' << c.true_negatives << ',' << c.false_positives << ','
       << c.false_negatives << ',' << c.true_positives << '\n';
    for (const FoldRecord& f : r.folds) {
      rt << model << ',' << f.fold << ',' << Num(f.baseline_train_seconds)
         << ',' << Num(f.sisa_train_seconds) << ',' << Num(f.unlearn_seconds)
         << ',' << Num(f.baseline_inference_seconds) << '\n';
    }
  }
  for (std::ofstream* f : {&t3, &t4, &t5, &roc, &cm, &rt}) {
    f->flush();
    if (!*f) throw std::runtime_error("write failed in " + directory.string());
  }
}

void EmitReport(const ExperimentReport& report,
                const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  std::string out;
  json config = json::array();
  for (const auto& [key, value] : report.config) config.push_back({key, value});
  out += json{{"type", "header"},
              {"format", kReportFormat},
              {"version", kReportVersion},
              {"tool_version", report.tool_version},
              {"config", config}}
             .dump() +
         "\n";
  for (const AlgorithmResult& r : report.results) {
    for (const FoldRecord& f : r.folds) out += FoldToJson(f).dump() + "\n";
    out += json{{"type", "oof"},
                {"algorithm", std::string(AlgorithmName(r.summary.algorithm))},
                {"sample_indices", r.oof.sample_indices},
                {"labels", r.oof.labels},
                {"predictions", r.oof.predictions},
                {"qscores", r.oof.qscores}}
               .dump() +
           "\n";
    out += SummaryToJson(r.summary).dump() + "\n";
  }
  WriteFileBytes(directory / kReportFile, out);

  std::string config_text;
  for (const auto& [key, value] : report.config) {
    config_text += key + " = " + value + "\n";
  }
  WriteFileBytes(directory / "config.txt", config_text);
  WriteTables(report, directory);
}

ExperimentReport LoadReport(const std::filesystem::path& path) {
  const std::filesystem::path file =
      std::filesystem::is_directory(path) ? path / kReportFile : path;
  std::istringstream in(ReadFileBytes(file));
  ExperimentReport report;

  struct Pending {
    std::vector<FoldRecord> folds;
    OutOfFold oof;
    bool have_oof = false;
    json stored_summary;
  };
  std::vector<Algorithm> order;
  std::map<Algorithm, Pending> pending;
  auto slot = [&](Algorithm a) -> Pending& {
    if (std::find(order.begin(), order.end(), a) == order.end()) {
      order.push_back(a);
    }
    return pending[a];
  };

  std::string line;
  int line_no = 0;
  bool have_header = false;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const json j = json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        if (j.at("format") != kReportFormat ||
            j.at("version").get<int>() != kReportVersion) {
          throw FormatError("unsupported report format");
        }
        report.tool_version = j.at("tool_version").get<std::string>();
        for (const json& kv : j.at("config")) {
          report.config.emplace_back(kv.at(0).get<std::string>(),
                                     kv.at(1).get<std::string>());
        }
        have_header = true;
      } else if (type == "fold") {
        FoldRecord f = FoldFromJson(j);
        slot(f.algorithm).folds.push_back(std::move(f));
      } else if (type == "oof") {
        Pending& p = slot(ParseAlgorithm(j.at("algorithm").get<std::string>()));
        p.oof.sample_indices = j.at("sample_indices").get<std::vector<size_t>>();
        p.oof.labels = j.at("labels").get<std::vector<int>>();
        p.oof.predictions = j.at("predictions").get<std::vector<int>>();
        p.oof.qscores = j.at("qscores").get<std::vector<double>>();
        p.have_oof = true;
      } else if (type == "summary") {
        slot(ParseAlgorithm(j.at("algorithm").get<std::string>()))
            .stored_summary = j;
      } else {
        throw FormatError("unknown record type '" + type + "'");
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(file.string() + ":" + std::to_string(line_no) + ": " +
                      e.what());
  }
  if (!have_header) throw FormatError(file.string() + ": missing header line");

  for (Algorithm a : order) {
    Pending& p = pending[a];
    if (!p.have_oof || p.stored_summary.is_null() || p.folds.empty()) {
      throw FormatError("incomplete results for " +
                        std::string(AlgorithmName(a)));
    }
    AlgorithmResult r;
    r.summary = Summarize(a, p.folds, p.oof);
    for (const auto& [name, field] : SummaryFields()) {
      const double stored = p.stored_summary.at(name).get<double>();
      if (!(std::abs(stored - r.summary.*field) <= kAggregateTolerance)) {
        throw FormatError("aggregate '" + std::string(name) + "' for " +
                          std::string(AlgorithmName(a)) +
                          " does not match its fold records");
      }
    }
    if (ConfusionFromJson(p.stored_summary.at("oof_confusion")) !=
        r.summary.oof_confusion) {
      throw FormatError("stored OOF confusion does not match predictions");
    }
    r.folds = std::move(p.folds);
    r.oof = std::move(p.oof);
    report.results.push_back(std::move(r));
  }
  return report;
}

void PrintTables(const ExperimentReport& report, std::ostream& out) {
  char buf[256];
  out << "In-distribution detection (baseline agents)\n";
  out << "  model   F1 mean +- std     worst F1  OOF AUC   train s   infer s\n";
  for (const AlgorithmResult& r : report.results) {
    const AlgorithmSummary& s = r.summary;
    std::snprintf(buf, sizeof(buf),
                  "  %-6s  %.4f +- %.4f   %.4f    %.4f    %7.2f   %.4f\n",
                  std::string(AlgorithmName(s.algorithm)).c_str(), s.f1_mean,
                  s.f1_std, s.worst_fold_f1, s.oof_auc,
                  s.mean_baseline_train_seconds, s.mean_inference_seconds);
    out << buf;
  }
  out << "\nUtility before/after one-shard unlearning\n";
  out << "  model   F1 before  F1 after  delta F1\n";
  for (const AlgorithmResult& r : report.results) {
    const AlgorithmSummary& s = r.summary;
    std::snprintf(buf, sizeof(buf), "  %-6s  %.4f     %.4f    %.4f\n",
                  std::string(AlgorithmName(s.algorithm)).c_str(),
                  s.mean_sisa_f1_before, s.mean_sisa_f1_after,
                  s.mean_delta_f1);
    out << buf;
  }
  out << "\nTraining cost (mean seconds per fold)\n";
  out << "  model   baseline   SISA full   one-shard unlearn\n";
  for (const AlgorithmResult& r : report.results) {
    const AlgorithmSummary& s = r.summary;
    std::snprintf(buf, sizeof(buf), "  %-6s  %8.2f   %9.2f   %9.2f\n",
                  std::string(AlgorithmName(s.algorithm)).c_str(),
                  s.mean_baseline_train_seconds, s.mean_sisa_train_seconds,
                  s.mean_unlearn_seconds);
    out << buf;
  }
}

}  // namespace sisa_rl
