// risk/eval.hpp

// Copyright 2026  RISK subspace recovery authors

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

#ifndef RISK_EVAL_HPP
#define RISK_EVAL_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "risk/model.hpp"
#include "risk/synth.hpp"

namespace risk {

struct CellMetrics {
  std::uint8_t group = 0;
  std::int32_t label = 0;
  Eigen::Index count = 0;
  Eigen::Index correct = 0;
  double accuracy = 0.0;
};

/// Overall accuracy plus the per-(group x class) breakdown of one split.
struct Metrics {
  Split split = Split::id_test;
  Eigen::Index n_examples = 0;
  double accuracy = 0.0;
  std::vector<CellMetrics> cells;  // ordered by (group, label)
};

/// Exact counting over the split; requires a non-empty split containing
/// every class.
Metrics evaluate(const RiskModel& model, const FeatureDataset& ds, Split split);

struct SweepPoint {
  double value = 0.0;
  std::uint64_t seed = 0;
  double id_accuracy = 0.0;
  double ood_accuracy = 0.0;
};

struct SweepAggregate {
  double value = 0.0;
  double id_mean = 0.0, id_std = 0.0;
  double ood_mean = 0.0, ood_std = 0.0;
};

struct SweepResult {
  std::string parameter;  // "lambda" or "d"
  std::vector<double> grid;
  int n_seeds = 0;
  std::uint64_t base_seed = 0;
  std::vector<SweepPoint> runs;            // grid-major, then seed order
  std::vector<SweepAggregate> aggregates;  // one per grid value
  double best_id_value = 0.0;   // grid value with the best mean ID accuracy
  double best_ood_value = 0.0;  // grid value with the best mean OOD accuracy
};

/// Trains n_seeds models per grid value (run seeds derive from base.seed so
/// no two runs share one), evaluates on the ID-test and OOD splits and
/// aggregates with population std.  Independent runs may execute in parallel
/// (RISK_THREADS, default 1); aggregation order is grid order then seed
/// order either way.
SweepResult sweep(const FeatureDataset& ds, const TrainConfig& base,
                  const std::string& parameter, const std::vector<double>& grid,
                  int n_seeds);

struct AlignmentReport {
  Vector angles;  // principal angles to the planted intended subspace, ascending
  bool linearized = false;  // encoder was linearized at the data mean
  double model_objective = 0.0;   // least-absolute-deviations objective of the
                                  // model subspace on the given features
  double oracle_objective = 0.0;  // grid-search minimum (D <= 3 only)
  bool has_oracle = false;
};

/// Principal angles between the recovered subspace, mapped to input space,
/// and the planted intended subspace.  With proj_on_input the recovery layer
/// already acts on the input space; otherwise the encoder is linearized at
/// the mean of `features` and the report flags it.
AlignmentReport alignment_report(const RiskModel& model, const PlantedBases& bases,
                                 const Matrix& features);

// JSON documents carry {"schema": "report_v1", "kind": ...}.
nlohmann::json to_report_json(const Metrics& metrics);
nlohmann::json to_report_json(const TrainReport& report);
nlohmann::json to_report_json(const SweepResult& sweep);
nlohmann::json to_report_json(const AlignmentReport& report);

enum class ReportFormat { json, csv };
ReportFormat parse_report_format(const std::string& name);

void report_write(const Metrics& metrics, const std::filesystem::path& path,
                  ReportFormat format);
void report_write(const TrainReport& report, const std::filesystem::path& path,
                  ReportFormat format);
void report_write(const SweepResult& sweep, const std::filesystem::path& path,
                  ReportFormat format);
void report_write(const AlignmentReport& report, const std::filesystem::path& path,
                  ReportFormat format);

}  // namespace risk

#endif  // RISK_EVAL_HPP
