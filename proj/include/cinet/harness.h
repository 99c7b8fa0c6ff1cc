// Copyright 2026 The CINet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Simulation studies, fits to ingested data, and report emission.

#ifndef CINET_HARNESS_H_
#define CINET_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cinet/config.h"
#include "cinet/estimands.h"

namespace cinet {

// One number produced for one replicate by one estimator.
struct EstimateRecord {
  int replicate = 0;  // 1-based
  std::uint64_t seed = 0;
  std::string estimator;  // cinet_gibbs, cinet_mle, ipw, fixed_network,
                          // random_graph, diagnostics
  std::string parameter;
  double value = 0.0;
};

struct FailureRecord {
  int replicate = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct SummaryRow {
  std::string estimator;
  std::string parameter;
  double mean = 0.0;
  double sd = 0.0;
  int count = 0;
};

struct StudyReport {
  std::string mode;  // simulate or fit
  int n = 0;
  int k = 0;
  int replicates_requested = 0;
  std::vector<EstimateRecord> estimates;  // ordered by replicate
  std::vector<FailureRecord> failures;
  std::vector<SummaryRow> summary;
  // Truth for simulate mode: parameter name -> value, including lambda_k_kp,
  // direct, and indirect.
  std::map<std::string, double> truth;
  std::vector<std::string> warnings;
  // Fit mode: effect table under detected labels.
  std::vector<EffectEstimate> effects;
  // Thinned posterior draws per replicate (estimator cinet_gibbs).
  std::vector<EstimateRecord> pooled_draws;
  // Further artifacts (file name -> contents) written alongside the report.
  std::map<std::string, std::string> extra_files;
};

// Recomputes summary rows from the per-replicate estimates.
std::vector<SummaryRow> Summarize(const std::vector<EstimateRecord>& estimates);

// Pooled draws kept per replicate for the pooled posterior figure.
inline constexpr int kPooledDrawsPerReplicate = 100;

StudyReport RunSimulationStudy(const ExperimentConfig& config);
StudyReport RunFit(const ExperimentConfig& config);

// Writes the report files and manifest under config.io.output_dir.
void WriteStudy(const ExperimentConfig& config, const StudyReport& report);

// Reads back a study directory written by WriteStudy.
StudyReport LoadReport(const std::filesystem::path& dir);

enum class FigureKind { kFig1, kTable1 };

// Writes fig1.csv and fig1_truth.csv, or table1.csv, into `dir` and refreshes
// the manifest. Returns the written paths.
std::vector<std::filesystem::path> EmitFigureData(const StudyReport& report,
                                                  FigureKind which,
                                                  const std::filesystem::path& dir);

struct FitFixture {
  std::filesystem::path edges;
  std::filesystem::path outcomes;
  std::filesystem::path labels;
};

// Simulates one replicate of `design` and writes it as fit-mode input:
// edges.csv (observed network), outcomes.csv, and true_labels.csv. Node ids
// are "u001", "u002", ... in shuffled order so that file order carries no
// community information.
FitFixture WriteFitFixture(const SimulationDesign& design, std::uint64_t seed,
                           const std::filesystem::path& dir);

// Hex SHA-256 of a file.
std::string Sha256File(const std::filesystem::path& path);

// Message attached when multi-start optima tie in likelihood but disagree in
// parameters.
inline constexpr const char* kNonIdentifiabilityWarning =
    "multi-start optima have near-equal likelihood but distant parameters; "
    "interference effects may be non-identifiable (sender effects look "
    "homogeneous within a receiver community)";

}  // namespace cinet

#endif  // CINET_HARNESS_H_
