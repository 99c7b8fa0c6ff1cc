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

// Experiment configuration: one YAML document per study.
//
//   schema_version: 1
//   mode: simulate            # or fit
//   generative:
//     n: 100
//     k: 2
//     within_prob: 0.5        # observed network
//     between_prob: 0.1
//     lambda_within: 2.5      # expected treated senders per receiver
//     lambda_between: 0.5
//     beta: [[2, 1], [1, 2]]  # optional, sender rows
//     pi: [[...]]             # optional, overrides the lambda settings
//     gamma: 4.0
//     beta0: 0.0
//     sigma_eps: 1.0
//     treatment_prob: 0.5
//     replicates: 100
//     seed: 1
//   estimation:
//     method: all             # mle, gibbs, baselines, all, or a list
//     k: 2                    # fit mode; simulate mode uses generative.k
//     priors: {coef_sd: 10, sigma2_shape: 2, sigma2_rate: 2, pi_a: 1, pi_b: 1}
//     mcmc: {n_iter: 4000, n_burnin: 2000, n_chains: 2, thin: 1}
//     optimizer: {starts: 8, max_iterations: 1000}
//     detection: {kmeans_restarts: 10, refine: true}
//   io:
//     output_dir: out/study
//     edges: edges.csv        # fit mode
//     outcomes: outcomes.csv  # fit mode
//     directed: true

#ifndef CINET_CONFIG_H_
#define CINET_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cinet/estimation.h"
#include "cinet/netgen.h"
#include "cinet/simulation.h"

namespace cinet {

inline constexpr int kConfigSchemaVersion = 1;

enum class StudyMode { kSimulate, kFit };
enum class EstimationMethod { kMle, kGibbs, kBaselines, kAll };

struct GenerativeConfig {
  int n = 100;
  int k = 2;
  double within_prob = 0.5;
  double between_prob = 0.1;
  double lambda_within = 2.5;
  double lambda_between = 0.5;
  std::optional<Eigen::MatrixXd> beta;
  std::optional<Eigen::MatrixXd> pi;
  double gamma = 4.0;
  double beta0 = 0.0;
  double sigma_eps = 1.0;
  double treatment_prob = 0.5;
  int replicates = 100;
  std::uint64_t seed = 1;
};

struct EstimationConfig {
  // Any combination; kAll stands for the other three.
  std::vector<EstimationMethod> methods{EstimationMethod::kAll};
  std::optional<int> k;
  PriorConfig priors;
  McmcConfig mcmc;
  int starts = 8;
  int max_iterations = 1000;
  int kmeans_restarts = 10;
  bool refine = true;

  bool Runs(EstimationMethod method) const;
};

struct IoConfig {
  std::filesystem::path output_dir = "out";
  std::filesystem::path edges;
  std::filesystem::path outcomes;
  bool directed = true;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  StudyMode mode = StudyMode::kSimulate;
  GenerativeConfig generative;
  EstimationConfig estimation;
  IoConfig io;
  // Keys that were absent from the source document and took defaults that
  // stand in for unstated design choices (noise scale, intercept,
  // assignment probability).
  std::vector<std::string> assumed;

  // Relative io paths resolve against this directory.
  std::filesystem::path base_dir;

  void Validate() const;
  int FitK() const { return estimation.k.value_or(generative.k); }
  std::filesystem::path Resolve(const std::filesystem::path& p) const;
};

std::string_view StudyModeName(StudyMode mode);
std::string_view EstimationMethodName(EstimationMethod method);

ExperimentConfig ParseConfig(const std::string& yaml_text);
ExperimentConfig LoadConfig(const std::filesystem::path& path);
std::string SerializeConfig(const ExperimentConfig& config);

// Generative design described by the config: the benchmark layout, with any
// explicit beta or pi taking precedence.
SimulationDesign DesignFromConfig(const GenerativeConfig& generative);

DetectionConfig DetectionFromConfig(const EstimationConfig& estimation,
                                    std::uint64_t seed);

}  // namespace cinet

#endif  // CINET_CONFIG_H_
