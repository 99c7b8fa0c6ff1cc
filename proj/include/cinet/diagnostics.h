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

// Posterior summaries, convergence diagnostics, posterior-versus-normal
// agreement, and Wald coverage studies.

#ifndef CINET_DIAGNOSTICS_H_
#define CINET_DIAGNOSTICS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cinet/estimation.h"
#include "cinet/simulation.h"

namespace cinet {

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q50 = 0.0;
  double q975 = 0.0;
  // Absent with fewer than two chains or zero within-chain variance.
  std::optional<double> rhat;
  std::optional<double> ess;
};

// One draws matrix per chain (rows are draws). All chains must share a shape.
std::vector<ParameterSummary> SummarizeDraws(
    const std::vector<Eigen::MatrixXd>& chains,
    const std::vector<std::string>& names);

std::vector<ParameterSummary> PosteriorSummary(const PosteriorSamples& samples);

// Rank-normalized split R-hat: the larger of the bulk and folded variants.
std::optional<double> SplitRhat(const std::vector<Eigen::VectorXd>& chains);

// Bulk effective sample size of rank-normalized split chains, with Geyer's
// initial monotone sequence truncation.
std::optional<double> EffectiveSampleSize(
    const std::vector<Eigen::VectorXd>& chains);

// Linear-interpolation quantile (type 7) of unsorted values.
double Quantile(std::vector<double> values, double prob);

// Total variation between a Gaussian-kernel density estimate of `draws`
// (Silverman bandwidth) and Normal(mean, sd), by quadrature on a fine grid.
double TvToNormal(const Eigen::VectorXd& draws, double mean, double sd);

struct BvmCoordinate {
  std::string name;
  bool available = false;
  double tv = 0.0;
  // Of sqrt(N)(theta_draw - theta_hat) relative to the reference.
  double mean_discrepancy = 0.0;  // posterior mean / reference sd
  double sd_ratio = 0.0;          // posterior sd / reference sd
};

struct BvmReport {
  std::vector<BvmCoordinate> coordinates;
  double max_tv = 0.0;
  int unavailable = 0;
};

// Compares each posterior marginal of sqrt(N)(theta_draw - theta_hat), in the
// unconstrained parameterization, with Normal(0, [J^{-1}]_jj), where J is the
// per-observation information of the fit.
BvmReport BvmDiagnostic(const PosteriorSamples& samples, const FitResult& fit);

// ---------------------------------------------------------------------------
// Coverage of Wald intervals over simulated replicates.

struct ReplicateFit {
  std::uint64_t seed = 0;
  SimulatedData sim;
  std::optional<FitResult> fit;
  std::string failure;
};

struct CoverageConfig {
  SimulationDesign design;
  int replicates = 100;
  std::uint64_t seed = 1;
  OptimizerConfig optimizer;
  // Multiplies every standard error before forming intervals (debug
  // injection for negative controls).
  double se_scale = 1.0;
  // Seeds start 0 at the generating parameters, so the fit lands in the
  // basin of the consistent root. Off by default.
  bool start_at_truth = false;
  double z_critical = 1.959963984540054;
};

// Simulates replicates and fits the MLE under the generative labels, using
// the observed network's block densities as the pi hint.
std::vector<ReplicateFit> FitReplicates(const SimulationDesign& design,
                                        int replicates, std::uint64_t seed,
                                        const OptimizerConfig& optimizer,
                                        bool start_at_truth = false);

struct CoverageRow {
  std::string name;
  int covered = 0;
  int usable = 0;  // replicates with finite standard errors
  double rate() const { return usable == 0 ? 0.0 : double(covered) / usable; }
};

// Per-parameter coverage of theta_hat +/- z * se_scale * se in the
// unconstrained parameterization.
std::vector<CoverageRow> CoverageFromFits(const std::vector<ReplicateFit>& fits,
                                          const ModelParams& truth,
                                          double se_scale = 1.0,
                                          double z_critical = 1.959963984540054);

std::vector<CoverageRow> CoverageStudy(const CoverageConfig& config);

}  // namespace cinet

#endif  // CINET_DIAGNOSTICS_H_
