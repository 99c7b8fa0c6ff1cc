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

// Generative design for simulation studies and one-replicate simulation.

#ifndef CINET_SIMULATION_H_
#define CINET_SIMULATION_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cinet/model.h"
#include "cinet/netgen.h"

namespace cinet {

struct SimulationDesign {
  int n = 100;
  int k = 2;
  // Observed-network block probabilities (sender block, receiver block).
  Eigen::MatrixXd observed_probs;
  // Truth; truth.pi drives the interference network.
  ModelParams truth;
  double treatment_prob = 0.5;
  // Empty means uniform 1/K.
  std::vector<double> label_weights;

  void Validate() const;
  std::vector<double> Weights() const;
};

// Benchmark design: observed SBM 0.5 within / 0.1 between; interference
// probabilities chosen so that lambda = (expected treated per community) * pi
// is 2.5 within and 0.5 between; gamma = 4; beta = 2 within and, off the
// diagonal, 1 (K = 2) or a cyclic 0.5 / 1.0 / 1.5 pattern (K = 4,
// beta(k, kp) = 0.5 * ((k - kp) mod K)). beta0 = 0 and sigma_eps default to
// documented assumptions.
SimulationDesign BenchmarkDesign(int n, int k, double sigma_eps = 1.0,
                                 double beta0 = 0.0);

// Same design with every beta set to `beta_value` (violates heterogeneity).
SimulationDesign HomogeneousDesign(int n, int k, double beta_value,
                                   double sigma_eps = 1.0);

// Population-average indirect effect implied by the design for receiver kp,
// using expected treated counts n * treatment_prob / K.
double DesignIndirectEffect(const SimulationDesign& design, int kp);

struct SimulatedData {
  AdjacencyMatrix observed;
  AdjacencyMatrix interference;
  CommunityLabels true_labels;
  // Outcome data under the true labels.
  Dataset data;
};

SimulatedData SimulateReplicate(const SimulationDesign& design,
                                std::uint64_t seed);

}  // namespace cinet

#endif  // CINET_SIMULATION_H_
