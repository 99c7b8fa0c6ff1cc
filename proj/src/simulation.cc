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

#include "cinet/simulation.h"

#include <random>
#include <string>

#include "cinet/error.h"
#include "cinet/random.h"

namespace cinet {

void SimulationDesign::Validate() const {
  if (n < 2) throw InputError("design needs n >= 2");
  if (k < 1 || k > n) throw InputError("design needs 1 <= K <= n");
  if (observed_probs.rows() != k) throw InputError("observed_probs must be K x K");
  ValidateBlockProbabilities(observed_probs);
  truth.Validate();
  if (truth.k() != k) throw InputError("truth has wrong K");
  if (!(treatment_prob > 0.0 && treatment_prob < 1.0)) {
    throw ParameterError("treatment probability must lie in (0,1)");
  }
  if (!label_weights.empty() && static_cast<int>(label_weights.size()) != k) {
    throw InputError("label_weights must have K entries");
  }
}

std::vector<double> SimulationDesign::Weights() const {
  if (!label_weights.empty()) return label_weights;
  return std::vector<double>(k, 1.0 / k);
}

SimulationDesign BenchmarkDesign(int n, int k, double sigma_eps, double beta0) {
  SimulationDesign design;
  design.n = n;
  design.k = k;
  design.treatment_prob = 0.5;
  design.observed_probs = Eigen::MatrixXd::Constant(k, k, 0.1);
  design.observed_probs.diagonal().setConstant(0.5);
  const double expected_treated = n * design.treatment_prob / k;
  design.truth = ModelParams::Zero(k);
  design.truth.beta0 = beta0;
  design.truth.gamma = 4.0;
  design.truth.sigma_eps = sigma_eps;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const bool within = a == b;
      design.truth.pi(a, b) = (within ? 2.5 : 0.5) / expected_treated;
      if (within) {
        design.truth.beta(a, b) = 2.0;
      } else if (k == 2) {
        design.truth.beta(a, b) = 1.0;
      } else {
        design.truth.beta(a, b) = 0.5 * (((a - b) % k + k) % k);
      }
    }
  }
  return design;
}

SimulationDesign HomogeneousDesign(int n, int k, double beta_value,
                                   double sigma_eps) {
  SimulationDesign design = BenchmarkDesign(n, k, sigma_eps);
  design.truth.beta.setConstant(beta_value);
  return design;
}

double DesignIndirectEffect(const SimulationDesign& design, int kp) {
  const double expected_treated = design.n * design.treatment_prob / design.k;
  double total = 0.0;
  for (int a = 0; a < design.k; ++a) {
    total += design.truth.beta(a, kp) * expected_treated * design.truth.pi(a, kp);
  }
  return total;
}

SimulatedData SimulateReplicate(const SimulationDesign& design,
                                std::uint64_t seed) {
  design.Validate();
  SimulatedData out;
  const std::vector<double> weights = design.Weights();
  SbmDraw observed = SampleSbm(
      design.n, weights, design.observed_probs, DeriveSeed(seed, 0, Stream::kObserved));
  out.observed = std::move(observed.adjacency);
  out.true_labels = std::move(observed.labels);
  out.interference = SampleInterferenceNetwork(
      out.true_labels, design.truth.pi, DeriveSeed(seed, 0, Stream::kInterference));

  std::vector<int> z(design.n);
  Rng rng = MakeRng(DeriveSeed(seed, 0, Stream::kTreatment));
  std::bernoulli_distribution treat(design.treatment_prob);
  for (int& zi : z) zi = treat(rng) ? 1 : 0;

  Eigen::MatrixXd x(design.n, design.truth.covariate_count());
  if (x.cols() > 0) {
    Rng xrng = MakeRng(DeriveSeed(seed, 0, Stream::kCovariates));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < x.rows(); ++i) {
      for (int j = 0; j < x.cols(); ++j) x(i, j) = normal(xrng);
    }
  }
  out.data.y = SimulateOutcomes(out.interference, z, out.true_labels, design.truth,
                                x, DeriveSeed(seed, 0, Stream::kNoise));
  out.data.z = std::move(z);
  out.data.labels = out.true_labels;
  out.data.x = std::move(x);
  return out;
}

}  // namespace cinet
