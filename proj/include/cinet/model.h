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

// The linear interference outcome model
//
//   Y_i = beta0 + sum_k beta(k, C_i) Q(k, i) + gamma Z_i + X_i beta_x + eps_i,
//
// where Q(k, i) counts treated interference-senders in community k pointing at
// receiver i and eps_i ~ Normal(0, sigma_eps^2).

#ifndef CINET_MODEL_H_
#define CINET_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cinet/network.h"

namespace cinet {

struct ModelParams {
  double beta0 = 0.0;
  double gamma = 0.0;
  // beta(k, kp): effect of one treated sender in community k on a receiver in
  // community kp.
  Eigen::MatrixXd beta;
  // pi(k, kp): interference edge probability, sender k -> receiver kp.
  Eigen::MatrixXd pi;
  double sigma_eps = 1.0;
  Eigen::VectorXd beta_x;

  int k() const { return static_cast<int>(beta.rows()); }
  int covariate_count() const { return static_cast<int>(beta_x.size()); }

  // sigma_eps > 0, pi in (0, 1), matching square shapes.
  void Validate() const;

  // lambda(k, kp) = n_k * pi(k, kp). Always derived, never stored.
  Eigen::MatrixXd Lambda(std::span<const int> treated_counts) const;

  // Zero-filled parameters with pi = 0.5.
  static ModelParams Zero(int k, int covariates = 0);
};

struct Dataset {
  Eigen::VectorXd y;
  std::vector<int> z;
  CommunityLabels labels;
  // n x p; zero columns when there are no covariates.
  Eigen::MatrixXd x;

  int size() const { return static_cast<int>(y.size()); }
  int covariate_count() const { return static_cast<int>(x.cols()); }
  void Validate() const;
};

// Q(k, i); K x n.
using ExposureMatrix = Eigen::MatrixXi;

// Flat parameter layout used by optimizers, samplers and file formats:
//   beta0, gamma, beta(k, kp) sender-major, pi(k, kp) sender-major,
//   sigma_eps, beta_x(0..p-1).
class ParamLayout {
 public:
  ParamLayout(int k, int covariates) : k_(k), p_(covariates) {}
  int k() const { return k_; }
  int covariates() const { return p_; }
  int size() const { return 3 + 2 * k_ * k_ + p_; }
  int beta0() const { return 0; }
  int gamma() const { return 1; }
  int beta(int k, int kp) const { return 2 + k * k_ + kp; }
  int pi(int k, int kp) const { return 2 + k_ * k_ + k * k_ + kp; }
  int sigma() const { return 2 + 2 * k_ * k_; }
  int beta_x(int j) const { return 3 + 2 * k_ * k_ + j; }

  // beta0, gamma, beta_1_1, ..., pi_1_1, ..., sigma_eps, beta_x_1, ...
  std::vector<std::string> Names() const;

  Eigen::VectorXd Flatten(const ModelParams& params) const;
  ModelParams Unflatten(const Eigen::VectorXd& values) const;

 private:
  int k_;
  int p_;
};

std::vector<int> TreatedCounts(std::span<const int> z,
                               const CommunityLabels& labels);

// Q(k, i) = sum over j != i with C_j = k of G(j, i) Z_j.
ExposureMatrix ExposureCounts(const AdjacencyMatrix& g, std::span<const int> z,
                              const CommunityLabels& labels);

// Noise-free part of the outcome equation.
Eigen::VectorXd StructuralMean(const AdjacencyMatrix& g,
                               std::span<const int> z,
                               const CommunityLabels& labels,
                               const ModelParams& params,
                               const Eigen::MatrixXd& x = {});

Eigen::VectorXd SimulateOutcomes(const AdjacencyMatrix& g,
                                 std::span<const int> z,
                                 const CommunityLabels& labels,
                                 const ModelParams& params,
                                 const Eigen::MatrixXd& x, std::uint64_t seed);

}  // namespace cinet

#endif  // CINET_MODEL_H_
