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

// Marginal likelihood of the outcomes with the exposure counts integrated out.
//
// For receiver i in community c with treatment z the latent exposure vector
// q = (q_1..q_K) has independent Binomial(n_k - Delta(i, k), pi(k, c))
// coordinates, Delta(i, k) = [c == k] z. The per-unit term is
//
//   log sum_q Normal(y_i; mu_i(q), sigma^2) prod_k Binomial(q_k; ...),
//
// summed over the joint support. Each coordinate is truncated at the smallest
// cap whose upper tail mass is below TruncationPolicy::tail_mass.
//
// LogLikelihood is the OpenMP kernel; LogLikelihoodSerial is the reference
// enumerator kept for testing. Both reduce per-unit terms with pairwise
// summation in unit order, so results do not depend on the thread count.

#ifndef CINET_LIKELIHOOD_H_
#define CINET_LIKELIHOOD_H_

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "cinet/model.h"

namespace cinet {

struct TruncationPolicy {
  double tail_mass = 1e-12;
  // Multiplies the number of support points kept per coordinate.
  int cap_multiplier = 1;
  // Joint support points per unit above which evaluation is refused.
  std::int64_t max_joint_terms = 4'000'000;
};

// Largest q kept for Binomial(trials, p).
int BinomialSupportCap(int trials, double p, const TruncationPolicy& policy);
int PoissonSupportCap(double lambda, const TruncationPolicy& policy);

double LogBinomialPmf(int q, int trials, double p);
double LogPoissonPmf(int q, double lambda);

// Pairwise (cascade) summation.
double PairwiseSum(std::span<const double> values);

// Per-unit log-likelihood terms.
Eigen::VectorXd UnitLogLikelihoods(const Dataset& data,
                                   const ModelParams& params,
                                   const TruncationPolicy& policy = {});

double LogLikelihood(const Dataset& data, const ModelParams& params,
                     const TruncationPolicy& policy = {});

// Total log-likelihood and its gradient in the natural ParamLayout, computed
// from posterior expectations of the latent exposures.
double LogLikelihoodWithGradient(const Dataset& data,
                                 const ModelParams& params,
                                 Eigen::VectorXd& gradient,
                                 const TruncationPolicy& policy = {});

double LogLikelihoodSerial(const Dataset& data, const ModelParams& params,
                           const TruncationPolicy& policy = {});

// Limiting parameterization with the expected sender counts stored directly.
struct LimitParams {
  double beta0 = 0.0;
  double gamma = 0.0;
  Eigen::MatrixXd beta;    // (sender k, receiver kp)
  Eigen::MatrixXd lambda;  // (sender k, receiver kp)
  double sigma_eps = 1.0;
};

// log sum_q Normal(y; beta0 + gamma z + sum_k beta(k, c) q_k, sigma^2)
//         prod_k Poisson(q_k; lambda(k, c)).
double PoissonLimitLogDensity(double y, int z, int c, const LimitParams& params,
                              const TruncationPolicy& policy = {});

// Same mixture with Binomial(trials[k], pi(k, c)) exposures. Used to compare
// the finite-population density against its Poisson limit.
double BinomialMixtureLogDensity(double y, int z, int c,
                                 const ModelParams& params,
                                 std::span<const int> trials,
                                 const TruncationPolicy& policy = {});

}  // namespace cinet

#endif  // CINET_LIKELIHOOD_H_
