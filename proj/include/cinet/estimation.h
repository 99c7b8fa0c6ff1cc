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

// Maximum likelihood and Gibbs sampling for the interference model,
// conditional on community labels.

#ifndef CINET_ESTIMATION_H_
#define CINET_ESTIMATION_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cinet/likelihood.h"
#include "cinet/model.h"
#include "cinet/random.h"

namespace cinet {

// ---------------------------------------------------------------------------
// Unconstrained parameterization: same ParamLayout order with logit(pi) and
// log(sigma_eps) in place of pi and sigma_eps.

Eigen::VectorXd ToUnconstrained(const ModelParams& params);
ModelParams FromUnconstrained(const Eigen::VectorXd& theta, int k,
                              int covariates);

// Chain rule: natural-layout gradient -> unconstrained gradient at `params`.
Eigen::VectorXd UnconstrainedGradient(const ModelParams& params,
                                      const Eigen::VectorXd& natural_gradient);

struct StepPolicy {
  double gradient_step = 1e-5;
  double hessian_step = 1e-4;
  // Steps scale with max(1, |theta_j|).
  bool relative = true;
  enum class Scheme { kCentral, kForward } gradient_scheme = Scheme::kCentral;
};

struct ScoreInformation {
  Eigen::VectorXd gradient;     // of the per-observation average
  Eigen::MatrixXd information;  // symmetrized negative Hessian
};

// Finite-difference score and information of (1/N) log-likelihood in the
// unconstrained parameterization.
ScoreInformation ScoreAndInformation(const Dataset& data,
                                     const ModelParams& params,
                                     const StepPolicy& steps = {},
                                     const TruncationPolicy& truncation = {});

// Same, skipping the Hessian.
Eigen::VectorXd FiniteDifferenceScore(const Dataset& data,
                                      const ModelParams& params,
                                      const StepPolicy& steps = {},
                                      const TruncationPolicy& truncation = {});

// ---------------------------------------------------------------------------
// Initialization shared by the optimizer and the sampler.

struct InitPolicy {
  // Block densities of the observed network (sender, receiver), if known.
  std::optional<Eigen::MatrixXd> pi_hint;
  double hint_weight = 0.2;
  double pi_shrink_target = 0.05;
  double beta_jitter_sd = 0.5;
  double logit_pi_jitter_sd = 0.5;
  // Replaces the data-driven starting point (jitter still applies to
  // starts after the first).
  std::optional<ModelParams> start_at;
};

// OLS of y on (1, z, x) for beta0, gamma, beta_x; sigma at the residual sd;
// pi from the hint shrunk toward the target. Start 0 is unjittered; later
// starts add Normal jitter to beta and logit(pi). `start_at`, when set,
// takes the place of the data-driven point.
ModelParams InitialParams(const Dataset& data, int k, const InitPolicy& init,
                          int start, Rng& rng);

// ---------------------------------------------------------------------------
// Maximum likelihood.

struct OptimizerConfig {
  int starts = 8;
  std::uint64_t seed = 1;
  int max_iterations = 1000;
  double gradient_tolerance = 1e-9;
  TruncationPolicy truncation;
  StepPolicy steps;
  bool compute_information = true;
  // Multi-start optima count as distinct modes when their total
  // log-likelihoods differ by at most `mode_loglik_tolerance` and their
  // canonical parameters by more than `mode_parameter_tolerance`.
  double mode_loglik_tolerance = 0.5;
  double mode_parameter_tolerance = 0.5;
};

struct StartResult {
  Eigen::VectorXd theta;  // unconstrained
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
  std::string message;
};

struct FitResult {
  ModelParams theta_hat;
  Eigen::VectorXd theta_unconstrained;
  std::vector<std::string> names;  // ParamLayout names
  int n = 0;
  double loglik = 0.0;
  bool converged = false;
  // Max-norm of the analytic average score at the optimum. Finite
  // differences are too coarse here near sharp optima with small sigma_eps.
  double gradient_norm = 0.0;
  // Per-observation information at the optimum (unconstrained).
  Eigen::MatrixXd info_matrix;
  bool info_positive_definite = false;
  // inverse(info) / n, when info is positive definite.
  std::optional<Eigen::MatrixXd> covariance;
  // Unconstrained standard errors sqrt(diag(inverse(info)) / n).
  std::optional<Eigen::VectorXd> std_errors;
  std::vector<StartResult> starts;
  int best_start = 0;
  // Near-equal likelihood, distant parameters across starts.
  bool multimodal_warning = false;
  double optimum_spread = 0.0;

  // Delta-method standard errors in the natural layout.
  std::optional<Eigen::VectorXd> NaturalStdErrors() const;
};

FitResult FitMle(const Dataset& data, int k, const InitPolicy& init = {},
                 const OptimizerConfig& config = {});

// Maximizes the log-likelihood from a single starting point.
StartResult OptimizeFrom(const Dataset& data, const ModelParams& start,
                         const OptimizerConfig& config);

// Canonical form used to compare optima up to relabeling of sender
// communities within each receiver column: per column, (beta, lambda) pairs
// sorted by beta, then beta0, gamma, sigma_eps.
Eigen::VectorXd CanonicalOptimum(const ModelParams& params,
                                 std::span<const int> treated_counts);

// ---------------------------------------------------------------------------
// Gibbs sampling with latent exposure counts.

struct PriorConfig {
  double coef_sd = 10.0;
  double sigma2_shape = 2.0;
  double sigma2_rate = 2.0;
  double pi_a = 1.0;
  double pi_b = 1.0;
  void Validate() const;
};

struct McmcConfig {
  int n_iter = 4000;
  // Negative means n_iter / 2.
  int n_burnin = -1;
  int n_chains = 2;
  int thin = 1;
  std::uint64_t seed = 1;
  bool retain_latent = false;
  // Debug mode: hold the exposures fixed and skip their update.
  std::optional<ExposureMatrix> fixed_latent;

  int Burnin() const { return n_burnin < 0 ? n_iter / 2 : n_burnin; }
  int KeptPerChain() const { return (n_iter - Burnin()) / thin; }
  void Validate() const;
};

struct PosteriorSamples {
  ParamLayout layout{1, 0};
  std::vector<std::string> names;
  // One (kept draws x parameters) matrix per chain, natural layout.
  std::vector<Eigen::MatrixXd> chains;
  // latent[chain][draw], when retained.
  std::vector<std::vector<ExposureMatrix>> latent;
  std::vector<std::uint64_t> chain_seeds;
  int empty_block_warnings = 0;
  int n = 0;
  std::vector<int> treated_counts;

  int draws_per_chain() const {
    return chains.empty() ? 0 : static_cast<int>(chains[0].rows());
  }
  Eigen::MatrixXd Pooled() const;
  ModelParams PosteriorMean() const;
};

PosteriorSamples FitGibbs(const Dataset& data, int k,
                          const PriorConfig& priors = {},
                          const McmcConfig& mcmc = {},
                          const InitPolicy& init = {});

// Individual full-conditional updates, exposed for testing.
namespace gibbs {

// Regression columns: 1, z, x (p columns), then beta(k, kp) in sender-major
// order with entry Q(k, i) when C_i = kp and 0 otherwise.
Eigen::MatrixXd DesignMatrix(const Dataset& data, const ExposureMatrix& q,
                             int k);

// Conditional Gaussian of the coefficients given Q and sigma, in
// DesignMatrix column order.
struct CoefficientConditional {
  Eigen::VectorXd mean;
  Eigen::LLT<Eigen::MatrixXd> precision;  // factorized precision
};
CoefficientConditional CoefficientPosterior(const Dataset& data,
                                            const ExposureMatrix& q,
                                            const PriorConfig& priors,
                                            double sigma_eps, int k);

// Draws (beta0, gamma, beta_x, beta) | Q, sigma from the conjugate Gaussian.
void DrawCoefficients(const Dataset& data, const ExposureMatrix& q,
                      const PriorConfig& priors, ModelParams& params, Rng& rng);

// Draws sigma^2 | rest from the conjugate inverse gamma.
void DrawSigma(const Dataset& data, const ExposureMatrix& q,
               const PriorConfig& priors, ModelParams& params, Rng& rng);

// Draws pi(k, kp) | Q from the conjugate beta. Returns how many blocks had no
// trials and fell back to the prior.
int DrawPi(const Dataset& data, const ExposureMatrix& q,
           const PriorConfig& priors, ModelParams& params, Rng& rng);

// One unit-major, community-minor sweep over Q(k, i).
void DrawLatent(const Dataset& data, const ModelParams& params,
                ExposureMatrix& q, Rng& rng, int iteration);

double BetaDraw(double a, double b, Rng& rng);

}  // namespace gibbs

// Log of prior times complete-data likelihood, for stationarity checks.
double LogJoint(const Dataset& data, const ModelParams& params,
                const ExposureMatrix& q, const PriorConfig& priors);

}  // namespace cinet

#endif  // CINET_ESTIMATION_H_
