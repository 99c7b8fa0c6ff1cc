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

#include "cinet/estimation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <ceres/ceres.h>

#include "cinet/error.h"

namespace cinet {

namespace {

constexpr double kPiFloor = 1e-12;
constexpr double kLogSqrtTwoPi = 0.91893853320467274178;

double Logit(double p) { return std::log(p) - std::log1p(-p); }

double Sigmoid(double t) {
  const double p = t >= 0 ? 1.0 / (1.0 + std::exp(-t))
                          : std::exp(t) / (1.0 + std::exp(t));
  return std::clamp(p, kPiFloor, 1.0 - kPiFloor);
}

}  // namespace

Eigen::VectorXd ToUnconstrained(const ModelParams& params) {
  const ParamLayout layout(params.k(), params.covariate_count());
  Eigen::VectorXd theta = layout.Flatten(params);
  for (int a = 0; a < params.k(); ++a) {
    for (int b = 0; b < params.k(); ++b) {
      theta(layout.pi(a, b)) = Logit(params.pi(a, b));
    }
  }
  theta(layout.sigma()) = std::log(params.sigma_eps);
  return theta;
}

ModelParams FromUnconstrained(const Eigen::VectorXd& theta, int k,
                              int covariates) {
  const ParamLayout layout(k, covariates);
  ModelParams params = layout.Unflatten(theta);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) params.pi(a, b) = Sigmoid(theta(layout.pi(a, b)));
  }
  params.sigma_eps = std::exp(theta(layout.sigma()));
  return params;
}

Eigen::VectorXd UnconstrainedGradient(const ModelParams& params,
                                      const Eigen::VectorXd& natural_gradient) {
  const ParamLayout layout(params.k(), params.covariate_count());
  Eigen::VectorXd g = natural_gradient;
  for (int a = 0; a < params.k(); ++a) {
    for (int b = 0; b < params.k(); ++b) {
      const double p = params.pi(a, b);
      g(layout.pi(a, b)) *= p * (1.0 - p);
    }
  }
  g(layout.sigma()) *= params.sigma_eps;
  return g;
}

// ---------------------------------------------------------------------------
// Finite differences.

namespace {

class AverageLogLikelihood {
 public:
  AverageLogLikelihood(const Dataset& data, int k, int p,
                       const TruncationPolicy& truncation)
      : data_(data), k_(k), p_(p), truncation_(truncation) {}

  double operator()(const Eigen::VectorXd& theta, int coordinate) const {
    double value = std::numeric_limits<double>::quiet_NaN();
    try {
      value = LogLikelihood(data_, FromUnconstrained(theta, k_, p_), truncation_) /
              data_.size();
    } catch (const Error& e) {
      throw EvaluationError(std::string("likelihood evaluation failed: ") + e.what(),
                            coordinate);
    }
    if (!std::isfinite(value)) {
      throw EvaluationError("non-finite likelihood at perturbed coordinate " +
                                std::to_string(coordinate),
                            coordinate);
    }
    return value;
  }

 private:
  const Dataset& data_;
  int k_;
  int p_;
  TruncationPolicy truncation_;
};

double StepFor(const StepPolicy& steps, double base, double value) {
  return steps.relative ? base * std::max(1.0, std::abs(value)) : base;
}

Eigen::VectorXd FdGradient(const AverageLogLikelihood& f,
                           const Eigen::VectorXd& theta, double f0,
                           const StepPolicy& steps) {
  const int d = static_cast<int>(theta.size());
  Eigen::VectorXd g(d);
  for (int j = 0; j < d; ++j) {
    const double h = StepFor(steps, steps.gradient_step, theta(j));
    Eigen::VectorXd plus = theta;
    plus(j) += h;
    if (steps.gradient_scheme == StepPolicy::Scheme::kForward) {
      g(j) = (f(plus, j) - f0) / h;
    } else {
      Eigen::VectorXd minus = theta;
      minus(j) -= h;
      g(j) = (f(plus, j) - f(minus, j)) / (2.0 * h);
    }
  }
  return g;
}

}  // namespace

Eigen::VectorXd FiniteDifferenceScore(const Dataset& data,
                                      const ModelParams& params,
                                      const StepPolicy& steps,
                                      const TruncationPolicy& truncation) {
  const AverageLogLikelihood f(data, params.k(), params.covariate_count(),
                               truncation);
  const Eigen::VectorXd theta = ToUnconstrained(params);
  return FdGradient(f, theta, f(theta, -1), steps);
}

ScoreInformation ScoreAndInformation(const Dataset& data,
                                     const ModelParams& params,
                                     const StepPolicy& steps,
                                     const TruncationPolicy& truncation) {
  const AverageLogLikelihood f(data, params.k(), params.covariate_count(),
                               truncation);
  const Eigen::VectorXd theta = ToUnconstrained(params);
  const int d = static_cast<int>(theta.size());
  const double f0 = f(theta, -1);
  ScoreInformation out;
  out.gradient = FdGradient(f, theta, f0, steps);

  Eigen::VectorXd h(d);
  for (int j = 0; j < d; ++j) h(j) = StepFor(steps, steps.hessian_step, theta(j));
  Eigen::VectorXd f_plus(d), f_minus(d);
  for (int j = 0; j < d; ++j) {
    Eigen::VectorXd t = theta;
    t(j) += h(j);
    f_plus(j) = f(t, j);
    t(j) = theta(j) - h(j);
    f_minus(j) = f(t, j);
  }
  Eigen::MatrixXd hessian(d, d);
  for (int a = 0; a < d; ++a) {
    hessian(a, a) = (f_plus(a) - 2.0 * f0 + f_minus(a)) / (h(a) * h(a));
    for (int b = a + 1; b < d; ++b) {
      Eigen::VectorXd t = theta;
      t(a) += h(a);
      t(b) += h(b);
      const double pp = f(t, a);
      t(b) = theta(b) - h(b);
      const double pm = f(t, a);
      t(a) = theta(a) - h(a);
      const double mm = f(t, b);
      t(b) = theta(b) + h(b);
      const double mp = f(t, b);
      hessian(a, b) = (pp - pm - mp + mm) / (4.0 * h(a) * h(b));
      hessian(b, a) = hessian(a, b);
    }
  }
  out.information = -0.5 * (hessian + hessian.transpose());
  return out;
}

// ---------------------------------------------------------------------------
// Initialization.

namespace {

ModelParams DataDrivenStart(const Dataset& data, int k, const InitPolicy& init) {
  const int n = data.size();
  const int p = data.covariate_count();
  Eigen::MatrixXd design(n, 2 + p);
  for (int i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = data.z[i];
    for (int j = 0; j < p; ++j) design(i, 2 + j) = data.x(i, j);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  Eigen::VectorXd coef = qr.solve(data.y);
  if (!coef.allFinite()) coef.setZero();
  const Eigen::VectorXd resid = data.y - design * coef;
  const int dof = std::max(1, n - static_cast<int>(qr.rank()));

  ModelParams params = ModelParams::Zero(k, p);
  params.beta0 = coef(0);
  params.gamma = coef(1);
  for (int j = 0; j < p; ++j) params.beta_x(j) = coef(2 + j);
  params.sigma_eps = std::max(1e-3, std::sqrt(resid.squaredNorm() / dof));
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      double pi = init.pi_shrink_target;
      if (init.pi_hint && init.pi_hint->rows() == k && init.pi_hint->cols() == k) {
        pi = init.hint_weight * (*init.pi_hint)(a, b) +
             (1.0 - init.hint_weight) * init.pi_shrink_target;
      }
      params.pi(a, b) = std::clamp(pi, 1e-4, 0.9);
    }
  }
  return params;
}

}  // namespace

ModelParams InitialParams(const Dataset& data, int k, const InitPolicy& init,
                          int start, Rng& rng) {
  ModelParams params = init.start_at ? *init.start_at : DataDrivenStart(data, k, init);
  if (params.k() != k || params.covariate_count() != data.covariate_count()) {
    throw InputError("starting point has the wrong shape");
  }
  if (start > 0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        params.beta(a, b) += init.beta_jitter_sd * normal(rng);
        params.pi(a, b) = Sigmoid(Logit(params.pi(a, b)) +
                                  init.logit_pi_jitter_sd * normal(rng));
      }
    }
  }
  return params;
}

// ---------------------------------------------------------------------------
// Maximum likelihood.

namespace {

class NegativeAverageLogLikelihood final : public ceres::FirstOrderFunction {
 public:
  NegativeAverageLogLikelihood(const Dataset& data, int k, int p,
                               const TruncationPolicy& truncation)
      : data_(data), k_(k), p_(p), truncation_(truncation) {}

  bool Evaluate(const double* parameters, double* cost,
                double* gradient) const override {
    const ParamLayout layout(k_, p_);
    const Eigen::Map<const Eigen::VectorXd> theta(parameters, layout.size());
    try {
      const ModelParams params = FromUnconstrained(theta, k_, p_);
      Eigen::VectorXd natural;
      const double ll = LogLikelihoodWithGradient(data_, params, natural, truncation_);
      if (!std::isfinite(ll)) return false;
      cost[0] = -ll / data_.size();
      if (gradient != nullptr) {
        const Eigen::VectorXd g = UnconstrainedGradient(params, natural);
        if (!g.allFinite()) return false;
        for (int j = 0; j < layout.size(); ++j) gradient[j] = -g(j) / data_.size();
      }
    } catch (const Error&) {
      return false;
    }
    return true;
  }

  int NumParameters() const override { return ParamLayout(k_, p_).size(); }

 private:
  const Dataset& data_;
  int k_;
  int p_;
  TruncationPolicy truncation_;
};

}  // namespace

StartResult OptimizeFrom(const Dataset& data, const ModelParams& start,
                         const OptimizerConfig& config) {
  const int k = start.k();
  const int p = start.covariate_count();
  StartResult result;
  result.theta = ToUnconstrained(start);
  ceres::GradientProblem problem(
      new NegativeAverageLogLikelihood(data, k, p, config.truncation));
  ceres::GradientProblemSolver::Options options;
  options.line_search_direction_type = ceres::BFGS;
  options.max_num_iterations = config.max_iterations;
  options.gradient_tolerance = config.gradient_tolerance;
  options.function_tolerance = 1e-15;
  options.parameter_tolerance = 1e-14;
  options.logging_type = ceres::SILENT;
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(options, problem, result.theta.data(), &summary);
  result.iterations = static_cast<int>(summary.iterations.size());
  result.message = summary.message;
  if (!std::isfinite(summary.final_cost) || !result.theta.allFinite()) {
    throw OptimizationError("start failed: " + summary.message, {summary.message});
  }
  result.loglik = -summary.final_cost * data.size();
  result.converged = summary.termination_type == ceres::CONVERGENCE;
  return result;
}

Eigen::VectorXd CanonicalOptimum(const ModelParams& params,
                                 std::span<const int> treated_counts) {
  const int k = params.k();
  const Eigen::MatrixXd lambda = params.Lambda(treated_counts);
  Eigen::VectorXd out(2 * k * k + 3);
  int pos = 0;
  for (int b = 0; b < k; ++b) {
    std::vector<int> order(k);
    for (int a = 0; a < k; ++a) order[a] = a;
    std::sort(order.begin(), order.end(), [&](int x, int y) {
      return params.beta(x, b) < params.beta(y, b);
    });
    for (int a : order) out(pos++) = params.beta(a, b);
    for (int a : order) out(pos++) = lambda(a, b);
  }
  out(pos++) = params.beta0;
  out(pos++) = params.gamma;
  out(pos++) = params.sigma_eps;
  return out;
}

std::optional<Eigen::VectorXd> FitResult::NaturalStdErrors() const {
  if (!std_errors) return std::nullopt;
  const ParamLayout layout(theta_hat.k(), theta_hat.covariate_count());
  Eigen::VectorXd se = *std_errors;
  for (int a = 0; a < theta_hat.k(); ++a) {
    for (int b = 0; b < theta_hat.k(); ++b) {
      const double p = theta_hat.pi(a, b);
      se(layout.pi(a, b)) *= p * (1.0 - p);
    }
  }
  se(layout.sigma()) *= theta_hat.sigma_eps;
  return se;
}

FitResult FitMle(const Dataset& data, int k, const InitPolicy& init,
                 const OptimizerConfig& config) {
  data.Validate();
  if (data.labels.k() != k) throw InputError("K does not match the labels");
  if (config.starts < 1) throw InputError("need at least one start");
  const int p = data.covariate_count();
  const ParamLayout layout(k, p);

  std::vector<std::optional<StartResult>> results(config.starts);
  std::vector<std::string> trace(config.starts);
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < config.starts; ++s) {
    Rng rng = MakeRng(DeriveSeed(config.seed, s, Stream::kMle));
    try {
      const ModelParams start = InitialParams(data, k, init, s, rng);
      results[s] = OptimizeFrom(data, start, config);
      trace[s] = "start " + std::to_string(s) + ": " + results[s]->message;
    } catch (const Error& e) {
      trace[s] = "start " + std::to_string(s) + ": " + e.what();
    }
  }

  FitResult fit;
  fit.n = data.size();
  fit.names = layout.Names();
  int best = -1;
  for (int s = 0; s < config.starts; ++s) {
    if (!results[s]) continue;
    fit.starts.push_back(*results[s]);
    const StartResult& cur = fit.starts.back();
    if (best < 0) {
      best = static_cast<int>(fit.starts.size()) - 1;
      continue;
    }
    const StartResult& incumbent = fit.starts[best];
    const double tie = 1e-9 * std::max(1.0, std::abs(incumbent.loglik));
    if (cur.loglik > incumbent.loglik + tie ||
        (std::abs(cur.loglik - incumbent.loglik) <= tie &&
         cur.theta.norm() < incumbent.theta.norm())) {
      best = static_cast<int>(fit.starts.size()) - 1;
    }
  }
  if (best < 0) throw OptimizationError("all starts failed", trace);

  fit.best_start = best;
  const StartResult& winner = fit.starts[best];
  fit.theta_unconstrained = winner.theta;
  fit.theta_hat = FromUnconstrained(winner.theta, k, p);
  fit.loglik = winner.loglik;
  fit.converged = winner.converged;

  const std::vector<int> treated = TreatedCounts(data.z, data.labels);
  const Eigen::VectorXd canonical = CanonicalOptimum(fit.theta_hat, treated);
  for (const StartResult& s : fit.starts) {
    if (s.loglik < winner.loglik - config.mode_loglik_tolerance) continue;
    const Eigen::VectorXd other =
        CanonicalOptimum(FromUnconstrained(s.theta, k, p), treated);
    fit.optimum_spread =
        std::max(fit.optimum_spread, (other - canonical).cwiseAbs().maxCoeff());
  }
  fit.multimodal_warning = fit.optimum_spread > config.mode_parameter_tolerance;

  if (config.compute_information) {
    const ScoreInformation si =
        ScoreAndInformation(data, fit.theta_hat, config.steps, config.truncation);
    fit.info_matrix = si.information;
    Eigen::LLT<Eigen::MatrixXd> llt(fit.info_matrix);
    fit.info_positive_definite = llt.info() == Eigen::Success;
    if (fit.info_positive_definite) {
      const Eigen::MatrixXd inverse =
          llt.solve(Eigen::MatrixXd::Identity(layout.size(), layout.size()));
      fit.covariance = inverse / data.size();
      fit.std_errors = fit.covariance->diagonal().cwiseSqrt();
    }
  }
  Eigen::VectorXd natural;
  LogLikelihoodWithGradient(data, fit.theta_hat, natural, config.truncation);
  fit.gradient_norm =
      (UnconstrainedGradient(fit.theta_hat, natural) / data.size()).cwiseAbs().maxCoeff();
  return fit;
}

// ---------------------------------------------------------------------------
// Gibbs sampling.

void PriorConfig::Validate() const {
  if (!(coef_sd > 0 && sigma2_shape > 0 && sigma2_rate > 0 && pi_a > 0 && pi_b > 0)) {
    throw ParameterError("prior hyperparameters must be strictly positive");
  }
}

void McmcConfig::Validate() const {
  if (n_chains < 1) throw InputError("n_chains must be >= 1");
  if (thin < 1) throw InputError("thin must be >= 1");
  if (Burnin() < 0 || n_iter <= Burnin()) {
    throw InputError("need n_iter > n_burnin >= 0");
  }
}

Eigen::MatrixXd PosteriorSamples::Pooled() const {
  if (chains.empty()) return {};
  Eigen::MatrixXd pooled(draws_per_chain() * static_cast<int>(chains.size()),
                         chains[0].cols());
  int row = 0;
  for (const auto& c : chains) {
    pooled.middleRows(row, c.rows()) = c;
    row += static_cast<int>(c.rows());
  }
  return pooled;
}

ModelParams PosteriorSamples::PosteriorMean() const {
  const Eigen::MatrixXd pooled = Pooled();
  if (pooled.rows() == 0) throw InputError("no posterior draws");
  return layout.Unflatten(pooled.colwise().mean().transpose());
}

namespace gibbs {

namespace {

int CoefficientCount(int k, int p) { return 2 + p + k * k; }
int BetaColumn(int k, int p, int a, int b) { return 2 + p + a * k + b; }

// Nonzero entries of design row i.
void DesignRow(const Dataset& data, const ExposureMatrix& q, int k, int i,
               std::vector<std::pair<int, double>>& row) {
  const int p = data.covariate_count();
  row.clear();
  row.emplace_back(0, 1.0);
  if (data.z[i]) row.emplace_back(1, 1.0);
  for (int j = 0; j < p; ++j) row.emplace_back(2 + j, data.x(i, j));
  const int c = data.labels[i];
  for (int a = 0; a < k; ++a) {
    if (q(a, i) != 0) row.emplace_back(BetaColumn(k, p, a, c), q(a, i));
  }
}

double SumSquaredResiduals(const Dataset& data, const ExposureMatrix& q,
                           const ModelParams& params) {
  const int k = params.k();
  double ssr = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    double mu = params.beta0 + params.gamma * data.z[i];
    if (params.covariate_count() > 0) mu += data.x.row(i).dot(params.beta_x);
    const int c = data.labels[i];
    for (int a = 0; a < k; ++a) mu += params.beta(a, c) * q(a, i);
    const double d = data.y(i) - mu;
    ssr += d * d;
  }
  return ssr;
}

double GammaDraw(double shape, double rate, Rng& rng) {
  std::gamma_distribution<double> g(shape, 1.0 / rate);
  return g(rng);
}

}  // namespace

Eigen::MatrixXd DesignMatrix(const Dataset& data, const ExposureMatrix& q,
                             int k) {
  const int p = data.covariate_count();
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(data.size(), CoefficientCount(k, p));
  std::vector<std::pair<int, double>> row;
  for (int i = 0; i < data.size(); ++i) {
    DesignRow(data, q, k, i, row);
    for (const auto& [col, v] : row) design(i, col) = v;
  }
  return design;
}

CoefficientConditional CoefficientPosterior(const Dataset& data,
                                            const ExposureMatrix& q,
                                            const PriorConfig& priors,
                                            double sigma_eps, int k) {
  const int p = data.covariate_count();
  const int d = CoefficientCount(k, p);
  const double inv_var = 1.0 / (sigma_eps * sigma_eps);
  Eigen::MatrixXd precision =
      Eigen::MatrixXd::Identity(d, d) / (priors.coef_sd * priors.coef_sd);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
  std::vector<std::pair<int, double>> row;
  for (int i = 0; i < data.size(); ++i) {
    DesignRow(data, q, k, i, row);
    for (const auto& [ca, va] : row) {
      rhs(ca) += va * data.y(i) * inv_var;
      for (const auto& [cb, vb] : row) precision(ca, cb) += va * vb * inv_var;
    }
  }
  CoefficientConditional out;
  out.precision.compute(precision);
  out.mean = out.precision.solve(rhs);
  return out;
}

void DrawCoefficients(const Dataset& data, const ExposureMatrix& q,
                      const PriorConfig& priors, ModelParams& params, Rng& rng) {
  const int k = params.k();
  const int p = params.covariate_count();
  const int d = CoefficientCount(k, p);
  const CoefficientConditional cond = CoefficientPosterior(data, q, priors, params.sigma_eps, k);
  const Eigen::VectorXd& mean = cond.mean;
  const Eigen::LLT<Eigen::MatrixXd>& llt = cond.precision;
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd noise(d);
  for (int j = 0; j < d; ++j) noise(j) = normal(rng);
  // precision = L L^T, so L^{-T} noise has covariance precision^{-1}.
  const Eigen::VectorXd draw =
      mean + llt.matrixU().solve(noise);
  params.beta0 = draw(0);
  params.gamma = draw(1);
  for (int j = 0; j < p; ++j) params.beta_x(j) = draw(2 + j);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) params.beta(a, b) = draw(BetaColumn(k, p, a, b));
  }
}

void DrawSigma(const Dataset& data, const ExposureMatrix& q,
               const PriorConfig& priors, ModelParams& params, Rng& rng) {
  const double ssr = SumSquaredResiduals(data, q, params);
  const double precision = GammaDraw(priors.sigma2_shape + 0.5 * data.size(),
                                     priors.sigma2_rate + 0.5 * ssr, rng);
  params.sigma_eps = std::sqrt(1.0 / precision);
}

double BetaDraw(double a, double b, Rng& rng) {
  const double x = GammaDraw(a, 1.0, rng);
  const double y = GammaDraw(b, 1.0, rng);
  return x / (x + y);
}

int DrawPi(const Dataset& data, const ExposureMatrix& q,
           const PriorConfig& priors, ModelParams& params, Rng& rng) {
  const int k = params.k();
  const std::vector<int> treated = TreatedCounts(data.z, data.labels);
  Eigen::MatrixXd successes = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd trials = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < data.size(); ++i) {
    const int c = data.labels[i];
    for (int a = 0; a < k; ++a) {
      successes(a, c) += q(a, i);
      trials(a, c) += treated[a] - (a == c ? data.z[i] : 0);
    }
  }
  int fallbacks = 0;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      if (trials(a, b) <= 0) ++fallbacks;
      const double draw = BetaDraw(priors.pi_a + successes(a, b),
                                   priors.pi_b + trials(a, b) - successes(a, b), rng);
      params.pi(a, b) = std::clamp(draw, kPiFloor, 1.0 - kPiFloor);
    }
  }
  return fallbacks;
}

void DrawLatent(const Dataset& data, const ModelParams& params,
                ExposureMatrix& q, Rng& rng, int iteration) {
  const int k = params.k();
  const std::vector<int> treated = TreatedCounts(data.z, data.labels);
  const int max_trials = *std::max_element(treated.begin(), treated.end());
  std::vector<double> log_factorial(max_trials + 2);
  for (int m = 0; m <= max_trials + 1; ++m) log_factorial[m] = std::lgamma(m + 1.0);
  const Eigen::MatrixXd log_pi = params.pi.array().log();
  const Eigen::MatrixXd log_1m_pi = (-params.pi.array()).log1p();
  const double inv_two_var = 0.5 / (params.sigma_eps * params.sigma_eps);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> mass(max_trials + 1);

  for (int i = 0; i < data.size(); ++i) {
    const int c = data.labels[i];
    double r = data.y(i) - params.beta0 - params.gamma * data.z[i];
    if (params.covariate_count() > 0) r -= data.x.row(i).dot(params.beta_x);
    double mu = 0.0;
    for (int a = 0; a < k; ++a) mu += params.beta(a, c) * q(a, i);
    for (int a = 0; a < k; ++a) {
      const int m = treated[a] - (a == c ? data.z[i] : 0);
      const double b = params.beta(a, c);
      const double rest = mu - b * q(a, i);
      double top = -std::numeric_limits<double>::infinity();
      for (int v = 0; v <= m; ++v) {
        const double d = r - rest - b * v;
        mass[v] = log_factorial[m] - log_factorial[v] - log_factorial[m - v] +
                  v * log_pi(a, c) + (m - v) * log_1m_pi(a, c) - d * d * inv_two_var;
        top = std::max(top, mass[v]);
      }
      if (!std::isfinite(top)) {
        throw SamplerError("non-finite exposure conditional", iteration, i);
      }
      double total = 0.0;
      for (int v = 0; v <= m; ++v) {
        mass[v] = std::exp(mass[v] - top);
        total += mass[v];
      }
      if (!(total > 0.0) || !std::isfinite(total)) {
        throw SamplerError("degenerate exposure conditional", iteration, i);
      }
      double u = unif(rng) * total;
      int pick = m;
      for (int v = 0; v <= m; ++v) {
        u -= mass[v];
        if (u <= 0.0) {
          pick = v;
          break;
        }
      }
      mu = rest + b * pick;
      q(a, i) = pick;
    }
  }
}

}  // namespace gibbs

double LogJoint(const Dataset& data, const ModelParams& params,
                const ExposureMatrix& q, const PriorConfig& priors) {
  const int k = params.k();
  const std::vector<int> treated = TreatedCounts(data.z, data.labels);
  const double var = params.sigma_eps * params.sigma_eps;
  double total = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    const int c = data.labels[i];
    double mu = params.beta0 + params.gamma * data.z[i];
    if (params.covariate_count() > 0) mu += data.x.row(i).dot(params.beta_x);
    for (int a = 0; a < k; ++a) {
      mu += params.beta(a, c) * q(a, i);
      total += LogBinomialPmf(q(a, i), treated[a] - (a == c ? data.z[i] : 0),
                              params.pi(a, c));
    }
    const double d = data.y(i) - mu;
    total += -0.5 * d * d / var - 0.5 * std::log(var) - kLogSqrtTwoPi;
  }
  auto normal_prior = [&](double v) {
    return -0.5 * v * v / (priors.coef_sd * priors.coef_sd);
  };
  total += normal_prior(params.beta0) + normal_prior(params.gamma);
  for (int j = 0; j < params.covariate_count(); ++j) total += normal_prior(params.beta_x(j));
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      total += normal_prior(params.beta(a, b));
      total += (priors.pi_a - 1.0) * std::log(params.pi(a, b)) +
               (priors.pi_b - 1.0) * std::log1p(-params.pi(a, b));
    }
  }
  total += -(priors.sigma2_shape + 1.0) * std::log(var) - priors.sigma2_rate / var;
  return total;
}

PosteriorSamples FitGibbs(const Dataset& data, int k, const PriorConfig& priors,
                          const McmcConfig& mcmc, const InitPolicy& init) {
  data.Validate();
  priors.Validate();
  mcmc.Validate();
  if (data.labels.k() != k) throw InputError("K does not match the labels");
  if (mcmc.fixed_latent &&
      (mcmc.fixed_latent->rows() != k || mcmc.fixed_latent->cols() != data.size())) {
    throw InputError("fixed latent exposures must be K x n");
  }
  const int p = data.covariate_count();
  PosteriorSamples samples;
  samples.layout = ParamLayout(k, p);
  samples.names = samples.layout.Names();
  samples.n = data.size();
  samples.treated_counts = TreatedCounts(data.z, data.labels);
  samples.chains.resize(mcmc.n_chains);
  samples.latent.resize(mcmc.retain_latent ? mcmc.n_chains : 0);
  samples.chain_seeds.resize(mcmc.n_chains);
  std::vector<int> warnings(mcmc.n_chains, 0);
  std::vector<std::optional<SamplerError>> failures(mcmc.n_chains);
  const int burnin = mcmc.Burnin();
  const int kept = mcmc.KeptPerChain();

#pragma omp parallel for schedule(dynamic)
  for (int chain = 0; chain < mcmc.n_chains; ++chain) {
    const std::uint64_t seed = DeriveSeed(mcmc.seed, chain, Stream::kGibbs);
    samples.chain_seeds[chain] = seed;
    Rng rng = MakeRng(seed);
    ModelParams params = InitialParams(data, k, init, chain, rng);
    ExposureMatrix q = mcmc.fixed_latent ? *mcmc.fixed_latent
                                         : ExposureMatrix::Zero(k, data.size());
    Eigen::MatrixXd draws(kept, samples.layout.size());
    int row = 0;
    try {
      for (int t = 0; t < mcmc.n_iter; ++t) {
        if (!mcmc.fixed_latent) gibbs::DrawLatent(data, params, q, rng, t);
        gibbs::DrawCoefficients(data, q, priors, params, rng);
        gibbs::DrawSigma(data, q, priors, params, rng);
        const int fallbacks = gibbs::DrawPi(data, q, priors, params, rng);
        if (t == 0) warnings[chain] = fallbacks;
        if (t >= burnin && (t - burnin + 1) % mcmc.thin == 0 && row < kept) {
          draws.row(row++) = samples.layout.Flatten(params).transpose();
          if (mcmc.retain_latent) samples.latent[chain].push_back(q);
        }
      }
    } catch (const SamplerError& e) {
      failures[chain] = e;
    }
    samples.chains[chain] = std::move(draws);
  }
  for (const auto& f : failures) {
    if (f) throw *f;
  }
  for (int w : warnings) samples.empty_block_warnings += w;
  return samples;
}

}  // namespace cinet
