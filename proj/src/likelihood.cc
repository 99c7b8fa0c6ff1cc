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

#include "cinet/likelihood.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "cinet/error.h"

namespace cinet {

namespace {

constexpr double kLogSqrtTwoPi = 0.91893853320467274178;

// Smallest c with sum_{q > c} pmf(q) < tail, given log pmf over 0..max.
int CapFromLogPmf(const std::vector<double>& log_pmf, double tail) {
  double suffix = 0.0;
  int cap = static_cast<int>(log_pmf.size()) - 1;
  for (int q = cap; q >= 1; --q) {
    suffix += std::exp(log_pmf[q]);
    if (suffix >= tail) break;
    cap = q - 1;
  }
  return cap;
}

int ApplyMultiplier(int cap, int upper, const TruncationPolicy& policy) {
  const int mult = std::max(1, policy.cap_multiplier);
  return std::min(upper, mult * (cap + 1) - 1);
}

// One (receiver community, treatment) group shares the mixture components.
struct Mixture {
  int k = 0;
  std::vector<int> trials;
  std::vector<double> log_weight;
  std::vector<double> mean;
  std::vector<int> q;  // M x K, row-major
  int components() const { return static_cast<int>(log_weight.size()); }
};

// Builds the joint product of per-coordinate log pmfs.
Mixture BuildMixture(const std::vector<std::vector<double>>& coordinate_log_pmf,
                     const Eigen::VectorXd& column_beta,
                     const TruncationPolicy& policy, bool keep_q) {
  const int k = static_cast<int>(coordinate_log_pmf.size());
  std::int64_t total = 1;
  for (const auto& pmf : coordinate_log_pmf) {
    total *= static_cast<std::int64_t>(pmf.size());
    if (total > policy.max_joint_terms) {
      throw EvaluationError(
          "joint exposure support exceeds " +
              std::to_string(policy.max_joint_terms) +
              " terms per unit; use the Gibbs sampler for this K",
          -1);
    }
  }
  Mixture mix;
  mix.k = k;
  mix.log_weight.reserve(total);
  mix.mean.reserve(total);
  if (keep_q) mix.q.reserve(total * k);
  std::vector<int> q(k, 0);
  while (true) {
    double lw = 0.0;
    double mu = 0.0;
    for (int a = 0; a < k; ++a) {
      lw += coordinate_log_pmf[a][q[a]];
      mu += column_beta(a) * q[a];
    }
    mix.log_weight.push_back(lw);
    mix.mean.push_back(mu);
    if (keep_q) mix.q.insert(mix.q.end(), q.begin(), q.end());
    int a = k - 1;
    while (a >= 0) {
      if (++q[a] < static_cast<int>(coordinate_log_pmf[a].size())) break;
      q[a] = 0;
      --a;
    }
    if (a < 0) break;
  }
  return mix;
}

Mixture BinomialMixture(const ModelParams& params, int c,
                        std::span<const int> trials,
                        const TruncationPolicy& policy, bool keep_q) {
  const int k = params.k();
  std::vector<std::vector<double>> log_pmf(k);
  for (int a = 0; a < k; ++a) {
    const double p = params.pi(a, c);
    const int cap = BinomialSupportCap(trials[a], p, policy);
    log_pmf[a].resize(cap + 1);
    for (int q = 0; q <= cap; ++q) log_pmf[a][q] = LogBinomialPmf(q, trials[a], p);
  }
  Mixture mix = BuildMixture(log_pmf, params.beta.col(c), policy, keep_q);
  mix.trials.assign(trials.begin(), trials.end());
  return mix;
}

double MixtureLogDensity(const Mixture& mix, double residual, double sigma) {
  const double inv_two_var = 0.5 / (sigma * sigma);
  const int m = mix.components();
  double top = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < m; ++c) {
    const double d = residual - mix.mean[c];
    top = std::max(top, mix.log_weight[c] - d * d * inv_two_var);
  }
  double sum = 0.0;
  for (int c = 0; c < m; ++c) {
    const double d = residual - mix.mean[c];
    sum += std::exp(mix.log_weight[c] - d * d * inv_two_var - top);
  }
  return top + std::log(sum) - std::log(sigma) - kLogSqrtTwoPi;
}

double Residual(const Dataset& data, const ModelParams& params, int i) {
  double r = data.y(i) - params.beta0 - params.gamma * data.z[i];
  if (params.covariate_count() > 0) r -= data.x.row(i).dot(params.beta_x);
  return r;
}

void CheckInputs(const Dataset& data, const ModelParams& params) {
  params.Validate();
  if (params.k() != data.labels.k()) {
    throw InputError("K of params (" + std::to_string(params.k()) +
                     ") differs from K of labels (" +
                     std::to_string(data.labels.k()) + ")");
  }
  if (params.covariate_count() != data.covariate_count()) {
    throw InputError("covariate count differs between params and data");
  }
}

std::vector<int> Trials(const std::vector<int>& treated, int c, int z) {
  std::vector<int> trials = treated;
  if (z) trials[c] -= 1;
  return trials;
}

// Mixtures for every (c, z) group, indexed 2 * c + z.
std::vector<Mixture> GroupMixtures(const Dataset& data,
                                   const ModelParams& params,
                                   const TruncationPolicy& policy,
                                   bool keep_q) {
  const int k = params.k();
  const std::vector<int> treated = TreatedCounts(data.z, data.labels);
  std::vector<char> present(2 * k, 0);
  for (int i = 0; i < data.size(); ++i) present[2 * data.labels[i] + data.z[i]] = 1;
  std::vector<Mixture> mixtures(2 * k);
  for (int g = 0; g < 2 * k; ++g) {
    if (!present[g]) continue;
    const int c = g / 2;
    const int z = g % 2;
    mixtures[g] = BinomialMixture(params, c, Trials(treated, c, z), policy, keep_q);
  }
  return mixtures;
}

double PairwiseSumRange(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return PairwiseSumRange(v, half) + PairwiseSumRange(v + half, n - half);
}

}  // namespace

double LogBinomialPmf(int q, int trials, double p) {
  if (q < 0 || q > trials) return -std::numeric_limits<double>::infinity();
  double out = std::lgamma(trials + 1.0) - std::lgamma(q + 1.0) -
               std::lgamma(trials - q + 1.0);
  if (q > 0) out += q * std::log(p);
  if (trials - q > 0) out += (trials - q) * std::log1p(-p);
  return out;
}

double LogPoissonPmf(int q, double lambda) {
  if (q < 0) return -std::numeric_limits<double>::infinity();
  if (lambda == 0.0) return q == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return q * std::log(lambda) - lambda - std::lgamma(q + 1.0);
}

int BinomialSupportCap(int trials, double p, const TruncationPolicy& policy) {
  if (trials <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  std::vector<double> log_pmf(trials + 1);
  for (int q = 0; q <= trials; ++q) log_pmf[q] = LogBinomialPmf(q, trials, p);
  return ApplyMultiplier(CapFromLogPmf(log_pmf, policy.tail_mass), trials, policy);
}

int PoissonSupportCap(double lambda, const TruncationPolicy& policy) {
  if (lambda < 0.0) throw ParameterError("lambda must be >= 0");
  if (lambda == 0.0) return 0;
  const int upper =
      static_cast<int>(std::ceil(lambda + 12.0 * std::sqrt(lambda) + 40.0));
  std::vector<double> log_pmf(upper + 1);
  for (int q = 0; q <= upper; ++q) log_pmf[q] = LogPoissonPmf(q, lambda);
  return ApplyMultiplier(CapFromLogPmf(log_pmf, policy.tail_mass),
                         std::numeric_limits<int>::max() / 4, policy);
}

double PairwiseSum(std::span<const double> values) {
  return PairwiseSumRange(values.data(), values.size());
}

Eigen::VectorXd UnitLogLikelihoods(const Dataset& data,
                                   const ModelParams& params,
                                   const TruncationPolicy& policy) {
  CheckInputs(data, params);
  const std::vector<Mixture> mixtures =
      GroupMixtures(data, params, policy, /*keep_q=*/false);
  const int n = data.size();
  Eigen::VectorXd terms(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const Mixture& mix = mixtures[2 * data.labels[i] + data.z[i]];
    terms(i) = MixtureLogDensity(mix, Residual(data, params, i), params.sigma_eps);
  }
  return terms;
}

double LogLikelihood(const Dataset& data, const ModelParams& params,
                     const TruncationPolicy& policy) {
  const Eigen::VectorXd terms = UnitLogLikelihoods(data, params, policy);
  return PairwiseSum({terms.data(), static_cast<std::size_t>(terms.size())});
}

double LogLikelihoodWithGradient(const Dataset& data,
                                 const ModelParams& params,
                                 Eigen::VectorXd& gradient,
                                 const TruncationPolicy& policy) {
  CheckInputs(data, params);
  const int k = params.k();
  const int p = params.covariate_count();
  const ParamLayout layout(k, p);
  const std::vector<Mixture> mixtures =
      GroupMixtures(data, params, policy, /*keep_q=*/true);
  const int n = data.size();
  const double sigma = params.sigma_eps;
  const double var = sigma * sigma;
  Eigen::VectorXd terms(n);
  // Column i holds unit i's gradient contribution.
  Eigen::MatrixXd unit_grad = Eigen::MatrixXd::Zero(layout.size(), n);

#pragma omp parallel
  {
    std::vector<double> log_terms;
    std::vector<double> eq(k), erq(k);
#pragma omp for schedule(static)
    for (int i = 0; i < n; ++i) {
      const int c = data.labels[i];
      const Mixture& mix = mixtures[2 * c + data.z[i]];
      const double r = Residual(data, params, i);
      const int m = mix.components();
      log_terms.resize(m);
      double top = -std::numeric_limits<double>::infinity();
      for (int s = 0; s < m; ++s) {
        const double d = r - mix.mean[s];
        log_terms[s] = mix.log_weight[s] - 0.5 * d * d / var;
        top = std::max(top, log_terms[s]);
      }
      double total = 0.0, e1 = 0.0, e2 = 0.0;
      std::fill(eq.begin(), eq.end(), 0.0);
      std::fill(erq.begin(), erq.end(), 0.0);
      for (int s = 0; s < m; ++s) {
        const double w = std::exp(log_terms[s] - top);
        const double d = r - mix.mean[s];
        total += w;
        e1 += w * d;
        e2 += w * d * d;
        const int* qs = &mix.q[static_cast<std::size_t>(s) * k];
        for (int a = 0; a < k; ++a) {
          eq[a] += w * qs[a];
          erq[a] += w * d * qs[a];
        }
      }
      terms(i) = top + std::log(total) - std::log(sigma) - kLogSqrtTwoPi;
      e1 /= total;
      e2 /= total;
      auto g = unit_grad.col(i);
      g(layout.beta0()) = e1 / var;
      g(layout.gamma()) = data.z[i] * e1 / var;
      for (int a = 0; a < k; ++a) {
        const double mean_q = eq[a] / total;
        const double pa = params.pi(a, c);
        g(layout.beta(a, c)) = erq[a] / total / var;
        g(layout.pi(a, c)) = mean_q / pa - (mix.trials[a] - mean_q) / (1.0 - pa);
      }
      g(layout.sigma()) = e2 / (var * sigma) - 1.0 / sigma;
      for (int j = 0; j < p; ++j) g(layout.beta_x(j)) = data.x(i, j) * e1 / var;
    }
  }

  gradient.resize(layout.size());
  std::vector<double> row(n);
  for (int d = 0; d < layout.size(); ++d) {
    for (int i = 0; i < n; ++i) row[i] = unit_grad(d, i);
    gradient(d) = PairwiseSum(row);
  }
  return PairwiseSum({terms.data(), static_cast<std::size_t>(n)});
}

double LogLikelihoodSerial(const Dataset& data, const ModelParams& params,
                           const TruncationPolicy& policy) {
  CheckInputs(data, params);
  const int k = params.k();
  const std::vector<int> treated = TreatedCounts(data.z, data.labels);
  const int n = data.size();
  std::vector<double> unit_terms(n);
  for (int i = 0; i < n; ++i) {
    const int c = data.labels[i];
    const std::vector<int> trials = Trials(treated, c, data.z[i]);
    std::vector<int> caps(k);
    std::int64_t total = 1;
    for (int a = 0; a < k; ++a) {
      caps[a] = BinomialSupportCap(trials[a], params.pi(a, c), policy);
      total *= caps[a] + 1;
      if (total > policy.max_joint_terms) {
        throw EvaluationError("joint exposure support too large", -1);
      }
    }
    const double r = Residual(data, params, i);
    std::vector<double> log_terms;
    std::vector<int> q(k, 0);
    while (true) {
      double mu = 0.0;
      double lw = 0.0;
      for (int a = 0; a < k; ++a) {
        mu += params.beta(a, c) * q[a];
        lw += LogBinomialPmf(q[a], trials[a], params.pi(a, c));
      }
      const double d = r - mu;
      log_terms.push_back(lw - 0.5 * d * d / (params.sigma_eps * params.sigma_eps));
      int a = k - 1;
      while (a >= 0) {
        if (++q[a] <= caps[a]) break;
        q[a] = 0;
        --a;
      }
      if (a < 0) break;
    }
    const double top = *std::max_element(log_terms.begin(), log_terms.end());
    double sum = 0.0;
    for (double t : log_terms) sum += std::exp(t - top);
    unit_terms[i] = top + std::log(sum) - std::log(params.sigma_eps) - kLogSqrtTwoPi;
  }
  return PairwiseSum(unit_terms);
}

double PoissonLimitLogDensity(double y, int z, int c, const LimitParams& params,
                              const TruncationPolicy& policy) {
  const int k = static_cast<int>(params.beta.rows());
  if (params.lambda.rows() != k || params.lambda.cols() != k ||
      params.beta.cols() != k) {
    throw ParameterError("beta and lambda must be K x K");
  }
  if (c < 0 || c >= k) throw InputError("receiver community out of range");
  if (!(params.sigma_eps > 0.0)) throw ParameterError("sigma_eps must be positive");
  std::vector<std::vector<double>> log_pmf(k);
  for (int a = 0; a < k; ++a) {
    const double lambda = params.lambda(a, c);
    if (!(lambda >= 0.0)) throw ParameterError("lambda must be >= 0");
    const int cap = PoissonSupportCap(lambda, policy);
    log_pmf[a].resize(cap + 1);
    for (int q = 0; q <= cap; ++q) log_pmf[a][q] = LogPoissonPmf(q, lambda);
  }
  const Mixture mix = BuildMixture(log_pmf, params.beta.col(c), policy, false);
  return MixtureLogDensity(mix, y - params.beta0 - params.gamma * z,
                           params.sigma_eps);
}

double BinomialMixtureLogDensity(double y, int z, int c,
                                 const ModelParams& params,
                                 std::span<const int> trials,
                                 const TruncationPolicy& policy) {
  params.Validate();
  if (static_cast<int>(trials.size()) != params.k()) {
    throw InputError("trials length differs from K");
  }
  const Mixture mix = BinomialMixture(params, c, trials, policy, false);
  return MixtureLogDensity(mix, y - params.beta0 - params.gamma * z,
                           params.sigma_eps);
}

}  // namespace cinet
