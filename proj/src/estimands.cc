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

#include "cinet/estimands.h"

#include <cmath>
#include <functional>
#include <random>

#include "cinet/diagnostics.h"
#include "cinet/error.h"
#include "cinet/random.h"

namespace cinet {

namespace {

constexpr double kZ975 = 1.959963984540054;

void CheckCommunity(int index, int k, const char* role) {
  if (index < 0 || index >= k) {
    throw InputError(std::string("unknown ") + role + " community " +
                     std::to_string(index + 1));
  }
}

void CheckCounts(std::span<const int> counts, int k, const char* what) {
  if (static_cast<int>(counts.size()) != k) {
    throw InputError(std::string(what) + " must have K entries");
  }
}

EffectEstimate Base(const char* estimand, std::optional<int> sender,
                    std::optional<int> receiver, const char* method) {
  EffectEstimate e;
  e.estimand = estimand;
  e.sender = sender;
  e.receiver = receiver;
  e.method = method;
  return e;
}

// Delta method: `grad` is d(value)/d(theta unconstrained).
void AttachDelta(EffectEstimate& e, const FitResult& fit, const Eigen::VectorXd& grad) {
  if (!fit.covariance) return;
  const double var = grad.dot(*fit.covariance * grad);
  if (!(var >= 0.0) || !std::isfinite(var)) return;
  e.se = std::sqrt(var);
  e.lo = e.value - kZ975 * *e.se;
  e.hi = e.value + kZ975 * *e.se;
}

EffectEstimate FromDraws(EffectEstimate e, const PosteriorSamples& samples,
                         const std::function<double(const ModelParams&)>& f) {
  const Eigen::MatrixXd pooled = samples.Pooled();
  if (pooled.rows() == 0) throw InputError("no posterior draws");
  std::vector<double> values(pooled.rows());
  double sum = 0.0;
  for (Eigen::Index r = 0; r < pooled.rows(); ++r) {
    values[r] = f(samples.layout.Unflatten(pooled.row(r).transpose()));
    sum += values[r];
  }
  const double n = static_cast<double>(values.size());
  e.value = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - e.value) * (v - e.value);
  e.se = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  e.lo = Quantile(values, 0.025);
  e.hi = Quantile(values, 0.975);
  return e;
}

}  // namespace

double GroupIdeValue(const ModelParams& params, int sender, int receiver,
                     std::span<const int> community_sizes) {
  const int k = params.k();
  CheckCommunity(sender, k, "sender");
  CheckCommunity(receiver, k, "receiver");
  CheckCounts(community_sizes, k, "community sizes");
  const int senders = community_sizes[sender] - (sender == receiver ? 1 : 0);
  return params.beta(sender, receiver) * params.pi(sender, receiver) * senders;
}

double PopulationIndirectValue(const ModelParams& params, int receiver,
                               std::span<const int> treated_counts) {
  const int k = params.k();
  CheckCommunity(receiver, k, "receiver");
  CheckCounts(treated_counts, k, "treated counts");
  double total = 0.0;
  for (int a = 0; a < k; ++a) {
    total += params.beta(a, receiver) * treated_counts[a] * params.pi(a, receiver);
  }
  return total;
}

EffectEstimate DirectEffect(const ModelParams& params) {
  EffectEstimate e = Base("direct", std::nullopt, std::nullopt, "plugin");
  e.value = params.gamma;
  return e;
}

EffectEstimate GroupIde(const ModelParams& params, int sender, int receiver,
                        std::span<const int> community_sizes) {
  EffectEstimate e = Base("group_ide", sender, receiver, "plugin");
  e.value = GroupIdeValue(params, sender, receiver, community_sizes);
  return e;
}

EffectEstimate PopulationAverageIndirect(const ModelParams& params, int receiver,
                                         std::span<const int> treated_counts) {
  EffectEstimate e = Base("population_indirect", std::nullopt, receiver, "plugin");
  e.value = PopulationIndirectValue(params, receiver, treated_counts);
  return e;
}

EffectEstimate DirectEffect(const FitResult& fit) {
  EffectEstimate e = Base("direct", std::nullopt, std::nullopt, "mle");
  e.value = fit.theta_hat.gamma;
  const ParamLayout layout(fit.theta_hat.k(), fit.theta_hat.covariate_count());
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(layout.size());
  grad(layout.gamma()) = 1.0;
  AttachDelta(e, fit, grad);
  return e;
}

EffectEstimate GroupIde(const FitResult& fit, int sender, int receiver,
                        std::span<const int> community_sizes) {
  EffectEstimate e = Base("group_ide", sender, receiver, "mle");
  const ModelParams& p = fit.theta_hat;
  e.value = GroupIdeValue(p, sender, receiver, community_sizes);
  const ParamLayout layout(p.k(), p.covariate_count());
  const double senders = community_sizes[sender] - (sender == receiver ? 1 : 0);
  const double pi = p.pi(sender, receiver);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(layout.size());
  grad(layout.beta(sender, receiver)) = pi * senders;
  grad(layout.pi(sender, receiver)) = p.beta(sender, receiver) * senders * pi * (1.0 - pi);
  AttachDelta(e, fit, grad);
  return e;
}

EffectEstimate PopulationAverageIndirect(const FitResult& fit, int receiver,
                                         std::span<const int> treated_counts) {
  EffectEstimate e = Base("population_indirect", std::nullopt, receiver, "mle");
  const ModelParams& p = fit.theta_hat;
  e.value = PopulationIndirectValue(p, receiver, treated_counts);
  const ParamLayout layout(p.k(), p.covariate_count());
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(layout.size());
  for (int a = 0; a < p.k(); ++a) {
    const double pi = p.pi(a, receiver);
    grad(layout.beta(a, receiver)) = treated_counts[a] * pi;
    grad(layout.pi(a, receiver)) = p.beta(a, receiver) * treated_counts[a] * pi * (1.0 - pi);
  }
  AttachDelta(e, fit, grad);
  return e;
}

EffectEstimate DirectEffect(const PosteriorSamples& samples) {
  return FromDraws(Base("direct", std::nullopt, std::nullopt, "gibbs"), samples,
                   [](const ModelParams& p) { return p.gamma; });
}

EffectEstimate GroupIde(const PosteriorSamples& samples, int sender, int receiver,
                        std::span<const int> community_sizes) {
  const std::vector<int> sizes(community_sizes.begin(), community_sizes.end());
  return FromDraws(Base("group_ide", sender, receiver, "gibbs"), samples,
                   [&](const ModelParams& p) {
                     return GroupIdeValue(p, sender, receiver, sizes);
                   });
}

EffectEstimate PopulationAverageIndirect(const PosteriorSamples& samples, int receiver,
                                         std::span<const int> treated_counts) {
  const std::vector<int> counts(treated_counts.begin(), treated_counts.end());
  return FromDraws(Base("population_indirect", std::nullopt, receiver, "gibbs"), samples,
                   [&](const ModelParams& p) {
                     return PopulationIndirectValue(p, receiver, counts);
                   });
}

std::vector<EffectEstimate> EffectTable(const FitResult& fit,
                                        std::span<const int> community_sizes,
                                        std::span<const int> treated_counts) {
  const int k = fit.theta_hat.k();
  std::vector<EffectEstimate> out{DirectEffect(fit)};
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) out.push_back(GroupIde(fit, a, b, community_sizes));
  }
  for (int b = 0; b < k; ++b) {
    out.push_back(PopulationAverageIndirect(fit, b, treated_counts));
  }
  return out;
}

std::vector<EffectEstimate> EffectTable(const PosteriorSamples& samples,
                                        std::span<const int> community_sizes,
                                        std::span<const int> treated_counts) {
  const int k = samples.layout.k();
  std::vector<EffectEstimate> out{DirectEffect(samples)};
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) out.push_back(GroupIde(samples, a, b, community_sizes));
  }
  for (int b = 0; b < k; ++b) {
    out.push_back(PopulationAverageIndirect(samples, b, treated_counts));
  }
  return out;
}

double IdeBruteForceOracle(const AdjacencyMatrix& g, const CommunityLabels& labels,
                           const ModelParams& params, std::span<const int> senders,
                           std::span<const int> receivers, std::uint64_t seed,
                           std::span<const int> baseline_z) {
  const int n = g.size();
  if (labels.size() != n) throw InputError("labels and network differ in size");
  if (labels.k() != params.k()) throw InputError("K does not match the labels");
  if (receivers.empty()) throw InputError("receiver set is empty");
  if (!baseline_z.empty() && static_cast<int>(baseline_z.size()) != n) {
    throw InputError("baseline assignment has the wrong length");
  }
  for (int v : senders) {
    if (v < 0 || v >= n) throw InputError("sender index out of range");
  }
  std::vector<int> z(n, 0);
  if (!baseline_z.empty()) z.assign(baseline_z.begin(), baseline_z.end());

  Rng rng = MakeRng(seed);
  std::normal_distribution<double> normal(0.0, params.sigma_eps);
  // Outcome of unit i under assignment z and noise eps.
  auto outcome = [&](int i, const std::vector<int>& assignment, double eps) {
    double y = params.beta0 + params.gamma * assignment[i] + eps;
    for (int j = 0; j < n; ++j) {
      if (j != i && g(j, i) && assignment[j]) y += params.beta(labels[j], labels[i]);
    }
    return y;
  };
  double total = 0.0;
  for (int i : receivers) {
    if (i < 0 || i >= n) throw InputError("receiver index out of range");
    for (int j : senders) {
      if (j == i) continue;
      const double eps = normal(rng);
      std::vector<int> on = z;
      std::vector<int> off = z;
      on[j] = 1;
      off[j] = 0;
      total += outcome(i, on, eps) - outcome(i, off, eps);
    }
  }
  return total / static_cast<double>(receivers.size());
}

}  // namespace cinet
