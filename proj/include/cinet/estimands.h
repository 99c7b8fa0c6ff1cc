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

// Causal estimands implied by the linear interference model.
//
// Under the model the direct effect is gamma. The expected indirect effect of
// sender community k on receiver community kp is
//   beta(k, kp) * pi(k, kp) * (N_k - [k == kp]),
// with N_k the community size. The population-average indirect effect for
// receiver kp sums beta(k, kp) * n_k * pi(k, kp) over senders, with n_k the
// number of treated units in k. The two use different counts on purpose.

#ifndef CINET_ESTIMANDS_H_
#define CINET_ESTIMANDS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cinet/estimation.h"
#include "cinet/network.h"

namespace cinet {

struct EffectEstimate {
  std::string estimand;  // "direct", "group_ide", "population_indirect"
  std::optional<int> sender;    // 0-based community
  std::optional<int> receiver;  // 0-based community
  double value = 0.0;
  std::optional<double> se;
  // Wald interval for fits, equal-tailed credible interval for posteriors.
  std::optional<double> lo;
  std::optional<double> hi;
  std::string method;  // "mle", "gibbs", "plugin"
};

// Point values.
double GroupIdeValue(const ModelParams& params, int sender, int receiver,
                     std::span<const int> community_sizes);
double PopulationIndirectValue(const ModelParams& params, int receiver,
                               std::span<const int> treated_counts);

// Plug-in (no uncertainty).
EffectEstimate DirectEffect(const ModelParams& params);
EffectEstimate GroupIde(const ModelParams& params, int sender, int receiver,
                        std::span<const int> community_sizes);
EffectEstimate PopulationAverageIndirect(const ModelParams& params, int receiver,
                                         std::span<const int> treated_counts);

// Delta method against the fit's unconstrained covariance.
EffectEstimate DirectEffect(const FitResult& fit);
EffectEstimate GroupIde(const FitResult& fit, int sender, int receiver,
                        std::span<const int> community_sizes);
EffectEstimate PopulationAverageIndirect(const FitResult& fit, int receiver,
                                         std::span<const int> treated_counts);

// Posterior means, with sd and 95% equal-tailed intervals of the transformed
// draws.
EffectEstimate DirectEffect(const PosteriorSamples& samples);
EffectEstimate GroupIde(const PosteriorSamples& samples, int sender, int receiver,
                        std::span<const int> community_sizes);
EffectEstimate PopulationAverageIndirect(const PosteriorSamples& samples,
                                         int receiver,
                                         std::span<const int> treated_counts);

// Direct effect, every (sender, receiver) group effect, and every
// receiver's population-average indirect effect.
std::vector<EffectEstimate> EffectTable(const FitResult& fit,
                                        std::span<const int> community_sizes,
                                        std::span<const int> treated_counts);
std::vector<EffectEstimate> EffectTable(const PosteriorSamples& samples,
                                        std::span<const int> community_sizes,
                                        std::span<const int> treated_counts);

// Indirect effect for explicit node sets under a known interference network,
// from potential outcomes: for each receiver i and sender j != i, the
// outcome contrast of switching z_j from 0 to 1 with all other treatments
// at `baseline_z` and a common noise draw. Averaged over receivers.
double IdeBruteForceOracle(const AdjacencyMatrix& g, const CommunityLabels& labels,
                           const ModelParams& params, std::span<const int> senders,
                           std::span<const int> receivers, std::uint64_t seed,
                           std::span<const int> baseline_z = {});

}  // namespace cinet

#endif  // CINET_ESTIMANDS_H_
