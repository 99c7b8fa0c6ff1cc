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

// Comparison estimators: inverse probability weighting for the direct
// effect, least squares on exposure through a fixed (observed) network, and
// the interference model collapsed to a single community.

#ifndef CINET_BASELINES_H_
#define CINET_BASELINES_H_

#include <optional>
#include <string_view>

#include "cinet/estimation.h"
#include "cinet/network.h"

namespace cinet {

enum class BaselineMethod { kIpw, kFixedNetwork, kRandomGraph };

std::string_view BaselineMethodName(BaselineMethod method);

struct BaselineResult {
  BaselineMethod method = BaselineMethod::kIpw;
  double direct = 0.0;
  // Per-unit-exposure coefficient (fixed network) or beta * n * pi (random
  // graph). Absent for IPW and for collinear fixed-network designs.
  std::optional<double> indirect;
  // Fixed network only: coefficient times mean exposure.
  std::optional<double> indirect_population;
};

// Horvitz-Thompson difference of weighted means with known assignment
// probability p.
BaselineResult HtDirect(const Dataset& data, double assignment_prob);

// OLS of y on (1, z, sum_j A(j, i) z_j) plus any covariates.
BaselineResult FixedNetworkFit(const Dataset& data, const AdjacencyMatrix& a);

// Maximum likelihood with K forced to 1.
BaselineResult RandomGraphFit(const Dataset& data,
                              const OptimizerConfig& config = {});

}  // namespace cinet

#endif  // CINET_BASELINES_H_
