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

#include "cinet/baselines.h"

#include <vector>

#include "cinet/error.h"

namespace cinet {

std::string_view BaselineMethodName(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::kIpw:
      return "IPW";
    case BaselineMethod::kFixedNetwork:
      return "FixedNetwork";
    case BaselineMethod::kRandomGraph:
      return "RandomGraph";
  }
  return "unknown";
}

BaselineResult HtDirect(const Dataset& data, double assignment_prob) {
  if (!(assignment_prob > 0.0 && assignment_prob < 1.0)) {
    throw ParameterError("assignment probability must lie in (0,1)");
  }
  if (data.size() == 0) throw InputError("empty dataset");
  double treated = 0.0;
  double control = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    if (data.z[i]) {
      treated += data.y(i);
    } else {
      control += data.y(i);
    }
  }
  BaselineResult r;
  r.method = BaselineMethod::kIpw;
  r.direct = (treated / assignment_prob - control / (1.0 - assignment_prob)) / data.size();
  return r;
}

BaselineResult FixedNetworkFit(const Dataset& data, const AdjacencyMatrix& a) {
  data.Validate();
  if (a.size() != data.size()) throw InputError("network and data differ in size");
  const int n = data.size();
  const int p = data.covariate_count();
  Eigen::VectorXd exposure = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    if (!data.z[j]) continue;
    const auto row = a.Row(j);
    for (int i = 0; i < n; ++i) exposure(i) += row[i];
  }
  Eigen::MatrixXd design(n, 3 + p);
  for (int i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = data.z[i];
    design(i, 2) = exposure(i);
    for (int j = 0; j < p; ++j) design(i, 3 + j) = data.x(i, j);
  }
  BaselineResult r;
  r.method = BaselineMethod::kFixedNetwork;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() == design.cols()) {
    const Eigen::VectorXd coef = qr.solve(data.y);
    r.direct = coef(1);
    r.indirect = coef(2);
    r.indirect_population = coef(2) * exposure.mean();
    return r;
  }
  // Drop the exposure column; report the direct effect from what remains.
  Eigen::MatrixXd reduced(n, 2 + p);
  reduced << design.leftCols(2), design.rightCols(p);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr2(reduced);
  qr2.setThreshold(1e-10);
  const Eigen::VectorXd coef = qr2.solve(data.y);
  r.direct = qr2.rank() == reduced.cols() ? coef(1)
                                           : std::numeric_limits<double>::quiet_NaN();
  return r;
}

BaselineResult RandomGraphFit(const Dataset& data, const OptimizerConfig& config) {
  data.Validate();
  Dataset single = data;
  single.labels = CommunityLabels(std::vector<int>(data.size(), 0), 1);
  OptimizerConfig local = config;
  local.compute_information = false;
  const FitResult fit = FitMle(single, 1, InitPolicy{}, local);
  const std::vector<int> treated = TreatedCounts(single.z, single.labels);
  BaselineResult r;
  r.method = BaselineMethod::kRandomGraph;
  r.direct = fit.theta_hat.gamma;
  r.indirect = fit.theta_hat.beta(0, 0) * treated[0] * fit.theta_hat.pi(0, 0);
  return r;
}

}  // namespace cinet
