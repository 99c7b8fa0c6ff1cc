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

#include "cinet/model.h"

#include <cmath>
#include <random>
#include <string>

#include "cinet/error.h"
#include "cinet/random.h"

namespace cinet {

void ModelParams::Validate() const {
  if (beta.rows() != beta.cols() || beta.rows() == 0) {
    throw ParameterError("beta must be a non-empty square matrix");
  }
  if (pi.rows() != beta.rows() || pi.cols() != beta.cols()) {
    throw ParameterError("pi and beta must have the same K x K shape");
  }
  if (!(sigma_eps > 0.0) || !std::isfinite(sigma_eps)) {
    throw ParameterError("sigma_eps must be positive, got " +
                         std::to_string(sigma_eps));
  }
  for (int a = 0; a < pi.rows(); ++a) {
    for (int b = 0; b < pi.cols(); ++b) {
      if (!(pi(a, b) > 0.0 && pi(a, b) < 1.0)) {
        throw ParameterError("pi(" + std::to_string(a + 1) + "," +
                             std::to_string(b + 1) + ") = " +
                             std::to_string(pi(a, b)) + " outside (0,1)");
      }
    }
  }
  if (!std::isfinite(beta0) || !std::isfinite(gamma) || !beta.allFinite() ||
      !beta_x.allFinite()) {
    throw ParameterError("non-finite coefficient");
  }
}

Eigen::MatrixXd ModelParams::Lambda(std::span<const int> treated_counts) const {
  if (static_cast<int>(treated_counts.size()) != k()) {
    throw InputError("treated counts length differs from K");
  }
  Eigen::MatrixXd lambda = pi;
  for (int a = 0; a < k(); ++a) lambda.row(a) *= treated_counts[a];
  return lambda;
}

ModelParams ModelParams::Zero(int k, int covariates) {
  ModelParams params;
  params.beta = Eigen::MatrixXd::Zero(k, k);
  params.pi = Eigen::MatrixXd::Constant(k, k, 0.5);
  params.beta_x = Eigen::VectorXd::Zero(covariates);
  return params;
}

void Dataset::Validate() const {
  const int n = size();
  if (static_cast<int>(z.size()) != n || labels.size() != n) {
    throw InputError("dataset columns differ in length (y=" +
                     std::to_string(n) + ", z=" + std::to_string(z.size()) +
                     ", labels=" + std::to_string(labels.size()) + ")");
  }
  if (x.cols() > 0 && x.rows() != n) {
    throw InputError("covariate matrix has wrong row count");
  }
  for (int i = 0; i < n; ++i) {
    if (z[i] != 0 && z[i] != 1) {
      throw InputError("treatment of unit " + std::to_string(i) +
                       " is not binary");
    }
    if (!std::isfinite(y(i))) {
      throw InputError("outcome of unit " + std::to_string(i) +
                       " is missing or non-finite");
    }
  }
}

std::vector<std::string> ParamLayout::Names() const {
  std::vector<std::string> names(size());
  names[beta0()] = "beta0";
  names[gamma()] = "gamma";
  for (int a = 0; a < k_; ++a) {
    for (int b = 0; b < k_; ++b) {
      const std::string suffix =
          "_" + std::to_string(a + 1) + "_" + std::to_string(b + 1);
      names[beta(a, b)] = "beta" + suffix;
      names[pi(a, b)] = "pi" + suffix;
    }
  }
  names[sigma()] = "sigma_eps";
  for (int j = 0; j < p_; ++j) names[beta_x(j)] = "beta_x_" + std::to_string(j + 1);
  return names;
}

Eigen::VectorXd ParamLayout::Flatten(const ModelParams& params) const {
  if (params.k() != k_ || params.covariate_count() != p_) {
    throw InputError("parameter shape does not match layout");
  }
  Eigen::VectorXd v(size());
  v(beta0()) = params.beta0;
  v(gamma()) = params.gamma;
  for (int a = 0; a < k_; ++a) {
    for (int b = 0; b < k_; ++b) {
      v(beta(a, b)) = params.beta(a, b);
      v(pi(a, b)) = params.pi(a, b);
    }
  }
  v(sigma()) = params.sigma_eps;
  for (int j = 0; j < p_; ++j) v(beta_x(j)) = params.beta_x(j);
  return v;
}

ModelParams ParamLayout::Unflatten(const Eigen::VectorXd& v) const {
  if (v.size() != size()) throw InputError("parameter vector has wrong length");
  ModelParams params = ModelParams::Zero(k_, p_);
  params.beta0 = v(beta0());
  params.gamma = v(gamma());
  for (int a = 0; a < k_; ++a) {
    for (int b = 0; b < k_; ++b) {
      params.beta(a, b) = v(beta(a, b));
      params.pi(a, b) = v(pi(a, b));
    }
  }
  params.sigma_eps = v(sigma());
  for (int j = 0; j < p_; ++j) params.beta_x(j) = v(beta_x(j));
  return params;
}

std::vector<int> TreatedCounts(std::span<const int> z,
                               const CommunityLabels& labels) {
  if (static_cast<int>(z.size()) != labels.size()) {
    throw InputError("treatment and label vectors differ in length");
  }
  std::vector<int> counts(labels.k(), 0);
  for (int i = 0; i < labels.size(); ++i) {
    if (z[i] != 0 && z[i] != 1) throw InputError("treatment is not binary");
    counts[labels[i]] += z[i];
  }
  return counts;
}

ExposureMatrix ExposureCounts(const AdjacencyMatrix& g, std::span<const int> z,
                              const CommunityLabels& labels) {
  const int n = labels.size();
  if (g.size() != n || static_cast<int>(z.size()) != n) {
    throw InputError("network, treatment and labels differ in size");
  }
  ExposureMatrix q = ExposureMatrix::Zero(labels.k(), n);
  for (int j = 0; j < n; ++j) {
    if (!z[j]) continue;
    auto row = g.Row(j);
    for (int i = 0; i < n; ++i) {
      if (i != j && row[i]) q(labels[j], i) += 1;
    }
  }
  return q;
}

Eigen::VectorXd StructuralMean(const AdjacencyMatrix& g,
                               std::span<const int> z,
                               const CommunityLabels& labels,
                               const ModelParams& params,
                               const Eigen::MatrixXd& x) {
  const int n = labels.size();
  if (params.k() != labels.k()) throw InputError("K of params and labels differ");
  if (params.covariate_count() > 0 &&
      (x.rows() != n || x.cols() != params.covariate_count())) {
    throw InputError("covariates do not match beta_x");
  }
  const ExposureMatrix q = ExposureCounts(g, z, labels);
  Eigen::VectorXd mean(n);
  for (int i = 0; i < n; ++i) {
    double m = params.beta0 + params.gamma * z[i];
    for (int k = 0; k < labels.k(); ++k) m += params.beta(k, labels[i]) * q(k, i);
    if (params.covariate_count() > 0) m += x.row(i).dot(params.beta_x);
    mean(i) = m;
  }
  return mean;
}

Eigen::VectorXd SimulateOutcomes(const AdjacencyMatrix& g,
                                 std::span<const int> z,
                                 const CommunityLabels& labels,
                                 const ModelParams& params,
                                 const Eigen::MatrixXd& x, std::uint64_t seed) {
  if (!(params.sigma_eps >= 0.0)) throw ParameterError("sigma_eps must be >= 0");
  Eigen::VectorXd y = StructuralMean(g, z, labels, params, x);
  Rng rng = MakeRng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int i = 0; i < y.size(); ++i) y(i) += params.sigma_eps * noise(rng);
  return y;
}

}  // namespace cinet
