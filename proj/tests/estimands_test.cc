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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cinet/error.h"
#include "cinet/estimands.h"
#include "cinet/estimation.h"
#include "cinet/netgen.h"
#include "cinet/simulation.h"

using namespace cinet;

namespace {

ModelParams TwoCommunityParams() {
  ModelParams p = ModelParams::Zero(2);
  p.beta0 = 0.3;
  p.gamma = 4.0;
  p.beta << 2.0, 1.0, -0.5, 1.5;
  p.pi << 0.3, 0.1, 0.2, 0.4;
  p.sigma_eps = 1.0;
  return p;
}

// Labels 0,0,0,1,1,1 for the six-node oracle instances.
CommunityLabels SixNodeLabels() { return CommunityLabels({0, 0, 0, 1, 1, 1}, 2); }

std::vector<int> Members(const CommunityLabels& labels, int c) {
  std::vector<int> out;
  for (int i = 0; i < labels.size(); ++i) {
    if (labels[i] == c) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST_CASE("direct effect is gamma") {
  ModelParams p = TwoCommunityParams();
  CHECK(DirectEffect(p).value == 4.0);
  CHECK(DirectEffect(p).estimand == "direct");
  p.gamma = 0.0;
  CHECK(DirectEffect(p).value == 0.0);
}

TEST_CASE("direct effect agrees with simulated potential outcomes") {
  const ModelParams p = TwoCommunityParams();
  const CommunityLabels labels = SixNodeLabels();
  const AdjacencyMatrix g = SampleInterferenceNetwork(labels, p.pi, 4);
  const std::vector<int> others{1, 0, 1, 1, 0, 1};
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, p.sigma_eps);
  const int draws = 10000;
  double sum = 0.0;
  double sumsq = 0.0;
  for (int t = 0; t < draws; ++t) {
    double contrast = 0.0;
    for (int i = 0; i < 6; ++i) {
      double spill = 0.0;
      for (int j = 0; j < 6; ++j) {
        if (j != i && g(j, i) && others[j]) spill += p.beta(labels[j], labels[i]);
      }
      const double treated = p.beta0 + p.gamma + spill + noise(rng);
      const double control = p.beta0 + spill + noise(rng);
      contrast += treated - control;
    }
    contrast /= 6.0;
    sum += contrast;
    sumsq += contrast * contrast;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sumsq / draws - mean * mean) / draws);
  CHECK(std::abs(mean - DirectEffect(p).value) <= 3.0 * se);
}

TEST_CASE("group indirect effect closed form") {
  ModelParams p = TwoCommunityParams();
  const std::vector<int> sizes{3, 3};
  CHECK(GroupIdeValue(p, 0, 0, sizes) == doctest::Approx(2.0 * 0.3 * 2));
  CHECK(GroupIdeValue(p, 0, 1, sizes) == doctest::Approx(1.0 * 0.1 * 3));
  CHECK(GroupIdeValue(p, 1, 0, sizes) == doctest::Approx(-0.5 * 0.2 * 3));

  SUBCASE("single sender reduces to the pairwise effect") {
    const std::vector<int> single{1, 1};
    CHECK(GroupIdeValue(p, 0, 1, single) == doctest::Approx(p.beta(0, 1) * p.pi(0, 1)));
    const std::vector<int> pair{2, 1};
    CHECK(GroupIdeValue(p, 0, 0, pair) == doctest::Approx(p.beta(0, 0) * p.pi(0, 0)));
  }
  SUBCASE("zero beta gives zero for every pair") {
    p.beta.setZero();
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) CHECK(GroupIde(p, a, b, sizes).value == 0.0);
    }
  }
  SUBCASE("unknown communities are rejected") {
    CHECK_THROWS_AS(GroupIdeValue(p, 2, 0, sizes), InputError);
    CHECK_THROWS_AS(GroupIdeValue(p, 0, -1, sizes), InputError);
    CHECK_THROWS_AS(GroupIdeValue(p, 0, 0, std::vector<int>{3}), InputError);
    CHECK_THROWS_AS(PopulationIndirectValue(p, 5, sizes), InputError);
  }
}

TEST_CASE("potential-outcome oracle averaged over networks matches the closed form") {
  const ModelParams p = TwoCommunityParams();
  const CommunityLabels labels = SixNodeLabels();
  const std::vector<int> sizes = labels.CommunitySizes();
  const int networks = 10000;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const std::vector<int> senders = Members(labels, a);
      const std::vector<int> receivers = Members(labels, b);
      double sum = 0.0;
      double sumsq = 0.0;
      for (int t = 0; t < networks; ++t) {
        const AdjacencyMatrix g =
            SampleInterferenceNetwork(labels, p.pi, 1000 + t + 20000 * (2 * a + b));
        const double v = IdeBruteForceOracle(g, labels, p, senders, receivers, t);
        sum += v;
        sumsq += v * v;
      }
      const double mean = sum / networks;
      const double se = std::sqrt((sumsq / networks - mean * mean) / networks);
      INFO("sender " << a << " receiver " << b << " mean " << mean);
      CHECK(std::abs(mean - GroupIdeValue(p, a, b, sizes)) <= 3.0 * se);
    }
  }
}

TEST_CASE("population-average indirect effect on the benchmark designs") {
  const ModelParams k2 = BenchmarkDesign(100, 2).truth;
  const std::vector<int> treated2{25, 25};
  CHECK(PopulationIndirectValue(k2, 0, treated2) == doctest::Approx(5.5).epsilon(1e-12));
  CHECK(PopulationIndirectValue(k2, 1, treated2) == doctest::Approx(5.5).epsilon(1e-12));

  const ModelParams k4 = BenchmarkDesign(200, 4).truth;
  const std::vector<int> treated4{25, 25, 25, 25};
  for (int b = 0; b < 4; ++b) {
    CHECK(PopulationIndirectValue(k4, b, treated4) == doctest::Approx(6.5).epsilon(1e-12));
  }

  ModelParams none = k2;
  none.pi.setZero();
  CHECK(PopulationAverageIndirect(none, 0, treated2).value == 0.0);
}

TEST_CASE("population effect is the count-weighted sum of group effects") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> size(2, 40);
  for (int rep = 0; rep < 50; ++rep) {
    const int k = 1 + rep % 4;
    ModelParams p = ModelParams::Zero(k);
    std::vector<int> sizes(k);
    std::vector<int> treated(k);
    for (int a = 0; a < k; ++a) {
      sizes[a] = size(rng);
      treated[a] = std::uniform_int_distribution<int>(0, sizes[a])(rng);
      for (int b = 0; b < k; ++b) {
        p.beta(a, b) = 6.0 * unit(rng) - 3.0;
        p.pi(a, b) = 0.9 * unit(rng) + 0.01;
      }
    }
    for (int b = 0; b < k; ++b) {
      double sum = 0.0;
      for (int a = 0; a < k; ++a) {
        sum += GroupIdeValue(p, a, b, sizes) * treated[a] / (sizes[a] - (a == b ? 1.0 : 0.0));
      }
      const double direct = PopulationIndirectValue(p, b, treated);
      CHECK(std::abs(sum - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("nonnegative betas give nonnegative indirect effects") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int k = 2 + rep % 3;
    ModelParams p = ModelParams::Zero(k);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        p.beta(a, b) = 3.0 * unit(rng);
        p.pi(a, b) = 0.5 * unit(rng) + 1e-3;
      }
    }
    const std::vector<int> sizes(k, 10);
    const std::vector<int> treated(k, 4);
    for (int b = 0; b < k; ++b) {
      CHECK(PopulationIndirectValue(p, b, treated) >= 0.0);
      for (int a = 0; a < k; ++a) CHECK(GroupIdeValue(p, a, b, sizes) >= 0.0);
    }
  }
}

TEST_CASE("direct effect ignores community relabeling") {
  const ModelParams p = BenchmarkDesign(200, 4).truth;
  const std::vector<int> perm{2, 0, 3, 1};
  ModelParams q = p;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      q.beta(perm[a], perm[b]) = p.beta(a, b);
      q.pi(perm[a], perm[b]) = p.pi(a, b);
    }
  }
  CHECK(DirectEffect(q).value == DirectEffect(p).value);

  // The fitted direct effect follows the same rule.
  const SimulationDesign design = BenchmarkDesign(100, 2, 0.3);
  const SimulatedData sim = SimulateReplicate(design, 6);
  Dataset swapped = sim.data;
  swapped.labels = sim.data.labels.Relabeled(std::vector<int>{1, 0});
  InitPolicy init;
  init.start_at = design.truth;
  OptimizerConfig config;
  config.starts = 1;
  const FitResult f1 = FitMle(sim.data, 2, init, config);
  ModelParams truth_swapped = design.truth;
  truth_swapped.beta = design.truth.beta.reverse();
  truth_swapped.pi = design.truth.pi.reverse();
  init.start_at = truth_swapped;
  const FitResult f2 = FitMle(swapped, 2, init, config);
  CHECK(DirectEffect(f2).value == doctest::Approx(DirectEffect(f1).value).epsilon(1e-5));
}

TEST_CASE("brute-force oracle examples") {
  const ModelParams p = TwoCommunityParams();
  const CommunityLabels labels({0, 0, 1, 1}, 2);
  const std::vector<int> all{0, 1, 2, 3};

  SUBCASE("empty network") {
    CHECK(IdeBruteForceOracle(AdjacencyMatrix(4), labels, p, all, all, 1) == 0.0);
  }
  SUBCASE("single edge") {
    AdjacencyMatrix g(4);
    g.Set(1, 2, true);
    const std::vector<int> s{1};
    const std::vector<int> r{2};
    CHECK(IdeBruteForceOracle(g, labels, p, s, r, 1) ==
          doctest::Approx(p.beta(0, 1)).epsilon(1e-12));
  }
  SUBCASE("four nodes and three edges") {
    AdjacencyMatrix g(4);
    g.Set(0, 1, true);  // beta(0,0) = 2.0
    g.Set(1, 3, true);  // beta(0,1) = 1.0
    g.Set(3, 0, true);  // beta(1,0) = -0.5
    const double hand = (2.0 + 1.0 - 0.5) / 4.0;
    CHECK(IdeBruteForceOracle(g, labels, p, all, all, 1) == doctest::Approx(hand).epsilon(1e-12));
    // Neither the noise seed nor the other units' assignment matters.
    const std::vector<int> z{1, 1, 0, 1};
    CHECK(IdeBruteForceOracle(g, labels, p, all, all, 77, z) ==
          doctest::Approx(hand).epsilon(1e-12));
  }
  SUBCASE("bad inputs") {
    const std::vector<int> none;
    CHECK_THROWS_AS(IdeBruteForceOracle(AdjacencyMatrix(4), labels, p, all, none, 1), InputError);
    const std::vector<int> bad{7};
    CHECK_THROWS_AS(IdeBruteForceOracle(AdjacencyMatrix(4), labels, p, bad, all, 1), InputError);
  }
}

TEST_CASE("delta-method standard errors match numerical gradients") {
  const ModelParams p = TwoCommunityParams();
  const ParamLayout layout(2, 0);
  FitResult fit;
  fit.theta_hat = p;
  fit.theta_unconstrained = ToUnconstrained(p);
  const int m = layout.size();
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd root(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) root(i, j) = normal(rng);
  }
  fit.covariance = (root * root.transpose() / m + 0.1 * Eigen::MatrixXd::Identity(m, m)).eval();
  const std::vector<int> sizes{30, 20};
  const std::vector<int> treated{14, 9};

  auto numeric_se = [&](auto&& f) {
    Eigen::VectorXd grad(m);
    const double h = 1e-6;
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd up = fit.theta_unconstrained;
      Eigen::VectorXd down = up;
      up(j) += h;
      down(j) -= h;
      grad(j) = (f(FromUnconstrained(up, 2, 0)) - f(FromUnconstrained(down, 2, 0))) / (2.0 * h);
    }
    return std::sqrt(grad.dot(*fit.covariance * grad));
  };

  const EffectEstimate direct = DirectEffect(fit);
  REQUIRE(direct.se.has_value());
  CHECK(*direct.se == doctest::Approx(std::sqrt((*fit.covariance)(1, 1))).epsilon(1e-12));
  CHECK(*direct.lo < direct.value);
  CHECK(*direct.hi > direct.value);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const EffectEstimate e = GroupIde(fit, a, b, sizes);
      REQUIRE(e.se.has_value());
      CHECK(*e.se == doctest::Approx(numeric_se([&](const ModelParams& q) {
                                       return GroupIdeValue(q, a, b, sizes);
                                     })).epsilon(1e-6));
    }
    const EffectEstimate pop = PopulationAverageIndirect(fit, a, treated);
    REQUIRE(pop.se.has_value());
    CHECK(*pop.se == doctest::Approx(numeric_se([&](const ModelParams& q) {
                                     return PopulationIndirectValue(q, a, treated);
                                   })).epsilon(1e-6));
    CHECK(*pop.lo <= pop.value);
    CHECK(pop.value <= *pop.hi);
  }

  fit.covariance.reset();
  CHECK_FALSE(DirectEffect(fit).se.has_value());
}

TEST_CASE("posterior effects transform each draw") {
  const ParamLayout layout(2, 0);
  PosteriorSamples samples;
  samples.layout = layout;
  samples.names = layout.Names();
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.0, 0.1);
  const ModelParams base = TwoCommunityParams();
  for (int c = 0; c < 2; ++c) {
    Eigen::MatrixXd draws(400, layout.size());
    for (int r = 0; r < 400; ++r) {
      ModelParams q = base;
      q.gamma += normal(rng);
      q.beta(1, 0) += normal(rng);
      q.pi(1, 0) = std::clamp(q.pi(1, 0) + 0.2 * normal(rng), 0.01, 0.99);
      draws.row(r) = layout.Flatten(q).transpose();
    }
    samples.chains.push_back(draws);
  }
  const std::vector<int> sizes{10, 12};
  const std::vector<int> treated{5, 6};
  const Eigen::MatrixXd pooled = samples.Pooled();
  double sum = 0.0;
  for (Eigen::Index r = 0; r < pooled.rows(); ++r) {
    const ModelParams q = layout.Unflatten(pooled.row(r).transpose());
    sum += q.beta(1, 0) * q.pi(1, 0) * 12;
  }
  const EffectEstimate g = GroupIde(samples, 1, 0, sizes);
  CHECK(g.value == doctest::Approx(sum / 800.0).epsilon(1e-12));
  CHECK(g.method == "gibbs");
  REQUIRE(g.lo.has_value());
  CHECK(*g.lo <= g.value);
  CHECK(g.value <= *g.hi);

  std::vector<double> pop;
  for (Eigen::Index r = 0; r < pooled.rows(); ++r) {
    const ModelParams q = layout.Unflatten(pooled.row(r).transpose());
    pop.push_back(q.beta(0, 0) * 5 * q.pi(0, 0) + q.beta(1, 0) * 6 * q.pi(1, 0));
  }
  std::sort(pop.begin(), pop.end());
  const EffectEstimate e = PopulationAverageIndirect(samples, 0, treated);
  CHECK(*e.lo >= pop[19]);
  CHECK(*e.lo <= pop[20]);
  CHECK(*e.hi >= pop[779]);
  CHECK(*e.hi <= pop[780]);

  const auto table = EffectTable(samples, sizes, treated);
  CHECK(table.size() == 1 + 4 + 2);
  CHECK(table.front().estimand == "direct");
  CHECK(table.back().estimand == "population_indirect");
}
