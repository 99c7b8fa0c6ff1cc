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

#include "cinet/diagnostics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "cinet/error.h"
#include "cinet/netgen.h"

namespace cinet {

namespace {

constexpr double kInvSqrtTwoPi = 0.39894228040143267794;

std::vector<Eigen::VectorXd> SplitChains(const std::vector<Eigen::VectorXd>& chains) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& c : chains) {
    const Eigen::Index half = c.size() / 2;
    out.push_back(c.head(half));
    out.push_back(c.tail(half));
  }
  return out;
}

// Replaces draws by normal scores of their pooled ranks (average rank on ties).
std::vector<Eigen::VectorXd> RankNormalize(const std::vector<Eigen::VectorXd>& chains) {
  std::vector<std::pair<double, std::size_t>> pooled;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (Eigen::Index i = 0; i < chains[c].size(); ++i) {
      pooled.emplace_back(chains[c](i), pooled.size());
    }
  }
  const std::size_t s = pooled.size();
  std::vector<double> rank(s);
  std::vector<std::size_t> order(s);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pooled[a].first < pooled[b].first; });
  for (std::size_t i = 0; i < s;) {
    std::size_t j = i;
    while (j + 1 < s && pooled[order[j + 1]].first == pooled[order[i]].first) ++j;
    const double avg = 0.5 * (i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[order[t]] = avg;
    i = j + 1;
  }
  const boost::math::normal_distribution<double> normal;
  std::vector<Eigen::VectorXd> out;
  std::size_t pos = 0;
  for (const auto& c : chains) {
    Eigen::VectorXd z(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      z(i) = boost::math::quantile(normal, (rank[pos++] - 0.375) / (s + 0.25));
    }
    out.push_back(std::move(z));
  }
  return out;
}

std::optional<double> ClassicRhat(const std::vector<Eigen::VectorXd>& chains) {
  const double m = static_cast<double>(chains.size());
  const double n = static_cast<double>(chains[0].size());
  if (m < 2 || n < 2) return std::nullopt;
  Eigen::VectorXd means(chains.size());
  double within = 0.0;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    means(c) = chains[c].mean();
    within += (chains[c].array() - means(c)).square().sum() / (n - 1.0);
  }
  within /= m;
  const double between = n * (means.array() - means.mean()).square().sum() / (m - 1.0);
  if (!(within > 0.0)) return std::nullopt;
  const double var_plus = (n - 1.0) / n * within + between / n;
  return std::sqrt(var_plus / within);
}

std::vector<Eigen::VectorXd> ColumnChains(const std::vector<Eigen::MatrixXd>& chains,
                                          int column) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& c : chains) out.push_back(c.col(column));
  return out;
}

double Silverman(const Eigen::VectorXd& x) {
  const double n = static_cast<double>(x.size());
  const double mean = x.mean();
  const double sd = std::sqrt((x.array() - mean).square().sum() / std::max(1.0, n - 1.0));
  std::vector<double> v(x.data(), x.data() + x.size());
  const double iqr = Quantile(v, 0.75) - Quantile(v, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.349);
  if (!(spread > 0.0)) spread = std::max(sd, 1e-12);
  return 0.9 * spread * std::pow(n, -0.2);
}

}  // namespace

double Quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw InputError("quantile of empty sample");
  std::sort(values.begin(), values.end());
  const double h = (values.size() - 1) * std::clamp(prob, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - lo) * (values[hi] - values[lo]);
}

std::optional<double> SplitRhat(const std::vector<Eigen::VectorXd>& chains) {
  if (chains.size() < 2 || chains[0].size() < 4) return std::nullopt;
  const auto split = SplitChains(chains);
  const auto bulk = ClassicRhat(RankNormalize(split));
  std::vector<double> pooled;
  for (const auto& c : split) pooled.insert(pooled.end(), c.data(), c.data() + c.size());
  const double median = Quantile(pooled, 0.5);
  std::vector<Eigen::VectorXd> folded;
  for (const auto& c : split) folded.push_back((c.array() - median).abs().matrix());
  const auto tail = ClassicRhat(RankNormalize(folded));
  if (!bulk || !tail) return std::nullopt;
  return std::max(*bulk, *tail);
}

std::optional<double> EffectiveSampleSize(const std::vector<Eigen::VectorXd>& chains) {
  if (chains.empty() || chains[0].size() < 4) return std::nullopt;
  const auto z = RankNormalize(chains.size() >= 2 ? SplitChains(chains) : chains);
  const int m = static_cast<int>(z.size());
  const int n = static_cast<int>(z[0].size());
  std::vector<double> means(m), variances(m);
  std::vector<Eigen::VectorXd> centered(m);
  for (int c = 0; c < m; ++c) {
    means[c] = z[c].mean();
    centered[c] = z[c].array() - means[c];
    variances[c] = centered[c].squaredNorm() / (n - 1.0);
  }
  const double within = std::accumulate(variances.begin(), variances.end(), 0.0) / m;
  double between = 0.0;
  if (m > 1) {
    const double grand = std::accumulate(means.begin(), means.end(), 0.0) / m;
    for (double mu : means) between += (mu - grand) * (mu - grand);
    between *= n / (m - 1.0);
  }
  const double var_plus = (n - 1.0) / n * within + between / n;
  if (!(var_plus > 0.0)) return std::nullopt;

  auto rho = [&](int lag) {
    double acov = 0.0;
    for (int c = 0; c < m; ++c) {
      double s = 0.0;
      for (int t = 0; t + lag < n; ++t) s += centered[c](t) * centered[c](t + lag);
      acov += s / n;
    }
    acov /= m;
    return 1.0 - (within - acov) / var_plus;
  };
  // Geyer: sum adjacent pairs while positive, enforcing monotone decrease.
  double tau = -1.0;
  double previous = std::numeric_limits<double>::infinity();
  for (int t = 0; t + 1 < n; t += 2) {
    double pair = rho(t) + rho(t + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, previous);
    previous = pair;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1.0 / std::log10(static_cast<double>(m) * n));
  return static_cast<double>(m) * n / tau;
}

std::vector<ParameterSummary> SummarizeDraws(const std::vector<Eigen::MatrixXd>& chains,
                                             const std::vector<std::string>& names) {
  if (chains.empty() || chains[0].rows() == 0) throw InputError("no draws to summarize");
  const Eigen::Index cols = chains[0].cols();
  for (const auto& c : chains) {
    if (c.cols() != cols || c.rows() != chains[0].rows()) {
      throw InputError("chains differ in shape");
    }
  }
  std::vector<ParameterSummary> out;
  for (Eigen::Index j = 0; j < cols; ++j) {
    ParameterSummary s;
    s.name = j < static_cast<Eigen::Index>(names.size()) ? names[j]
                                                         : "p" + std::to_string(j);
    std::vector<double> pooled;
    for (const auto& c : chains) {
      for (Eigen::Index i = 0; i < c.rows(); ++i) pooled.push_back(c(i, j));
    }
    const double n = static_cast<double>(pooled.size());
    s.mean = std::accumulate(pooled.begin(), pooled.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : pooled) ss += (v - s.mean) * (v - s.mean);
    s.sd = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    s.q025 = Quantile(pooled, 0.025);
    s.q50 = Quantile(pooled, 0.5);
    s.q975 = Quantile(pooled, 0.975);
    if (s.sd > 0.0) {
      const auto cols_j = ColumnChains(chains, static_cast<int>(j));
      s.rhat = SplitRhat(cols_j);
      s.ess = EffectiveSampleSize(cols_j);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ParameterSummary> PosteriorSummary(const PosteriorSamples& samples) {
  return SummarizeDraws(samples.chains, samples.names);
}

double TvToNormal(const Eigen::VectorXd& draws, double mean, double sd) {
  if (draws.size() < 2) throw InputError("need at least two draws");
  if (!(sd > 0.0)) throw ParameterError("reference sd must be positive");
  const double h = Silverman(draws);
  const double lo = std::min(draws.minCoeff() - 5.0 * h, mean - 8.0 * sd);
  const double hi = std::max(draws.maxCoeff() + 5.0 * h, mean + 8.0 * sd);
  const int grid = 4001;
  const double step = (hi - lo) / (grid - 1);
  std::vector<double> sorted(draws.data(), draws.data() + draws.size());
  std::sort(sorted.begin(), sorted.end());
  const double inv_nh = 1.0 / (sorted.size() * h);
  double total = 0.0;
  for (int g = 0; g < grid; ++g) {
    const double x = lo + g * step;
    // Only draws within 8 bandwidths contribute measurably.
    auto first = std::lower_bound(sorted.begin(), sorted.end(), x - 8.0 * h);
    auto last = std::upper_bound(sorted.begin(), sorted.end(), x + 8.0 * h);
    double kde = 0.0;
    for (auto it = first; it != last; ++it) {
      const double u = (x - *it) / h;
      kde += std::exp(-0.5 * u * u);
    }
    kde *= kInvSqrtTwoPi * inv_nh;
    const double u = (x - mean) / sd;
    const double ref = kInvSqrtTwoPi / sd * std::exp(-0.5 * u * u);
    const double w = (g == 0 || g == grid - 1) ? 0.5 : 1.0;
    total += w * std::abs(kde - ref);
  }
  return std::min(1.0, 0.5 * total * step);
}

BvmReport BvmDiagnostic(const PosteriorSamples& samples, const FitResult& fit) {
  const Eigen::MatrixXd pooled = samples.Pooled();
  if (pooled.rows() < 2) throw InputError("not enough posterior draws");
  const int k = fit.theta_hat.k();
  const int p = fit.theta_hat.covariate_count();
  const ParamLayout layout(k, p);
  if (pooled.cols() != layout.size()) throw InputError("posterior and fit disagree in shape");

  Eigen::MatrixXd scaled(pooled.rows(), pooled.cols());
  const double root_n = std::sqrt(static_cast<double>(fit.n));
  for (Eigen::Index r = 0; r < pooled.rows(); ++r) {
    const ModelParams draw = layout.Unflatten(pooled.row(r).transpose());
    scaled.row(r) = (root_n * (ToUnconstrained(draw) - fit.theta_unconstrained)).transpose();
  }

  BvmReport report;
  // Coordinates loading on a non-positive eigendirection of J have no
  // reference variance.
  Eigen::VectorXd reference_var = Eigen::VectorXd::Constant(layout.size(), -1.0);
  if (fit.info_matrix.rows() == layout.size()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fit.info_matrix);
    const Eigen::VectorXd& values = eig.eigenvalues();
    const Eigen::MatrixXd& vectors = eig.eigenvectors();
    const double floor = 1e-10 * std::max(1.0, values.cwiseAbs().maxCoeff());
    for (int j = 0; j < layout.size(); ++j) {
      double var = 0.0;
      bool affected = false;
      for (int e = 0; e < layout.size(); ++e) {
        const double load = vectors(j, e) * vectors(j, e);
        if (values(e) <= floor) {
          affected = affected || load > 1e-12;
        } else {
          var += load / values(e);
        }
      }
      if (!affected) reference_var(j) = var;
    }
  }
  const auto names = layout.Names();
  for (int j = 0; j < layout.size(); ++j) {
    BvmCoordinate c;
    c.name = names[j];
    if (reference_var(j) > 0.0 && std::isfinite(reference_var(j))) {
      const double sd = std::sqrt(reference_var(j));
      const Eigen::VectorXd col = scaled.col(j);
      const double mean = col.mean();
      const double post_sd =
          std::sqrt((col.array() - mean).square().sum() / (col.size() - 1.0));
      c.available = true;
      c.tv = TvToNormal(col, 0.0, sd);
      c.mean_discrepancy = mean / sd;
      c.sd_ratio = post_sd / sd;
      report.max_tv = std::max(report.max_tv, c.tv);
    } else {
      ++report.unavailable;
    }
    report.coordinates.push_back(std::move(c));
  }
  return report;
}

std::vector<ReplicateFit> FitReplicates(const SimulationDesign& design, int replicates,
                                        std::uint64_t seed,
                                        const OptimizerConfig& optimizer,
                                        bool start_at_truth) {
  if (replicates < 1) throw InputError("replicates must be >= 1");
  std::vector<ReplicateFit> out(replicates);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < replicates; ++r) {
    ReplicateFit& rep = out[r];
    rep.seed = DeriveSeed(seed, r, Stream::kReplicate);
    try {
      rep.sim = SimulateReplicate(design, rep.seed);
      InitPolicy init;
      init.pi_hint = BlockDensities(rep.sim.observed, rep.sim.true_labels);
      if (start_at_truth) init.start_at = design.truth;
      OptimizerConfig local = optimizer;
      local.seed = DeriveSeed(rep.seed, 0, Stream::kMle);
      rep.fit = FitMle(rep.sim.data, design.k, init, local);
    } catch (const Error& e) {
      rep.failure = e.what();
    }
  }
  return out;
}

std::vector<CoverageRow> CoverageFromFits(const std::vector<ReplicateFit>& fits,
                                          const ModelParams& truth, double se_scale,
                                          double z_critical) {
  const ParamLayout layout(truth.k(), truth.covariate_count());
  const Eigen::VectorXd target = ToUnconstrained(truth);
  const auto names = layout.Names();
  std::vector<CoverageRow> rows(layout.size());
  for (int j = 0; j < layout.size(); ++j) rows[j].name = names[j];
  for (const ReplicateFit& rep : fits) {
    if (!rep.fit || !rep.fit->std_errors) continue;
    const Eigen::VectorXd& est = rep.fit->theta_unconstrained;
    const Eigen::VectorXd& se = *rep.fit->std_errors;
    for (int j = 0; j < layout.size(); ++j) {
      if (!std::isfinite(se(j))) continue;
      ++rows[j].usable;
      if (std::abs(est(j) - target(j)) <= z_critical * se_scale * se(j)) ++rows[j].covered;
    }
  }
  return rows;
}

std::vector<CoverageRow> CoverageStudy(const CoverageConfig& config) {
  const auto fits =
      FitReplicates(config.design, config.replicates, config.seed, config.optimizer,
                    config.start_at_truth);
  return CoverageFromFits(fits, config.design.truth, config.se_scale, config.z_critical);
}

}  // namespace cinet
