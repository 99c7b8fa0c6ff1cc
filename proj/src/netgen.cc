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

#include "cinet/netgen.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>

#include "cinet/csv.h"
#include "cinet/error.h"
#include "cinet/random.h"

namespace cinet {

namespace {

constexpr int kMaxLabelRedraws = 1000;

void CheckLabelsMatch(const CommunityLabels& labels,
                      const Eigen::MatrixXd& probs) {
  if (labels.k() != probs.rows()) {
    throw InputError("labels have K=" + std::to_string(labels.k()) +
                     " but block matrix is " + std::to_string(probs.rows()) +
                     "x" + std::to_string(probs.cols()));
  }
}

AdjacencyMatrix SampleBlockModel(const CommunityLabels& labels,
                                 const Eigen::MatrixXd& probs,
                                 std::uint64_t seed) {
  const int n = labels.size();
  AdjacencyMatrix adjacency(n);
  Rng rng = MakeRng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      if (unif(rng) < probs(labels[j], labels[i])) adjacency.Set(j, i, true);
    }
  }
  return adjacency;
}

}  // namespace

CommunityLabels SampleLabels(int n, std::span<const double> label_weights,
                             std::uint64_t seed) {
  if (n < 2) throw InputError("node count must be >= 2");
  const int k = static_cast<int>(label_weights.size());
  if (k < 1) throw InputError("empty label weights");
  double total = 0.0;
  for (double w : label_weights) {
    if (!(w >= 0.0)) throw ParameterError("negative label weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ParameterError("label weights must sum to 1");
  }
  if (k > n) throw InputError("more communities than nodes");
  Rng rng = MakeRng(seed);
  std::discrete_distribution<int> draw(label_weights.begin(),
                                       label_weights.end());
  for (int attempt = 0; attempt < kMaxLabelRedraws; ++attempt) {
    std::vector<int> labels(n);
    for (int& l : labels) l = draw(rng);
    CommunityLabels out(std::move(labels), k);
    if (!out.HasEmptyCommunity()) return out;
  }
  throw InputError("could not draw labels without an empty community");
}

SbmDraw SampleSbm(const CommunityLabels& labels, const Eigen::MatrixXd& probs,
                  std::uint64_t seed) {
  if (labels.size() < 2) throw InputError("node count must be >= 2");
  ValidateBlockProbabilities(probs);
  CheckLabelsMatch(labels, probs);
  return {SampleBlockModel(labels, probs, seed), labels};
}

SbmDraw SampleSbm(int n, std::span<const double> label_weights,
                  const Eigen::MatrixXd& probs, std::uint64_t seed) {
  ValidateBlockProbabilities(probs);
  CommunityLabels labels =
      SampleLabels(n, label_weights, DeriveSeed(seed, 0, Stream::kLabels));
  CheckLabelsMatch(labels, probs);
  return {SampleBlockModel(labels, probs, seed), std::move(labels)};
}

AdjacencyMatrix SampleInterferenceNetwork(const CommunityLabels& labels,
                                          const Eigen::MatrixXd& pi,
                                          std::uint64_t seed) {
  ValidateBlockProbabilities(pi);
  CheckLabelsMatch(labels, pi);
  return SampleBlockModel(labels, pi, seed);
}

// ---------------------------------------------------------------------------
// Community detection.

namespace {

struct KMeansResult {
  std::vector<int> assignment;
  double inertia = std::numeric_limits<double>::infinity();
};

double SquaredDistance(const Eigen::MatrixXd& points, int row,
                       const Eigen::RowVectorXd& center) {
  return (points.row(row) - center).squaredNorm();
}

KMeansResult Lloyd(const Eigen::MatrixXd& points, Eigen::MatrixXd centers,
                   int max_iterations) {
  const int n = static_cast<int>(points.rows());
  const int k = static_cast<int>(centers.rows());
  KMeansResult result;
  result.assignment.assign(n, -1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = SquaredDistance(points, i, centers.row(0));
      for (int c = 1; c < k; ++c) {
        const double d = SquaredDistance(points, i, centers.row(c));
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (result.assignment[i] != best) {
        result.assignment[i] = best;
        changed = true;
      }
    }
    // Refill empty clusters with the point farthest from its center.
    std::vector<int> counts(k, 0);
    for (int a : result.assignment) ++counts[a];
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      int far = -1;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        if (counts[result.assignment[i]] <= 1) continue;
        const double d =
            SquaredDistance(points, i, centers.row(result.assignment[i]));
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) break;
      --counts[result.assignment[far]];
      result.assignment[far] = c;
      counts[c] = 1;
      changed = true;
    }
    centers.setZero();
    for (int i = 0; i < n; ++i) centers.row(result.assignment[i]) += points.row(i);
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) centers.row(c) /= counts[c];
    }
    if (!changed && iter > 0) break;
  }
  result.inertia = 0.0;
  for (int i = 0; i < n; ++i) {
    result.inertia += SquaredDistance(points, i, centers.row(result.assignment[i]));
  }
  return result;
}

// Farthest-first traversal. Depends only on the point geometry, so the result
// is invariant to node reordering (up to exact ties).
Eigen::MatrixXd FarthestFirstCenters(const Eigen::MatrixXd& points, int k) {
  const int n = static_cast<int>(points.rows());
  Eigen::RowVectorXd mean = points.colwise().mean();
  Eigen::MatrixXd centers(k, points.cols());
  int first = 0;
  double first_d = -1.0;
  for (int i = 0; i < n; ++i) {
    const double d = SquaredDistance(points, i, mean);
    if (d > first_d) {
      first_d = d;
      first = i;
    }
  }
  centers.row(0) = points.row(first);
  std::vector<double> min_d(n);
  for (int i = 0; i < n; ++i) min_d[i] = SquaredDistance(points, i, centers.row(0));
  for (int c = 1; c < k; ++c) {
    const int next = static_cast<int>(
        std::max_element(min_d.begin(), min_d.end()) - min_d.begin());
    centers.row(c) = points.row(next);
    for (int i = 0; i < n; ++i) {
      min_d[i] = std::min(min_d[i], SquaredDistance(points, i, centers.row(c)));
    }
  }
  return centers;
}

Eigen::MatrixXd KMeansPlusPlusCenters(const Eigen::MatrixXd& points, int k,
                                      Rng& rng) {
  const int n = static_cast<int>(points.rows());
  Eigen::MatrixXd centers(k, points.cols());
  std::uniform_int_distribution<int> pick(0, n - 1);
  centers.row(0) = points.row(pick(rng));
  std::vector<double> min_d(n);
  for (int i = 0; i < n; ++i) min_d[i] = SquaredDistance(points, i, centers.row(0));
  for (int c = 1; c < k; ++c) {
    const double total = std::accumulate(min_d.begin(), min_d.end(), 0.0);
    int next = pick(rng);
    if (total > 0.0) {
      std::discrete_distribution<int> weighted(min_d.begin(), min_d.end());
      next = weighted(rng);
    }
    centers.row(c) = points.row(next);
    for (int i = 0; i < n; ++i) {
      min_d[i] = std::min(min_d[i], SquaredDistance(points, i, centers.row(c)));
    }
  }
  return centers;
}

Eigen::MatrixXd SpectralEmbedding(const AdjacencyMatrix& adjacency, int k) {
  const int n = adjacency.size();
  Eigen::MatrixXd sym = adjacency.ToDense();
  sym += sym.transpose().eval();
  Eigen::VectorXd degree = sym.rowwise().sum();
  double tau = degree.mean();
  if (tau <= 0.0) tau = 1.0;
  Eigen::VectorXd scale = (degree.array() + tau).rsqrt();
  Eigen::MatrixXd laplacian = scale.asDiagonal() * sym * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
  const Eigen::VectorXd& values = solver.eigenvalues();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(values(a)) > std::abs(values(b));
  });
  Eigen::MatrixXd embedding(n, k);
  for (int c = 0; c < k; ++c) embedding.col(c) = solver.eigenvectors().col(order[c]);
  for (int i = 0; i < n; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0) embedding.row(i) /= norm;
  }
  return embedding;
}

double BernoulliBlockTerm(double edges, double pairs) {
  if (pairs <= 0.0 || edges <= 0.0 || edges >= pairs) return 0.0;
  const double p = edges / pairs;
  return edges * std::log(p) + (pairs - edges) * std::log1p(-p);
}

double ProfileFromCounts(const Eigen::MatrixXd& edges,
                         const std::vector<int>& sizes) {
  const int k = static_cast<int>(sizes.size());
  double ll = 0.0;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const double pairs = a == b ? double(sizes[a]) * (sizes[a] - 1)
                                  : double(sizes[a]) * sizes[b];
      ll += BernoulliBlockTerm(edges(a, b), pairs);
    }
  }
  return ll;
}

// Best-improvement single-node moves on the SBM profile log-likelihood.
std::vector<int> RefineLabels(const AdjacencyMatrix& adjacency,
                              std::vector<int> labels, int k, int max_moves) {
  const int n = adjacency.size();
  Eigen::MatrixXd out_counts = Eigen::MatrixXd::Zero(n, k);
  Eigen::MatrixXd in_counts = Eigen::MatrixXd::Zero(n, k);
  Eigen::MatrixXd edges = Eigen::MatrixXd::Zero(k, k);
  std::vector<int> sizes(k, 0);
  for (int v = 0; v < n; ++v) ++sizes[labels[v]];
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (!adjacency(j, i)) continue;
      out_counts(j, labels[i]) += 1;
      in_counts(i, labels[j]) += 1;
      edges(labels[j], labels[i]) += 1;
    }
  }
  double current = ProfileFromCounts(edges, sizes);
  for (int move = 0; move < max_moves; ++move) {
    double best_gain = 1e-9;
    int best_v = -1;
    int best_b = -1;
    for (int v = 0; v < n; ++v) {
      const int a = labels[v];
      if (sizes[a] <= 1) continue;
      for (int b = 0; b < k; ++b) {
        if (b == a) continue;
        Eigen::MatrixXd trial = edges;
        for (int c = 0; c < k; ++c) {
          trial(a, c) -= out_counts(v, c);
          trial(c, a) -= in_counts(v, c);
        }
        for (int c = 0; c < k; ++c) {
          trial(b, c) += out_counts(v, c);
          trial(c, b) += in_counts(v, c);
        }
        std::vector<int> trial_sizes = sizes;
        --trial_sizes[a];
        ++trial_sizes[b];
        const double gain = ProfileFromCounts(trial, trial_sizes) - current;
        if (gain > best_gain) {
          best_gain = gain;
          best_v = v;
          best_b = b;
        }
      }
    }
    if (best_v < 0) break;
    const int a = labels[best_v];
    for (int c = 0; c < k; ++c) {
      edges(a, c) -= out_counts(best_v, c);
      edges(c, a) -= in_counts(best_v, c);
    }
    for (int c = 0; c < k; ++c) {
      edges(best_b, c) += out_counts(best_v, c);
      edges(c, best_b) += in_counts(best_v, c);
    }
    --sizes[a];
    ++sizes[best_b];
    labels[best_v] = best_b;
    for (int u = 0; u < n; ++u) {
      if (adjacency(best_v, u)) {
        in_counts(u, a) -= 1;
        in_counts(u, best_b) += 1;
      }
      if (adjacency(u, best_v)) {
        out_counts(u, a) -= 1;
        out_counts(u, best_b) += 1;
      }
    }
    current += best_gain;
  }
  return labels;
}

}  // namespace

CommunityLabels DetectCommunities(const AdjacencyMatrix& adjacency, int k,
                                  const DetectionConfig& config) {
  const int n = adjacency.size();
  if (k < 1) throw InputError("community count must be >= 1");
  if (k > n) {
    throw InputError("K=" + std::to_string(k) + " exceeds node count " +
                     std::to_string(n));
  }
  if (k == 1) return CommunityLabels(std::vector<int>(n, 0), 1);

  const Eigen::MatrixXd embedding = SpectralEmbedding(adjacency, k);
  KMeansResult best =
      Lloyd(embedding, FarthestFirstCenters(embedding, k),
            config.kmeans_max_iterations);
  Rng rng = MakeRng(config.seed);
  for (int r = 0; r < config.kmeans_restarts; ++r) {
    KMeansResult trial = Lloyd(embedding, KMeansPlusPlusCenters(embedding, k, rng),
                               config.kmeans_max_iterations);
    if (trial.inertia < best.inertia * (1.0 - 1e-9)) best = std::move(trial);
  }

  std::vector<int> labels = std::move(best.assignment);
  if (config.refine) {
    const int max_moves =
        config.max_refinement_moves > 0 ? config.max_refinement_moves : 10 * n;
    labels = RefineLabels(adjacency, std::move(labels), k, max_moves);
  }
  return CommunityLabels(std::move(labels), k);
}

double SbmProfileLogLikelihood(const AdjacencyMatrix& adjacency,
                               const CommunityLabels& labels) {
  const int k = labels.k();
  Eigen::MatrixXd edges = Eigen::MatrixXd::Zero(k, k);
  const int n = adjacency.size();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (adjacency(j, i)) edges(labels[j], labels[i]) += 1;
    }
  }
  return ProfileFromCounts(edges, labels.CommunitySizes());
}

Eigen::MatrixXd BlockDensities(const AdjacencyMatrix& adjacency,
                               const CommunityLabels& labels) {
  if (adjacency.size() != labels.size()) {
    throw InputError("adjacency and labels differ in size");
  }
  const int k = labels.k();
  Eigen::MatrixXd edges = Eigen::MatrixXd::Zero(k, k);
  const int n = adjacency.size();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (adjacency(j, i)) edges(labels[j], labels[i]) += 1;
    }
  }
  auto sizes = labels.CommunitySizes();
  Eigen::MatrixXd density = Eigen::MatrixXd::Zero(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const double pairs = a == b ? double(sizes[a]) * (sizes[a] - 1)
                                  : double(sizes[a]) * sizes[b];
      if (pairs > 0) density(a, b) = edges(a, b) / pairs;
    }
  }
  return density;
}

// ---------------------------------------------------------------------------
// Label alignment.

std::vector<int> MaxWeightAssignment(const Eigen::MatrixXd& weights) {
  // Hungarian algorithm (potentials form) on cost = max - weight.
  const int n = static_cast<int>(weights.rows());
  if (weights.cols() != n) throw InputError("assignment matrix must be square");
  const double top = n > 0 ? weights.maxCoeff() : 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_v(n + 1);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int row = 1; row <= n; ++row) {
    match[0] = row;
    int col0 = 0;
    std::fill(min_v.begin(), min_v.end(), inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const int row0 = match[col0];
      double delta = inf;
      int col1 = 0;
      for (int col = 1; col <= n; ++col) {
        if (used[col]) continue;
        const double cost = (top - weights(row0 - 1, col - 1)) - u[row0] - v[col];
        if (cost < min_v[col]) {
          min_v[col] = cost;
          way[col] = col0;
        }
        if (min_v[col] < delta) {
          delta = min_v[col];
          col1 = col;
        }
      }
      for (int col = 0; col <= n; ++col) {
        if (used[col]) {
          u[match[col]] += delta;
          v[col] -= delta;
        } else {
          min_v[col] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const int col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int col = 1; col <= n; ++col) assignment[match[col] - 1] = col - 1;
  return assignment;
}

LabelAlignment AlignLabels(const CommunityLabels& estimated,
                           const CommunityLabels& truth) {
  if (estimated.size() != truth.size()) {
    throw InputError("label vectors differ in length (" +
                     std::to_string(estimated.size()) + " vs " +
                     std::to_string(truth.size()) + ")");
  }
  if (estimated.k() != truth.k()) throw InputError("label vectors differ in K");
  const int k = truth.k();
  Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < truth.size(); ++i) confusion(estimated[i], truth[i]) += 1;
  LabelAlignment out;
  out.permutation = MaxWeightAssignment(confusion);
  double agree = 0.0;
  for (int a = 0; a < k; ++a) agree += confusion(a, out.permutation[a]);
  out.agreement = truth.size() > 0 ? agree / truth.size() : 1.0;
  return out;
}

double AdjustedRandIndex(const CommunityLabels& a, const CommunityLabels& b) {
  if (a.size() != b.size()) throw InputError("label vectors differ in length");
  const int n = a.size();
  std::map<std::pair<int, int>, double> table;
  std::vector<double> rows(a.k(), 0.0), cols(b.k(), 0.0);
  for (int i = 0; i < n; ++i) {
    table[{a[i], b[i]}] += 1;
    rows[a[i]] += 1;
    cols[b[i]] += 1;
  }
  auto choose2 = [](double x) { return x * (x - 1) / 2.0; };
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [key, count] : table) index += choose2(count);
  for (double r : rows) sum_rows += choose2(r);
  for (double c : cols) sum_cols += choose2(c);
  const double expected = sum_rows * sum_cols / choose2(n);
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

// ---------------------------------------------------------------------------
// Edge-list ingestion.

IngestedNetwork IngestEdgeList(const std::filesystem::path& path,
                               const EdgeListOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list " + path.string());
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  bool has_weight = false;
  struct Row {
    std::string source, target;
    double weight;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    auto fields = SplitCsvLine(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() < 2 || Trim(fields[0]) != "source" ||
          Trim(fields[1]) != "target" ||
          (fields.size() == 3 && Trim(fields[2]) != "weight") ||
          fields.size() > 3) {
        throw ParseError("expected header source,target[,weight]", line_no);
      }
      has_weight = fields.size() == 3;
      continue;
    }
    if (fields.size() != (has_weight ? 3u : 2u)) {
      throw ParseError("expected " + std::to_string(has_weight ? 3 : 2) +
                           " fields, got " + std::to_string(fields.size()),
                       line_no);
    }
    Row row{std::string(Trim(fields[0])), std::string(Trim(fields[1])), 1.0};
    if (row.source.empty() || row.target.empty()) {
      throw ParseError("empty node id", line_no);
    }
    if (has_weight) {
      auto weight = ParseDouble(Trim(fields[2]));
      if (!weight) throw ParseError("unparseable weight '" + fields[2] + "'", line_no);
      row.weight = *weight;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("edge list " + path.string() + " is empty");

  IngestedNetwork out;
  std::unordered_map<std::string, int> index;
  auto add_node = [&](const std::string& id) {
    if (index.emplace(id, static_cast<int>(out.node_ids.size())).second) {
      out.node_ids.push_back(id);
    }
  };
  for (const Row& row : rows) {
    add_node(row.source);
    add_node(row.target);
  }
  if (options.node_order == NodeOrder::kSorted) {
    std::sort(out.node_ids.begin(), out.node_ids.end());
    for (std::size_t i = 0; i < out.node_ids.size(); ++i) {
      index[out.node_ids[i]] = static_cast<int>(i);
    }
  }
  out.adjacency = AdjacencyMatrix(static_cast<int>(out.node_ids.size()));
  for (const Row& row : rows) {
    if (!(row.weight > 0.0)) continue;
    const int s = index[row.source];
    const int t = index[row.target];
    if (s == t) {
      ++out.self_loops_dropped;
      continue;
    }
    const bool present =
        out.adjacency(s, t) && (options.directed || out.adjacency(t, s));
    if (present) {
      ++out.duplicates_merged;
      continue;
    }
    out.adjacency.Set(s, t, true);
    if (!options.directed) out.adjacency.Set(t, s, true);
  }
  return out;
}

}  // namespace cinet
