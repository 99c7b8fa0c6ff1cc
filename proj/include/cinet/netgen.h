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

// Block-model network generation, community detection and edge-list ingestion.

#ifndef CINET_NETGEN_H_
#define CINET_NETGEN_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cinet/network.h"

namespace cinet {

struct SbmDraw {
  AdjacencyMatrix adjacency;
  CommunityLabels labels;
};

// Every off-diagonal entry (j, i) is an independent Bernoulli(probs(C_j, C_i))
// draw.
SbmDraw SampleSbm(const CommunityLabels& labels, const Eigen::MatrixXd& probs,
                  std::uint64_t seed);

// Labels drawn iid from `label_weights`. Draws that leave a community empty
// are rejected and redrawn.
SbmDraw SampleSbm(int n, std::span<const double> label_weights,
                  const Eigen::MatrixXd& probs, std::uint64_t seed);

CommunityLabels SampleLabels(int n, std::span<const double> label_weights,
                             std::uint64_t seed);

// `pi(k, kp)` is the probability of an interference edge from a sender in
// community k to a receiver in community kp.
AdjacencyMatrix SampleInterferenceNetwork(const CommunityLabels& labels,
                                          const Eigen::MatrixXd& pi,
                                          std::uint64_t seed);

// Adapter for matrices written receiver-first, i.e. m(k, kp) =
// P(edge j -> i | C_i = k, C_j = kp).
inline Eigen::MatrixXd ReceiverFirstToSenderFirst(const Eigen::MatrixXd& m) {
  return m.transpose();
}

struct DetectionConfig {
  int kmeans_restarts = 10;
  int kmeans_max_iterations = 100;
  // Upper bound on greedy label moves; <= 0 means 10 * n.
  int max_refinement_moves = 0;
  bool refine = true;
  std::uint64_t seed = 0;
};

// Regularized spectral clustering of A + A^T followed by greedy single-node
// moves that increase the directed SBM profile log-likelihood.
CommunityLabels DetectCommunities(const AdjacencyMatrix& adjacency, int k,
                                  const DetectionConfig& config = {});

// Profile log-likelihood of a directed Bernoulli SBM with block densities set
// to their maximum-likelihood values.
double SbmProfileLogLikelihood(const AdjacencyMatrix& adjacency,
                               const CommunityLabels& labels);

// Empirical density of each (sender block, receiver block) pair.
Eigen::MatrixXd BlockDensities(const AdjacencyMatrix& adjacency,
                               const CommunityLabels& labels);

struct LabelAlignment {
  // permutation[estimated label] = truth label.
  std::vector<int> permutation;
  double agreement = 0.0;
};

// Optimal assignment on the confusion matrix.
LabelAlignment AlignLabels(const CommunityLabels& estimated,
                           const CommunityLabels& truth);

double AdjustedRandIndex(const CommunityLabels& a, const CommunityLabels& b);

// Maximum-weight perfect matching on a square matrix; returns row -> column.
std::vector<int> MaxWeightAssignment(const Eigen::MatrixXd& weights);

enum class NodeOrder { kFirstAppearance, kSorted };

struct EdgeListOptions {
  bool directed = true;
  NodeOrder node_order = NodeOrder::kFirstAppearance;
};

struct IngestedNetwork {
  AdjacencyMatrix adjacency;
  std::vector<std::string> node_ids;
  int self_loops_dropped = 0;
  int duplicates_merged = 0;
};

// Reads `source,target[,weight]` rows. Positive weights become edges; rows
// with non-positive weight register their nodes but add no edge.
IngestedNetwork IngestEdgeList(const std::filesystem::path& path,
                               const EdgeListOptions& options = {});

}  // namespace cinet

#endif  // CINET_NETGEN_H_
