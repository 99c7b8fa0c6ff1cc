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

#include "cinet/network.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "cinet/error.h"

namespace cinet {

AdjacencyMatrix::AdjacencyMatrix(int n) : n_(n) {
  if (n < 0) throw InputError("negative node count");
  entries_.assign(static_cast<std::size_t>(n) * n, 0);
}

void AdjacencyMatrix::Set(int from, int to, bool edge) {
  if (from == to) {
    throw InputError("self-loop on node " + std::to_string(from));
  }
  entries_[static_cast<std::size_t>(from) * n_ + to] = edge ? 1 : 0;
}

int AdjacencyMatrix::InDegree(int to) const {
  int degree = 0;
  for (int from = 0; from < n_; ++from) degree += (*this)(from, to);
  return degree;
}

int AdjacencyMatrix::OutDegree(int from) const {
  auto row = Row(from);
  return std::accumulate(row.begin(), row.end(), 0);
}

std::int64_t AdjacencyMatrix::EdgeCount() const {
  return std::accumulate(entries_.begin(), entries_.end(), std::int64_t{0});
}

Eigen::MatrixXd AdjacencyMatrix::ToDense() const {
  Eigen::MatrixXd dense(n_, n_);
  for (int j = 0; j < n_; ++j) {
    for (int i = 0; i < n_; ++i) dense(j, i) = (*this)(j, i);
  }
  return dense;
}

CommunityLabels::CommunityLabels(std::vector<int> labels, int k)
    : labels_(std::move(labels)), k_(k) {
  if (k < 1) throw InputError("community count must be >= 1");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || labels_[i] >= k) {
      throw InputError("label of node " + std::to_string(i) +
                       " outside {1.." + std::to_string(k) + "}");
    }
  }
}

CommunityLabels CommunityLabels::FromOneBased(const std::vector<int>& labels,
                                              int k) {
  std::vector<int> zero_based(labels.size());
  std::transform(labels.begin(), labels.end(), zero_based.begin(),
                 [](int l) { return l - 1; });
  return CommunityLabels(std::move(zero_based), k);
}

std::vector<int> CommunityLabels::CommunitySizes() const {
  std::vector<int> sizes(k_, 0);
  for (int l : labels_) ++sizes[l];
  return sizes;
}

bool CommunityLabels::HasEmptyCommunity() const {
  auto sizes = CommunitySizes();
  return std::find(sizes.begin(), sizes.end(), 0) != sizes.end();
}

CommunityLabels CommunityLabels::Relabeled(std::span<const int> mapping) const {
  if (static_cast<int>(mapping.size()) != k_) {
    throw InputError("relabeling map has wrong length");
  }
  std::vector<int> out(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) out[i] = mapping[labels_[i]];
  return CommunityLabels(std::move(out), k_);
}

void ValidateBlockProbabilities(const Eigen::MatrixXd& probs) {
  if (probs.rows() != probs.cols() || probs.rows() == 0) {
    throw ParameterError("block probability matrix must be square and non-empty");
  }
  for (int a = 0; a < probs.rows(); ++a) {
    for (int b = 0; b < probs.cols(); ++b) {
      const double p = probs(a, b);
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ParameterError("block probability (" + std::to_string(a + 1) +
                             "," + std::to_string(b + 1) + ") = " +
                             std::to_string(p) + " outside [0,1]");
      }
    }
  }
}

}  // namespace cinet
