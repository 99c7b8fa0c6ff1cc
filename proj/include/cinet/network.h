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

// Core network types shared by every module.
//
// Orientation convention: entry (from, to) of an AdjacencyMatrix is the
// directed edge from sender `from` to receiver `to`. Block matrices follow the
// same order: probs(k, kp) governs edges from a node in community k to a node
// in community kp. Community labels are 0-based in memory and 1-based in every
// file format.

#ifndef CINET_NETWORK_H_
#define CINET_NETWORK_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cinet {

class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(int n);

  int size() const { return n_; }

  bool operator()(int from, int to) const {
    return entries_[static_cast<std::size_t>(from) * n_ + to] != 0;
  }
  // Self-loops are rejected.
  void Set(int from, int to, bool edge);

  // Out-edges of `from`, one byte per receiver.
  std::span<const std::uint8_t> Row(int from) const {
    return {entries_.data() + static_cast<std::size_t>(from) * n_,
            static_cast<std::size_t>(n_)};
  }

  int InDegree(int to) const;
  int OutDegree(int from) const;
  std::int64_t EdgeCount() const;

  Eigen::MatrixXd ToDense() const;
  bool operator==(const AdjacencyMatrix&) const = default;

 private:
  int n_ = 0;
  std::vector<std::uint8_t> entries_;
};

class CommunityLabels {
 public:
  CommunityLabels() = default;
  // Labels in {0..k-1}. Throws InputError otherwise.
  CommunityLabels(std::vector<int> labels, int k);

  static CommunityLabels FromOneBased(const std::vector<int>& labels, int k);

  int size() const { return static_cast<int>(labels_.size()); }
  int k() const { return k_; }
  int operator[](int i) const { return labels_[i]; }
  const std::vector<int>& values() const { return labels_; }

  std::vector<int> CommunitySizes() const;
  bool HasEmptyCommunity() const;

  // Applies label -> mapping[label].
  CommunityLabels Relabeled(std::span<const int> mapping) const;

  bool operator==(const CommunityLabels&) const = default;

 private:
  std::vector<int> labels_;
  int k_ = 0;
};

// Throws ParameterError unless every entry lies in [0, 1] and the matrix is
// square.
void ValidateBlockProbabilities(const Eigen::MatrixXd& probs);

}  // namespace cinet

#endif  // CINET_NETWORK_H_
