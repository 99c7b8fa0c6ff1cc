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

// File formats. Communities are 1-based in every file.

#ifndef CINET_IO_H_
#define CINET_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "cinet/baselines.h"
#include "cinet/diagnostics.h"
#include "cinet/estimands.h"
#include "cinet/estimation.h"
#include "cinet/model.h"
#include "cinet/network.h"

namespace cinet {

// "name = value" lines: k, covariates, then every ParamLayout name.
std::string FormatParams(const ModelParams& params);
ModelParams ParseParams(const std::string& text);

// Key-value summary of a fit; covariance goes to its own CSV.
std::string FormatFitResult(const FitResult& fit);

// Square matrix with a header row of names and a leading name column.
std::string FormatNamedMatrixCsv(const std::vector<std::string>& names,
                                 const Eigen::MatrixXd& matrix);

// chain,draw,<parameter names...>; chain and draw are 1-based.
std::string FormatDrawsCsv(const PosteriorSamples& samples);

std::string FormatSummaryCsv(const std::vector<ParameterSummary>& summary);

// estimand,sender,receiver,value,lo,hi,method
std::string FormatEffectsCsv(const std::vector<EffectEstimate>& effects);

// node_id,label
std::string FormatLabelsCsv(const std::vector<std::string>& node_ids,
                            const CommunityLabels& labels);

// Dense 0/1 rows (from-major) up to `dense_limit` nodes; otherwise a
// `from,to` edge list with 0-based indices.
std::string FormatAdjacency(const AdjacencyMatrix& a, int dense_limit = 2000);

// node_id,y,z[,x1..xp]
std::string FormatDatasetCsv(const std::vector<std::string>& node_ids,
                             const Dataset& data);

struct OutcomeTable {
  std::vector<std::string> node_ids;
  Eigen::VectorXd y;
  std::vector<int> z;
  Eigen::MatrixXd x;
};

// Reads node_id,y,z and any further columns as covariates.
OutcomeTable ReadOutcomes(const std::filesystem::path& path);

// Orders outcomes to match the network's node ids. Ids present in only one
// source raise ReconciliationError listing them.
Dataset JoinOutcomes(const std::vector<std::string>& network_ids,
                     const OutcomeTable& outcomes, const CommunityLabels& labels);

}  // namespace cinet

#endif  // CINET_IO_H_
