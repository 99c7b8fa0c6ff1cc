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

#include "cinet/io.h"

#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "cinet/csv.h"
#include "cinet/error.h"

namespace cinet {

namespace {

std::string OptionalField(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : std::string();
}

std::string OptionalIndex(const std::optional<int>& v) {
  return v ? std::to_string(*v + 1) : std::string();
}

}  // namespace

std::string FormatParams(const ModelParams& params) {
  params.Validate();
  const ParamLayout layout(params.k(), params.covariate_count());
  const Eigen::VectorXd flat = layout.Flatten(params);
  const auto names = layout.Names();
  std::ostringstream out;
  out << "k = " << params.k() << "\n";
  out << "covariates = " << params.covariate_count() << "\n";
  for (int j = 0; j < layout.size(); ++j) {
    out << names[j] << " = " << FormatDouble(flat(j)) << "\n";
  }
  return out.str();
}

ModelParams ParseParams(const std::string& text) {
  std::map<std::string, std::string> values;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string_view body = Trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected name = value", number);
    const std::string key(Trim(body.substr(0, eq)));
    if (!values.emplace(key, std::string(Trim(body.substr(eq + 1)))).second) {
      throw ParseError("duplicate key " + key, number);
    }
  }
  auto integer = [&](const std::string& key) {
    const auto it = values.find(key);
    if (it == values.end()) throw InputError("missing key " + key);
    const auto v = ParseInt(it->second);
    if (!v) throw InputError("bad integer for " + key);
    return static_cast<int>(*v);
  };
  const int k = integer("k");
  const int p = integer("covariates");
  if (k < 1 || p < 0) throw InputError("bad dimensions in parameter file");
  const ParamLayout layout(k, p);
  const auto names = layout.Names();
  Eigen::VectorXd flat(layout.size());
  for (int j = 0; j < layout.size(); ++j) {
    const auto it = values.find(names[j]);
    if (it == values.end()) throw InputError("missing key " + names[j]);
    const auto v = ParseDouble(it->second);
    if (!v) throw InputError("bad number for " + names[j]);
    flat(j) = *v;
  }
  if (static_cast<int>(values.size()) != layout.size() + 2) {
    throw InputError("unexpected keys in parameter file");
  }
  ModelParams params = layout.Unflatten(flat);
  params.Validate();
  return params;
}

std::string FormatFitResult(const FitResult& fit) {
  const ParamLayout layout(fit.theta_hat.k(), fit.theta_hat.covariate_count());
  const Eigen::VectorXd flat = layout.Flatten(fit.theta_hat);
  const auto natural_se = fit.NaturalStdErrors();
  std::ostringstream out;
  out << "n = " << fit.n << "\n";
  out << "k = " << fit.theta_hat.k() << "\n";
  out << "covariates = " << fit.theta_hat.covariate_count() << "\n";
  out << "loglik = " << FormatDouble(fit.loglik) << "\n";
  out << "converged = " << (fit.converged ? "true" : "false") << "\n";
  out << "gradient_norm = " << FormatDouble(fit.gradient_norm) << "\n";
  out << "info_positive_definite = " << (fit.info_positive_definite ? "true" : "false")
      << "\n";
  out << "best_start = " << fit.best_start + 1 << "\n";
  out << "starts = " << fit.starts.size() << "\n";
  out << "multimodal_warning = " << (fit.multimodal_warning ? "true" : "false") << "\n";
  out << "optimum_spread = " << FormatDouble(fit.optimum_spread) << "\n";
  for (int j = 0; j < layout.size(); ++j) {
    out << fit.names[j] << " = " << FormatDouble(flat(j)) << "\n";
  }
  for (int j = 0; j < layout.size(); ++j) {
    out << "se." << fit.names[j] << " = "
        << (natural_se ? FormatDouble((*natural_se)(j)) : std::string("NA")) << "\n";
  }
  return out.str();
}

std::string FormatNamedMatrixCsv(const std::vector<std::string>& names,
                                 const Eigen::MatrixXd& matrix) {
  std::ostringstream out;
  out << "name";
  for (const auto& n : names) out << "," << CsvField(n);
  out << "\n";
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    out << CsvField(names[r]);
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) out << "," << FormatDouble(matrix(r, c));
    out << "\n";
  }
  return out.str();
}

std::string FormatDrawsCsv(const PosteriorSamples& samples) {
  std::ostringstream out;
  out << "chain,draw";
  for (const auto& n : samples.names) out << "," << n;
  out << "\n";
  for (std::size_t c = 0; c < samples.chains.size(); ++c) {
    const Eigen::MatrixXd& draws = samples.chains[c];
    for (Eigen::Index r = 0; r < draws.rows(); ++r) {
      out << c + 1 << "," << r + 1;
      for (Eigen::Index j = 0; j < draws.cols(); ++j) out << "," << FormatDouble(draws(r, j));
      out << "\n";
    }
  }
  return out.str();
}

std::string FormatSummaryCsv(const std::vector<ParameterSummary>& summary) {
  std::ostringstream out;
  out << "parameter,mean,sd,q025,q50,q975,rhat,ess\n";
  for (const auto& s : summary) {
    out << s.name << "," << FormatDouble(s.mean) << "," << FormatDouble(s.sd) << ","
        << FormatDouble(s.q025) << "," << FormatDouble(s.q50) << "," << FormatDouble(s.q975)
        << "," << OptionalField(s.rhat) << "," << OptionalField(s.ess) << "\n";
  }
  return out.str();
}

std::string FormatEffectsCsv(const std::vector<EffectEstimate>& effects) {
  std::ostringstream out;
  out << "estimand,sender,receiver,value,lo,hi,method\n";
  for (const auto& e : effects) {
    out << e.estimand << "," << OptionalIndex(e.sender) << "," << OptionalIndex(e.receiver)
        << "," << FormatDouble(e.value) << "," << OptionalField(e.lo) << ","
        << OptionalField(e.hi) << "," << e.method << "\n";
  }
  return out.str();
}

std::string FormatLabelsCsv(const std::vector<std::string>& node_ids,
                            const CommunityLabels& labels) {
  if (static_cast<int>(node_ids.size()) != labels.size()) {
    throw InputError("node ids and labels differ in length");
  }
  std::ostringstream out;
  out << "node_id,label\n";
  for (int i = 0; i < labels.size(); ++i) {
    out << CsvField(node_ids[i]) << "," << labels[i] + 1 << "\n";
  }
  return out.str();
}

std::string FormatAdjacency(const AdjacencyMatrix& a, int dense_limit) {
  std::ostringstream out;
  const int n = a.size();
  if (n <= dense_limit) {
    for (int i = 0; i < n; ++i) {
      const auto row = a.Row(i);
      for (int j = 0; j < n; ++j) out << (j ? "," : "") << int(row[j]);
      out << "\n";
    }
    return out.str();
  }
  out << "from,to\n";
  for (int i = 0; i < n; ++i) {
    const auto row = a.Row(i);
    for (int j = 0; j < n; ++j) {
      if (row[j]) out << i << "," << j << "\n";
    }
  }
  return out.str();
}

std::string FormatDatasetCsv(const std::vector<std::string>& node_ids,
                             const Dataset& data) {
  if (static_cast<int>(node_ids.size()) != data.size()) {
    throw InputError("node ids and data differ in length");
  }
  std::ostringstream out;
  out << "node_id,y,z";
  for (int j = 0; j < data.covariate_count(); ++j) out << ",x" << j + 1;
  out << "\n";
  for (int i = 0; i < data.size(); ++i) {
    out << CsvField(node_ids[i]) << "," << FormatDouble(data.y(i)) << "," << data.z[i];
    for (int j = 0; j < data.covariate_count(); ++j) out << "," << FormatDouble(data.x(i, j));
    out << "\n";
  }
  return out.str();
}

OutcomeTable ReadOutcomes(const std::filesystem::path& path) {
  const CsvTable table = ReadCsv(path);
  const int id_col = table.Column("node_id");
  const int y_col = table.Column("y");
  const int z_col = table.Column("z");
  if (id_col < 0 || y_col < 0 || z_col < 0) {
    throw ParseError("outcome header must contain node_id, y and z", 1);
  }
  std::vector<int> x_cols;
  for (int c = 0; c < static_cast<int>(table.header.size()); ++c) {
    if (c != id_col && c != y_col && c != z_col) x_cols.push_back(c);
  }
  OutcomeTable out;
  const int n = static_cast<int>(table.rows.size());
  if (n == 0) throw InputError("outcome file has no rows: " + path.string());
  out.y.resize(n);
  out.z.resize(n);
  out.x.resize(n, static_cast<Eigen::Index>(x_cols.size()));
  std::set<std::string> seen;
  for (int r = 0; r < n; ++r) {
    const auto& row = table.rows[r];
    const int line = table.lines[r];
    if (row.size() != table.header.size()) throw ParseError("wrong number of fields", line);
    out.node_ids.push_back(std::string(Trim(row[id_col])));
    if (!seen.insert(out.node_ids.back()).second) {
      throw ParseError("duplicate node_id " + out.node_ids.back(), line);
    }
    const auto y = ParseDouble(row[y_col]);
    const auto z = ParseInt(row[z_col]);
    if (!y) throw ParseError("bad outcome value", line);
    if (!z || (*z != 0 && *z != 1)) throw ParseError("treatment must be 0 or 1", line);
    out.y(r) = *y;
    out.z[r] = static_cast<int>(*z);
    for (std::size_t j = 0; j < x_cols.size(); ++j) {
      const auto v = ParseDouble(row[x_cols[j]]);
      if (!v) throw ParseError("bad covariate value", line);
      out.x(r, static_cast<Eigen::Index>(j)) = *v;
    }
  }
  return out;
}

Dataset JoinOutcomes(const std::vector<std::string>& network_ids,
                     const OutcomeTable& outcomes, const CommunityLabels& labels) {
  if (labels.size() != static_cast<int>(network_ids.size())) {
    throw InputError("labels and network differ in size");
  }
  std::unordered_map<std::string, int> row_of;
  for (int r = 0; r < static_cast<int>(outcomes.node_ids.size()); ++r) {
    row_of.emplace(outcomes.node_ids[r], r);
  }
  std::vector<std::string> orphans;
  std::set<std::string> network_set(network_ids.begin(), network_ids.end());
  for (const auto& id : network_ids) {
    if (!row_of.count(id)) orphans.push_back(id);
  }
  for (const auto& id : outcomes.node_ids) {
    if (!network_set.count(id)) orphans.push_back(id);
  }
  if (!orphans.empty()) {
    throw ReconciliationError("node ids do not match between network and outcomes",
                              orphans);
  }
  const int n = static_cast<int>(network_ids.size());
  Dataset data;
  data.y.resize(n);
  data.z.resize(n);
  data.x.resize(n, outcomes.x.cols());
  for (int i = 0; i < n; ++i) {
    const int r = row_of.at(network_ids[i]);
    data.y(i) = outcomes.y(r);
    data.z[i] = outcomes.z[r];
    if (outcomes.x.cols() > 0) data.x.row(i) = outcomes.x.row(r);
  }
  data.labels = labels;
  data.Validate();
  return data;
}

}  // namespace cinet
