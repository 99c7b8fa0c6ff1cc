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

#include "cinet/config.h"

#include <set>

#include <yaml-cpp/yaml.h>

#include "cinet/csv.h"
#include "cinet/error.h"

namespace cinet {

namespace {

int LineOf(const YAML::Node& node) { return node.Mark().line + 1; }

void RejectUnknown(const YAML::Node& node, const std::set<std::string>& known,
                   const std::string& section) {
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!known.count(key)) {
      throw ParseError("unknown key '" + key + "' in " + section, LineOf(kv.first));
    }
  }
}

template <typename T>
void Read(const YAML::Node& parent, const char* key, T& out) {
  const YAML::Node node = parent[key];
  if (!node) return;
  try {
    out = node.as<T>();
  } catch (const YAML::Exception&) {
    throw ParseError(std::string("bad value for '") + key + "'", LineOf(node));
  }
}

template <typename T>
bool ReadTracked(const YAML::Node& parent, const char* key, T& out) {
  if (!parent[key]) return false;
  Read(parent, key, out);
  return true;
}

Eigen::MatrixXd ReadMatrix(const YAML::Node& node, const char* key) {
  if (!node.IsSequence() || node.size() == 0) {
    throw ParseError(std::string("'") + key + "' must be a nested list", LineOf(node));
  }
  const std::size_t rows = node.size();
  const std::size_t cols = node[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!node[r].IsSequence() || node[r].size() != cols) {
      throw ParseError(std::string("'") + key + "' rows must have equal length",
                       LineOf(node[r]));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      try {
        m(r, c) = node[r][c].as<double>();
      } catch (const YAML::Exception&) {
        throw ParseError(std::string("bad number in '") + key + "'", LineOf(node[r][c]));
      }
    }
  }
  return m;
}

void EmitMatrix(YAML::Emitter& out, const Eigen::MatrixXd& m) {
  out << YAML::BeginSeq;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out << YAML::Flow << YAML::BeginSeq;
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << FormatDouble(m(r, c));
    out << YAML::EndSeq;
  }
  out << YAML::EndSeq;
}

EstimationMethod ParseMethod(const std::string& s, int line) {
  if (s == "mle") return EstimationMethod::kMle;
  if (s == "gibbs") return EstimationMethod::kGibbs;
  if (s == "baselines") return EstimationMethod::kBaselines;
  if (s == "all") return EstimationMethod::kAll;
  throw ParseError("method must be mle, gibbs, baselines or all", line);
}

}  // namespace

std::string_view StudyModeName(StudyMode mode) {
  return mode == StudyMode::kSimulate ? "simulate" : "fit";
}

std::string_view EstimationMethodName(EstimationMethod method) {
  switch (method) {
    case EstimationMethod::kMle:
      return "mle";
    case EstimationMethod::kGibbs:
      return "gibbs";
    case EstimationMethod::kBaselines:
      return "baselines";
    case EstimationMethod::kAll:
      return "all";
  }
  return "all";
}

bool EstimationConfig::Runs(EstimationMethod method) const {
  for (EstimationMethod m : methods) {
    if (m == method || m == EstimationMethod::kAll) return true;
  }
  return false;
}

std::filesystem::path ExperimentConfig::Resolve(const std::filesystem::path& p) const {
  if (p.empty() || p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

void ExperimentConfig::Validate() const {
  if (schema_version != kConfigSchemaVersion) {
    throw InputError("unsupported schema_version " + std::to_string(schema_version));
  }
  const GenerativeConfig& g = generative;
  if (g.replicates < 1) throw InputError("replicates must be >= 1");
  if (g.n < 2) throw InputError("n must be >= 2");
  if (g.k < 1 || g.k > g.n) throw InputError("k must lie in [1, n]");
  if (g.beta && (g.beta->rows() != g.k || g.beta->cols() != g.k)) {
    throw InputError("beta must be k x k");
  }
  if (g.pi && (g.pi->rows() != g.k || g.pi->cols() != g.k)) {
    throw InputError("pi must be k x k");
  }
  if (mode == StudyMode::kSimulate) DesignFromConfig(g).Validate();
  estimation.priors.Validate();
  estimation.mcmc.Validate();
  if (estimation.starts < 1) throw InputError("starts must be >= 1");
  if (estimation.max_iterations < 1) throw InputError("max_iterations must be >= 1");
  if (estimation.kmeans_restarts < 0) throw InputError("kmeans_restarts must be >= 0");
  if (estimation.k && *estimation.k < 1) throw InputError("estimation.k must be >= 1");
  if (io.output_dir.empty()) throw InputError("io.output_dir is required");
  if (mode == StudyMode::kFit) {
    if (io.edges.empty() || io.outcomes.empty()) {
      throw InputError("fit mode needs io.edges and io.outcomes");
    }
    for (const auto& p : {Resolve(io.edges), Resolve(io.outcomes)}) {
      if (!std::filesystem::exists(p)) throw IoError("file not found: " + p.string());
    }
  }
}

ExperimentConfig ParseConfig(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, e.mark.line + 1);
  }
  if (!root.IsMap()) throw ParseError("config must be a mapping", 1);
  RejectUnknown(root, {"schema_version", "mode", "generative", "estimation", "io"},
                "top level");
  ExperimentConfig c;
  Read(root, "schema_version", c.schema_version);
  if (root["mode"]) {
    const std::string mode = root["mode"].as<std::string>();
    if (mode == "simulate") {
      c.mode = StudyMode::kSimulate;
    } else if (mode == "fit") {
      c.mode = StudyMode::kFit;
    } else {
      throw ParseError("mode must be simulate or fit", LineOf(root["mode"]));
    }
  }

  if (const YAML::Node g = root["generative"]) {
    RejectUnknown(g,
                  {"n", "k", "within_prob", "between_prob", "lambda_within",
                   "lambda_between", "beta", "pi", "gamma", "beta0", "sigma_eps",
                   "treatment_prob", "replicates", "seed"},
                  "generative");
    GenerativeConfig& gen = c.generative;
    Read(g, "n", gen.n);
    Read(g, "k", gen.k);
    Read(g, "within_prob", gen.within_prob);
    Read(g, "between_prob", gen.between_prob);
    Read(g, "lambda_within", gen.lambda_within);
    Read(g, "lambda_between", gen.lambda_between);
    if (g["beta"]) gen.beta = ReadMatrix(g["beta"], "beta");
    if (g["pi"]) gen.pi = ReadMatrix(g["pi"], "pi");
    Read(g, "gamma", gen.gamma);
    if (!ReadTracked(g, "beta0", gen.beta0)) c.assumed.push_back("generative.beta0");
    if (!ReadTracked(g, "sigma_eps", gen.sigma_eps)) c.assumed.push_back("generative.sigma_eps");
    if (!ReadTracked(g, "treatment_prob", gen.treatment_prob)) {
      c.assumed.push_back("generative.treatment_prob");
    }
    Read(g, "replicates", gen.replicates);
    Read(g, "seed", gen.seed);
  } else {
    c.assumed = {"generative.beta0", "generative.sigma_eps", "generative.treatment_prob"};
  }

  if (const YAML::Node e = root["estimation"]) {
    RejectUnknown(e, {"method", "k", "priors", "mcmc", "optimizer", "detection"},
                  "estimation");
    EstimationConfig& est = c.estimation;
    if (const YAML::Node m = e["method"]) {
      est.methods.clear();
      if (m.IsSequence()) {
        for (const auto& item : m) {
          est.methods.push_back(ParseMethod(item.as<std::string>(), LineOf(item)));
        }
      } else {
        est.methods.push_back(ParseMethod(m.as<std::string>(), LineOf(m)));
      }
      if (est.methods.empty()) throw ParseError("method list is empty", LineOf(m));
    }
    if (e["k"]) {
      int k = 0;
      Read(e, "k", k);
      est.k = k;
    }
    if (const YAML::Node p = e["priors"]) {
      RejectUnknown(p, {"coef_sd", "sigma2_shape", "sigma2_rate", "pi_a", "pi_b"}, "priors");
      Read(p, "coef_sd", est.priors.coef_sd);
      Read(p, "sigma2_shape", est.priors.sigma2_shape);
      Read(p, "sigma2_rate", est.priors.sigma2_rate);
      Read(p, "pi_a", est.priors.pi_a);
      Read(p, "pi_b", est.priors.pi_b);
    }
    if (const YAML::Node m = e["mcmc"]) {
      RejectUnknown(m, {"n_iter", "n_burnin", "n_chains", "thin"}, "mcmc");
      Read(m, "n_iter", est.mcmc.n_iter);
      Read(m, "n_burnin", est.mcmc.n_burnin);
      Read(m, "n_chains", est.mcmc.n_chains);
      Read(m, "thin", est.mcmc.thin);
    }
    if (const YAML::Node o = e["optimizer"]) {
      RejectUnknown(o, {"starts", "max_iterations"}, "optimizer");
      Read(o, "starts", est.starts);
      Read(o, "max_iterations", est.max_iterations);
    }
    if (const YAML::Node d = e["detection"]) {
      RejectUnknown(d, {"kmeans_restarts", "refine"}, "detection");
      Read(d, "kmeans_restarts", est.kmeans_restarts);
      Read(d, "refine", est.refine);
    }
  }
  if (c.estimation.mcmc.n_burnin < 0) {
    c.estimation.mcmc.n_burnin = c.estimation.mcmc.Burnin();
  }

  if (const YAML::Node io = root["io"]) {
    RejectUnknown(io, {"output_dir", "edges", "outcomes", "directed"}, "io");
    std::string s;
    if (ReadTracked(io, "output_dir", s)) c.io.output_dir = s;
    if (ReadTracked(io, "edges", s)) c.io.edges = s;
    if (ReadTracked(io, "outcomes", s)) c.io.outcomes = s;
    Read(io, "directed", c.io.directed);
  }
  return c;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  ExperimentConfig c = ParseConfig(ReadTextFile(path));
  c.base_dir = path.parent_path();
  return c;
}

std::string SerializeConfig(const ExperimentConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "schema_version" << YAML::Value << c.schema_version;
  out << YAML::Key << "mode" << YAML::Value << std::string(StudyModeName(c.mode));

  const GenerativeConfig& g = c.generative;
  out << YAML::Key << "generative" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n" << YAML::Value << g.n;
  out << YAML::Key << "k" << YAML::Value << g.k;
  out << YAML::Key << "within_prob" << YAML::Value << FormatDouble(g.within_prob);
  out << YAML::Key << "between_prob" << YAML::Value << FormatDouble(g.between_prob);
  out << YAML::Key << "lambda_within" << YAML::Value << FormatDouble(g.lambda_within);
  out << YAML::Key << "lambda_between" << YAML::Value << FormatDouble(g.lambda_between);
  if (g.beta) {
    out << YAML::Key << "beta" << YAML::Value;
    EmitMatrix(out, *g.beta);
  }
  if (g.pi) {
    out << YAML::Key << "pi" << YAML::Value;
    EmitMatrix(out, *g.pi);
  }
  out << YAML::Key << "gamma" << YAML::Value << FormatDouble(g.gamma);
  out << YAML::Key << "beta0" << YAML::Value << FormatDouble(g.beta0);
  out << YAML::Key << "sigma_eps" << YAML::Value << FormatDouble(g.sigma_eps);
  out << YAML::Key << "treatment_prob" << YAML::Value << FormatDouble(g.treatment_prob);
  out << YAML::Key << "replicates" << YAML::Value << g.replicates;
  out << YAML::Key << "seed" << YAML::Value << g.seed;
  out << YAML::EndMap;

  const EstimationConfig& e = c.estimation;
  out << YAML::Key << "estimation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "method" << YAML::Value;
  if (e.methods.size() == 1) {
    out << std::string(EstimationMethodName(e.methods[0]));
  } else {
    out << YAML::Flow << YAML::BeginSeq;
    for (EstimationMethod m : e.methods) out << std::string(EstimationMethodName(m));
    out << YAML::EndSeq;
  }
  if (e.k) out << YAML::Key << "k" << YAML::Value << *e.k;
  out << YAML::Key << "priors" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "coef_sd" << YAML::Value << FormatDouble(e.priors.coef_sd);
  out << YAML::Key << "sigma2_shape" << YAML::Value << FormatDouble(e.priors.sigma2_shape);
  out << YAML::Key << "sigma2_rate" << YAML::Value << FormatDouble(e.priors.sigma2_rate);
  out << YAML::Key << "pi_a" << YAML::Value << FormatDouble(e.priors.pi_a);
  out << YAML::Key << "pi_b" << YAML::Value << FormatDouble(e.priors.pi_b);
  out << YAML::EndMap;
  out << YAML::Key << "mcmc" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_iter" << YAML::Value << e.mcmc.n_iter;
  out << YAML::Key << "n_burnin" << YAML::Value << e.mcmc.Burnin();
  out << YAML::Key << "n_chains" << YAML::Value << e.mcmc.n_chains;
  out << YAML::Key << "thin" << YAML::Value << e.mcmc.thin;
  out << YAML::EndMap;
  out << YAML::Key << "optimizer" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "starts" << YAML::Value << e.starts;
  out << YAML::Key << "max_iterations" << YAML::Value << e.max_iterations;
  out << YAML::EndMap;
  out << YAML::Key << "detection" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kmeans_restarts" << YAML::Value << e.kmeans_restarts;
  out << YAML::Key << "refine" << YAML::Value << e.refine;
  out << YAML::EndMap;
  out << YAML::EndMap;

  out << YAML::Key << "io" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "output_dir" << YAML::Value << c.io.output_dir.string();
  if (!c.io.edges.empty()) out << YAML::Key << "edges" << YAML::Value << c.io.edges.string();
  if (!c.io.outcomes.empty()) {
    out << YAML::Key << "outcomes" << YAML::Value << c.io.outcomes.string();
  }
  out << YAML::Key << "directed" << YAML::Value << c.io.directed;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

SimulationDesign DesignFromConfig(const GenerativeConfig& g) {
  SimulationDesign design = BenchmarkDesign(g.n, g.k, g.sigma_eps, g.beta0);
  design.treatment_prob = g.treatment_prob;
  design.observed_probs = Eigen::MatrixXd::Constant(g.k, g.k, g.between_prob);
  design.observed_probs.diagonal().setConstant(g.within_prob);
  design.truth.gamma = g.gamma;
  const double expected_treated = g.n * g.treatment_prob / g.k;
  for (int a = 0; a < g.k; ++a) {
    for (int b = 0; b < g.k; ++b) {
      design.truth.pi(a, b) =
          std::min(1.0, (a == b ? g.lambda_within : g.lambda_between) / expected_treated);
    }
  }
  if (g.beta) design.truth.beta = *g.beta;
  if (g.pi) design.truth.pi = *g.pi;
  return design;
}

DetectionConfig DetectionFromConfig(const EstimationConfig& estimation,
                                    std::uint64_t seed) {
  DetectionConfig d;
  d.kmeans_restarts = estimation.kmeans_restarts;
  d.refine = estimation.refine;
  d.seed = seed;
  return d;
}

}  // namespace cinet
