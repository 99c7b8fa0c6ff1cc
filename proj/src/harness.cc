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

#include "cinet/harness.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "json.hpp"
#include <openssl/evp.h>

#include "cinet/baselines.h"
#include "cinet/csv.h"
#include "cinet/diagnostics.h"
#include "cinet/error.h"
#include "cinet/io.h"
#include "cinet/netgen.h"
#include "cinet/random.h"
#include "cinet/simulation.h"

namespace cinet {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr double kMaxFailureFraction = 0.10;

std::string LambdaName(int a, int b) {
  return "lambda_" + std::to_string(a + 1) + "_" + std::to_string(b + 1);
}

std::string IndirectName(int b) { return "indirect_" + std::to_string(b + 1); }

// Collects the records of one replicate.
class Recorder {
 public:
  Recorder(int replicate, std::uint64_t seed) : replicate_(replicate), seed_(seed) {}

  void Add(const std::string& estimator, const std::string& parameter, double value) {
    records_.push_back({replicate_, seed_, estimator, parameter, value});
  }
  void AddDraw(const std::string& parameter, double value) {
    draws_.push_back({replicate_, seed_, "cinet_gibbs", parameter, value});
  }
  std::vector<EstimateRecord>& records() { return records_; }
  std::vector<EstimateRecord>& draws() { return draws_; }

 private:
  int replicate_;
  std::uint64_t seed_;
  std::vector<EstimateRecord> records_;
  std::vector<EstimateRecord> draws_;
};

void RecordParams(Recorder& rec, const std::string& estimator, const ModelParams& params,
                  const Eigen::MatrixXd& lambda, std::span<const int> treated) {
  const ParamLayout layout(params.k(), params.covariate_count());
  const Eigen::VectorXd flat = layout.Flatten(params);
  const auto names = layout.Names();
  for (int j = 0; j < layout.size(); ++j) rec.Add(estimator, names[j], flat(j));
  for (int a = 0; a < params.k(); ++a) {
    for (int b = 0; b < params.k(); ++b) rec.Add(estimator, LambdaName(a, b), lambda(a, b));
  }
  rec.Add(estimator, "direct", params.gamma);
  double total = 0.0;
  for (int b = 0; b < params.k(); ++b) {
    const double v = PopulationIndirectValue(params, b, treated);
    rec.Add(estimator, IndirectName(b), v);
    total += v;
  }
  rec.Add(estimator, "indirect", total / params.k());
}

// Posterior means of parameters, lambda and effects, plus thinned draws.
PosteriorSamples RecordGibbs(Recorder& rec, const Dataset& data, int k,
                             const EstimationConfig& est, std::uint64_t seed,
                             const InitPolicy& init) {
  McmcConfig mcmc = est.mcmc;
  mcmc.seed = seed;
  PosteriorSamples post = FitGibbs(data, k, est.priors, mcmc, init);
  const std::vector<int>& treated = post.treated_counts;
  const Eigen::MatrixXd pooled = post.Pooled();
  const ParamLayout& layout = post.layout;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(layout.size());
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd indirect = Eigen::VectorXd::Zero(k);
  const int step = std::max<int>(1, static_cast<int>(pooled.rows()) / kPooledDrawsPerReplicate);
  for (Eigen::Index r = 0; r < pooled.rows(); ++r) {
    const ModelParams p = layout.Unflatten(pooled.row(r).transpose());
    const Eigen::MatrixXd l = p.Lambda(treated);
    mean += pooled.row(r).transpose();
    lambda += l;
    for (int b = 0; b < k; ++b) indirect(b) += PopulationIndirectValue(p, b, treated);
    if (r % step == 0 && r / step < kPooledDrawsPerReplicate) {
      rec.AddDraw("gamma", p.gamma);
      for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
          rec.AddDraw(layout.Names()[layout.beta(a, b)], p.beta(a, b));
          rec.AddDraw(LambdaName(a, b), l(a, b));
        }
      }
    }
  }
  const double rows = static_cast<double>(pooled.rows());
  const auto names = layout.Names();
  mean /= rows;
  lambda /= rows;
  indirect /= rows;
  for (int j = 0; j < layout.size(); ++j) rec.Add("cinet_gibbs", names[j], mean(j));
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) rec.Add("cinet_gibbs", LambdaName(a, b), lambda(a, b));
  }
  rec.Add("cinet_gibbs", "direct", mean(layout.gamma()));
  // Comparison-table convention: the effect evaluated at the posterior means of beta
  // and pi. The draw-wise average of the effect is kept alongside it.
  const ModelParams plug_in = layout.Unflatten(mean);
  double plug_in_total = 0.0;
  for (int b = 0; b < k; ++b) {
    const double v = PopulationIndirectValue(plug_in, b, treated);
    rec.Add("cinet_gibbs", IndirectName(b), v);
    plug_in_total += v;
  }
  rec.Add("cinet_gibbs", "indirect", plug_in_total / k);
  rec.Add("cinet_gibbs", "indirect_drawwise", indirect.mean());

  double max_rhat = 0.0;
  bool any = false;
  for (const auto& s : PosteriorSummary(post)) {
    if (s.rhat) {
      max_rhat = std::max(max_rhat, *s.rhat);
      any = true;
    }
  }
  if (any) rec.Add("diagnostics", "max_rhat", max_rhat);
  rec.Add("diagnostics", "empty_block_warnings", post.empty_block_warnings);
  return post;
}

FitResult RecordMle(Recorder& rec, const Dataset& data, int k, const EstimationConfig& est,
                    std::uint64_t seed, const InitPolicy& init) {
  OptimizerConfig oc;
  oc.starts = est.starts;
  oc.max_iterations = est.max_iterations;
  oc.seed = seed;
  FitResult fit = FitMle(data, k, init, oc);
  const std::vector<int> treated = TreatedCounts(data.z, data.labels);
  RecordParams(rec, "cinet_mle", fit.theta_hat, fit.theta_hat.Lambda(treated), treated);
  rec.Add("diagnostics", "mle_gradient_norm", fit.gradient_norm);
  rec.Add("diagnostics", "mle_multimodal", fit.multimodal_warning ? 1.0 : 0.0);
  if (fit.info_matrix.size() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fit.info_matrix,
                                                       Eigen::EigenvaluesOnly);
    rec.Add("diagnostics", "info_min_eigenvalue", eig.eigenvalues()(0));
  }
  return fit;
}

void RecordBaselines(Recorder& rec, const Dataset& data, const AdjacencyMatrix& observed,
                     double assignment_prob, const EstimationConfig& est,
                     std::uint64_t seed) {
  rec.Add("ipw", "direct", HtDirect(data, assignment_prob).direct);
  const BaselineResult fixed = FixedNetworkFit(data, observed);
  rec.Add("fixed_network", "direct", fixed.direct);
  if (fixed.indirect) rec.Add("fixed_network", "indirect", *fixed.indirect);
  if (fixed.indirect_population) {
    rec.Add("fixed_network", "indirect_population", *fixed.indirect_population);
  }
  OptimizerConfig oc;
  oc.starts = est.starts;
  oc.max_iterations = est.max_iterations;
  oc.seed = seed;
  const BaselineResult random = RandomGraphFit(data, oc);
  rec.Add("random_graph", "direct", random.direct);
  if (random.indirect) rec.Add("random_graph", "indirect", *random.indirect);
}

std::map<std::string, double> DesignTruth(const SimulationDesign& design) {
  std::map<std::string, double> truth;
  const ParamLayout layout(design.k, design.truth.covariate_count());
  const Eigen::VectorXd flat = layout.Flatten(design.truth);
  const auto names = layout.Names();
  for (int j = 0; j < layout.size(); ++j) truth[names[j]] = flat(j);
  const double expected_treated = design.n * design.treatment_prob / design.k;
  double total = 0.0;
  for (int a = 0; a < design.k; ++a) {
    for (int b = 0; b < design.k; ++b) {
      truth[LambdaName(a, b)] = expected_treated * design.truth.pi(a, b);
    }
  }
  for (int b = 0; b < design.k; ++b) {
    truth[IndirectName(b)] = DesignIndirectEffect(design, b);
    total += truth[IndirectName(b)];
  }
  truth["direct"] = design.truth.gamma;
  truth["indirect"] = total / design.k;
  return truth;
}

std::string FormatEstimatesCsv(const std::vector<EstimateRecord>& records) {
  std::ostringstream out;
  out << "replicate,seed,estimator,parameter,value\n";
  for (const auto& r : records) {
    out << r.replicate << "," << r.seed << "," << r.estimator << "," << r.parameter << ","
        << FormatDouble(r.value) << "\n";
  }
  return out.str();
}

std::optional<std::uint64_t> ParseSeed(std::string_view text) {
  text = Trim(text);
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) return std::nullopt;
  return value;
}

std::vector<EstimateRecord> ParseEstimatesCsv(const fs::path& path) {
  const CsvTable table = ReadCsv(path);
  const int c_rep = table.Column("replicate");
  const int c_seed = table.Column("seed");
  const int c_est = table.Column("estimator");
  const int c_par = table.Column("parameter");
  const int c_val = table.Column("value");
  if (c_rep < 0 || c_seed < 0 || c_est < 0 || c_par < 0 || c_val < 0) {
    throw ParseError("unexpected header in " + path.filename().string(), 1);
  }
  std::vector<EstimateRecord> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto rep = ParseInt(row[c_rep]);
    const auto seed = ParseSeed(row[c_seed]);
    const auto value = ParseDouble(row[c_val]);
    if (!rep || !value || !seed) throw ParseError("bad record", table.lines[r]);
    out.push_back({static_cast<int>(*rep), *seed, row[c_est],
                   row[c_par], *value});
  }
  return out;
}

std::string FormatSummaryRows(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "estimator,parameter,mean,sd,count\n";
  for (const auto& r : rows) {
    out << r.estimator << "," << r.parameter << "," << FormatDouble(r.mean) << ","
        << FormatDouble(r.sd) << "," << r.count << "\n";
  }
  return out.str();
}

std::string FormatTruth(const std::map<std::string, double>& truth) {
  std::ostringstream out;
  out << "parameter,value\n";
  for (const auto& [k, v] : truth) out << k << "," << FormatDouble(v) << "\n";
  return out.str();
}

std::string FormatFailures(const std::vector<FailureRecord>& failures) {
  std::ostringstream out;
  out << "replicate,seed,message\n";
  for (const auto& f : failures) {
    out << f.replicate << "," << f.seed << "," << CsvField(f.message) << "\n";
  }
  return out.str();
}

std::vector<fs::path> ArtifactFiles(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), dir);
    if (rel == kManifest) continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  return files;
}

// Rewrites the manifest, keeping any metadata already recorded there.
void RefreshManifest(const fs::path& dir, const json& metadata) {
  json manifest = metadata;
  const fs::path path = dir / kManifest;
  if (manifest.is_null() && fs::exists(path)) {
    manifest = json::parse(ReadTextFile(path));
  }
  if (manifest.is_null()) manifest = json::object();
  json artifacts = json::array();
  for (const fs::path& rel : ArtifactFiles(dir)) {
    artifacts.push_back({{"path", rel.generic_string()},
                         {"bytes", fs::file_size(dir / rel)},
                         {"sha256", Sha256File(dir / rel)}});
  }
  manifest["artifacts"] = artifacts;
  WriteTextFile(path, manifest.dump(2) + "\n");
}

void CheckFailureBudget(const std::vector<FailureRecord>& failures, int replicates) {
  if (failures.size() > kMaxFailureFraction * replicates) {
    std::ostringstream msg;
    msg << failures.size() << " of " << replicates
        << " replicates failed (more than 10%); first failure, seed " << failures[0].seed
        << ": " << failures[0].message;
    throw StudyAbortedError(msg.str());
  }
}

}  // namespace

std::vector<SummaryRow> Summarize(const std::vector<EstimateRecord>& estimates) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& r : estimates) {
    auto key = std::make_pair(r.estimator, r.parameter);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(r.value);
  }
  std::vector<SummaryRow> rows;
  for (const auto& key : order) {
    const auto& v = groups[key];
    SummaryRow row;
    row.estimator = key.first;
    row.parameter = key.second;
    row.count = static_cast<int>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    row.mean = sum / row.count;
    double ss = 0.0;
    for (double x : v) ss += (x - row.mean) * (x - row.mean);
    row.sd = row.count > 1 ? std::sqrt(ss / (row.count - 1)) : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

StudyReport RunSimulationStudy(const ExperimentConfig& config) {
  if (config.mode != StudyMode::kSimulate) throw InputError("config mode is not simulate");
  config.Validate();
  const GenerativeConfig& gen = config.generative;
  const EstimationConfig& est = config.estimation;
  const SimulationDesign design = DesignFromConfig(gen);
  const int reps = gen.replicates;

  std::vector<Recorder> recorders;
  for (int r = 0; r < reps; ++r) {
    recorders.emplace_back(r + 1, DeriveSeed(gen.seed, r, Stream::kReplicate));
  }
  std::vector<std::string> failure(reps);
  std::vector<int> multimodal(reps, 0);

#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < reps; ++r) {
    Recorder& rec = recorders[r];
    const std::uint64_t seed = DeriveSeed(gen.seed, r, Stream::kReplicate);
    try {
      const SimulatedData sim = SimulateReplicate(design, seed);
      const CommunityLabels detected = DetectCommunities(
          sim.observed, design.k,
          DetectionFromConfig(est, DeriveSeed(seed, 0, Stream::kDetection)));
      const LabelAlignment alignment = AlignLabels(detected, sim.true_labels);
      Dataset data = sim.data;
      data.labels = detected.Relabeled(alignment.permutation);
      rec.Add("diagnostics", "ari", AdjustedRandIndex(detected, sim.true_labels));
      rec.Add("diagnostics", "label_agreement", alignment.agreement);

      InitPolicy init;
      init.pi_hint = BlockDensities(sim.observed, data.labels);
      if (est.Runs(EstimationMethod::kGibbs)) {
        RecordGibbs(rec, data, design.k, est, DeriveSeed(seed, 0, Stream::kGibbs), init);
      }
      if (est.Runs(EstimationMethod::kMle)) {
        const FitResult fit =
            RecordMle(rec, data, design.k, est, DeriveSeed(seed, 0, Stream::kMle), init);
        multimodal[r] = fit.multimodal_warning ? 1 : 0;
      }
      if (est.Runs(EstimationMethod::kBaselines)) {
        RecordBaselines(rec, data, sim.observed, design.treatment_prob, est,
                        DeriveSeed(seed, 1, Stream::kMle));
      }
    } catch (const std::exception& e) {
      failure[r] = e.what();
    }
  }

  StudyReport report;
  report.mode = "simulate";
  report.n = gen.n;
  report.k = gen.k;
  report.replicates_requested = reps;
  report.truth = DesignTruth(design);
  for (int r = 0; r < reps; ++r) {
    const std::uint64_t seed = DeriveSeed(gen.seed, r, Stream::kReplicate);
    if (!failure[r].empty()) {
      report.failures.push_back({r + 1, seed, failure[r]});
      continue;
    }
    auto& recs = recorders[r].records();
    report.estimates.insert(report.estimates.end(), recs.begin(), recs.end());
    auto& draws = recorders[r].draws();
    report.pooled_draws.insert(report.pooled_draws.end(), draws.begin(), draws.end());
    if (multimodal[r]) {
      report.warnings.push_back("replicate " + std::to_string(r + 1) + ": " +
                                kNonIdentifiabilityWarning);
    }
  }
  CheckFailureBudget(report.failures, reps);
  report.summary = Summarize(report.estimates);
  return report;
}

StudyReport RunFit(const ExperimentConfig& config) {
  if (config.mode != StudyMode::kFit) throw InputError("config mode is not fit");
  config.Validate();
  const EstimationConfig& est = config.estimation;
  const int k = config.FitK();
  EdgeListOptions options;
  options.directed = config.io.directed;
  const IngestedNetwork net = IngestEdgeList(config.Resolve(config.io.edges), options);
  const OutcomeTable outcomes = ReadOutcomes(config.Resolve(config.io.outcomes));
  // Reconcile ids before spending time on detection.
  JoinOutcomes(net.node_ids, outcomes,
               CommunityLabels(std::vector<int>(net.node_ids.size(), 0), 1));
  const std::uint64_t seed = config.generative.seed;
  const CommunityLabels labels = DetectCommunities(
      net.adjacency, k, DetectionFromConfig(est, DeriveSeed(seed, 0, Stream::kDetection)));
  const Dataset data = JoinOutcomes(net.node_ids, outcomes, labels);
  const std::vector<int> sizes = labels.CommunitySizes();
  const std::vector<int> treated = TreatedCounts(data.z, data.labels);

  StudyReport report;
  report.mode = "fit";
  report.n = data.size();
  report.k = k;
  report.replicates_requested = 1;
  Recorder rec(1, seed);
  report.extra_files["labels.csv"] = FormatLabelsCsv(net.node_ids, labels);
  if (net.self_loops_dropped > 0) {
    report.warnings.push_back("dropped " + std::to_string(net.self_loops_dropped) +
                              " self-loops from the edge list");
  }
  InitPolicy init;
  init.pi_hint = BlockDensities(net.adjacency, labels);

  std::vector<EffectEstimate> effects;
  if (est.Runs(EstimationMethod::kGibbs)) {
    const PosteriorSamples post =
        RecordGibbs(rec, data, k, est, DeriveSeed(seed, 0, Stream::kGibbs), init);
    const auto table = EffectTable(post, sizes, treated);
    effects.insert(effects.end(), table.begin(), table.end());
    report.extra_files["draws.csv"] = FormatDrawsCsv(post);
    report.extra_files["posterior_summary.csv"] = FormatSummaryCsv(PosteriorSummary(post));
    std::ostringstream heat;
    heat << "sender";
    for (int b = 0; b < k; ++b) heat << ",receiver_" << b + 1;
    heat << "\n";
    for (int a = 0; a < k; ++a) {
      heat << a + 1;
      for (int b = 0; b < k; ++b) {
        heat << "," << FormatDouble(GroupIde(post, a, b, sizes).value);
      }
      heat << "\n";
    }
    report.extra_files["indirect_heatmap.csv"] = heat.str();
    if (post.empty_block_warnings > 0) {
      report.warnings.push_back(std::to_string(post.empty_block_warnings) +
                                " interference blocks had no trials; pi drawn from the prior");
    }
  }
  if (est.Runs(EstimationMethod::kMle)) {
    try {
      const FitResult fit =
          RecordMle(rec, data, k, est, DeriveSeed(seed, 0, Stream::kMle), init);
      const auto table = EffectTable(fit, sizes, treated);
      effects.insert(effects.end(), table.begin(), table.end());
      report.extra_files["fit.txt"] = FormatFitResult(fit);
      if (fit.covariance) {
        report.extra_files["covariance.csv"] = FormatNamedMatrixCsv(fit.names, *fit.covariance);
      }
      if (fit.multimodal_warning) report.warnings.push_back(kNonIdentifiabilityWarning);
    } catch (const Error& e) {
      // With several methods requested, an infeasible likelihood does not
      // discard the other results.
      if (est.methods.size() == 1 && est.methods[0] == EstimationMethod::kMle) throw;
      report.warnings.push_back(std::string("mle skipped: ") + e.what());
    }
  }
  if (est.Runs(EstimationMethod::kBaselines)) {
    double share = 0.0;
    for (int zi : data.z) share += zi;
    share /= data.size();
    if (share > 0.0 && share < 1.0) {
      RecordBaselines(rec, data, net.adjacency, share, est, DeriveSeed(seed, 1, Stream::kMle));
    } else {
      report.warnings.push_back("baselines skipped: treatment does not vary");
    }
  }
  report.effects = effects;
  report.extra_files["effects.csv"] = FormatEffectsCsv(effects);
  report.estimates = rec.records();
  report.summary = Summarize(report.estimates);
  return report;
}

void WriteStudy(const ExperimentConfig& config, const StudyReport& report) {
  const fs::path dir = config.Resolve(config.io.output_dir);
  fs::create_directories(dir);
  WriteTextFile(dir / "config.yaml", SerializeConfig(config));
  WriteTextFile(dir / "estimates.csv", FormatEstimatesCsv(report.estimates));
  WriteTextFile(dir / "summary.csv", FormatSummaryRows(report.summary));
  WriteTextFile(dir / "failures.csv", FormatFailures(report.failures));
  if (!report.truth.empty()) WriteTextFile(dir / "truth.csv", FormatTruth(report.truth));
  if (!report.pooled_draws.empty()) {
    WriteTextFile(dir / "pooled_draws.csv", FormatEstimatesCsv(report.pooled_draws));
  }
  std::ostringstream warnings;
  for (const auto& w : report.warnings) warnings << w << "\n";
  WriteTextFile(dir / "warnings.txt", warnings.str());
  for (const auto& [name, text] : report.extra_files) WriteTextFile(dir / name, text);

  json meta;
  meta["schema_version"] = kConfigSchemaVersion;
  meta["tool"] = "cinet";
  meta["mode"] = report.mode;
  meta["n"] = report.n;
  meta["k"] = report.k;
  meta["replicates_requested"] = report.replicates_requested;
  meta["replicates_failed"] = report.failures.size();
  json assumptions = json::array();
  const GenerativeConfig& g = config.generative;
  for (const auto& key : config.assumed) {
    double value = 0.0;
    if (key == "generative.beta0") value = g.beta0;
    if (key == "generative.sigma_eps") value = g.sigma_eps;
    if (key == "generative.treatment_prob") value = g.treatment_prob;
    assumptions.push_back({{"key", key},
                           {"value", value},
                           {"note", "default stands in for a design value the source "
                                    "study does not state"}});
  }
  meta["assumptions"] = assumptions;
  meta["warnings"] = report.warnings;
  RefreshManifest(dir, meta);
}

StudyReport LoadReport(const fs::path& dir) {
  const fs::path manifest_path = dir / kManifest;
  if (!fs::exists(manifest_path)) throw IoError("no manifest in " + dir.string());
  const json manifest = json::parse(ReadTextFile(manifest_path));
  StudyReport report;
  report.mode = manifest.value("mode", "");
  report.n = manifest.value("n", 0);
  report.k = manifest.value("k", 0);
  report.replicates_requested = manifest.value("replicates_requested", 0);
  if (manifest.contains("warnings")) {
    report.warnings = manifest["warnings"].get<std::vector<std::string>>();
  }
  report.estimates = ParseEstimatesCsv(dir / "estimates.csv");
  if (fs::exists(dir / "pooled_draws.csv")) {
    report.pooled_draws = ParseEstimatesCsv(dir / "pooled_draws.csv");
  }
  if (fs::exists(dir / "truth.csv")) {
    const CsvTable t = ReadCsv(dir / "truth.csv");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const auto v = ParseDouble(t.rows[r][1]);
      if (!v) throw ParseError("bad truth value", t.lines[r]);
      report.truth[t.rows[r][0]] = *v;
    }
  }
  const CsvTable f = ReadCsv(dir / "failures.csv");
  for (const auto& row : f.rows) {
    report.failures.push_back({static_cast<int>(ParseInt(row[0]).value_or(0)),
                               ParseSeed(row[1]).value_or(0),
                               row[2]});
  }
  report.summary = Summarize(report.estimates);
  return report;
}

std::vector<fs::path> EmitFigureData(const StudyReport& report, FigureKind which,
                                     const fs::path& dir) {
  if (report.estimates.empty()) throw InputError("report has no estimates");
  fs::create_directories(dir);
  std::vector<fs::path> written;
  auto has = [&](const std::string& estimator) {
    return std::any_of(report.estimates.begin(), report.estimates.end(),
                       [&](const EstimateRecord& r) { return r.estimator == estimator; });
  };
  const std::string cinet = has("cinet_gibbs") ? "cinet_gibbs"
                            : has("cinet_mle") ? "cinet_mle"
                                               : "";
  if (which == FigureKind::kFig1) {
    if (cinet.empty()) throw InputError("report has no CINet estimates for fig1");
    std::ostringstream out;
    out << "replicate,parameter,value\n";
    for (const auto& r : report.estimates) {
      if (r.estimator != cinet) continue;
      out << r.replicate << "," << r.parameter << "," << FormatDouble(r.value) << "\n";
    }
    WriteTextFile(dir / "fig1.csv", out.str());
    written.push_back(dir / "fig1.csv");
    std::ostringstream truth;
    truth << "parameter,value\n";
    for (const auto& [name, value] : report.truth) {
      truth << name << "," << FormatDouble(value) << "\n";
    }
    WriteTextFile(dir / "fig1_truth.csv", truth.str());
    written.push_back(dir / "fig1_truth.csv");
    if (!report.pooled_draws.empty()) {
      std::ostringstream pooled;
      pooled << "replicate,parameter,value\n";
      for (const auto& r : report.pooled_draws) {
        pooled << r.replicate << "," << r.parameter << "," << FormatDouble(r.value) << "\n";
      }
      WriteTextFile(dir / "fig1_pooled.csv", pooled.str());
      written.push_back(dir / "fig1_pooled.csv");
    }
  } else {
    std::map<std::pair<std::string, std::string>, SummaryRow> by_key;
    for (const auto& s : report.summary) by_key[{s.estimator, s.parameter}] = s;
    auto cell = [&](const std::string& est, const std::string& par, bool sd) {
      const auto it = by_key.find({est, par});
      if (it == by_key.end()) return std::string();
      return FormatDouble(sd ? it->second.sd : it->second.mean);
    };
    std::ostringstream out;
    out << "method,direct_mean,direct_sd,indirect_mean,indirect_sd\n";
    const std::vector<std::pair<std::string, std::string>> rows = {
        {"IPW", "ipw"},
        {"FixedNetwork", "fixed_network"},
        {"RandomGraph", "random_graph"},
        {"CINet", cinet}};
    bool any = false;
    for (const auto& [label, est] : rows) {
      out << label << "," << cell(est, "direct", false) << "," << cell(est, "direct", true)
          << "," << cell(est, "indirect", false) << "," << cell(est, "indirect", true) << "\n";
      any = any || by_key.count({est, "direct"});
    }
    if (!any) throw InputError("report has no estimates for table1");
    auto truth = [&](const char* key) {
      const auto it = report.truth.find(key);
      return it == report.truth.end() ? std::string() : FormatDouble(it->second);
    };
    out << "TrueValue," << truth("direct") << ",," << truth("indirect") << ",\n";
    WriteTextFile(dir / "table1.csv", out.str());
    written.push_back(dir / "table1.csv");
  }
  if (fs::exists(dir / kManifest)) RefreshManifest(dir, json());
  return written;
}

std::string Sha256File(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw IoError("sha256 unavailable");
  }
  std::vector<char> buffer(1 << 16);
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx, digest, &length);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

FitFixture WriteFitFixture(const SimulationDesign& design, std::uint64_t seed,
                           const fs::path& dir) {
  const SimulatedData sim = SimulateReplicate(design, seed);
  const int n = sim.data.size();
  const int width = static_cast<int>(std::to_string(n).size());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  Rng rng = MakeRng(DeriveSeed(seed, 0, Stream::kFixture));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::string> ids(n);
  for (int i = 0; i < n; ++i) {
    std::ostringstream id;
    id << "u" << std::setw(width) << std::setfill('0') << order[i] + 1;
    ids[i] = id.str();
  }
  fs::create_directories(dir);
  FitFixture out{dir / "edges.csv", dir / "outcomes.csv", dir / "true_labels.csv"};
  std::ostringstream edges;
  edges << "source,target\n";
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (sim.observed(j, i)) edges << ids[j] << "," << ids[i] << "\n";
    }
  }
  WriteTextFile(out.edges, edges.str());
  WriteTextFile(out.outcomes, FormatDatasetCsv(ids, sim.data));
  WriteTextFile(out.labels, FormatLabelsCsv(ids, sim.true_labels));
  return out;
}

}  // namespace cinet
