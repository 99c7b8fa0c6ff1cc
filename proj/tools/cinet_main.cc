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

// Command-line front end:
//
//   cinet simulate <config>
//   cinet fit <config>
//   cinet report <study-dir> --which fig1|table1
//   cinet validate <config>
//
// Failures print one JSON object on stderr and exit with status 1.

#include <filesystem>
#include <iostream>
#include <string>

#include <glog/logging.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "cinet/config.h"
#include "cinet/error.h"
#include "cinet/harness.h"

namespace {

using json = nlohmann::ordered_json;

int ReportError(const std::string& kind, const std::string& message,
                const json& extra = json::object()) {
  json out = {{"error", kind}, {"message", message}};
  for (const auto& [key, value] : extra.items()) out[key] = value;
  std::cerr << out.dump() << std::endl;
  return 1;
}

int RunSimulate(const std::string& path) {
  const cinet::ExperimentConfig config = cinet::LoadConfig(path);
  if (config.mode != cinet::StudyMode::kSimulate) {
    throw cinet::InputError("config mode is fit; use the fit command");
  }
  const cinet::StudyReport report = cinet::RunSimulationStudy(config);
  cinet::WriteStudy(config, report);
  const std::filesystem::path dir = config.Resolve(config.io.output_dir);
  std::cout << "wrote " << dir.string() << " (" << config.generative.replicates -
                   static_cast<int>(report.failures.size())
            << " of " << config.generative.replicates << " replicates)\n";
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int RunFitCommand(const std::string& path) {
  const cinet::ExperimentConfig config = cinet::LoadConfig(path);
  if (config.mode != cinet::StudyMode::kFit) {
    throw cinet::InputError("config mode is simulate; use the simulate command");
  }
  const cinet::StudyReport report = cinet::RunFit(config);
  cinet::WriteStudy(config, report);
  std::cout << "wrote " << config.Resolve(config.io.output_dir).string() << "\n";
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int RunReport(const std::string& dir, const std::string& which) {
  const cinet::StudyReport report = cinet::LoadReport(dir);
  const auto kind = which == "fig1" ? cinet::FigureKind::kFig1 : cinet::FigureKind::kTable1;
  for (const auto& p : cinet::EmitFigureData(report, kind, dir)) {
    std::cout << p.string() << "\n";
  }
  return 0;
}

int RunValidate(const std::string& path) {
  const cinet::ExperimentConfig config = cinet::LoadConfig(path);
  config.Validate();
  json out = {{"valid", true},
              {"mode", std::string(cinet::StudyModeName(config.mode))},
              {"schema_version", config.schema_version},
              {"assumed", config.assumed}};
  std::cout << out.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  // Line-search notices from the optimizer are not actionable for users.
  FLAGS_minloglevel = google::GLOG_ERROR;
  CLI::App app{"Network interference with a latent interference network"};
  app.require_subcommand(1);

  std::string config_path;
  std::string study_dir;
  std::string which;
  auto* simulate = app.add_subcommand("simulate", "Run a simulation study");
  simulate->add_option("config", config_path, "Study config (YAML)")->required();
  auto* fit = app.add_subcommand("fit", "Fit observed network and outcome files");
  fit->add_option("config", config_path, "Study config (YAML)")->required();
  auto* report = app.add_subcommand("report", "Emit plot-ready CSVs for a study");
  report->add_option("study-dir", study_dir, "Directory written by simulate")->required();
  report->add_option("--which", which, "fig1 or table1")
      ->required()
      ->check(CLI::IsMember({"fig1", "table1"}));
  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", config_path, "Study config (YAML)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return ReportError("usage_error", e.what());
  }

  try {
    if (*simulate) return RunSimulate(config_path);
    if (*fit) return RunFitCommand(config_path);
    if (*report) return RunReport(study_dir, which);
    if (*validate) return RunValidate(config_path);
  } catch (const cinet::ParseError& e) {
    return ReportError("parse_error", e.what(), {{"line", e.line()}});
  } catch (const cinet::ReconciliationError& e) {
    return ReportError("reconciliation_error", e.what(), {{"orphans", e.orphans()}});
  } catch (const cinet::Error& e) {
    return ReportError(std::string(cinet::ErrorKindName(e.kind())), e.what());
  } catch (const std::exception& e) {
    return ReportError("internal_error", e.what());
  }
  return 1;
}
