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

// Writes synthetic fit-mode inputs drawn from the benchmark design:
//
//   cinet_fixture --out data/fixture --n 190 --k 10 --seed 1

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "cinet/harness.h"
#include "cinet/simulation.h"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic edge list and outcome files for cinet fit"};
  std::string out;
  int n = 190;
  int k = 10;
  double sigma = 1.0;
  std::uint64_t seed = 1;
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--n", n, "node count")->check(CLI::Range(2, 100000));
  app.add_option("--k", k, "community count")->check(CLI::Range(1, 1000));
  app.add_option("--sigma", sigma, "outcome noise sd")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "master seed");
  CLI11_PARSE(app, argc, argv);
  try {
    const cinet::FitFixture f =
        cinet::WriteFitFixture(cinet::BenchmarkDesign(n, k, sigma), seed, out);
    std::cout << f.edges.string() << "\n" << f.outcomes.string() << "\n"
              << f.labels.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
