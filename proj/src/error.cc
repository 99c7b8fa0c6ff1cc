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

#include "cinet/error.h"

#include "cinet/random.h"

namespace cinet {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInput:
      return "input_error";
    case ErrorKind::kParameter:
      return "parameter_error";
    case ErrorKind::kParse:
      return "parse_error";
    case ErrorKind::kOptimization:
      return "optimization_error";
    case ErrorKind::kEvaluation:
      return "evaluation_error";
    case ErrorKind::kSampler:
      return "sampler_error";
    case ErrorKind::kReconciliation:
      return "reconciliation_error";
    case ErrorKind::kIo:
      return "io_error";
    case ErrorKind::kStudyAborted:
      return "study_aborted";
  }
  return "error";
}

namespace {

std::string JoinOrphans(const std::vector<std::string>& orphans) {
  std::string out;
  for (std::size_t i = 0; i < orphans.size(); ++i) {
    if (i > 0) out += ", ";
    out += orphans[i];
  }
  return out;
}

}  // namespace

ReconciliationError::ReconciliationError(const std::string& message,
                                         std::vector<std::string> orphans)
    : Error(ErrorKind::kReconciliation,
            message + ": " + JoinOrphans(orphans)),
      orphans_(std::move(orphans)) {}

std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t counter,
                         Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master),
                    static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(counter),
                    static_cast<std::uint32_t>(counter >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace cinet
