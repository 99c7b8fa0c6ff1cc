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

#ifndef CINET_ERROR_H_
#define CINET_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cinet {

enum class ErrorKind {
  kInput,
  kParameter,
  kParse,
  kOptimization,
  kEvaluation,
  kSampler,
  kReconciliation,
  kIo,
  kStudyAborted,
};

std::string_view ErrorKindName(ErrorKind kind);

// Base class for every error raised by the library. `kind()` is the
// machine-readable tag emitted by the CLI.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& message)
      : Error(ErrorKind::kInput, message) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& message)
      : Error(ErrorKind::kParameter, message) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line)
      : Error(ErrorKind::kParse,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class OptimizationError : public Error {
 public:
  OptimizationError(const std::string& message,
                    std::vector<std::string> trace)
      : Error(ErrorKind::kOptimization, message), trace_(std::move(trace)) {}
  const std::vector<std::string>& trace() const { return trace_; }

 private:
  std::vector<std::string> trace_;
};

// Raised when the likelihood is not finite at a perturbed point.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& message, int coordinate)
      : Error(ErrorKind::kEvaluation, message), coordinate_(coordinate) {}
  int coordinate() const { return coordinate_; }

 private:
  int coordinate_;
};

class SamplerError : public Error {
 public:
  SamplerError(const std::string& message, int iteration, int unit)
      : Error(ErrorKind::kSampler,
              message + " (iteration " + std::to_string(iteration) +
                  ", unit " + std::to_string(unit) + ")"),
        iteration_(iteration),
        unit_(unit) {}
  int iteration() const { return iteration_; }
  int unit() const { return unit_; }

 private:
  int iteration_;
  int unit_;
};

class ReconciliationError : public Error {
 public:
  ReconciliationError(const std::string& message,
                      std::vector<std::string> orphans);
  const std::vector<std::string>& orphans() const { return orphans_; }

 private:
  std::vector<std::string> orphans_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorKind::kIo, message) {}
};

class StudyAbortedError : public Error {
 public:
  explicit StudyAbortedError(const std::string& message)
      : Error(ErrorKind::kStudyAborted, message) {}
};

}  // namespace cinet

#endif  // CINET_ERROR_H_
