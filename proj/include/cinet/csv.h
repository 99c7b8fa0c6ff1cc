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

// Small CSV helpers. Fields may be double-quoted; no embedded newlines.

#ifndef CINET_CSV_H_
#define CINET_CSV_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cinet {

std::string_view Trim(std::string_view s);
std::vector<std::string> SplitCsvLine(std::string_view line);
std::optional<double> ParseDouble(std::string_view s);
std::optional<long long> ParseInt(std::string_view s);

// Shortest representation that round-trips exactly.
std::string FormatDouble(double value);

// Quotes a field if it contains a comma or quote.
std::string CsvField(std::string_view value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based source line of each row, for error messages.
  std::vector<int> lines;

  int Column(std::string_view name) const;  // -1 if absent
};

// Reads a headed CSV file. Throws IoError / ParseError / InputError (empty).
CsvTable ReadCsv(const std::filesystem::path& path);

void WriteTextFile(const std::filesystem::path& path, const std::string& text);
std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace cinet

#endif  // CINET_CSV_H_
