// Copyright 2026 The qgnn-tracking Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Minimal header-addressed CSV reading and shortest round-trip number
 * formatting shared by the event and graph file formats.
 */
#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qgnn::io {

/**
 * Reads a comma-separated file whose first non-comment line names the
 * columns. Leading lines starting with '#' are kept as comments.
 */
class CsvReader {
  public:
    explicit CsvReader(const std::filesystem::path &path);

    /// Column index of `name`; throws if the header lacks it.
    [[nodiscard]] std::size_t column(std::string_view name) const;
    [[nodiscard]] bool has_column(std::string_view name) const;

    /// Advance to the next non-empty row. Returns false at end of file.
    bool next();
    /// 1-based data row number (header excluded).
    [[nodiscard]] std::size_t row_number() const { return row_; }

    [[nodiscard]] std::int64_t get_int(std::size_t col) const;
    [[nodiscard]] double get_double(std::size_t col) const;
    [[nodiscard]] std::string_view get(std::size_t col) const;

    [[nodiscard]] const std::filesystem::path &path() const { return path_; }
    [[nodiscard]] const std::vector<std::string> &comments() const { return comments_; }

  private:
    [[noreturn]] void fail_row(const std::string &what) const;

    std::filesystem::path path_;
    std::ifstream in_;
    std::unordered_map<std::string, std::size_t> header_;
    std::string line_;
    std::vector<std::string_view> fields_;
    std::vector<std::string> comments_;
    std::size_t row_ = 0;
};

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

} // namespace qgnn::io
