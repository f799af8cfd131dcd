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
#include "qgnn/csv.hpp"
#include "qgnn/events.hpp"

#include <array>

namespace qgnn::io {

using events::IngestError;

CsvReader::CsvReader(const std::filesystem::path &path) : path_{path}, in_{path} {
    if (!in_) {
        throw IngestError("cannot open " + path.string());
    }
    std::string header;
    while (true) {
        if (!std::getline(in_, header)) {
            throw IngestError(path.string() + ": missing header line");
        }
        if (!header.empty() && header.back() == '\r') {
            header.pop_back();
        }
        if (header.empty() || header.front() != '#') {
            break;
        }
        comments_.push_back(header.substr(1));
    }
    std::size_t start = 0;
    std::size_t col = 0;
    while (start <= header.size()) {
        const std::size_t comma = header.find(',', start);
        const std::size_t end = comma == std::string::npos ? header.size() : comma;
        header_.emplace(header.substr(start, end - start), col++);
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
}

std::size_t CsvReader::column(std::string_view name) const {
    auto it = header_.find(std::string{name});
    if (it == header_.end()) {
        throw IngestError(path_.string() + ": missing column '" + std::string{name} + "'");
    }
    return it->second;
}

bool CsvReader::has_column(std::string_view name) const {
    return header_.contains(std::string{name});
}

bool CsvReader::next() {
    while (std::getline(in_, line_)) {
        if (!line_.empty() && line_.back() == '\r') {
            line_.pop_back();
        }
        if (line_.empty()) {
            continue;
        }
        ++row_;
        fields_.clear();
        std::string_view rest{line_};
        while (true) {
            const std::size_t comma = rest.find(',');
            fields_.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(comma + 1);
        }
        if (fields_.size() != header_.size()) {
            fail_row("expected " + std::to_string(header_.size()) + " fields, found " +
                     std::to_string(fields_.size()));
        }
        return true;
    }
    return false;
}

std::string_view CsvReader::get(std::size_t col) const { return fields_.at(col); }

std::int64_t CsvReader::get_int(std::size_t col) const {
    const std::string_view f = get(col);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc{} || ptr != f.data() + f.size()) {
        fail_row("not an integer: '" + std::string{f} + "'");
    }
    return v;
}

double CsvReader::get_double(std::size_t col) const {
    const std::string_view f = get(col);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc{} || ptr != f.data() + f.size()) {
        fail_row("not a number: '" + std::string{f} + "'");
    }
    return v;
}

void CsvReader::fail_row(const std::string &what) const {
    throw IngestError(path_.string() + ": row " + std::to_string(row_) + ": " + what);
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), ptr};
}

} // namespace qgnn::io
