// Copyright 2026 The qmem Authors
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

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qmem {

/// Input error carrying a 1-based source location.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string &what, std::size_t line, std::size_t column);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

/// One `key = value` entry and where its value starts in the source.
struct KvEntry {
    std::string value;
    std::size_t line = 0;
    std::size_t column = 0;
};

/// Plain-text `key = value` document with optional `[section]` headers and
/// `#` comments. Keys outside any section live in section "".
class KvDocument {
  public:
    static KvDocument parse(std::string_view text);
    static KvDocument load(const std::string &path);

    bool has(const std::string &section, const std::string &key) const;
    const KvEntry *find(const std::string &section, const std::string &key) const;
    /// Throws ParseError naming the key when absent.
    const KvEntry &require(const std::string &section, const std::string &key) const;

    std::optional<double> get_double(const std::string &section, const std::string &key) const;
    std::optional<long long> get_int(const std::string &section, const std::string &key) const;
    std::optional<std::string> get_string(const std::string &section, const std::string &key) const;

    const std::map<std::string, std::map<std::string, KvEntry>> &sections() const { return sections_; }

  private:
    std::map<std::string, std::map<std::string, KvEntry>> sections_;
};

}  // namespace qmem
