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

#include "qmem/kv_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace qmem {

namespace {

std::string_view trim(std::string_view s, std::size_t *lead = nullptr) {
    std::size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) {
        ++b;
    }
    std::size_t e = s.size();
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) {
        --e;
    }
    if (lead != nullptr) {
        *lead = b;
    }
    return s.substr(b, e - b);
}

}  // namespace

ParseError::ParseError(const std::string &what, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

KvDocument KvDocument::parse(std::string_view text) {
    KvDocument doc;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = raw.find('#'); hash != std::string_view::npos) {
            raw = raw.substr(0, hash);
        }
        std::size_t lead = 0;
        const std::string_view line = trim(raw, &lead);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ParseError("unterminated section header", line_no, lead + 1);
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            doc.sections_[section];
            continue;
        }
        const std::size_t eq = raw.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected 'key = value'", line_no, lead + 1);
        }
        const std::string key(trim(raw.substr(0, eq)));
        if (key.empty()) {
            throw ParseError("empty key", line_no, lead + 1);
        }
        std::size_t vlead = 0;
        const std::string_view value = trim(raw.substr(eq + 1), &vlead);
        doc.sections_[section][key] = KvEntry{std::string(value), line_no, eq + 2 + vlead};
    }
    return doc;
}

KvDocument KvDocument::load(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open file '" + path + "'", 0, 0);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

bool KvDocument::has(const std::string &section, const std::string &key) const {
    return find(section, key) != nullptr;
}

const KvEntry *KvDocument::find(const std::string &section, const std::string &key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) {
        return nullptr;
    }
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

const KvEntry &KvDocument::require(const std::string &section, const std::string &key) const {
    const KvEntry *e = find(section, key);
    if (e == nullptr) {
        const std::string where = section.empty() ? key : "[" + section + "] " + key;
        throw ParseError("missing key '" + where + "'", 0, 0);
    }
    return *e;
}

std::optional<double> KvDocument::get_double(const std::string &section, const std::string &key) const {
    const KvEntry *e = find(section, key);
    if (e == nullptr) {
        return std::nullopt;
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(e->value, &used);
        if (used != e->value.size()) {
            throw ParseError("trailing characters in number", e->line, e->column + used);
        }
        return v;
    } catch (const std::logic_error &) {
        throw ParseError("expected a number for '" + key + "'", e->line, e->column);
    }
}

std::optional<long long> KvDocument::get_int(const std::string &section, const std::string &key) const {
    const KvEntry *e = find(section, key);
    if (e == nullptr) {
        return std::nullopt;
    }
    long long v = 0;
    const auto *first = e->value.data();
    const auto *last = first + e->value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ParseError("expected an integer for '" + key + "'", e->line, e->column);
    }
    return v;
}

std::optional<std::string> KvDocument::get_string(const std::string &section, const std::string &key) const {
    const KvEntry *e = find(section, key);
    if (e == nullptr) {
        return std::nullopt;
    }
    return e->value;
}

}  // namespace qmem
