// Copyright 2026 The thermshadow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "thermshadow/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace thermshadow {

namespace {

std::string location(const std::string& source, int line) {
    return line > 0 ? source + ":" + std::to_string(line) : source;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool valid_key(std::string_view k) {
    return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) {
        return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) ||
               c == '_' || c == '.' || c == '-';
    });
}

std::vector<std::string> split_list(std::string_view raw) {
    std::vector<std::string> out;
    raw = trim(raw);
    if (raw.empty()) return out;
    while (true) {
        const std::size_t comma = raw.find(',');
        out.emplace_back(trim(raw.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        raw = raw.substr(comma + 1);
    }
    return out;
}

template <typename T>
bool parse_scalar(std::string_view s, T& out) {
    s = trim(s);
    if (s.empty()) return false;
    if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (s.front() == '-') return false;
    }
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) return false;
    if constexpr (std::is_floating_point_v<T>) return std::isfinite(out);
    return true;
}

bool parse_bool(std::string_view s, bool& out) {
    s = trim(s);
    if (s == "true") out = true;
    else if (s == "false") out = false;
    else return false;
    return true;
}

const char* type_name(ValueType t) {
    switch (t) {
        case ValueType::Int: return "an integer";
        case ValueType::UInt: return "a nonnegative integer";
        case ValueType::Double: return "a finite number";
        case ValueType::Bool: return "true or false";
        case ValueType::String: return "a string";
        case ValueType::IntList: return "a list of integers";
        case ValueType::UIntList: return "a list of nonnegative integers";
        case ValueType::DoubleList: return "a list of finite numbers";
        default: return "a list of strings";
    }
}

bool well_typed(ValueType t, const std::string& raw) {
    switch (t) {
        case ValueType::Int: {
            std::int64_t v;
            return parse_scalar(raw, v);
        }
        case ValueType::UInt: {
            std::uint64_t v;
            return parse_scalar(raw, v);
        }
        case ValueType::Double: {
            double v;
            return parse_scalar(raw, v);
        }
        case ValueType::Bool: {
            bool v;
            return parse_bool(raw, v);
        }
        case ValueType::String: return true;
        case ValueType::IntList:
            for (const auto& s : split_list(raw)) {
                std::int64_t v;
                if (!parse_scalar(s, v)) return false;
            }
            return true;
        case ValueType::UIntList:
            for (const auto& s : split_list(raw)) {
                std::uint64_t v;
                if (!parse_scalar(s, v)) return false;
            }
            return true;
        case ValueType::DoubleList:
            for (const auto& s : split_list(raw)) {
                double v;
                if (!parse_scalar(s, v)) return false;
            }
            return true;
        case ValueType::StringList:
            for (const auto& s : split_list(raw))
                if (s.empty()) return false;
            return true;
    }
    return false;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(location(source, line) + ": " + message), line_(line) {}

Config Config::parse(std::string_view text, std::string source) {
    Config cfg;
    cfg.source_ = std::move(source);
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(cfg.source_, line_no, "expected `key = value`");
        const std::string key(trim(line.substr(0, eq)));
        if (!valid_key(key)) throw ConfigError(cfg.source_, line_no, "invalid key '" + key + "'");
        if (cfg.entries_.count(key)) {
            throw ConfigError(cfg.source_, line_no,
                              "duplicate key '" + key + "' (first set on line " +
                                  std::to_string(cfg.entries_.at(key).line) + ")");
        }
        cfg.entries_[key] = {std::string(trim(line.substr(eq + 1))), line_no};
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = {value, 0}; }

void Config::validate(std::span<const KeySpec> schema) {
    for (const auto& [key, e] : entries_) {
        const auto it = std::find_if(schema.begin(), schema.end(), [&](const KeySpec& s) { return s.key == key; });
        if (it == schema.end()) throw ConfigError(source_, e.line, "unknown key '" + key + "'");
    }
    types_.clear();
    for (const auto& spec : schema) {
        types_[spec.key] = spec.type;
        auto it = entries_.find(spec.key);
        if (it == entries_.end()) {
            if (!spec.default_value) throw ConfigError(source_, 0, "missing required key '" + spec.key + "'");
            entries_[spec.key] = {*spec.default_value, 0};
            continue;
        }
        const Entry& e = it->second;
        if (!well_typed(spec.type, e.raw)) {
            throw ConfigError(source_, e.line, "key '" + spec.key + "' must be " + type_name(spec.type));
        }
        if (!spec.choices.empty()) {
            const auto values = spec.type == ValueType::StringList ? split_list(e.raw)
                                                                   : std::vector<std::string>{e.raw};
            for (const auto& v : values) {
                if (std::find(spec.choices.begin(), spec.choices.end(), v) == spec.choices.end()) {
                    std::string allowed;
                    for (const auto& c : spec.choices) allowed += (allowed.empty() ? "" : ", ") + c;
                    throw ConfigError(source_, e.line,
                                      "key '" + spec.key + "' has value '" + v + "'; allowed: " + allowed);
                }
            }
        }
    }
}

const Config::Entry& Config::entry(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(source_, 0, "missing key '" + key + "'");
    return it->second;
}

void Config::fail(const std::string& key, const std::string& message) const {
    throw ConfigError(source_, entry(key).line, "key '" + key + "': " + message);
}

std::int64_t Config::get_int(const std::string& key) const {
    std::int64_t v;
    if (!parse_scalar(entry(key).raw, v)) fail(key, "expected an integer");
    return v;
}

std::uint64_t Config::get_uint(const std::string& key) const {
    std::uint64_t v;
    if (!parse_scalar(entry(key).raw, v)) fail(key, "expected a nonnegative integer");
    return v;
}

double Config::get_double(const std::string& key) const {
    double v;
    if (!parse_scalar(entry(key).raw, v)) fail(key, "expected a finite number");
    return v;
}

bool Config::get_bool(const std::string& key) const {
    bool v;
    if (!parse_bool(entry(key).raw, v)) fail(key, "expected true or false");
    return v;
}

std::string Config::get_string(const std::string& key) const { return entry(key).raw; }

std::vector<std::int64_t> Config::get_ints(const std::string& key) const {
    std::vector<std::int64_t> out;
    for (const auto& s : split_list(entry(key).raw)) {
        std::int64_t v;
        if (!parse_scalar(s, v)) fail(key, "expected a list of integers");
        out.push_back(v);
    }
    return out;
}

std::vector<std::uint64_t> Config::get_uints(const std::string& key) const {
    std::vector<std::uint64_t> out;
    for (const auto& s : split_list(entry(key).raw)) {
        std::uint64_t v;
        if (!parse_scalar(s, v)) fail(key, "expected a list of nonnegative integers");
        out.push_back(v);
    }
    return out;
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : split_list(entry(key).raw)) {
        double v;
        if (!parse_scalar(s, v)) fail(key, "expected a list of numbers");
        out.push_back(v);
    }
    return out;
}

std::vector<std::string> Config::get_strings(const std::string& key) const { return split_list(entry(key).raw); }

nlohmann::json Config::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, type] : types_) {
        switch (type) {
            case ValueType::Int: j[key] = get_int(key); break;
            case ValueType::UInt: j[key] = get_uint(key); break;
            case ValueType::Double: j[key] = get_double(key); break;
            case ValueType::Bool: j[key] = get_bool(key); break;
            case ValueType::String: j[key] = get_string(key); break;
            case ValueType::IntList: j[key] = get_ints(key); break;
            case ValueType::UIntList: j[key] = get_uints(key); break;
            case ValueType::DoubleList: j[key] = get_doubles(key); break;
            case ValueType::StringList: j[key] = get_strings(key); break;
        }
    }
    return j;
}

std::string Config::to_text() const {
    std::string out;
    for (const auto& [key, e] : entries_) out += key + " = " + e.raw + "\n";
    return out;
}

}  // namespace thermshadow
