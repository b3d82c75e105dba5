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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace thermshadow {

/// Config validation failure; what() carries "<source>:<line>: message".
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, const std::string& message);
    int line() const noexcept { return line_; }

private:
    int line_;
};

enum class ValueType { Int, UInt, Double, Bool, String, IntList, UIntList, DoubleList, StringList };

struct KeySpec {
    std::string key;
    ValueType type;
    /// Default in config syntax; nullopt marks a required key.
    std::optional<std::string> default_value;
    std::vector<std::string> choices = {};  // String / StringList only
};

/// Flat `key = value` text. '#' starts a comment, lists are comma separated,
/// every key may appear once. Values are typed only against a schema.
class Config {
public:
    static Config parse(std::string_view text, std::string source = "<config>");
    static Config load(const std::string& path);

    const std::string& source() const noexcept { return source_; }
    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    /// Inserts or replaces a value, as if written on line 0.
    void set(const std::string& key, const std::string& value);

    /// Rejects unknown keys, missing required keys, malformed values and values
    /// outside `choices`, then fills defaults. Errors name the offending line.
    void validate(std::span<const KeySpec> schema);

    std::int64_t get_int(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::vector<std::int64_t> get_ints(const std::string& key) const;
    std::vector<std::uint64_t> get_uints(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<std::string> get_strings(const std::string& key) const;

    /// Typed values of every key in the validated schema.
    nlohmann::json to_json() const;
    /// Canonical text that parses back to the same resolved config.
    std::string to_text() const;

private:
    struct Entry {
        std::string raw;
        int line;
    };
    const Entry& entry(const std::string& key) const;
    [[noreturn]] void fail(const std::string& key, const std::string& message) const;

    std::string source_;
    std::map<std::string, Entry> entries_;
    std::map<std::string, ValueType> types_;
};

}  // namespace thermshadow
