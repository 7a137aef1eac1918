/*
 * Copyright 2026 The poiconflate Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef POI_TOML_HPP
#define POI_TOML_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace poi::toml {

// Minimal TOML subset parser covering what the tool's config files use:
// [section] headers, bare/dotted keys, basic "..." strings, integers,
// floats, booleans, single-line arrays, and # comments. Multi-line
// strings, dates, inline tables, and arrays-of-tables are out of scope.

struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<std::string, std::int64_t, double, bool, Array> data;

  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(data); }
  bool is_float() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }

  const std::string& as_string() const { return std::get<std::string>(data); }
  std::int64_t as_int() const { return std::get<std::int64_t>(data); }
  // Integer values promote to double transparently.
  double as_float() const {
    if (is_int()) {
      return static_cast<double>(as_int());
    }
    return std::get<double>(data);
  }
  bool as_bool() const { return std::get<bool>(data); }
  const Array& as_array() const { return std::get<Array>(data); }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Parsed document. Keys are fully qualified ("section.key"); top-level
/// keys have no prefix.
class Table {
 public:
  bool contains(const std::string& key) const {
    return values_.count(key) > 0;
  }
  const Value* find(const std::string& key) const {
    auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }

  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  double get_float(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  std::string require_string(const std::string& key) const;
  std::int64_t require_int(const std::string& key) const;
  double require_float(const std::string& key) const;
  const Array& require_array(const std::string& key) const;

  void set(const std::string& key, Value v) { values_[key] = std::move(v); }
  const std::map<std::string, Value>& values() const { return values_; }

 private:
  std::map<std::string, Value> values_;
};

/// Parse TOML text. Throws ParseError with a 1-based line number on
/// malformed input or duplicate keys.
Table parse(const std::string& text);

/// Parse the file at `path`. Throws std::runtime_error if unreadable.
Table parse_file(const std::string& path);

}  // namespace poi::toml

#endif  // POI_TOML_HPP
