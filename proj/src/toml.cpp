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

#include "poi/toml.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace poi::toml {

namespace {

struct Cursor {
  const std::string& line;
  std::size_t pos = 0;
  std::size_t line_no;

  Cursor(const std::string& l, std::size_t n) : line(l), line_no(n) {}

  bool eof() const { return pos >= line.size(); }
  char peek() const { return line[pos]; }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) {
      ++pos;
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_no, msg);
  }
};

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_key(Cursor& cur) {
  // One or more bare segments joined by dots.
  std::string key;
  for (;;) {
    std::string segment;
    while (!cur.eof() && is_bare_key_char(cur.peek())) {
      segment.push_back(cur.line[cur.pos++]);
    }
    if (segment.empty()) {
      cur.fail("expected key");
    }
    if (!key.empty()) {
      key.push_back('.');
    }
    key += segment;
    cur.skip_ws();
    if (!cur.eof() && cur.peek() == '.') {
      ++cur.pos;
      cur.skip_ws();
      continue;
    }
    return key;
  }
}

std::string parse_basic_string(Cursor& cur) {
  // Opening quote already consumed by caller check; consume it here.
  ++cur.pos;
  std::string out;
  while (!cur.eof()) {
    char c = cur.line[cur.pos++];
    if (c == '"') {
      return out;
    }
    if (c == '\\') {
      if (cur.eof()) {
        cur.fail("unterminated escape sequence");
      }
      char esc = cur.line[cur.pos++];
      switch (esc) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        default:
          cur.fail(std::string("unsupported escape \\") + esc);
      }
      continue;
    }
    out.push_back(c);
  }
  cur.fail("unterminated string");
}

Value parse_value(Cursor& cur);

Value parse_array(Cursor& cur) {
  ++cur.pos;  // consume '['
  Array items;
  cur.skip_ws();
  if (!cur.eof() && cur.peek() == ']') {
    ++cur.pos;
    return Value{items};
  }
  for (;;) {
    cur.skip_ws();
    if (cur.eof()) {
      cur.fail("unterminated array");
    }
    items.push_back(parse_value(cur));
    cur.skip_ws();
    if (cur.eof()) {
      cur.fail("unterminated array");
    }
    char c = cur.line[cur.pos++];
    if (c == ']') {
      return Value{items};
    }
    if (c != ',') {
      cur.fail("expected ',' or ']' in array");
    }
    cur.skip_ws();
    // Trailing comma before close.
    if (!cur.eof() && cur.peek() == ']') {
      ++cur.pos;
      return Value{items};
    }
  }
}

Value parse_number_or_keyword(Cursor& cur) {
  std::string token;
  while (!cur.eof()) {
    char c = cur.peek();
    if (c == ',' || c == ']' || c == '#' || c == ' ' || c == '\t') {
      break;
    }
    token.push_back(c);
    ++cur.pos;
  }
  if (token.empty()) {
    cur.fail("expected value");
  }
  if (token == "true") {
    return Value{true};
  }
  if (token == "false") {
    return Value{false};
  }

  // Strip TOML digit separators before numeric conversion.
  std::string digits;
  digits.reserve(token.size());
  for (char c : token) {
    if (c != '_') {
      digits.push_back(c);
    }
  }
  const bool looks_float = digits.find_first_of(".eE") != std::string::npos &&
                           digits.find_first_of("0123456789") !=
                               std::string::npos;
  if (!looks_float) {
    std::int64_t iv = 0;
    auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), iv);
    if (ec == std::errc() && ptr == digits.data() + digits.size()) {
      return Value{iv};
    }
  }
  try {
    std::size_t consumed = 0;
    double dv = std::stod(digits, &consumed);
    if (consumed == digits.size()) {
      return Value{dv};
    }
  } catch (const std::exception&) {
    // fall through to error below
  }
  cur.fail("invalid value '" + token + "'");
}

Value parse_value(Cursor& cur) {
  cur.skip_ws();
  if (cur.eof()) {
    cur.fail("expected value");
  }
  char c = cur.peek();
  if (c == '"') {
    return Value{parse_basic_string(cur)};
  }
  if (c == '[') {
    return parse_array(cur);
  }
  return parse_number_or_keyword(cur);
}

void expect_line_end(Cursor& cur) {
  cur.skip_ws();
  if (cur.eof() || cur.peek() == '#') {
    return;
  }
  cur.fail("unexpected trailing content");
}

}  // namespace

std::string Table::get_string(const std::string& key,
                              const std::string& fallback) const {
  const Value* v = find(key);
  return (v != nullptr && v->is_string()) ? v->as_string() : fallback;
}

std::int64_t Table::get_int(const std::string& key,
                            std::int64_t fallback) const {
  const Value* v = find(key);
  return (v != nullptr && v->is_int()) ? v->as_int() : fallback;
}

double Table::get_float(const std::string& key, double fallback) const {
  const Value* v = find(key);
  if (v == nullptr || (!v->is_float() && !v->is_int())) {
    return fallback;
  }
  return v->as_float();
}

bool Table::get_bool(const std::string& key, bool fallback) const {
  const Value* v = find(key);
  return (v != nullptr && v->is_bool()) ? v->as_bool() : fallback;
}

std::string Table::require_string(const std::string& key) const {
  const Value* v = find(key);
  if (v == nullptr || !v->is_string()) {
    throw std::runtime_error("config: missing required string '" + key + "'");
  }
  return v->as_string();
}

std::int64_t Table::require_int(const std::string& key) const {
  const Value* v = find(key);
  if (v == nullptr || !v->is_int()) {
    throw std::runtime_error("config: missing required integer '" + key +
                             "'");
  }
  return v->as_int();
}

double Table::require_float(const std::string& key) const {
  const Value* v = find(key);
  if (v == nullptr || (!v->is_float() && !v->is_int())) {
    throw std::runtime_error("config: missing required number '" + key + "'");
  }
  return v->as_float();
}

const Array& Table::require_array(const std::string& key) const {
  const Value* v = find(key);
  if (v == nullptr || !v->is_array()) {
    throw std::runtime_error("config: missing required array '" + key + "'");
  }
  return v->as_array();
}

Table parse(const std::string& text) {
  Table table;
  std::string section;
  std::istringstream stream(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    Cursor cur(line, line_no);
    cur.skip_ws();
    if (cur.eof() || cur.peek() == '#') {
      continue;
    }
    if (cur.peek() == '[') {
      ++cur.pos;
      cur.skip_ws();
      section = parse_key(cur);
      cur.skip_ws();
      if (cur.eof() || cur.peek() != ']') {
        cur.fail("expected ']' to close section header");
      }
      ++cur.pos;
      expect_line_end(cur);
      continue;
    }
    std::string key = parse_key(cur);
    cur.skip_ws();
    if (cur.eof() || cur.peek() != '=') {
      cur.fail("expected '=' after key '" + key + "'");
    }
    ++cur.pos;
    Value value = parse_value(cur);
    expect_line_end(cur);

    std::string full_key = section.empty() ? key : section + "." + key;
    if (table.contains(full_key)) {
      cur.fail("duplicate key '" + full_key + "'");
    }
    table.set(full_key, std::move(value));
  }
  return table;
}

Table parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace poi::toml
