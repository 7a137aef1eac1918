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

#include <stdexcept>
#include <string>

#include <doctest.h>

namespace toml = poi::toml;

TEST_SUITE("toml") {

TEST_CASE("parses top-level scalars of every supported type") {
  const toml::Table t = toml::parse(
      "name = \"onemap\"\n"
      "count = 42\n"
      "threshold = 0.95\n"
      "enabled = true\n"
      "disabled = false\n");
  CHECK(t.require_string("name") == "onemap");
  CHECK(t.require_int("count") == 42);
  CHECK(t.require_float("threshold") == doctest::Approx(0.95));
  CHECK(t.get_bool("enabled", false));
  CHECK_FALSE(t.get_bool("disabled", true));
}

TEST_CASE("section headers qualify keys") {
  const toml::Table t = toml::parse(
      "top = 1\n"
      "[match]\n"
      "radius_m = 100\n"
      "[unify]\n"
      "ranking = \"r.toml\"\n");
  CHECK(t.require_int("top") == 1);
  CHECK(t.require_int("match.radius_m") == 100);
  CHECK(t.require_string("unify.ranking") == "r.toml");
  CHECK_FALSE(t.contains("radius_m"));
}

TEST_CASE("dotted keys qualify like sections") {
  const toml::Table t = toml::parse("field_paths.name = \"properties.name\"\n");
  CHECK(t.require_string("field_paths.name") == "properties.name");
}

TEST_CASE("arrays parse with mixed whitespace") {
  const toml::Table t = toml::parse(
      "sources = [\"onemap\", \"sla\" , \"osm\"]\n"
      "weights = [0.8, 0.2]\n"
      "empty = []\n");
  const toml::Array& sources = t.require_array("sources");
  REQUIRE(sources.size() == 3);
  CHECK(sources[0].as_string() == "onemap");
  CHECK(sources[2].as_string() == "osm");
  const toml::Array& weights = t.require_array("weights");
  REQUIRE(weights.size() == 2);
  CHECK(weights[0].as_float() == doctest::Approx(0.8));
  CHECK(t.require_array("empty").empty());
}

TEST_CASE("comments and blank lines are ignored") {
  const toml::Table t = toml::parse(
      "# leading comment\n"
      "\n"
      "key = 1  # trailing comment\n"
      "text = \"a # not a comment\"\n");
  CHECK(t.require_int("key") == 1);
  CHECK(t.require_string("text") == "a # not a comment");
}

TEST_CASE("string escapes") {
  const toml::Table t = toml::parse(R"(s = "a\"b\\c")" "\n");
  CHECK(t.require_string("s") == "a\"b\\c");
}

TEST_CASE("integers promote to float transparently") {
  const toml::Table t = toml::parse("x = 3\n");
  CHECK(t.get_float("x", 0.0) == doctest::Approx(3.0));
  CHECK(t.require_float("x") == doctest::Approx(3.0));
}

TEST_CASE("negative numbers and exponents") {
  const toml::Table t = toml::parse("a = -7\nb = -0.5\nc = 1e3\n");
  CHECK(t.require_int("a") == -7);
  CHECK(t.require_float("b") == doctest::Approx(-0.5));
  CHECK(t.require_float("c") == doctest::Approx(1000.0));
}

TEST_CASE("get_* fall back when keys are absent") {
  const toml::Table t = toml::parse("present = 1\n");
  CHECK(t.get_int("absent", 9) == 9);
  CHECK(t.get_string("absent", "d") == "d");
  CHECK(t.get_float("absent", 0.5) == doctest::Approx(0.5));
  CHECK(t.get_bool("absent", true));
  CHECK(t.find("absent") == nullptr);
  CHECK(t.find("present") != nullptr);
}

TEST_CASE("require_* throw for missing keys") {
  const toml::Table t = toml::parse("x = 1\n");
  CHECK_THROWS(t.require_string("missing"));
  CHECK_THROWS(t.require_int("missing"));
  CHECK_THROWS(t.require_array("missing"));
}

TEST_CASE("parse errors carry 1-based line numbers") {
  try {
    toml::parse("good = 1\nbad line without equals\n");
    FAIL("expected ParseError");
  } catch (const toml::ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("duplicate keys are rejected") {
  CHECK_THROWS_AS(toml::parse("a = 1\na = 2\n"), toml::ParseError);
  CHECK_THROWS_AS(toml::parse("[s]\nk = 1\nk = 2\n"), toml::ParseError);
}

TEST_CASE("unterminated strings and arrays are rejected") {
  CHECK_THROWS_AS(toml::parse("s = \"oops\n"), toml::ParseError);
  CHECK_THROWS_AS(toml::parse("a = [1, 2\n"), toml::ParseError);
}

TEST_CASE("parse_file reads from disk and reports unreadable paths") {
  CHECK_THROWS_AS(toml::parse_file("/nonexistent/nope.toml"),
                  std::runtime_error);
}

}  // TEST_SUITE("toml")
