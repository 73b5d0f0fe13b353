// Copyright 2026 the mdsw authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "mdsw/csv.hpp"

using namespace mdsw;

namespace {

std::vector<std::vector<std::string>> read_all(const std::string& data, char delim,
                                               std::size_t chunk = 7) {
  std::size_t served = 0;
  CsvReader reader(
      [&](char* dst, std::size_t cap) {
        std::size_t take = std::min({cap, chunk, data.size() - served});
        std::memcpy(dst, data.data() + served, take);
        served += take;
        return take;
      },
      delim, /*buffer_size=*/16);  // tiny buffer to force compact/refill paths
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string_view> fields;
  while (reader.next_row(fields)) {
    rows.emplace_back(fields.begin(), fields.end());
  }
  return rows;
}

}  // namespace

TEST_CASE("split plain row") {
  std::vector<std::string_view> fields;
  std::string scratch;
  csv_split_row("a,b,c", ',', fields, scratch);
  REQUIRE(fields.size() == 3);
  CHECK(fields[0] == "a");
  CHECK(fields[2] == "c");
}

TEST_CASE("split quoted fields with embedded delimiter, quote, newline") {
  std::vector<std::string_view> fields;
  std::string scratch;
  csv_split_row("\"a,b\",\"x\"\"y\",\"line1\nline2\",tail", ',', fields, scratch);
  REQUIRE(fields.size() == 4);
  CHECK(fields[0] == "a,b");
  CHECK(fields[1] == "x\"y");
  CHECK(fields[2] == "line1\nline2");
  CHECK(fields[3] == "tail");
}

TEST_CASE("trailing empty field and empty row") {
  std::vector<std::string_view> fields;
  std::string scratch;
  csv_split_row("a,", ',', fields, scratch);
  REQUIRE(fields.size() == 2);
  CHECK(fields[1] == "");
  csv_split_row("", ',', fields, scratch);
  REQUIRE(fields.size() == 1);
  CHECK(fields[0] == "");
}

TEST_CASE("reader handles rows across refills and CRLF") {
  auto rows = read_all("a,b\r\nc,\"d\ne\"\nf,g", ',');
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"a", "b"});
  CHECK(rows[1] == std::vector<std::string>{"c", "d\ne"});
  CHECK(rows[2] == std::vector<std::string>{"f", "g"});
}

TEST_CASE("reader ignores a lone trailing newline") {
  CHECK(read_all("a,b\n", ',').size() == 1);
  CHECK(read_all("a,b\nc,d\n", ',').size() == 2);
  CHECK(read_all("", ',').empty());
}

TEST_CASE("tab and pipe delimiters") {
  auto rows = read_all("a\tb\tc\n", '\t');
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].size() == 3);
  rows = read_all("a|b|c\n", '|');
  CHECK(rows[0].size() == 3);
}

TEST_CASE("write then read round trips arbitrary fields") {
  std::mt19937 rng(11);
  auto random_field = [&]() {
    std::string f;
    std::size_t len = rng() % 12;
    for (std::size_t i = 0; i < len; ++i) {
      static const char pool[] = "ab,\"\n\r软x ";
      // pool is utf-8; pick bytes from a short list of full chars
      static const std::vector<std::string> chars = {"a", "b", ",", "\"", "\n",
                                                     "\r", "软", "x", " "};
      f += chars[rng() % chars.size()];
      (void)pool;
    }
    return f;
  };
  for (int round = 0; round < 50; ++round) {
    std::vector<std::vector<std::string>> original;
    std::string blob;
    std::size_t nrows = 1 + rng() % 8;
    for (std::size_t r = 0; r < nrows; ++r) {
      std::vector<std::string> row;
      std::size_t ncols = 1 + rng() % 6;
      for (std::size_t c = 0; c < ncols; ++c) row.push_back(random_field());
      // a row whose single field is empty is indistinguishable from a blank
      // line; nudge it
      if (row.size() == 1 && row[0].empty()) row[0] = "x";
      std::vector<std::string_view> views(row.begin(), row.end());
      csv_append_row(blob, views, ',');
      original.push_back(std::move(row));
    }
    auto rows = read_all(blob, ',', 1 + rng() % 9);
    REQUIRE(rows.size() == original.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      CHECK(rows[r] == original[r]);
    }
  }
}

TEST_CASE("last row boundary respects quote parity") {
  bool q = false;
  CHECK(csv_last_row_boundary("ab\ncd", q) == 2);
  CHECK_FALSE(q);
  q = false;
  CHECK(csv_last_row_boundary("\"ab\ncd\"", q) == std::string_view::npos);
  CHECK_FALSE(q);
  q = false;
  CHECK(csv_last_row_boundary("\"ab", q) == std::string_view::npos);
  CHECK(q);
  q = true;  // starting inside quotes
  CHECK(csv_last_row_boundary("x\"a\nb", q) == 3);
  CHECK_FALSE(q);
}
