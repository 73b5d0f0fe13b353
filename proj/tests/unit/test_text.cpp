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

#include "mdsw/text.hpp"

using namespace mdsw;

TEST_CASE("normalize folds fullwidth ascii and case") {
  CHECK(text::normalize("ＡＢＣ") == "abc");
  CHECK(text::normalize("ＭＲＩ Ｓｏｆｔｗａｒｅ ２．０") == "mri software 2.0");
  CHECK(text::normalize("Deep Learning") == "deep learning");
  CHECK(text::normalize("ＣＮＮ（卷积）") == "cnn(卷积)");
}

TEST_CASE("normalize folds ideographic space and halfwidth punctuation") {
  CHECK(text::normalize("a\xE3\x80\x80z") == "a z");          // U+3000
  CHECK(text::normalize("\xEF\xBD\xA1") == "\xE3\x80\x82");   // U+FF61 -> U+3002
}

TEST_CASE("normalize leaves regular CJK untouched") {
  std::string s = "深度学习软件用于肺结节检测";
  CHECK(text::normalize(s) == s);
}

TEST_CASE("normalize is idempotent") {
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    std::string s;
    for (int k = 0; k < 40; ++k) {
      int pick = static_cast<int>(rng() % 4);
      if (pick == 0) s += static_cast<char>('A' + rng() % 26);
      else if (pick == 1) s += "软";
      else if (pick == 2) s += "Ｘ";
      else s += static_cast<char>('0' + rng() % 10);
    }
    std::string once = text::normalize(s);
    CHECK(text::normalize(once) == once);
  }
}

TEST_CASE("invalid utf8 passes through but is reported") {
  std::string bad = "ok\xFFzz";
  std::string out;
  CHECK_FALSE(text::normalize_append(bad, out));
  CHECK(out == bad);
}

TEST_CASE("utf8 validity") {
  CHECK(text::utf8_valid("plain"));
  CHECK(text::utf8_valid("软件"));
  CHECK_FALSE(text::utf8_valid("\xC8\xED"));  // GBK bytes are not UTF-8
  bool saw_invalid = false;
  // truncated trailing sequence is incomplete, not invalid
  std::string truncated = "abc\xE8\xBD";
  CHECK(text::utf8_valid_prefix(truncated, &saw_invalid) == 3);
  CHECK_FALSE(saw_invalid);
}

TEST_CASE("gbk decoder handles chunk splits and bad bytes") {
  // 软件 in GBK is C8 ED BC FE
  text::GbkDecoder dec;
  std::string out;
  dec.convert(std::string_view("\xC8", 1), out);
  dec.convert(std::string_view("\xED\xBC\xFE", 3), out, /*flush=*/true);
  CHECK(out == "软件");
  CHECK(dec.bad_bytes() == 0);

  text::GbkDecoder dec2;
  std::string out2;
  dec2.convert(std::string_view("\xC8\xED\xFF\xFF\xC8\xED", 6), out2, true);
  CHECK(out2.find("软") != std::string::npos);
  CHECK(dec2.bad_bytes() > 0);
}

TEST_CASE("fnv fingerprints are stable and input sensitive") {
  CHECK(text::fnv1a64_hex("abc") == text::fnv1a64_hex("abc"));
  CHECK(text::fnv1a64_hex("abc") != text::fnv1a64_hex("abd"));
  CHECK(text::fnv1a64_hex("").size() == 16);
}

TEST_CASE("trim strips ascii whitespace") {
  CHECK(text::trim("  a b \r\n") == "a b");
  CHECK(text::trim("\t\t") == "");
}
