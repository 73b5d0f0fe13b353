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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mdsw::text {

// Canonical text form used for all keyword matching:
//   * fullwidth ASCII variants (U+FF01..U+FF5E) fold to their ASCII forms
//   * ideographic space (U+3000) folds to U+0020
//   * halfwidth CJK punctuation (U+FF61..U+FF64) folds to the regular forms
//   * ASCII A-Z fold to a-z
// Everything else passes through unchanged; output is valid UTF-8 whenever
// the input is. Invalid bytes are copied verbatim and reported through the
// return value so ingestion can count them without repairing rows.
//
// Folding never grows the text, so in-place use via normalize() is cheap.

/// Appends the canonical form of `in` to `out`. Returns false if `in`
/// contained bytes that are not valid UTF-8 (they are passed through).
bool normalize_append(std::string_view in, std::string& out);

std::string normalize(std::string_view in);

bool utf8_valid(std::string_view in);

/// Length in bytes of the longest prefix of `in` that is complete, valid
/// UTF-8 (a trailing truncated sequence is not an error).
std::size_t utf8_valid_prefix(std::string_view in, bool* saw_invalid);

/// Streaming GBK -> UTF-8 converter on top of iconv(3). Input may be split
/// at arbitrary byte boundaries; undecodable bytes are replaced by U+FFFD
/// and counted.
class GbkDecoder {
 public:
  GbkDecoder();
  ~GbkDecoder();
  GbkDecoder(const GbkDecoder&) = delete;
  GbkDecoder& operator=(const GbkDecoder&) = delete;

  /// Converts `in` (appending to `out`); keeps an incomplete trailing
  /// multibyte sequence buffered for the next call. Call with flush=true
  /// once at end of stream.
  void convert(std::string_view in, std::string& out, bool flush = false);

  std::uint64_t bad_bytes() const { return bad_bytes_; }
  void reset();

 private:
  void* cd_;  // iconv_t
  char pending_[8];
  std::size_t pending_len_ = 0;
  std::uint64_t bad_bytes_ = 0;
};

/// FNV-1a 64-bit, used for config/dataset fingerprints in run metadata.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string fnv1a64_hex(std::string_view data);

/// Fingerprint of a whole file (streamed). Throws Error(IoError).
std::string file_fingerprint(const std::string& path);

std::string_view trim(std::string_view s);

}  // namespace mdsw::text
