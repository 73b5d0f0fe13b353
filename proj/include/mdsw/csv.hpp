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

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace mdsw {

// RFC 4180 style parsing with a configurable single-byte delimiter.
// Quoted fields may contain delimiters, newlines and doubled quotes.
// Rows end at LF; a CR immediately before the LF is stripped.

/// Splits one complete row (no trailing newline) into fields. Views point
/// into `row` or, for fields needing unquoting, into `scratch`.
void csv_split_row(std::string_view row, char delimiter,
                   std::vector<std::string_view>& fields, std::string& scratch);

/// Pull-based row reader over an arbitrary byte source.
class CsvReader {
 public:
  /// `refill` copies up to `cap` bytes into `dst`, returning 0 at EOF.
  using Refill = std::function<std::size_t(char* dst, std::size_t cap)>;

  explicit CsvReader(Refill refill, char delimiter = ',',
                     std::size_t buffer_size = 1 << 20);

  /// Advances to the next row. Field views stay valid until the next call.
  /// Returns false at end of input. A final line without a trailing newline
  /// is returned; a trailing empty line is not.
  bool next_row(std::vector<std::string_view>& fields);

  /// Bytes of one row may not exceed this (guards the streaming bound).
  static constexpr std::size_t kMaxRowBytes = 64u << 20;

 private:
  bool fill_more();

  Refill refill_;
  char delimiter_;
  std::string buf_;
  std::size_t pos_ = 0;   // start of the unconsumed region
  std::size_t end_ = 0;   // end of valid data in buf_
  bool eof_ = false;
  std::string scratch_;
};

/// Scans `data` for the last row boundary (LF at quote depth zero), given the
/// quote parity at the start of `data`. Returns npos if none. Updates
/// `in_quotes` to the parity at the returned boundary (or at end of data if
/// npos). Used to cut worker-sized blocks of whole rows out of a stream.
std::size_t csv_last_row_boundary(std::string_view data, bool& in_quotes);

/// Appends one field to `out`, quoting when it contains the delimiter, a
/// quote, CR or LF.
void csv_append_field(std::string& out, std::string_view field, char delimiter);

void csv_append_row(std::string& out, const std::vector<std::string_view>& fields,
                    char delimiter);

}  // namespace mdsw
