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

#include "mdsw/csv.hpp"

#include <cstring>

#include "mdsw/error.hpp"

namespace mdsw {

void csv_split_row(std::string_view row, char delimiter,
                   std::vector<std::string_view>& fields, std::string& scratch) {
  fields.clear();
  scratch.clear();
  // unescaped content never exceeds the row length; reserving up front keeps
  // earlier field views valid while later quoted fields append
  if (scratch.capacity() < row.size()) scratch.reserve(row.size());
  const char* p = row.data();
  const std::size_t n = row.size();
  std::size_t i = 0;
  while (true) {
    if (i < n && p[i] == '"') {
      // quoted field: unescape doubled quotes into scratch
      std::size_t out_begin = scratch.size();
      ++i;
      while (i < n) {
        if (p[i] == '"') {
          if (i + 1 < n && p[i + 1] == '"') {
            scratch.push_back('"');
            i += 2;
          } else {
            ++i;
            break;
          }
        } else {
          scratch.push_back(p[i]);
          ++i;
        }
      }
      fields.emplace_back(scratch.data() + out_begin, scratch.size() - out_begin);
      // skip anything up to the next delimiter (tolerates stray bytes after
      // the closing quote)
      while (i < n && p[i] != delimiter) ++i;
    } else {
      std::size_t begin = i;
      const void* hit = std::memchr(p + i, delimiter, n - i);
      std::size_t fend = hit ? static_cast<std::size_t>(static_cast<const char*>(hit) - p) : n;
      fields.emplace_back(p + begin, fend - begin);
      i = fend;
    }
    if (i >= n) break;
    ++i;  // consume delimiter
    if (i == n) {
      fields.emplace_back();  // trailing empty field
      break;
    }
  }
}

CsvReader::CsvReader(Refill refill, char delimiter, std::size_t buffer_size)
    : refill_(std::move(refill)), delimiter_(delimiter) {
  buf_.resize(buffer_size);
}

bool CsvReader::fill_more() {
  if (eof_) return false;
  // compact: move the unconsumed tail to the front
  if (pos_ > 0) {
    std::memmove(buf_.data(), buf_.data() + pos_, end_ - pos_);
    end_ -= pos_;
    pos_ = 0;
  }
  if (end_ == buf_.size()) {
    if (buf_.size() >= kMaxRowBytes) {
      fail(Errc::ParseError, "CSV row exceeds maximum row size");
    }
    buf_.resize(buf_.size() * 2);
  }
  std::size_t got = refill_(buf_.data() + end_, buf_.size() - end_);
  if (got == 0) {
    eof_ = true;
    return false;
  }
  end_ += got;
  return true;
}

bool CsvReader::next_row(std::vector<std::string_view>& fields) {
  while (true) {
    // find row terminator from pos_, honoring quotes
    const char* base = buf_.data();
    bool in_quotes = false;
    std::size_t i = pos_;
    std::size_t row_end = std::string::npos;
    while (i < end_) {
      char c = base[i];
      if (in_quotes) {
        if (c == '"') in_quotes = false;
      } else if (c == '"') {
        in_quotes = true;
      } else if (c == '\n') {
        row_end = i;
        break;
      }
      ++i;
    }
    if (row_end == std::string::npos) {
      if (fill_more()) continue;
      // EOF: emit the remaining bytes as a final row, if any
      if (pos_ == end_) return false;
      row_end = end_;
    }
    std::size_t len = row_end - pos_;
    if (len > 0 && base[pos_ + len - 1] == '\r') --len;
    std::string_view row(base + pos_, len);
    pos_ = row_end < end_ ? row_end + 1 : end_;
    if (row.empty() && pos_ >= end_ && eof_) {
      // lone trailing newline
      return false;
    }
    csv_split_row(row, delimiter_, fields, scratch_);
    return true;
  }
}

std::size_t csv_last_row_boundary(std::string_view data, bool& in_quotes) {
  // Walk forward tracking quote parity, remembering the last LF seen outside
  // quotes. Quote characters are rare in registry text, so scan with memchr
  // hops between quotes and newlines.
  std::size_t last = std::string_view::npos;
  bool q = in_quotes;
  std::size_t i = 0;
  const std::size_t n = data.size();
  while (i < n) {
    if (q) {
      const void* hit = std::memchr(data.data() + i, '"', n - i);
      if (!hit) {
        i = n;
        break;
      }
      i = static_cast<std::size_t>(static_cast<const char*>(hit) - data.data()) + 1;
      q = false;
    } else {
      // next quote or newline, whichever first
      const char* pq = static_cast<const char*>(std::memchr(data.data() + i, '"', n - i));
      const char* pn = static_cast<const char*>(std::memchr(data.data() + i, '\n', n - i));
      if (!pq && !pn) {
        i = n;
        break;
      }
      if (pn && (!pq || pn < pq)) {
        last = static_cast<std::size_t>(pn - data.data());
        i = last + 1;
      } else {
        i = static_cast<std::size_t>(pq - data.data()) + 1;
        q = true;
      }
    }
  }
  in_quotes = q;
  return last;
}

void csv_append_field(std::string& out, std::string_view field, char delimiter) {
  bool needs_quote = false;
  for (char c : field) {
    if (c == delimiter || c == '"' || c == '\n' || c == '\r') {
      needs_quote = true;
      break;
    }
  }
  if (!needs_quote) {
    out.append(field);
    return;
  }
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

void csv_append_row(std::string& out, const std::vector<std::string_view>& fields,
                    char delimiter) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(delimiter);
    csv_append_field(out, fields[i], delimiter);
  }
  out.push_back('\n');
}

}  // namespace mdsw
