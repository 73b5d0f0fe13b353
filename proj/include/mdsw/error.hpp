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
#include <stdexcept>
#include <string>

namespace mdsw {

/// Fatal error categories. These map 1:1 onto the C API status codes and
/// onto CLI exit codes.
enum class Errc {
  Ok = 0,
  InvalidArgument = 1,
  SpecError = 2,
  ArchiveUnreadable = 3,
  HeaderMismatch = 4,
  EncodingError = 5,
  ParseError = 6,
  IoError = 7,
  Internal = 8,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, std::string msg) { throw Error(code, std::move(msg)); }

// Record-level parse diagnostics. Parsers called once per row return these
// instead of throwing; malformed data is an expected input, not a fault.
enum class ParseErrc : std::uint8_t {
  None = 0,
  MalformedCode,
  MalformedRegistration,
  UnknownClassDigit,
  EmptyInput,
  BadCheckDigit,
  BadDate,
  NotFourteenDigits,
  MalformedUdi,
  OriginUndetermined,
};

const char* parse_errc_name(ParseErrc e);

template <typename T>
struct Parsed {
  T value{};
  ParseErrc error = ParseErrc::None;

  bool ok() const { return error == ParseErrc::None; }
  explicit operator bool() const { return ok(); }

  static Parsed failure(ParseErrc e) {
    Parsed p;
    p.error = e;
    return p;
  }
  static Parsed success(T v) {
    Parsed p;
    p.value = std::move(v);
    return p;
  }
};

}  // namespace mdsw
